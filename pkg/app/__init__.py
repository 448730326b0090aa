# Composite quasiboson verification toolkit
