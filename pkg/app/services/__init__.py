# Numerical services: Fock spaces, structure functions, Phi families, verification
