# Settings, logging, errors and application lifecycle
