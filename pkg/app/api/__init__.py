# CLI commands and HTTP routes
