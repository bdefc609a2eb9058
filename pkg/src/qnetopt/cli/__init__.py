"""qnetopt command-line interface."""
