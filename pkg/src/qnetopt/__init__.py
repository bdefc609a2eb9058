"""qnetopt: optimal routing for networks of M/M/inf queues."""

__version__ = "0.1.0"
