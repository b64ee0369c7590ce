"""Real-time sales assist service and benchmark harness."""

__version__ = "0.1.0"
