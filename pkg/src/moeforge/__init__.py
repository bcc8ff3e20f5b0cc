"""Certified and simulated minimum-output-entropy additivity violation for random channels."""

__version__ = "0.1.0"
