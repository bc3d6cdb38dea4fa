"""Weakly model-dependent pricing of bonus certificates and barrier reverse convertibles."""

__version__ = "0.1.0"
