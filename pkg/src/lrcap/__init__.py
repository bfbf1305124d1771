"""Lieb-Robinson capacity bounds for spin-network communication channels."""

__version__ = "0.1.0"
