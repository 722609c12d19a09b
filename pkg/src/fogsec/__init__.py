"""Pairing-based security protocols for a fog-layered IIoT architecture."""

__version__ = "0.1.0"
