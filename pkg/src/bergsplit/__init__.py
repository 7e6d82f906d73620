"""Additive splitting of Bergman-space functions across planar domains."""

__version__ = "0.1.0"
