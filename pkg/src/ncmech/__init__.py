"""Doubled-variable mechanics for nonconservative systems."""

__version__ = "0.1.0"
