"""Franchised quantum money simulator."""

__version__ = "0.1.0"
