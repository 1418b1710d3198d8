"""Coordinate-based shot interpolation for cross-spread land surveys."""
__version__ = "0.1.0"
