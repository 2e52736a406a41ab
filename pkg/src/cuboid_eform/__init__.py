"""Exact polynomial machinery for the E-form reduction of the perfect-cuboid equations."""
__version__ = "0.1.0"
