"""Numerical laboratory for Allen-Cahn phase transitions on capped-cylinder spheres."""

__version__ = "0.1.0"
