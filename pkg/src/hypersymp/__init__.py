"""Hypersymplectic structures on double Lie groups built from affine-symplectic data."""

__version__ = "0.1.0"
