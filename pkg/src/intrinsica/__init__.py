"""Removability and thinness experiments for planar obstacle sets."""

__version__ = "0.1.0"
