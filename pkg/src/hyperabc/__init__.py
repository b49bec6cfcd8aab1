"""Hyperproperty verification for polynomial systems with augmented barrier certificates."""

__version__ = "0.1.0"
