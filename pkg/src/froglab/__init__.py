"""Frog model on Z^d with Bernoulli initial configuration."""

__version__ = "0.1.0"
