"""Numerical lab for semiclassical perturbation bounds of Schroedinger dynamics."""

__version__ = "0.1.0"
