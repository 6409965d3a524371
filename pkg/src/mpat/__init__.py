"""Forbidden patterns in d-dimensional 0-1 matrices: containment, constructions,
exact extremal / saturation / semisaturation values and classification."""

__version__ = "0.1.0"
