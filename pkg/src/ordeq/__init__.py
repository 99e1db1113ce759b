"""Equivalence of terms over {0, +, x -> w x} interpreted in the ordinals."""

__version__ = "0.1.0"
