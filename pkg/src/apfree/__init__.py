"""Progression-free sets in [1..N] and F_q^n: counting, constructions, extremal search."""

__version__ = "0.1.0"
