"""Exhaustive checks of torsion-theory calculus over finite commutative rings."""

__version__ = "0.1.0"
