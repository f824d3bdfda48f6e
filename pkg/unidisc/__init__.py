"""Univalence toolkit for analytic and harmonic maps of the unit disc"""

__version__ = "0.3.0"
