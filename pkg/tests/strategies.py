"""Hypothesis strategies shared by the test modules"""

import math

import hypothesis.strategies as st


def disc_points(radius: float = 0.9):
    """Points of the disc |z| <= radius, uniform in polar coordinates"""
    return st.builds(
        lambda r, t: complex(r * math.cos(t), r * math.sin(t)),
        st.floats(0.0, radius, allow_nan=False, allow_infinity=False),
        st.floats(-math.pi, math.pi, allow_nan=False, allow_infinity=False),
    )


def real_points(bound: float = 0.99):
    return st.floats(-bound, bound, allow_nan=False, allow_infinity=False)
