"""Second-order jets (f, f', f'') with exact product, quotient and chain rules

Components are complex scalars or numpy arrays of matching shape, so one jet
can carry a whole evaluation grid.
"""

from dataclasses import dataclass
from typing import Any, Union

import numpy as np

Scalar = Union[complex, float, int]


def _lift(value: Any) -> "Jet2":
    if isinstance(value, Jet2):
        return value
    return Jet2.constant(value)


@dataclass(frozen=True)
class Jet2:
    """Value of a map together with its first and second derivative"""

    f: Any
    df: Any
    d2f: Any

    @classmethod
    def variable(cls, z: Any) -> "Jet2":
        """Jet of the identity map at z"""
        z = np.asarray(z, dtype=complex)
        return cls(z, np.ones_like(z), np.zeros_like(z))

    @classmethod
    def constant(cls, c: Any) -> "Jet2":
        c = np.asarray(c, dtype=complex)
        zero = np.zeros_like(c)
        return cls(c, zero, zero)

    def __add__(self, other: Any) -> "Jet2":
        other = _lift(other)
        return Jet2(self.f + other.f, self.df + other.df, self.d2f + other.d2f)

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.f, -self.df, -self.d2f)

    def __sub__(self, other: Any) -> "Jet2":
        return self + (-_lift(other))

    def __rsub__(self, other: Any) -> "Jet2":
        return _lift(other) - self

    def __mul__(self, other: Any) -> "Jet2":
        if not isinstance(other, Jet2):
            c = np.asarray(other, dtype=complex)
            return Jet2(self.f * c, self.df * c, self.d2f * c)
        return Jet2(
            self.f * other.f,
            self.df * other.f + self.f * other.df,
            self.d2f * other.f + 2 * self.df * other.df + self.f * other.d2f,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Jet2":
        other = _lift(other)
        q = self.f / other.f
        dq = (self.df - q * other.df) / other.f
        d2q = (self.d2f - 2 * dq * other.df - q * other.d2f) / other.f
        return Jet2(q, dq, d2q)

    def __rtruediv__(self, other: Any) -> "Jet2":
        return _lift(other) / self

    def chain(self, value: Any, first: Any, second: Any) -> "Jet2":
        """Jet of F(u) where u is this jet and (F, F', F'') are given at u"""
        return Jet2(
            value,
            first * self.df,
            second * self.df ** 2 + first * self.d2f,
        )

    def exp(self) -> "Jet2":
        e = np.exp(self.f)
        return self.chain(e, e, e)

    def power(self, p: Scalar) -> "Jet2":
        """Principal-branch power u**p; integer exponents stay exact"""
        if float(np.real(p)).is_integer() and np.imag(p) == 0:
            n = int(np.real(p))
            if n == 0:
                return Jet2.constant(np.ones_like(self.f))
            base = self.f
            value = base ** n
            first = n * base ** (n - 1)
            second = n * (n - 1) * base ** (n - 2) if n != 1 else np.zeros_like(base)
            return self.chain(value, first, second)
        value = np.power(self.f, p)
        first = p * np.power(self.f, p - 1)
        second = p * (p - 1) * np.power(self.f, p - 2)
        return self.chain(value, first, second)

    def shape(self):
        return np.shape(self.f)

    def item(self) -> "Jet2":
        """Collapse 0-d arrays into Python complex scalars"""
        return Jet2(complex(self.f), complex(self.df), complex(self.d2f))

    def to_dict(self) -> dict:
        return {
            "f": [float(np.real(self.f)), float(np.imag(self.f))],
            "df": [float(np.real(self.df)), float(np.imag(self.df))],
            "d2f": [float(np.real(self.d2f)), float(np.imag(self.d2f))],
        }
