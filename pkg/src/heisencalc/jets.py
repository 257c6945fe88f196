"""Second-order forward jets (hyperdual numbers) for mixed derivatives.

A Jet2 tracks a value together with two seeded directional derivatives
and the single mixed second coefficient d12 = d^2/(ds dr).  Evaluating a
smooth scalar expression on Jet2 inputs therefore yields one mixed
second derivative exactly (to roundoff), with no truncation error.
Payloads may be floats or numpy arrays, so one evaluation differentiates
a whole batch of sample points at once.
"""

from __future__ import annotations

import numpy as np


class Jet2:
    __slots__ = ("val", "d1", "d2", "d12")

    def __init__(self, val, d1=0.0, d2=0.0, d12=0.0):
        self.val = val
        self.d1 = d1
        self.d2 = d2
        self.d12 = d12

    def __repr__(self):
        return f"Jet2({self.val}, d1={self.d1}, d2={self.d2}, d12={self.d12})"

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(
                self.val + other.val,
                self.d1 + other.d1,
                self.d2 + other.d2,
                self.d12 + other.d12,
            )
        return Jet2(self.val + other, self.d1, self.d2, self.d12)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.val, -self.d1, -self.d2, -self.d12)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet2) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(
                self.val * other.val,
                self.d1 * other.val + self.val * other.d1,
                self.d2 * other.val + self.val * other.d2,
                self.d12 * other.val
                + self.d1 * other.d2
                + self.d2 * other.d1
                + self.val * other.d12,
            )
        return Jet2(
            self.val * other, self.d1 * other, self.d2 * other, self.d12 * other
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other ** (-1.0)
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self ** (-1.0) * other

    # -- smooth univariate composition --------------------------------------

    def _chain(self, f, df, d2f):
        """Compose with a scalar function given value/first/second at self.val."""
        return Jet2(
            f,
            df * self.d1,
            df * self.d2,
            df * self.d12 + d2f * self.d1 * self.d2,
        )

    def __pow__(self, e):
        v = self.val
        return self._chain(v**e, e * v ** (e - 1.0), e * (e - 1.0) * v ** (e - 2.0))

    def sqrt(self):
        r = np.sqrt(self.val)
        return self._chain(r, 0.5 / r, -0.25 / (r * self.val))


def sqrt(v):
    """Square root that accepts Jet2, floats, and arrays."""
    return v.sqrt() if isinstance(v, Jet2) else np.sqrt(v)


def value(v):
    """Underlying value of a Jet2, or the argument itself."""
    return v.val if isinstance(v, Jet2) else v
