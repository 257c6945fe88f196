"""Heisenberg-type group algebra: points, twisted products, dilations.

The group lives on R^(2n+1) with coordinates (x_1..x_2n, t).  Two
multiplication variants are supported, differing only in the bilinear
pairing that twists the central coordinate: the full variant uses the
standard symplectic matrix, the polarized variant its upper-triangular
half.  Setting the twist parameter ``a = 0`` degenerates the product to
the abelian one; routines that are only meaningful in that Euclidean
situation (or only away from it) say so explicitly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Variant(enum.Enum):
    FULL = "full"
    POLARIZED = "polarized"


@dataclass(frozen=True)
class GroupContext:
    """Fixes the Lie structure: dimension n, twist a, multiplication variant."""

    n: int
    a: float
    variant: Variant = Variant.FULL

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    @property
    def dim(self) -> int:
        """Ambient dimension 2n+1."""
        return 2 * self.n + 1

    def require_polarized_n1(self):
        if self.variant is Variant.POLARIZED and self.n != 1:
            raise ValueError("polarized closed-form routines require n = 1")


@dataclass(frozen=True)
class GroupPoint:
    """A point (x, t) with x in R^2n and t the central coordinate."""

    x: np.ndarray
    t: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        x.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))

    def coords(self) -> np.ndarray:
        """Flat coordinates (x_1..x_2n, t)."""
        return np.append(self.x, self.t)

    @staticmethod
    def from_coords(c) -> "GroupPoint":
        c = np.asarray(c, dtype=float).reshape(-1)
        return GroupPoint(c[:-1], c[-1])


def identity(n: int) -> GroupPoint:
    return GroupPoint(np.zeros(2 * n), 0.0)


def pairing_matrix(ctx: GroupContext) -> np.ndarray:
    """The (2n x 2n) matrix J of the variant's bilinear pairing x^T J y."""
    n = ctx.n
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    if ctx.variant is Variant.FULL:
        J[n:, :n] = -np.eye(n)
    return J


def symplectic_pairing(ctx: GroupContext, x, y) -> float:
    """x^T J y for the full variant, x^T J_pol y for the polarized one.

    Vectorized over leading axes; the last axis must have length 2n.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = ctx.n
    if x.shape[-1] != 2 * n or y.shape[-1] != 2 * n:
        raise ValueError(
            f"pairing needs vectors of length {2 * n}, "
            f"got {x.shape[-1]} and {y.shape[-1]}"
        )
    if ctx.variant is Variant.FULL:
        out = np.sum(x[..., :n] * y[..., n:], axis=-1) - np.sum(
            x[..., n:] * y[..., :n], axis=-1
        )
    else:
        out = np.sum(x[..., :n] * y[..., n:], axis=-1)
    return out if out.ndim else float(out)


def _check_dim(ctx: GroupContext, p: GroupPoint):
    if p.x.shape[-1] != 2 * ctx.n:
        raise ValueError(
            f"point has x of length {p.x.shape[-1]}, context expects {2 * ctx.n}"
        )


def multiply(ctx: GroupContext, p: GroupPoint, q: GroupPoint) -> GroupPoint:
    """Group product (x,t)(y,s) = (x+y, s+t - 2a x^T J y)."""
    _check_dim(ctx, p)
    _check_dim(ctx, q)
    twist = 2.0 * ctx.a * symplectic_pairing(ctx, p.x, q.x)
    return GroupPoint(p.x + q.x, q.t + p.t - twist)


def inverse(p: GroupPoint) -> GroupPoint:
    """Coordinate negation (x,t) -> (-x, -t).

    This is the group inverse whenever the pairing is antisymmetric (the
    full variant, and the abelian a = 0 case).  The polarized pairing is
    not antisymmetric, so its inverse picks up a central correction; use
    group_inverse for code that must be correct in every variant.
    """
    return GroupPoint(-p.x, -p.t)


def group_inverse(ctx: GroupContext, p: GroupPoint) -> GroupPoint:
    """Two-sided group inverse (-x, -t - 2a x^T J x), any variant."""
    _check_dim(ctx, p)
    return GroupPoint(
        -p.x, -p.t - 2.0 * ctx.a * symplectic_pairing(ctx, p.x, p.x)
    )


def dilate(p: GroupPoint, delta: float) -> GroupPoint:
    """Nonisotropic dilation (x,t) -> (delta x, delta^2 t), a group automorphism."""
    if delta <= 0:
        raise ValueError(f"dilation factor must be positive, got {delta}")
    return GroupPoint(delta * p.x, delta * delta * p.t)


def relative(ctx: GroupContext, q: GroupPoint, p: GroupPoint) -> GroupPoint:
    """Kernel displacement q^{-1} p."""
    return multiply(ctx, group_inverse(ctx, q), p)


def relative_arrays(ctx, qx, qt, px, pt):
    """Displacement q^{-1} p on raw coordinate arrays, broadcasting.

    qx/px have the 2n coordinates on the last axis.  Used by the
    quadrature kernels, where constructing GroupPoint objects per pair
    would dominate the cost.
    """
    qx = np.asarray(qx, dtype=float)
    px = np.asarray(px, dtype=float)
    zx = px - qx
    # q^-1 p has central part pt - qt - 2a x^T J x(q) + 2a q^T J p.
    zt = (
        pt
        - qt
        + 2.0 * ctx.a * (symplectic_pairing(ctx, qx, px)
                         - symplectic_pairing(ctx, qx, qx))
    )
    return zx, zt
