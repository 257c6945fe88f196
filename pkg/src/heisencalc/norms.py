"""Quasi-norms on the group and the oscillation phase rho^(-beta).

Four homogeneous quasi-norms are provided: the max norm (equivalence
tests only; not smooth), the Koranyi norm (|x|^4 + t^2)^(1/4), the
Minkowski functional of the Euclidean unit ball extended by nonisotropic
homogeneity, and the quartic coordinate norm (sum x_i^4 + t^2)^(1/4).
Each is degree-1 homogeneous under (x,t) -> (dx, d^2 t).  An optional
scale b evaluates the base formula at (bx, bt), which keeps homogeneity
and matches rescaled-kernel conventions.

The smooth formulas are written generically so they evaluate on floats,
numpy arrays, and Jet2 inputs alike; the jet path is what feeds the
mixed-Hessian oracle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import GroupPoint
from .jets import sqrt as _sqrt


class QuasiNorm(enum.Enum):
    BOX = "box"
    KORANYI = "koranyi"
    MINKOWSKI = "minkowski"
    QUARTIC = "quartic"


_NORM_ALIASES = {
    "box": QuasiNorm.BOX,
    "rho0": QuasiNorm.BOX,
    "koranyi": QuasiNorm.KORANYI,
    "rho1": QuasiNorm.KORANYI,
    "minkowski": QuasiNorm.MINKOWSKI,
    "rho2": QuasiNorm.MINKOWSKI,
    "quartic": QuasiNorm.QUARTIC,
    "rho3": QuasiNorm.QUARTIC,
}

SMOOTH_NORMS = (QuasiNorm.KORANYI, QuasiNorm.MINKOWSKI, QuasiNorm.QUARTIC)


def parse_norm(name: str) -> QuasiNorm:
    try:
        return _NORM_ALIASES[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown quasi-norm {name!r}; expected one of {sorted(_NORM_ALIASES)}"
        ) from None


@dataclass(frozen=True)
class QuasiNormSpec:
    kind: QuasiNorm
    b: float = 1.0

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError(f"scale b must be positive, got {self.b}")

    def require_smooth(self):
        if self.kind not in SMOOTH_NORMS:
            raise ValueError(f"{self.kind} is not smooth away from the origin")


@dataclass(frozen=True)
class PhaseSpec:
    """Phase exponent data: Phi(p) = evaluate(norm, p)^(-beta)."""

    norm: QuasiNormSpec
    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")


# -- generic cores (floats, arrays, or jets) ---------------------------------


def sum_squares(xs):
    out = xs[0] * xs[0]
    for c in xs[1:]:
        out = out + c * c
    return out


def phi2_core(xs, t):
    """Positive root of phi^2 - |x|^2 phi - t^2 = 0 (the squared Minkowski norm)."""
    s = sum_squares(xs)
    return (s + _sqrt(s * s + 4.0 * (t * t))) * 0.5


def norm_core(kind: QuasiNorm, xs, t):
    """Quasi-norm at unit scale from coordinate list xs and central t."""
    if kind is QuasiNorm.KORANYI:
        s = sum_squares(xs)
        return (s * s + t * t) ** 0.25
    if kind is QuasiNorm.QUARTIC:
        q = xs[0] ** 4.0
        for c in xs[1:]:
            q = q + c**4.0
        return (q + t * t) ** 0.25
    if kind is QuasiNorm.MINKOWSKI:
        return _sqrt(phi2_core(xs, t))
    if kind is QuasiNorm.BOX:
        return np.maximum.reduce([np.abs(c) for c in xs] + [np.sqrt(np.abs(t))])
    raise ValueError(f"unknown norm kind {kind}")


def _split(x):
    x = np.asarray(x, dtype=float)
    return [x[..., i] for i in range(x.shape[-1])]


# -- public operations --------------------------------------------------------


def evaluate_arrays(spec: QuasiNormSpec, x, t):
    """Quasi-norm of points given as arrays x (..., 2n) and t (...)."""
    b = spec.b
    xs = [b * c for c in _split(x)]
    return norm_core(spec.kind, xs, b * np.asarray(t, dtype=float))


def evaluate(spec: QuasiNormSpec, p: GroupPoint) -> float:
    return float(evaluate_arrays(spec, p.x, p.t))


def phi2(p: GroupPoint) -> float:
    """Squared Minkowski norm of a nonzero point, via the explicit quadratic root."""
    if not np.any(p.x) and p.t == 0.0:
        raise ValueError("phi2 has no positive root at the origin")
    return float(phi2_core(_split(p.x), p.t))


def phase_arrays(spec: PhaseSpec, x, t):
    return evaluate_arrays(spec.norm, x, t) ** (-spec.beta)


def phase(spec: PhaseSpec, p: GroupPoint) -> float:
    """Real oscillation exponent rho(bx, bt)^(-beta); poles at the origin."""
    if not np.any(p.x) and p.t == 0.0:
        raise ValueError("phase has a pole at the origin")
    return float(phase_arrays(spec, p.x, p.t))


def phi_scalar(kind: QuasiNorm, p: GroupPoint) -> float:
    """Auxiliary scalar at unit scale: rho1^4, rho2^2, or rho3^4 by kind."""
    xs = _split(p.x)
    t = p.t
    if kind is QuasiNorm.KORANYI:
        s = sum_squares(xs)
        return float(s * s + t * t)
    if kind is QuasiNorm.MINKOWSKI:
        return float(phi2_core(xs, t))
    if kind is QuasiNorm.QUARTIC:
        return float(sum(c**4 for c in xs) + t * t)
    raise ValueError("phi_scalar is defined for the smooth norm kinds only")


def norm_gradient_arrays(spec: QuasiNormSpec, x, t):
    """Euclidean gradient (d/dx_1..d/dx_2n, d/dt) of the quasi-norm.

    Analytic a.e. formulas; for the max norm the gradient of the active
    coordinate is reported (ties broken toward the first maximizer).
    Returns an array of shape (..., 2n+1).
    """
    b = spec.b
    x = b * np.asarray(x, dtype=float)
    t = b * np.asarray(t, dtype=float)
    kind = spec.kind
    if kind is QuasiNorm.KORANYI:
        rho = norm_core(kind, _split(x), t)
        r3 = rho**3
        gx = (np.sum(x * x, axis=-1)[..., None] * x) / r3[..., None]
        gt = t / (2.0 * r3)
    elif kind is QuasiNorm.QUARTIC:
        rho = norm_core(kind, _split(x), t)
        r3 = rho**3
        gx = x**3 / r3[..., None]
        gt = t / (2.0 * r3)
    elif kind is QuasiNorm.MINKOWSKI:
        phi = phi2_core(_split(x), t)
        denom = 2.0 * phi - np.sum(x * x, axis=-1)
        dphi_x = 2.0 * phi[..., None] * x / denom[..., None]
        dphi_t = 2.0 * t / denom
        inv2r = 0.5 / np.sqrt(phi)
        gx = dphi_x * inv2r[..., None]
        gt = dphi_t * inv2r
    elif kind is QuasiNorm.BOX:
        cand = np.concatenate(
            [np.abs(x), np.sqrt(np.abs(t))[..., None]], axis=-1
        )
        k = np.argmax(cand, axis=-1)
        gx = np.zeros_like(x)
        flat_k = np.ravel(k)
        gxf = gx.reshape(-1, x.shape[-1])
        xf = x.reshape(-1, x.shape[-1])
        tf = np.ravel(np.broadcast_to(t, k.shape)).astype(float)
        gtf = np.zeros_like(tf)
        for i, ki in enumerate(flat_k):
            if ki < x.shape[-1]:
                gxf[i, ki] = np.sign(xf[i, ki])
            else:
                gtf[i] = np.sign(tf[i]) / (2.0 * np.sqrt(np.abs(tf[i])))
        gx = gxf.reshape(x.shape)
        gt = gtf.reshape(np.shape(k))
    else:
        raise ValueError(f"unknown norm kind {kind}")
    return b * np.concatenate([gx, np.asarray(gt)[..., None]], axis=-1)
