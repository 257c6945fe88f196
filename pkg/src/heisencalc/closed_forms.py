"""Explicit mixed-Hessian determinant formulas for the phase rho^(-beta).

Each function returns det(left_j right_k Phi) as a directly evaluable
expression, lifted from a bracket identity of the form

    det(phi A - mu B),   A = left_j right_k phi,  B = left_j phi right_k phi

by the chain-rule prefactor that converts the bracket determinant into
the determinant of the Hessian of Phi = phi^(-e).  Two exponent families
occur: quartic scalars (phi = rho^4, e = beta/4) and quadratic ones
(phi = rho^2, e = beta/2); the lift is centralized so each exponent
appears exactly once.

These formulas are treated as hypotheses: the test suite checks every
one against the jet-based Hessian oracle value-for-value, and the
distributed versions are the ones that survive that comparison.
Relative to their published antecedents a few carry corrections (a
restored beta-dependence in the Minkowski bracket, restored homogeneity
factors and twist coefficients in the polarized cases, twist-squared
factors in the quartic bracket); the AD equality tests are the evidence.
"""

from __future__ import annotations

import enum

import numpy as np

from .core import GroupPoint
from .norms import QuasiNorm, phi2_core


class ClosedFormCase(enum.Enum):
    KORANYI_FULL = "koranyi-full"
    MINKOWSKI_FULL = "minkowski-full"
    QUARTIC_N1 = "quartic-n1"
    POLARIZED_KORANYI_N1 = "polarized-koranyi-n1"
    POLARIZED_MINKOWSKI_N1 = "polarized-minkowski-n1"
    EUCLIDEAN_KORANYI = "euclidean-koranyi"
    EUCLIDEAN_MINKOWSKI = "euclidean-minkowski"


def _as_xt(x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return x, t


def _check_nonzero(x, t):
    if np.any((np.sum(x * x, axis=-1) == 0.0) & (t == 0.0)):
        raise ValueError("closed forms are singular at the origin")


def det_prefactor(family: str, n: int, beta: float, phi):
    """Chain-rule factor turning the bracket determinant into det Hess(Phi).

    quartic family:   Phi = phi^(-beta/4), bracket multiplier (beta+4)/4
    quadratic family: Phi = phi^(-beta/2), bracket multiplier (beta+2)/2
    """
    d = 2 * n + 1
    if family == "quartic":
        return (-beta / 4.0) ** d * phi ** (-(beta + 8.0) * d / 4.0)
    if family == "quadratic":
        return (-beta / 2.0) ** d * phi ** (-(beta + 4.0) * d / 2.0)
    raise ValueError(f"unknown prefactor family {family!r}")


# -- Koranyi -----------------------------------------------------------------


def f1(x_sq, t, a: float, beta: float):
    """Radial quartic form controlling the Koranyi Hessian sign.

    Quadratic in (|x|^4, t^2): positive-definite on the quadrant exactly
    when a^2 stays below the critical threshold.
    """
    x4 = np.asarray(x_sq, dtype=float) ** 2
    t2 = np.asarray(t, dtype=float) ** 2
    return (
        2.0 * (beta + 1.0) * x4**2
        + (3.0 * (beta + 2.0) - 2.0 * a * a) * x4 * t2
        + (beta + 2.0) * a * a * t2**2
    )


def closed_det_koranyi_arrays(n: int, a: float, beta: float, x, t):
    x, t = _as_xt(x, t)
    _check_nonzero(x, t)
    x_sq = np.sum(x * x, axis=-1)
    phi = x_sq**2 + t * t
    bracket = -((4.0 * phi) ** (2 * n)) * (x_sq**2 + a * a * t * t) ** (
        n - 1
    ) * f1(x_sq, t, a, beta)
    return det_prefactor("quartic", n, beta, phi) * bracket


def closed_det_koranyi(n: int, a: float, beta: float, p: GroupPoint) -> float:
    return float(closed_det_koranyi_arrays(n, a, beta, p.x, p.t))


# -- Minkowski ---------------------------------------------------------------


def aux_factor_arrays(x, t):
    """The auxiliary factor from implicit differentiation of the ball norm.

    Computed as phi^-2 |x|^2 + 2 phi^-3 t^2; equal to phi^-1 + phi^-3 t^2
    by the defining equation (both forms are exercised in tests).
    """
    x, t = _as_xt(x, t)
    xs = [x[..., i] for i in range(x.shape[-1])]
    phi = phi2_core(xs, t)
    x_sq = np.sum(x * x, axis=-1)
    return x_sq / phi**2 + 2.0 * t * t / phi**3


def aux_factor(p: GroupPoint) -> float:
    if not np.any(p.x) and p.t == 0.0:
        raise ValueError("auxiliary factor is singular at the origin")
    return float(aux_factor_arrays(p.x, p.t))


def f2(x, t, a: float, beta: float):
    """Bracket controlling the Minkowski Hessian sign.

    (beta+2) A phi [phi^3 |x|^2 + w t^2] - w |x|^4  with w = phi^2 + 4a^2 t^2.
    At beta = 0 this expands to
    A phi^4 |x|^2 + 4 phi^2 t^2 (1-a^2) + 16 a^2 t^4 + 4 a^2 phi^-2 t^6,
    manifestly positive for a^2 <= 1; the beta-layer is nonnegative, so
    positivity for a^2 <= 1 holds for every beta >= 0.
    """
    x, t = _as_xt(x, t)
    xs = [x[..., i] for i in range(x.shape[-1])]
    phi = phi2_core(xs, t)
    x_sq = np.sum(x * x, axis=-1)
    A = aux_factor_arrays(x, t)
    w = phi**2 + 4.0 * a * a * t * t
    return (beta + 2.0) * A * phi * (phi**3 * x_sq + w * t * t) - w * x_sq**2


def closed_det_minkowski_arrays(n: int, a: float, beta: float, x, t):
    x, t = _as_xt(x, t)
    _check_nonzero(x, t)
    xs = [x[..., i] for i in range(x.shape[-1])]
    phi = phi2_core(xs, t)
    A = aux_factor_arrays(x, t)
    w = phi**2 + 4.0 * a * a * t * t
    d = 2 * n + 1
    bracket = (
        -(2.0**d)
        * A ** (-(2 * n + 3))
        * phi ** (-(2 * n + 5))
        * w ** (n - 1)
        * f2(x, t, a, beta)
    )
    return det_prefactor("quadratic", n, beta, phi) * bracket


def closed_det_minkowski(n: int, a: float, beta: float, p: GroupPoint) -> float:
    return float(closed_det_minkowski_arrays(n, a, beta, p.x, p.t))


# -- quartic coordinate norm (n = 1) -----------------------------------------


def closed_det_quartic_n1_arrays(a: float, beta: float, x, t):
    x, t = _as_xt(x, t)
    if x.shape[-1] != 2:
        raise ValueError("the quartic-norm closed form requires n = 1")
    _check_nonzero(x, t)
    x1, x2 = x[..., 0], x[..., 1]
    phi = x1**4 + x2**4 + t * t
    a2, t2 = a * a, t * t
    bracket = (
        6.0 * (beta + 1.0) * phi * x1**2 * x2**2
        + (beta + 2.0) * a2 * t2**2
        + 3.0 * (beta + 4.0) * x1**2 * x2**2 * t2
        - 2.0 * a2 * (x1**4 + x2**4) * t2
    )
    return det_prefactor("quartic", 1, beta, phi) * (-16.0) * phi**2 * bracket


def closed_det_quartic_n1(a: float, beta: float, p: GroupPoint) -> float:
    return float(closed_det_quartic_n1_arrays(a, beta, p.x, p.t))


# -- polarized variant (n = 1) ------------------------------------------------


def closed_det_polarized_arrays(kind: QuasiNorm, a: float, beta: float, x, t):
    x, t = _as_xt(x, t)
    if x.shape[-1] != 2:
        raise ValueError("polarized closed forms require n = 1")
    _check_nonzero(x, t)
    x1, x2 = x[..., 0], x[..., 1]
    x_sq = x1 * x1 + x2 * x2
    if kind is QuasiNorm.KORANYI:
        phi = x_sq**2 + t * t
        bracket = (
            2.0 * (beta + 1.0) * x_sq**4
            + 3.0 * (beta + 2.0) * x_sq**2 * t * t
            + 2.0 * (beta + 2.0) * a * phi * x1 * x2 * t
        )
        return det_prefactor("quartic", 1, beta, phi) * (-16.0) * phi**2 * bracket
    if kind is QuasiNorm.MINKOWSKI:
        phi = phi2_core([x1, x2], t)
        A = aux_factor_arrays(x, t)
        cross = a * x1 * x2 * t
        bracket = beta * A * phi * (phi**2 + 2.0 * cross) + (
            2.0 * A * phi**3 + 4.0 * A * phi * cross - x_sq**2
        )
        return (
            det_prefactor("quadratic", 1, beta, phi)
            * (-8.0)
            * A ** (-5)
            * phi ** (-5)
            * bracket
        )
    raise ValueError("polarized closed forms exist for Koranyi and Minkowski")


def closed_det_polarized(
    kind: QuasiNorm, a: float, beta: float, p: GroupPoint
) -> float:
    return float(closed_det_polarized_arrays(kind, a, beta, p.x, p.t))


# -- Euclidean a = 0 ----------------------------------------------------------


def closed_det_euclidean_arrays(kind: QuasiNorm, n: int, beta: float, x, t, a=0.0):
    if a != 0.0:
        raise ValueError("the Euclidean closed forms require a = 0")
    x, t = _as_xt(x, t)
    _check_nonzero(x, t)
    x_sq = np.sum(x * x, axis=-1)
    d = 2 * n + 1
    if kind is QuasiNorm.KORANYI:
        phi = x_sq**2 + t * t
        bracket = (
            -((4.0 * phi) ** (2 * n))
            * x_sq ** (2 * n)
            * (2.0 * (beta + 1.0) * x_sq**2 + 3.0 * (beta + 2.0) * t * t)
        )
        return det_prefactor("quartic", n, beta, phi) * bracket
    if kind is QuasiNorm.MINKOWSKI:
        xs = [x[..., i] for i in range(x.shape[-1])]
        phi = phi2_core(xs, t)
        A = aux_factor_arrays(x, t)
        bracket = (
            -(2.0**d)
            * A ** (-(2 * n + 3))
            * phi ** (-5.0)
            * (beta * A * phi**3 + A * phi**2 * x_sq + 4.0 * t * t)
        )
        return det_prefactor("quadratic", n, beta, phi) * bracket
    raise ValueError("Euclidean closed forms exist for Koranyi and Minkowski")


def closed_det_euclidean(
    kind: QuasiNorm, n: int, beta: float, p: GroupPoint, a=0.0
) -> float:
    return float(closed_det_euclidean_arrays(kind, n, beta, p.x, p.t, a))


# -- case dispatch -------------------------------------------------------------


def case_admissible(case: ClosedFormCase, n: int, a: float) -> bool:
    """Whether (n, a) is in the case's documented applicability range."""
    if case in (ClosedFormCase.KORANYI_FULL, ClosedFormCase.MINKOWSKI_FULL):
        return n >= 1
    if case in (
        ClosedFormCase.QUARTIC_N1,
        ClosedFormCase.POLARIZED_KORANYI_N1,
        ClosedFormCase.POLARIZED_MINKOWSKI_N1,
    ):
        return n == 1
    return a == 0.0


def evaluate_case(case: ClosedFormCase, n: int, a: float, beta: float, x, t):
    """Closed determinant for any case, on coordinate arrays."""
    if case is ClosedFormCase.KORANYI_FULL:
        return closed_det_koranyi_arrays(n, a, beta, x, t)
    if case is ClosedFormCase.MINKOWSKI_FULL:
        return closed_det_minkowski_arrays(n, a, beta, x, t)
    if case is ClosedFormCase.QUARTIC_N1:
        return closed_det_quartic_n1_arrays(a, beta, x, t)
    if case is ClosedFormCase.POLARIZED_KORANYI_N1:
        return closed_det_polarized_arrays(QuasiNorm.KORANYI, a, beta, x, t)
    if case is ClosedFormCase.POLARIZED_MINKOWSKI_N1:
        return closed_det_polarized_arrays(QuasiNorm.MINKOWSKI, a, beta, x, t)
    if case is ClosedFormCase.EUCLIDEAN_KORANYI:
        return closed_det_euclidean_arrays(QuasiNorm.KORANYI, n, beta, x, t, a)
    if case is ClosedFormCase.EUCLIDEAN_MINKOWSKI:
        return closed_det_euclidean_arrays(QuasiNorm.MINKOWSKI, n, beta, x, t, a)
    raise ValueError(f"unknown case {case}")


CASE_SETUP = {
    ClosedFormCase.KORANYI_FULL: (QuasiNorm.KORANYI, "full"),
    ClosedFormCase.MINKOWSKI_FULL: (QuasiNorm.MINKOWSKI, "full"),
    ClosedFormCase.QUARTIC_N1: (QuasiNorm.QUARTIC, "full"),
    ClosedFormCase.POLARIZED_KORANYI_N1: (QuasiNorm.KORANYI, "polarized"),
    ClosedFormCase.POLARIZED_MINKOWSKI_N1: (QuasiNorm.MINKOWSKI, "polarized"),
    ClosedFormCase.EUCLIDEAN_KORANYI: (QuasiNorm.KORANYI, "full"),
    ClosedFormCase.EUCLIDEAN_MINKOWSKI: (QuasiNorm.MINKOWSKI, "full"),
}
