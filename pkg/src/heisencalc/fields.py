"""Left/right invariant vector fields and mixed second derivatives.

For the group law (x,t)(y,s) = (x+y, s+t - 2a x^T J y) the invariant
fields are first-order operators whose only position dependence sits in
the coefficient of d/dt:

    left  X_j = d/dx_j - 2a (J^T x)_j d/dt      (j = 1..2n)
    right X_j = d/dx_j - 2a (J x)_j d/dt
    X_{2n+1}  = d/dt                             (both families)

This derivation from the product applies verbatim to both pairing
variants, so the polarized fields come out of the same code path.

The mixed Hessian entry H[j,k] = (left_j right_k f)(p) is computed with
one hyperdual evaluation per entry: seed direction 1 with the left
coefficients at p, direction 2 with the right coefficients at p, and the
mixed slot with the derivative of the right coefficients along the left
direction.  That last seed is what makes H genuinely non-symmetric; the
outer field must see the position dependence of the inner one.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .core import GroupContext, GroupPoint, Variant, pairing_matrix
from .jets import Jet2
from .norms import PhaseSpec, norm_core

LEFT = "left"
RIGHT = "right"


def _check_field_setup(ctx: GroupContext, j: int):
    if ctx.variant is Variant.POLARIZED and ctx.n != 1:
        raise ValueError("polarized vector fields are implemented for n = 1 only")
    if not 1 <= j <= ctx.dim:
        raise ValueError(f"field index {j} out of range 1..{ctx.dim}")


def _twist_matrix(ctx: GroupContext, side: str) -> np.ndarray:
    # Row j holds the gradient of the d/dt coefficient of field j: -2a J^T x
    # for left fields, -2a J x for right fields.
    J = pairing_matrix(ctx)
    if side == LEFT:
        return -2.0 * ctx.a * J.T
    if side == RIGHT:
        return -2.0 * ctx.a * J
    raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")


def field_coefficients(ctx: GroupContext, side: str, j: int, p: GroupPoint):
    """Coefficient vector of the first-order operator at p (1-based index j)."""
    _check_field_setup(ctx, j)
    d = ctx.dim
    c = np.zeros(d)
    if j == d:
        c[-1] = 1.0
    else:
        c[j - 1] = 1.0
        c[-1] = _twist_matrix(ctx, side)[j - 1] @ p.x
    return c


def left_coefficients(ctx: GroupContext, j: int, p: GroupPoint):
    return field_coefficients(ctx, LEFT, j, p)


def right_coefficients(ctx: GroupContext, k: int, p: GroupPoint):
    return field_coefficients(ctx, RIGHT, k, p)


def apply_field(
    ctx: GroupContext, side: str, j: int, f: Callable, p: GroupPoint
) -> float:
    """(X_j f)(p) for the chosen invariant family, exact to jet precision."""
    c = field_coefficients(ctx, side, j, p)
    coords = [Jet2(v, d1=ci) for v, ci in zip(p.coords(), c)]
    return float(f(coords).d1)


def _hessian_entry_seeds(a: np.ndarray, twist_right_row, k: int, d: int):
    # Seeds for one entry: value slot is filled by the caller; here we
    # return (d1, d2, d12) triples per coordinate.
    d1 = a
    d2 = np.zeros(d)
    d12 = np.zeros(d)
    if k == d:
        d2[-1] = 1.0
    else:
        d2[k - 1] = 1.0
        # d/dt coefficient of right_k is linear in x, so its derivative
        # along the left direction is a constant contraction.
        d12[-1] = twist_right_row @ a[:-1]
    return d1, d2, d12


def mixed_hessian_batch(ctx: GroupContext, f: Callable, coords: Sequence):
    """Matrix (left_j right_k f) over a batch of points.

    coords is a sequence of 2n+1 equally-shaped arrays; the result has
    shape batch_shape + (2n+1, 2n+1).
    """
    _check_field_setup(ctx, 1)
    d = ctx.dim
    coords = [np.asarray(c, dtype=float) for c in coords]
    shape = np.broadcast_shapes(*[c.shape for c in coords])
    twist_l = _twist_matrix(ctx, LEFT)
    twist_r = _twist_matrix(ctx, RIGHT)
    x = np.stack(np.broadcast_arrays(*coords[:-1]), axis=-1)
    H = np.empty(shape + (d, d))
    for j in range(1, d + 1):
        a = np.zeros(shape + (d,))
        if j == d:
            a[..., -1] = 1.0
        else:
            a[..., j - 1] = 1.0
            a[..., -1] = x @ twist_l[j - 1]
        for k in range(1, d + 1):
            d2 = np.zeros(shape + (d,))
            d12 = np.zeros(shape + (d,))
            if k == d:
                d2[..., -1] = 1.0
            else:
                d2[..., k - 1] = 1.0
                d2[..., -1] = x @ twist_r[k - 1]
                d12[..., -1] = a[..., :-1] @ twist_r[k - 1]
            jet_coords = [
                Jet2(
                    np.broadcast_to(coords[i], shape),
                    a[..., i],
                    d2[..., i],
                    d12[..., i],
                )
                for i in range(d)
            ]
            H[..., j - 1, k - 1] = f(jet_coords).d12
    return H


def mixed_hessian(ctx: GroupContext, f: Callable, p: GroupPoint) -> np.ndarray:
    """(2n+1)x(2n+1) matrix of mixed left/right second derivatives at p."""
    return mixed_hessian_batch(ctx, f, list(p.coords()))


def phase_callable(spec: PhaseSpec) -> Callable:
    """The scalar function coords -> rho(b x, b t)^(-beta) on jets or arrays."""
    spec.norm.require_smooth()
    kind, b, beta = spec.norm.kind, spec.norm.b, spec.beta

    def f(coords):
        xs = [b * c for c in coords[:-1]]
        return norm_core(kind, xs, b * coords[-1]) ** (-beta)

    return f


def mixed_hessian_det(ctx: GroupContext, spec: PhaseSpec, p: GroupPoint) -> float:
    """det(left_j right_k Phi)(p) for the phase Phi = rho^(-beta)."""
    if not np.any(p.x) and p.t == 0.0:
        raise ValueError("the phase is singular at the origin")
    H = mixed_hessian(ctx, phase_callable(spec), p)
    return float(np.linalg.det(H))


def det_normalized(H: np.ndarray):
    """Determinant scaled by the product of row norms (Hadamard-normalized).

    Values lie in [-1, 1], making zero tests scale-free; a zero row
    yields 0.  Batched over leading axes.
    """
    row_norms = np.linalg.norm(H, axis=-1)
    scale = np.prod(row_norms, axis=-1)
    det = np.linalg.det(H)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(scale > 0.0, det / np.where(scale > 0.0, scale, 1.0), 0.0)
    return out if np.ndim(out) else float(out)


def mixed_hessian_det_normalized_batch(ctx, spec: PhaseSpec, X, T):
    """Hadamard-normalized phase Hessian determinants over sample arrays."""
    X = np.asarray(X, dtype=float)
    coords = [X[..., i] for i in range(X.shape[-1])] + [np.asarray(T, dtype=float)]
    H = mixed_hessian_batch(ctx, phase_callable(spec), coords)
    return det_normalized(H)
