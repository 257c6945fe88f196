"""Discretized oscillatory integral operators and their norm decay.

Operators act on complex grid functions over a midpoint-rule box; the
kernel is evaluated pairwise and never assumed to have structure beyond
smoothness, so application is a dense quadrature sum.  The public
semantics are matrix-free; as a pure optimization the norm estimators
materialize the kernel matrix once per (kernel, grid) when it fits a
memory budget, since power iteration re-reads the same kernel dozens of
times.

Two kernel families are provided: a generic amplitude/phase pair with an
explicit oscillation scale, and the rescaled dyadic family living on a
unit annulus whose oscillation scale is 2^(j beta).  Resolution is
policed by a sampled bound on the phase increment per grid cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import GroupContext, relative_arrays
from .norms import (
    PhaseSpec,
    QuasiNormSpec,
    evaluate_arrays,
    norm_gradient_arrays,
)

DEFAULT_MATRIX_BUDGET = 3.6e9  # bytes


class NyquistError(RuntimeError):
    """Raised when a grid cannot resolve the requested oscillation."""

    def __init__(self, msg, max_feasible=None):
        super().__init__(msg)
        self.max_feasible = max_feasible


# -- smooth cutoffs ------------------------------------------------------------


def smooth_step(r):
    """C-infinity step: 1 on (-inf, 1/2], 0 on [1, inf), monotone between."""
    r = np.asarray(r, dtype=float)
    u = np.clip((r - 0.5) * 2.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        g = np.where(u > 0.0, np.exp(-1.0 / np.where(u > 0.0, u, 1.0)), 0.0)
        gc = np.where(u < 1.0, np.exp(-1.0 / np.where(u < 1.0, 1.0 - u, 1.0)), 0.0)
    return gc / (g + gc)


def theta_cutoff(r):
    """Dyadic bump theta(r) = step(r/2) - step(r), supported in [1/2, 2].

    The family theta(2^j r), j >= 0, telescopes to step(r/2), hence sums
    to 1 exactly for 0 < r <= 1.
    """
    r = np.asarray(r, dtype=float)
    return smooth_step(r / 2.0) - smooth_step(r)


def dyadic_weight(j: int, r):
    return theta_cutoff((2.0**j) * r)


def smooth_bump(r, lo: float, hi: float, margin: float = 0.15):
    """Smooth window of r supported in [lo, hi], equal to 1 well inside."""
    r = np.asarray(r, dtype=float)
    w = hi - lo
    up = smooth_step((lo + margin * w - r) / (margin * w) * 0.5 + 0.5)
    down = smooth_step((r - hi + margin * w) / (margin * w) * 0.5 + 0.5)
    return up * down


# -- grid ----------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Midpoint-rule tensor grid on a centered box."""

    dim: int
    n_points: int
    half_widths: tuple

    def __post_init__(self):
        if self.n_points < 4:
            raise ValueError("need at least 4 points per axis")
        hw = tuple(float(h) for h in self.half_widths)
        if len(hw) != self.dim:
            raise ValueError("one half-width per axis required")
        object.__setattr__(self, "half_widths", hw)

    def axes(self):
        return [
            -h + (np.arange(self.n_points) + 0.5) * (2.0 * h / self.n_points)
            for h in self.half_widths
        ]

    def steps(self) -> np.ndarray:
        return np.array([2.0 * h / self.n_points for h in self.half_widths])

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.steps()))

    @property
    def size(self) -> int:
        return self.n_points**self.dim

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])

    def with_points(self, n_points: int) -> "GridSpec":
        return GridSpec(self.dim, n_points, self.half_widths)


def group_grid(ctx: GroupContext, n_points: int, x_half: float, t_half: float):
    return GridSpec(
        ctx.dim, n_points, tuple([x_half] * (2 * ctx.n) + [t_half])
    )


# -- kernels ---------------------------------------------------------------------


@dataclass(frozen=True)
class GenericKernel:
    """Kernel Psi(p,q) exp(i lam Phi(p,q)) on point arrays of shape (..., dim).

    phase and amplitude map (P, Q) broadcast-wise to real arrays; the
    optional phase_gradient(P, Q) -> (..., dim) array (gradient in Q) is
    used by the resolution guard when present.
    """

    lam: float
    phase: Callable
    amplitude: Callable
    phase_gradient: Optional[Callable] = None

    def oscillation_scale(self) -> float:
        return self.lam

    def evaluate(self, P, Q):
        amp = np.asarray(self.amplitude(P, Q), dtype=float)
        mask = amp != 0.0
        if not np.any(mask):
            return np.zeros(amp.shape, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ph = self.lam * np.asarray(self.phase(P, Q), dtype=float)
        return np.where(mask, amp * np.exp(1j * np.where(mask, ph, 0.0)), 0.0)


@dataclass(frozen=True)
class DyadicKernel:
    """Rescaled dyadic kernel on the unit annulus of the chosen quasi-norm.

    K_j(q^-1 p) = 2^(j alpha) theta(rho) rho^(-2n-2-alpha) exp(i 2^(j beta) rho^-beta).
    """

    ctx: GroupContext
    j: int
    alpha: float
    beta: float
    norm: QuasiNormSpec
    cutoff: Callable = theta_cutoff

    def oscillation_scale(self) -> float:
        return 2.0 ** (self.j * self.beta)

    def _rho(self, P, Q):
        n = self.ctx.n
        zx, zt = relative_arrays(self.ctx, Q[..., : 2 * n], Q[..., -1],
                                 P[..., : 2 * n], P[..., -1])
        return evaluate_arrays(self.norm, zx, zt)

    def evaluate(self, P, Q):
        rho = self._rho(P, Q)
        cut = self.cutoff(rho)
        mask = cut != 0.0
        rho_safe = np.where(mask, rho, 1.0)
        n = self.ctx.n
        amp = (
            2.0 ** (self.j * self.alpha)
            * cut
            * rho_safe ** (-(2 * n + 2) - self.alpha)
        )
        ph = self.oscillation_scale() * rho_safe ** (-self.beta)
        return np.where(mask, amp * np.exp(1j * ph), 0.0)


def displacement_phase(ctx: GroupContext, spec: QuasiNormSpec, beta: float):
    """Two-point phase Phi(p, q) = rho(q^-1 p)^(-beta) and its q-gradient."""
    phase_spec = PhaseSpec(spec, beta)
    n = ctx.n

    def phi(P, Q):
        zx, zt = relative_arrays(ctx, Q[..., : 2 * n], Q[..., -1],
                                 P[..., : 2 * n], P[..., -1])
        return evaluate_arrays(spec, zx, zt) ** (-beta)

    def grad_q(P, Q):
        from .core import pairing_matrix

        zx, zt = relative_arrays(ctx, Q[..., : 2 * n], Q[..., -1],
                                 P[..., : 2 * n], P[..., -1])
        rho = evaluate_arrays(spec, zx, zt)
        g = norm_gradient_arrays(spec, zx, zt)
        fac = -beta * rho ** (-beta - 1.0)
        J = pairing_matrix(ctx)
        twist = 2.0 * ctx.a * (P[..., : 2 * n] @ J.T)  # d z_t / d q_x
        out = np.empty(np.broadcast_shapes(P.shape, Q.shape))
        out[..., : 2 * n] = fac[..., None] * (
            -g[..., : 2 * n] + twist * g[..., -1:]
        )
        out[..., -1] = fac * (-g[..., -1])
        return out

    return phi, grad_q, phase_spec


def annulus_amplitude(
    ctx: GroupContext,
    spec: QuasiNormSpec,
    lo: float = 0.75,
    hi: float = 2.0,
    window_radii: Optional[Sequence[float]] = None,
):
    """Smooth bump of the displacement quasi-norm, windowed in p and q.

    window_radii (length 2n+1) confine both arguments to a centered
    smooth box so the amplitude is compactly supported inside any grid
    box that exceeds the radii.
    """
    n = ctx.n

    def window(P):
        if window_radii is None:
            return 1.0
        r2 = sum(
            (P[..., i] / window_radii[i]) ** 2 for i in range(2 * n + 1)
        )
        return smooth_step(np.sqrt(r2) * 0.75)

    def amp(P, Q):
        zx, zt = relative_arrays(ctx, Q[..., : 2 * n], Q[..., -1],
                                 P[..., : 2 * n], P[..., -1])
        rho = evaluate_arrays(spec, zx, zt)
        return smooth_bump(rho, lo, hi) * window(P) * window(Q)

    return amp


# -- resolution guard ------------------------------------------------------------


def max_phase_increment(
    kernel, grid: GridSpec, samples: int = 4096, seed: int = 7
) -> float:
    """Sampled max over cells of |oscillation phase change per grid step|.

    Uses the analytic phase gradient when the kernel provides one,
    otherwise symmetric differences at one grid step; only pairs where
    the kernel amplitude is nonzero count.
    """
    rng = np.random.default_rng(seed)
    pts = grid.points()
    M = len(pts)
    ii = rng.integers(0, M, samples)
    kk = rng.integers(0, M, samples)
    P, Q = pts[ii], pts[kk]
    mag = np.abs(kernel.evaluate(P, Q))
    mask = mag > 1e-6 * (np.max(mag) if np.max(mag) > 0 else 1.0)
    if not np.any(mask):
        return 0.0
    P, Q = P[mask], Q[mask]
    h = grid.steps()
    lam = kernel.oscillation_scale()
    if isinstance(kernel, GenericKernel):
        if kernel.phase_gradient is not None:
            g = kernel.phase_gradient(P, Q)
            return float(lam * np.max(np.abs(g) * h))
        worst = 0.0
        for ax in range(grid.dim):
            dq = np.zeros(grid.dim)
            dq[ax] = 0.5 * h[ax]
            dphi = kernel.phase(P, Q + dq) - kernel.phase(P, Q - dq)
            worst = max(worst, lam * float(np.max(np.abs(dphi))))
        return worst
    # dyadic: differentiate rho^(-beta) through the displacement
    phi, grad_q, _ = displacement_phase(kernel.ctx, kernel.norm, kernel.beta)
    g = grad_q(P, Q)
    return float(lam * np.max(np.abs(g) * h))


def check_resolution(kernel, grid: GridSpec, limit: float = math.pi / 2.0):
    """Raise NyquistError when the sampled phase increment exceeds `limit`."""
    inc = max_phase_increment(kernel, grid)
    if inc > limit:
        lam = kernel.oscillation_scale()
        feasible = lam * limit / inc
        if isinstance(kernel, DyadicKernel):
            jmax = math.floor(math.log2(feasible) / kernel.beta) if feasible >= 1 else -1
            raise NyquistError(
                f"grid {grid.n_points}^{grid.dim} under-resolves oscillation "
                f"scale {lam:g} (increment {inc:.2f} rad/cell > {limit:.2f}); "
                f"max feasible j = {jmax}",
                max_feasible=jmax,
            )
        raise NyquistError(
            f"grid {grid.n_points}^{grid.dim} under-resolves lambda={lam:g} "
            f"(increment {inc:.2f} rad/cell > {limit:.2f}); "
            f"max feasible lambda = {feasible:.3g}",
            max_feasible=feasible,
        )
    return inc


# -- application and operator norms ----------------------------------------------


def _kernel_matrix(kernel, grid: GridSpec, budget: float = DEFAULT_MATRIX_BUDGET):
    M = grid.size
    bytes_c128 = M * M * 16.0
    if bytes_c128 <= budget:
        dtype = np.complex128
    elif bytes_c128 / 2.0 <= budget:
        dtype = np.complex64
    else:
        return None
    pts = grid.points()
    K = np.empty((M, M), dtype=dtype)
    chunk = max(1, int(2**24 // M))
    for i0 in range(0, M, chunk):
        i1 = min(i0 + chunk, M)
        K[i0:i1] = kernel.evaluate(pts[i0:i1, None, :], pts[None, :, :])
    return K


def apply_kernel(kernel, grid: GridSpec, f, adjoint: bool = False, chunk=None):
    """Quadrature application (T f)(p) = sum_q K(p,q) f(q) dV, matrix-free."""
    f = np.asarray(f, dtype=complex).ravel()
    M = grid.size
    if f.size != M:
        raise ValueError(f"grid function has {f.size} values, grid has {M}")
    pts = grid.points()
    out = np.zeros(M, dtype=complex)
    chunk = chunk or max(1, int(2**23 // M))
    for i0 in range(0, M, chunk):
        i1 = min(i0 + chunk, M)
        block = kernel.evaluate(pts[i0:i1, None, :], pts[None, :, :])
        if adjoint:
            out += np.conj(block).T @ f[i0:i1]
        else:
            out[i0:i1] = block @ f
    return out * grid.cell_volume


@dataclass(frozen=True)
class NormEstimate:
    value: float
    iterations: int
    converged: bool


def operator_norm(
    kernel,
    grid: GridSpec,
    iterations: int = 120,
    seed: int = 0,
    tol: float = 1e-6,
    enforce_resolution: bool = True,
    resolution_limit: float = math.pi / 2.0,
    matrix_budget: float = DEFAULT_MATRIX_BUDGET,
) -> NormEstimate:
    """Largest singular value by power iteration on adjoint(T) T.

    The start vector is seeded; convergence is declared when successive
    singular-value estimates agree to `tol` relatively.
    """
    if enforce_resolution:
        check_resolution(kernel, grid, resolution_limit)
    K = _kernel_matrix(kernel, grid, matrix_budget)
    vol = grid.cell_volume
    if K is not None:
        fwd = lambda v: K @ v
        adj = lambda v: np.conj(np.conj(v) @ K)  # K^H v without copying K
    else:
        fwd = lambda v: apply_kernel(kernel, grid, v) / vol
        adj = lambda v: apply_kernel(kernel, grid, v, adjoint=True) / vol

    rng = np.random.default_rng(seed)
    v = rng.normal(size=grid.size) + 1j * rng.normal(size=grid.size)
    v /= np.linalg.norm(v)
    sigma = 0.0
    converged = False
    it = 0
    for it in range(1, iterations + 1):
        u = fwd(v)
        w = adj(u)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return NormEstimate(0.0, it, True)
        new_sigma = math.sqrt(nw)
        v = w / nw
        if it > 1 and abs(new_sigma - sigma) <= tol * max(new_sigma, 1e-300):
            sigma = new_sigma
            converged = True
            break
        sigma = new_sigma
    return NormEstimate(float(sigma * vol), it, converged)


def composition_norm(
    kernel_left,
    kernel_right,
    grid: GridSpec,
    iterations: int = 120,
    seed: int = 0,
    tol: float = 1e-6,
    enforce_resolution: bool = True,
    resolution_limit: float = math.pi / 2.0,
    matrix_budget: float = DEFAULT_MATRIX_BUDGET,
) -> NormEstimate:
    """Norm of adjoint(T_left) T_right by power iteration."""
    if enforce_resolution:
        check_resolution(kernel_left, grid, resolution_limit)
        check_resolution(kernel_right, grid, resolution_limit)
    KL = _kernel_matrix(kernel_left, grid, matrix_budget / 2)
    KR = _kernel_matrix(kernel_right, grid, matrix_budget / 2)
    vol = grid.cell_volume

    def C(v):  # adjoint(T_l) T_r
        if KR is not None:
            u = KR @ v
        else:
            u = apply_kernel(kernel_right, grid, v) / vol
        if KL is not None:
            return np.conj(np.conj(u) @ KL)
        return apply_kernel(kernel_left, grid, u, adjoint=True) / vol

    def Cadj(v):
        if KL is not None:
            u = KL @ v
        else:
            u = apply_kernel(kernel_left, grid, v) / vol
        if KR is not None:
            return np.conj(np.conj(u) @ KR)
        return apply_kernel(kernel_right, grid, u, adjoint=True) / vol

    rng = np.random.default_rng(seed)
    v = rng.normal(size=grid.size) + 1j * rng.normal(size=grid.size)
    v /= np.linalg.norm(v)
    sigma = 0.0
    converged = False
    it = 0
    for it in range(1, iterations + 1):
        u = C(v)
        w = Cadj(u)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return NormEstimate(0.0, it, True)
        new_sigma = math.sqrt(nw)
        v = w / nw
        if it > 1 and abs(new_sigma - sigma) <= tol * max(new_sigma, 1e-300):
            sigma = new_sigma
            converged = True
            break
        sigma = new_sigma
    return NormEstimate(float(sigma * vol * vol), it, converged)


# -- decay series ------------------------------------------------------------------


@dataclass(frozen=True)
class DecayPoint:
    scale: float
    norm: float
    coarse_norm: float
    grid_converged: bool
    power_converged: bool


@dataclass(frozen=True)
class DecaySeries:
    points: tuple
    slope: float
    intercept: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "points": [
                {
                    "scale": p.scale,
                    "norm": p.norm,
                    "coarse_norm": p.coarse_norm,
                    "grid_converged": p.grid_converged,
                    "power_converged": p.power_converged,
                }
                for p in self.points
            ],
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
        }


def decay_fit(points: Sequence[DecayPoint]) -> DecaySeries:
    """Least-squares slope of log(norm) against log(scale)."""
    if len(points) < 3:
        raise ValueError("decay fit needs at least 3 scales")
    if not all(p.grid_converged for p in points):
        bad = [p.scale for p in points if not p.grid_converged]
        raise ValueError(f"scales {bad} are not grid-converged; refine the grid")
    lx = np.log([p.scale for p in points])
    ly = np.log([p.norm for p in points])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return DecaySeries(tuple(points), float(slope), float(intercept), resid)


def grid_converged_norm(
    make_kernel,
    grid: GridSpec,
    seed: int = 0,
    convergence_factor: float = 1.5,
    rel_tol: float = 0.05,
    **norm_kwargs,
):
    """Norm on `grid` plus the coarse companion check at N/convergence_factor.

    The convergence flag records whether refining the companion grid to N
    moved the estimate by under rel_tol, i.e. the increment of the final
    refinement step.
    """
    coarse_n = max(4, int(round(grid.n_points / convergence_factor)))
    fine = operator_norm(make_kernel(), grid, seed=seed, **norm_kwargs)
    coarse = operator_norm(
        make_kernel(), grid.with_points(coarse_n), seed=seed, **norm_kwargs
    )
    ok = abs(fine.value - coarse.value) <= rel_tol * max(fine.value, 1e-300)
    return fine, coarse, ok


# -- standard experiments ----------------------------------------------------------


def unit_annulus_grid(ctx: GroupContext, n_points: int) -> GridSpec:
    """Box covering the unit annulus of any of the quasi-norms plus margin."""
    return group_grid(ctx, n_points, 2.1, 4.3)


def euclidean_1d_decay(
    lams=(8.0, 16.0, 32.0, 64.0), n_points: int = 256, seed: int = 0,
    iterations: int = 120,
) -> DecaySeries:
    """Sanity model: phase x*y with bump amplitudes on the line."""

    def phase(P, Q):
        return P[..., 0] * Q[..., 0]

    def grad(P, Q):
        return P[..., 0:1] + 0.0 * Q[..., 0:1]

    def amp(P, Q):
        return smooth_bump(P[..., 0], -1.0, 1.0) * smooth_bump(Q[..., 0], -1.0, 1.0)

    grid = GridSpec(1, n_points, (1.2,))
    pts = []
    for lam in lams:
        kern = GenericKernel(lam, phase, amp, grad)
        fine, coarse, ok = grid_converged_norm(
            lambda kern=kern: kern, grid, seed=seed,
            enforce_resolution=False, iterations=iterations,
        )
        pts.append(DecayPoint(lam, fine.value, coarse.value, ok, fine.converged))
    return decay_fit(pts)


def heisenberg_decay_experiment(
    ctx: GroupContext,
    spec: QuasiNormSpec,
    beta: float,
    lams=(8.0, 16.0, 32.0),
    n_points: int = 24,
    seed: int = 0,
    iterations: int = 60,
    resolution_limit: Optional[float] = None,
    annulus=(0.75, 2.0),
):
    """Norms of the two-point-phase operator across oscillation scales.

    Amplitude: smooth annulus window of the displacement quasi-norm times
    centered windows in both arguments (compact support inside the box).
    Returns (points, diagnostics); fit with decay_fit.
    """
    phase, grad, _ = displacement_phase(ctx, spec, beta)
    window = tuple([1.3] * (2 * ctx.n) + [2.6])
    amp = annulus_amplitude(ctx, spec, lo=annulus[0], hi=annulus[1],
                            window_radii=window)
    grid = group_grid(ctx, n_points, 1.35 * window[0], 1.35 * window[-1])
    pts, diags = [], []
    for lam in lams:
        kern = GenericKernel(lam, phase, amp, grad)
        if resolution_limit is not None:
            check_resolution(kern, grid, resolution_limit)
        inc = max_phase_increment(kern, grid)
        fine, coarse, ok = grid_converged_norm(
            lambda kern=kern: kern, grid, seed=seed,
            enforce_resolution=False, iterations=iterations,
        )
        pts.append(DecayPoint(lam, fine.value, coarse.value, ok, fine.converged))
        diags.append({"lam": lam, "max_phase_increment": inc})
    return pts, diags


def dyadic_norm_experiment(
    ctx: GroupContext,
    spec: QuasiNormSpec,
    alpha: float,
    beta: float,
    js=(0, 1, 2, 3),
    n_points: int = 18,
    seed: int = 0,
    iterations: int = 80,
    resolution_limit: Optional[float] = None,
):
    """Rescaled dyadic operator norms for a list of scales j."""
    grid = unit_annulus_grid(ctx, n_points)
    out = []
    for j in js:
        kern = DyadicKernel(ctx, j, alpha, beta, spec)
        if resolution_limit is not None:
            check_resolution(kern, grid, resolution_limit)
        inc = max_phase_increment(kern, grid)
        fine, coarse, ok = grid_converged_norm(
            lambda kern=kern: kern, grid, seed=seed,
            enforce_resolution=False, iterations=iterations,
        )
        out.append(
            {
                "j": j,
                "norm": fine.value,
                "coarse_norm": coarse.value,
                "grid_converged": ok,
                "power_converged": fine.converged,
                "max_phase_increment": inc,
            }
        )
    return out


def orthogonality_trend(
    ctx: GroupContext,
    spec: QuasiNormSpec,
    alpha: float,
    beta: float,
    base_j: int = 0,
    gaps=(0, 1, 2),
    n_points: int = 14,
    seed: int = 0,
    iterations: int = 80,
):
    """Composition norms |T_base^* T_(base+gap)| and their log2 decrements."""
    grid = unit_annulus_grid(ctx, n_points)
    kb = DyadicKernel(ctx, base_j, alpha, beta, spec)
    rows = []
    for gap in gaps:
        kj = DyadicKernel(ctx, base_j + gap, alpha, beta, spec)
        est = composition_norm(
            kb, kj, grid, seed=seed, iterations=iterations,
            enforce_resolution=False,
        )
        nb = operator_norm(kb, grid, seed=seed, iterations=iterations,
                           enforce_resolution=False)
        nj = operator_norm(kj, grid, seed=seed, iterations=iterations,
                           enforce_resolution=False)
        rows.append(
            {
                "gap": gap,
                "composition_norm": est.value,
                "norm_product": nb.value * nj.value,
                "normalized": est.value / (nb.value * nj.value),
            }
        )
    decs = [
        math.log2(rows[i]["composition_norm"] / rows[i + 1]["composition_norm"])
        for i in range(len(rows) - 1)
    ]
    return rows, decs


def kernel_envelope(
    kernel: GenericKernel,
    grid: GridSpec,
    x,
    z,
    lams,
    displacement: float,
):
    """Composed-kernel magnitude |K_lam(x,z)| against 1 + lam * displacement.

    K_lam(x,z) = integral of e^{i lam (Phi(x,y)-Phi(z,y))} Psi(x,y)
    conj(Psi(z,y)) dy over the grid; returns per-lambda magnitudes and the
    log-log slope against (1 + lam * displacement).
    """
    pts = grid.points()
    x = np.asarray(x, dtype=float)[None, :]
    z = np.asarray(z, dtype=float)[None, :]
    base_phase_x = kernel.phase(x, pts)
    base_phase_z = kernel.phase(z, pts)
    amp = kernel.amplitude(x, pts) * np.conj(kernel.amplitude(z, pts))
    mags = []
    for lam in lams:
        integrand = amp * np.exp(1j * lam * (base_phase_x - base_phase_z))
        mags.append(abs(np.sum(integrand) * grid.cell_volume))
    lx = np.log1p(np.asarray(lams) * displacement)
    ly = np.log(np.maximum(mags, 1e-300))
    slope = float(np.polyfit(lx, ly, 1)[0]) if len(lams) >= 2 else float("nan")
    return {"lams": list(lams), "magnitudes": mags, "slope": slope}
