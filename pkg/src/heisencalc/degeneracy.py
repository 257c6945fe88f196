"""Parameter-space analysis of the mixed-Hessian non-degeneracy condition.

Certification works on Hadamard-normalized determinants (raw values span
ten-plus orders of magnitude over an annulus), sampling the region with
a Kronecker low-discrepancy sequence plus seeded jitter and sharpening
candidate minima by shrinking coordinate descent.  Reports are assembled
in sorted order so identical seeds give bit-identical output.

Also here: the critical twist threshold for the Koranyi norm, the
discriminant of its radial quartic, the degeneracy paraboloid slopes,
and the sampled gradient-separation / annulus-dichotomy estimates that
back the almost-orthogonality reduction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import GroupContext, GroupPoint, Variant
from .fields import mixed_hessian_det_normalized_batch
from .norms import (
    PhaseSpec,
    QuasiNorm,
    QuasiNormSpec,
    evaluate_arrays,
    norm_gradient_arrays,
)

DEFAULT_TOL = 1e-7
CERTIFY_MARGIN = 10.0


# -- closed-form parameter functions ------------------------------------------


def critical_twist_squared(beta: float) -> float:
    """Threshold on a^2 below which the Koranyi mixed Hessian never degenerates.

    (beta+2)/2 * (2 beta + 5 + sqrt((2 beta + 5)^2 - 9)); equals 9 at beta = 0
    and grows monotonically.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    s = 2.0 * beta + 5.0
    return 0.5 * (beta + 2.0) * (s + math.sqrt(s * s - 9.0))


def discriminant(a: float, beta: float) -> float:
    """Discriminant of the radial quartic f1 as a quadratic in |x|^4/t^2."""
    a2 = a * a
    return 4.0 * a2 * a2 - 4.0 * (beta + 2.0) * (2.0 * beta + 5.0) * a2 + 9.0 * (
        beta + 2.0
    ) ** 2


def paraboloid_slopes(a: float, beta: float) -> tuple:
    """Positive slopes s with f1 = 0 on |x|^4 = s t^2; empty below threshold.

    Roots (2a^2 - 3(beta+2) +- sqrt(disc)) / (4(beta+1)); a double root at
    the critical threshold is reported once.
    """
    disc = discriminant(a, beta)
    scale = max(abs(discriminant(0.0, beta)), 1.0)
    if disc < 0.0:
        if disc > -1e-9 * scale:
            disc = 0.0
        else:
            return ()
    root = math.sqrt(disc)
    base = 2.0 * a * a - 3.0 * (beta + 2.0)
    denom = 4.0 * (beta + 1.0)
    lo, hi = (base - root) / denom, (base + root) / denom
    slopes = [s for s in (lo, hi) if s > 0.0]
    if len(slopes) == 2 and abs(hi - lo) <= 1e-9 * max(abs(hi), 1.0):
        slopes = [0.5 * (lo + hi)]
    return tuple(slopes)


# -- sampling ------------------------------------------------------------------


class RegionKind(enum.Enum):
    UNIT_QUASI_SPHERE = "unit-quasi-sphere"
    ANNULUS = "annulus"


@dataclass(frozen=True)
class Region:
    kind: RegionKind
    lo: float = 1.0
    hi: float = 1.0

    def __post_init__(self):
        if self.kind is RegionKind.ANNULUS and not self.lo < self.hi:
            raise ValueError("annulus needs lo < hi")
        if self.lo <= 0:
            raise ValueError("region radii must be positive")

    @staticmethod
    def unit_sphere() -> "Region":
        return Region(RegionKind.UNIT_QUASI_SPHERE)

    @staticmethod
    def annulus(lo: float, hi: float) -> "Region":
        return Region(RegionKind.ANNULUS, lo, hi)


@dataclass(frozen=True)
class SamplerSpec:
    seed: int = 0
    count: int = 512
    region: Region = field(default_factory=lambda: Region.annulus(0.5, 2.0))
    refine: bool = True

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("sample count must be >= 1")


def _kronecker_sequence(count: int, dim: int) -> np.ndarray:
    # additive recurrence with the generalized golden ratio; a classic
    # low-discrepancy filler for the hypercube
    phi = 2.0
    for _ in range(40):
        phi = (1.0 + phi) ** (1.0 / (dim + 1))
    alpha = (1.0 / phi) ** np.arange(1, dim + 1)
    idx = np.arange(1, count + 1)[:, None]
    return np.mod(0.5 + alpha[None, :] * idx, 1.0)


def _uniform_to_sphere(u: np.ndarray) -> np.ndarray:
    # Box-Muller on consecutive coordinate pairs, then radial projection
    m, d = u.shape
    k = (d + 1) // 2
    g = np.empty((m, 2 * k))
    eps = 1e-12
    for i in range(k):
        r = np.sqrt(-2.0 * np.log(np.clip(u[:, (2 * i) % d], eps, 1 - eps)))
        th = 2.0 * np.pi * u[:, (2 * i + 1) % d]
        g[:, 2 * i] = r * np.cos(th)
        g[:, 2 * i + 1] = r * np.sin(th)
    g = g[:, :d]
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_region(spec: QuasiNormSpec, sampler: SamplerSpec, n: int):
    """Deterministic points (X, T) with quasi-norm in the requested region."""
    d = 2 * n + 1
    rng = np.random.default_rng(sampler.seed)
    u = _kronecker_sequence(sampler.count, d + 1)
    u = np.mod(u + rng.uniform(0.0, 1.0 / max(sampler.count, 2), u.shape), 1.0)
    w = _uniform_to_sphere(u[:, :d])
    x, t = w[:, :-1], w[:, -1]
    rho = evaluate_arrays(spec, x, t)
    if sampler.region.kind is RegionKind.UNIT_QUASI_SPHERE:
        r = np.ones(sampler.count)
    else:
        lo, hi = sampler.region.lo, sampler.region.hi
        r = lo * (hi / lo) ** u[:, d]
    delta = r / rho
    return x * delta[:, None], t * delta**2


# -- certification --------------------------------------------------------------


class CertVerdict(enum.Enum):
    CERTIFIED = "Certified"
    DEGENERACY_FOUND = "DegeneracyFound"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CertReport:
    n: int
    a: float
    b: float
    beta: float
    norm: str
    variant: str
    sample_count: int
    tol: float
    min_normalized_det: float
    argmin: tuple
    verdict: "CertVerdict"
    near_zero_points: tuple

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "beta": self.beta,
            "norm": self.norm,
            "variant": self.variant,
            "sample_count": self.sample_count,
            "tol": self.tol,
            "min_normalized_det": self.min_normalized_det,
            "argmin": list(self.argmin),
            "verdict": self.verdict.value,
            "near_zero_points": [list(p) for p in self.near_zero_points],
        }


def _ndet_single(ctx, phase, coords):
    v = mixed_hessian_det_normalized_batch(
        ctx, phase, np.asarray(coords[:-1])[None, :], np.asarray([coords[-1]])
    )
    return float(np.abs(v[0]))


def _coordinate_descent(ctx, phase, coords, rounds=50, h0=0.08, h_min=1e-10):
    """Shrinking coordinate descent on |normalized det| from a start point."""
    coords = np.asarray(coords, dtype=float).copy()
    best = _ndet_single(ctx, phase, coords)
    h = h0
    for _ in range(rounds):
        improved = False
        for i in range(len(coords)):
            for sgn in (1.0, -1.0):
                trial = coords.copy()
                trial[i] += sgn * h
                v = _ndet_single(ctx, phase, trial)
                if v < best:
                    best, coords, improved = v, trial, True
        if not improved:
            h *= 0.5
            if h < h_min:
                break
    return coords, best


def reduce_scale(ctx: GroupContext, spec: QuasiNormSpec):
    """Certification-equivalent data at unit scale: (a, b) -> (a/b, 1)."""
    if spec.b == 1.0:
        return ctx, spec
    return (
        GroupContext(ctx.n, ctx.a / spec.b, ctx.variant),
        QuasiNormSpec(spec.kind, 1.0),
    )


def certify(
    ctx: GroupContext,
    spec: QuasiNormSpec,
    beta: float,
    sampler: SamplerSpec = SamplerSpec(),
    tol: float = DEFAULT_TOL,
    refine_candidates: int = 8,
) -> CertReport:
    """Sampled non-degeneracy verdict for det(left right rho^-beta) != 0."""
    spec.require_smooth()
    a_orig, b_orig = ctx.a, spec.b
    rctx, rspec = reduce_scale(ctx, spec)
    phase = PhaseSpec(rspec, beta)
    X, T = sample_region(rspec, sampler, ctx.n)
    vals = np.abs(mixed_hessian_det_normalized_batch(rctx, phase, X, T))

    pts = np.column_stack([X, T])
    order = np.argsort(vals, kind="stable")
    near = []
    best_val = float(vals[order[0]])
    best_pt = pts[order[0]]
    if sampler.refine:
        for idx in order[: max(1, refine_candidates)]:
            c, v = _coordinate_descent(rctx, phase, pts[idx])
            if v < best_val:
                best_val, best_pt = v, c
            if v < tol:
                near.append(tuple(np.round(c, 12)))
    elif best_val < tol:
        near.append(tuple(np.round(best_pt, 12)))

    if best_val < tol:
        verdict = CertVerdict.DEGENERACY_FOUND
    elif best_val >= CERTIFY_MARGIN * tol:
        verdict = CertVerdict.CERTIFIED
    else:
        verdict = CertVerdict.INCONCLUSIVE
    return CertReport(
        n=ctx.n,
        a=a_orig,
        b=b_orig,
        beta=beta,
        norm=spec.kind.value,
        variant=ctx.variant.value,
        sample_count=sampler.count,
        tol=tol,
        min_normalized_det=best_val,
        argmin=tuple(np.round(best_pt, 12)),
        verdict=verdict,
        near_zero_points=tuple(sorted(set(near))),
    )


def zero_scan(
    ctx: GroupContext,
    spec: QuasiNormSpec,
    beta: float,
    resolution: int = 16,
    region: Region = None,
    tol: float = DEFAULT_TOL,
    coarse_tol: float = 1e-3,
    max_refine: int = 48,
):
    """Grid scan for the degeneracy locus; returns refined near-zero points.

    The annulus is gridded in quasi-spherical coordinates (directions on
    the Euclidean sphere scaled onto quasi-spheres, times a geometric
    radius ladder); grid points whose normalized determinant dips below
    the coarse threshold are polished by coordinate descent and kept if
    they reach tol.  Clustered duplicates are merged; representatives
    come back sorted by coordinates.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    spec.require_smooth()
    if region is None:
        region = Region.annulus(0.5, 2.0)
    rctx, rspec = reduce_scale(ctx, spec)
    phase = PhaseSpec(rspec, beta)
    d = 2 * ctx.n + 1

    # direction grid: lat-long style product grid on the Euclidean sphere,
    # plus the coordinate axes so codimension-2 loci on them are not missed
    def sphere_grid(dim, res):
        if dim == 3:
            th = np.linspace(0.05, np.pi - 0.05, res)
            ph = np.linspace(0.0, 2 * np.pi, 2 * res, endpoint=False)
            TH, PH = np.meshgrid(th, ph, indexing="ij")
            dirs = np.column_stack(
                [
                    (np.sin(TH) * np.cos(PH)).ravel(),
                    (np.sin(TH) * np.sin(PH)).ravel(),
                    np.cos(TH).ravel(),
                ]
            )
        else:
            # arbitrary dimension: deterministic low-discrepancy directions
            u = _kronecker_sequence(res ** (dim - 1), dim)
            dirs = _uniform_to_sphere(u)
        axes = np.concatenate([np.eye(dim), -np.eye(dim)])
        return np.concatenate([dirs, axes])

    dirs = sphere_grid(d, resolution)
    if region.kind is RegionKind.UNIT_QUASI_SPHERE:
        radii = np.array([1.0])
    else:
        radii = region.lo * (region.hi / region.lo) ** np.linspace(
            0.0, 1.0, resolution
        )
    X0, T0 = dirs[:, :-1], dirs[:, -1]
    rho = evaluate_arrays(rspec, X0, T0)
    candidates = []
    for r in radii:
        delta = r / rho
        X, T = X0 * delta[:, None], T0 * delta**2
        vals = np.abs(mixed_hessian_det_normalized_batch(rctx, phase, X, T))
        for idx in np.nonzero(vals < coarse_tol)[0]:
            candidates.append((np.append(X[idx], T[idx]), float(vals[idx])))

    # pre-cluster raw grid candidates so descent runs once per cluster
    pre_radius = 2.0 / resolution
    seeds = []
    for c, v in sorted(candidates, key=lambda cv: cv[1]):
        if all(np.linalg.norm(c - s0) > pre_radius for s0, _ in seeds):
            seeds.append((c, v))
    seeds = seeds[:max_refine]

    found = []
    for c0, _ in seeds:
        c, v = _coordinate_descent(rctx, phase, c0, rounds=60)
        if v < tol:
            found.append((c, v))

    merge_radius = 0.5 / resolution
    reps = []
    for c, v in sorted(found, key=lambda cv: cv[1]):
        if all(np.linalg.norm(c - r0) > merge_radius for r0, _ in reps):
            reps.append((c, v))
    reps.sort(key=lambda cv: tuple(cv[0]))
    return [
        {"point": tuple(np.round(c, 12)), "normalized_det": v} for c, v in reps
    ]


# -- almost-orthogonality inputs -------------------------------------------------


@dataclass(frozen=True)
class InfimumReport:
    value: float
    argmin_base: tuple
    argmin_shift: tuple
    admissible_pairs: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmin_base": list(self.argmin_base),
            "argmin_shift": list(self.argmin_shift),
            "admissible_pairs": self.admissible_pairs,
        }


def gradient_separation(
    ctx: GroupContext,
    spec: QuasiNormSpec,
    beta: float,
    ratio: float = 4.0,
    sampler: SamplerSpec = SamplerSpec(),
    shift_range: tuple = (4.0, 32.0),
) -> InfimumReport:
    """Sampled infimum of |grad_(y,s)[rho(y,s)^-b - rho((x,t)(y,s))^-b]|.

    Pairs are admissible when the product point is at least `ratio` times
    farther from the identity than (y,s); the bound being probed is that
    the infimum stays positive in that separated regime.
    """
    if ratio <= 1.0:
        raise ValueError("ratio must exceed 1")
    spec.require_smooth()
    n = ctx.n
    base_sampler = SamplerSpec(
        seed=sampler.seed, count=sampler.count, region=Region.annulus(0.5, 2.0)
    )
    shift_sampler = SamplerSpec(
        seed=sampler.seed + 1,
        count=sampler.count,
        region=Region.annulus(*shift_range),
    )
    Y, S = sample_region(spec, base_sampler, n)
    Xs, Ts = sample_region(spec, shift_sampler, n)

    # product (x,t)(y,s) and the chain rule of its coordinates in (y,s)
    from .core import pairing_matrix, symplectic_pairing

    Px = Xs + Y
    Pt = S + Ts - 2.0 * ctx.a * symplectic_pairing(ctx, Xs, Y)
    rho_y = evaluate_arrays(spec, Y, S)
    rho_p = evaluate_arrays(spec, Px, Pt)
    admissible = rho_p >= ratio * rho_y
    if not np.any(admissible):
        raise ValueError("no admissible pairs; widen the shift range")

    g_y = norm_gradient_arrays(spec, Y, S)
    g_p = norm_gradient_arrays(spec, Px, Pt)
    J = pairing_matrix(ctx)
    twist = -2.0 * ctx.a * (Xs @ J)  # d(product t)/dy
    grad = np.empty_like(g_y)
    fac_y = -beta * rho_y ** (-beta - 1.0)
    fac_p = -beta * rho_p ** (-beta - 1.0)
    grad[:, : 2 * n] = fac_y[:, None] * g_y[:, : 2 * n] - fac_p[:, None] * (
        g_p[:, : 2 * n] + g_p[:, -1:] * twist
    )
    grad[:, -1] = fac_y * g_y[:, -1] - fac_p * g_p[:, -1]
    mags = np.linalg.norm(grad, axis=1)
    mags = np.where(admissible, mags, np.inf)
    k = int(np.argmin(mags))
    return InfimumReport(
        value=float(mags[k]),
        argmin_base=tuple(np.round(np.append(Y[k], S[k]), 12)),
        argmin_shift=tuple(np.round(np.append(Xs[k], Ts[k]), 12)),
        admissible_pairs=int(np.sum(admissible)),
    )


@dataclass(frozen=True)
class DichotomyReport:
    c0: float
    branch_x_fraction: float
    sample_count: int

    def to_dict(self) -> dict:
        return {
            "c0": self.c0,
            "branch_x_fraction": self.branch_x_fraction,
            "sample_count": self.sample_count,
        }


def annulus_dichotomy(
    spec: QuasiNormSpec,
    sampler: SamplerSpec = SamplerSpec(),
    c: float = 2.0,
    n: int = 1,
    delta_min: float = 1.0 / 64.0,
) -> DichotomyReport:
    """Smallest c0 covering the two-branch derivative dichotomy on samples.

    Each sample is a point p and a scale delta with dilate(p, delta) in the
    annulus [1/c, c]; either some |d rho/d x_j| sits in [1/c0, c0], or
    |d rho/d t| sits in [delta/c0, c0 delta].  The reported c0 is the max
    over samples of the per-sample best branch constant.
    """
    if c < 1.0:
        raise ValueError("c must be >= 1")
    rng = np.random.default_rng(sampler.seed)
    m = sampler.count
    delta = np.exp(rng.uniform(np.log(delta_min), 0.0, m))
    rho_target = np.exp(rng.uniform(np.log(1.0 / c), np.log(c), m)) / delta
    u = _uniform_to_sphere(rng.uniform(0.0, 1.0, (m, 2 * n + 1)))
    x, t = u[:, :-1], u[:, -1]
    rho_u = evaluate_arrays(spec, x, t)
    fac = rho_target / rho_u
    X, T = x * fac[:, None], t * fac**2

    g = norm_gradient_arrays(spec, X, T)
    gx = np.abs(g[:, :-1])
    gt = np.abs(g[:, -1])

    def branch_const(v):  # max(v, 1/v) with 0 -> inf
        with np.errstate(divide="ignore"):
            return np.where(v > 0, np.maximum(v, 1.0 / np.where(v > 0, v, 1.0)), np.inf)

    c0_x = np.min(branch_const(gx), axis=1)
    c0_t = branch_const(gt / delta)
    per_point = np.minimum(c0_x, c0_t)
    return DichotomyReport(
        c0=float(np.max(per_point)),
        branch_x_fraction=float(np.mean(c0_x <= c0_t)),
        sample_count=m,
    )
