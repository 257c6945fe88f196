"""Command-line front end: certification, scans, Hessian checks, decay runs.

Every command emits a JSON document {"config", "results", "provenance"}
(stable key order) or a flat CSV projection, and encodes its verdict in
the exit code:

    0  success / Certified / all checks passed
    1  a check failed (e.g. closed form vs oracle mismatch)
    2  degeneracy found
    3  inconclusive
    64 usage error
    65 requested oscillation not resolvable on the requested grid
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import subprocess
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import closed_forms as cf
from . import degeneracy as dg
from . import fields, norms, oscillatory as osc
from .core import GroupContext, Variant

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_DEGENERACY = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64
EXIT_UNRESOLVABLE = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except Exception:
        pass
    return "unknown"


def _document(config: dict, results, tolerances: dict) -> dict:
    return {
        "config": config,
        "results": results,
        "provenance": {
            "seed": config.get("seed"),
            "git-describe": _git_describe(),
            "tolerances": tolerances,
        },
    }


def _emit(doc: dict, rows, header, fmt: str, path: Optional[str]):
    if fmt == "json":
        text = json.dumps(doc, sort_keys=True, indent=2, default=float) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _context(args) -> GroupContext:
    variant = Variant.POLARIZED if args.variant == "polarized" else Variant.FULL
    return GroupContext(args.n, args.a, variant)


def _norm_spec(args) -> norms.QuasiNormSpec:
    return norms.QuasiNormSpec(norms.parse_norm(args.norm), getattr(args, "b", 1.0))


def _region_check(kind: norms.QuasiNorm, a: float, b: float, beta: float) -> dict:
    ratio = (a / b) ** 2
    if kind is norms.QuasiNorm.KORANYI:
        cb = dg.critical_twist_squared(beta)
        return {
            "region": "0 < a^2/b^2 < critical threshold",
            "threshold": cb,
            "value": ratio,
            "inside": bool(0.0 < ratio < cb),
        }
    if kind is norms.QuasiNorm.MINKOWSKI:
        return {
            "region": "a^2/b^2 <= 1",
            "threshold": 1.0,
            "value": ratio,
            "inside": bool(ratio <= 1.0),
        }
    return {"region": "no sufficiency region for this norm", "value": ratio,
            "inside": False}


# -- certify -------------------------------------------------------------------


def cmd_certify(args) -> int:
    ctx = _context(args)
    spec = _norm_spec(args)
    sampler = dg.SamplerSpec(seed=args.seed, count=args.samples)
    report = dg.certify(ctx, spec, args.beta, sampler, tol=args.tol)
    results = {
        "report": report.to_dict(),
        "region_check": _region_check(spec.kind, args.a, args.b, args.beta),
    }
    doc = _document(_config_dict(args), results, {"tol": args.tol})
    rows = [[
        args.n, args.a, args.b, args.beta, spec.kind.value, ctx.variant.value,
        report.verdict.value, report.min_normalized_det,
    ]]
    header = ["n", "a", "b", "beta", "norm", "variant", "verdict", "min_ndet"]
    _emit(doc, rows, header, args.format, args.output)
    return {
        dg.CertVerdict.CERTIFIED: EXIT_OK,
        dg.CertVerdict.DEGENERACY_FOUND: EXIT_DEGENERACY,
        dg.CertVerdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    }[report.verdict]


# -- hessian-check ----------------------------------------------------------------


def _case_grid(case: cf.ClosedFormCase):
    if case in (cf.ClosedFormCase.EUCLIDEAN_KORANYI,
                cf.ClosedFormCase.EUCLIDEAN_MINKOWSKI):
        return [1, 2], [0.0]
    if case in (cf.ClosedFormCase.KORANYI_FULL, cf.ClosedFormCase.MINKOWSKI_FULL):
        return [1, 2], [0.0, 0.3, 1.0, 3.0]
    return [1], [0.0, 0.3, 1.0, 3.0]


def check_case(
    case: cf.ClosedFormCase,
    samples: int = 200,
    seed: int = 0,
    beta_grid=(0.5, 1.0, 2.0),
    beta_shift: float = 0.0,
) -> dict:
    """Max relative AD/closed-form error over the case's parameter grid."""
    kind, variant_name = cf.CASE_SETUP[case]
    variant = Variant.POLARIZED if variant_name == "polarized" else Variant.FULL
    spec = norms.QuasiNormSpec(kind)
    ns, a_grid = _case_grid(case)
    worst = 0.0
    worst_at = None
    for n in ns:
        for a in a_grid:
            if not cf.case_admissible(case, n, a):
                continue
            ctx = GroupContext(n, a, variant)
            sampler = dg.SamplerSpec(seed=seed, count=samples,
                                     region=dg.Region.annulus(0.5, 2.0))
            X, T = dg.sample_region(spec, sampler, n)
            for beta in beta_grid:
                closed = cf.evaluate_case(case, n, a, beta + beta_shift, X, T)
                phase = norms.PhaseSpec(spec, beta)
                coords = [X[:, i] for i in range(2 * n)] + [T]
                H = fields.mixed_hessian_batch(
                    ctx, fields.phase_callable(phase), coords
                )
                ad = np.linalg.det(H)
                denom = np.maximum.reduce(
                    [np.abs(closed), np.abs(ad), np.full_like(ad, 1e-300)]
                )
                rel = np.abs(closed - ad) / denom
                k = int(np.argmax(rel))
                if rel[k] > worst:
                    worst = float(rel[k])
                    worst_at = {"n": n, "a": a, "beta": beta,
                                "point": list(np.append(X[k], T[k]))}
    return {"case": case.value, "max_rel_err": worst, "argmax": worst_at}


def cmd_hessian_check(args) -> int:
    if args.cases == ["all"]:
        cases = list(cf.ClosedFormCase)
    else:
        try:
            cases = [cf.ClosedFormCase(c) for c in args.cases]
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
    table = [
        check_case(c, samples=args.samples, seed=args.seed,
                   beta_shift=args.perturb_beta)
        for c in cases
    ]
    ok = all(row["max_rel_err"] <= args.tol for row in table)
    doc = _document(_config_dict(args), {"cases": table, "pass": ok},
                    {"tol": args.tol})
    rows = [[r["case"], r["max_rel_err"]] for r in table]
    _emit(doc, rows, ["case", "max_rel_err"], args.format, args.output)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# -- scan-degeneracy ----------------------------------------------------------------


def cmd_scan_degeneracy(args) -> int:
    if args.steps < 2:
        print("error: need at least 2 sweep steps", file=sys.stderr)
        return EXIT_USAGE
    spec = _norm_spec(args)
    cb = dg.critical_twist_squared(args.beta)
    a_sq_grid = np.linspace(0.0, 2.0 * cb, args.steps)
    rows = []
    results = []
    prev_verdict = None
    flip_at = None
    for a_sq in a_sq_grid:
        a = math.sqrt(a_sq)
        ctx = GroupContext(args.n, a)
        sampler = dg.SamplerSpec(seed=args.seed, count=args.samples)
        rep = dg.certify(ctx, spec, args.beta, sampler, tol=args.tol)
        slopes = dg.paraboloid_slopes(a, args.beta)
        results.append(
            {
                "a_sq": float(a_sq),
                "beta": args.beta,
                "verdict": rep.verdict.value,
                "min_normalized_det": rep.min_normalized_det,
                "paraboloid_slopes": list(slopes),
            }
        )
        rows.append([
            float(a_sq), args.beta, rep.verdict.value,
            rep.min_normalized_det,
            slopes[0] if slopes else "",
            slopes[1] if len(slopes) > 1 else "",
        ])
        if prev_verdict == dg.CertVerdict.CERTIFIED.value and \
                rep.verdict == dg.CertVerdict.DEGENERACY_FOUND:
            flip_at = float(a_sq)
        prev_verdict = rep.verdict.value
    summary = {
        "critical_twist_squared": cb,
        "verdict_flip_at": flip_at,
        "flip_within_one_step": bool(
            flip_at is not None and abs(flip_at - cb) <= 2.0 * cb / (args.steps - 1)
        ),
    }
    doc = _document(_config_dict(args), {"sweep": results, "summary": summary},
                    {"tol": args.tol})
    header = ["a_sq", "beta", "verdict", "min_ndet", "slope_lo", "slope_hi"]
    _emit(doc, rows, header, args.format, args.output)
    return EXIT_OK if summary["flip_within_one_step"] else EXIT_CHECK_FAILED


# -- opnorm-decay -------------------------------------------------------------------


def cmd_opnorm_decay(args) -> int:
    ctx = _context(args)
    spec = _norm_spec(args)
    limit = math.pi / 2.0 if args.strict_resolution else None
    try:
        if args.mode == "generic":
            lams = [float(s) for s in args.lambdas.split(",")]
            pts, diags = osc.heisenberg_decay_experiment(
                ctx, spec, args.beta, lams=lams, n_points=args.grid,
                seed=args.seed, resolution_limit=limit,
            )
            try:
                series = osc.decay_fit(pts)
                fit = series.to_dict()
                slope = series.slope
                fit_ok = abs(slope - args.slope_target) <= args.slope_tol
            except ValueError as e:
                fit = {"error": str(e)}
                fit_ok = False
            results = {"fit": fit, "diagnostics": diags}
            rows = [[p.scale, p.norm, p.coarse_norm, p.grid_converged] for p in pts]
            header = ["lambda", "norm", "coarse_norm", "grid_converged"]
            ok = fit_ok
        else:
            js = [int(s) for s in args.js.split(",")]
            table = osc.dyadic_norm_experiment(
                ctx, spec, args.alpha, args.beta, js=js, n_points=args.grid,
                seed=args.seed, resolution_limit=limit,
            )
            vals = [row["norm"] for row in table]
            med = float(np.median(vals))
            increments = [
                math.log2(vals[i + 1] / vals[i]) for i in range(len(vals) - 1)
            ]
            critical = 2.0 * args.alpha - (2 * args.n + 1) * args.beta
            if abs(critical) < 1e-12:
                ok = max(vals) <= args.uniformity_factor * med and min(
                    vals
                ) >= med / args.uniformity_factor
            else:
                target = critical / 2.0
                ok = all(abs(inc - target) <= args.increment_tol
                         for inc in increments)
            ok = ok and all(row["grid_converged"] for row in table)
            results = {
                "norms": table,
                "median": med,
                "log2_increments": increments,
                "predicted_increment": (2.0 * args.alpha
                                        - (2 * args.n + 1) * args.beta) / 2.0,
            }
            rows = [[r["j"], r["norm"], r["coarse_norm"], r["grid_converged"]]
                    for r in table]
            header = ["j", "norm", "coarse_norm", "grid_converged"]
    except osc.NyquistError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNRESOLVABLE
    doc = _document(
        _config_dict(args), results,
        {"slope_tol": getattr(args, "slope_tol", None),
         "uniformity_factor": getattr(args, "uniformity_factor", None)},
    )
    _emit(doc, rows, header, args.format, args.output)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# -- parser -------------------------------------------------------------------------


def _config_dict(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _add_common(p, norm_default="koranyi"):
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--norm", default=norm_default,
                   help="koranyi | minkowski | rho3 | box (aliases rho0..rho3)")
    p.add_argument("--variant", choices=["full", "polarized"], default="full")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", default=None, help="output path (default stdout)")


def build_parser() -> _Parser:
    parser = _Parser(prog="heisencalc",
                     description="group-calculus verification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", parents=[], help="sampled non-degeneracy verdict")
    _add_common(p)
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--tol", type=float, default=dg.DEFAULT_TOL)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("hessian-check", help="closed forms vs jet oracle")
    _add_common(p)
    p.add_argument("--cases", nargs="+", default=["all"],
                   help="case names or 'all'")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--perturb-beta", type=float, default=0.0,
                   help="negative-control shift applied to the closed form only")
    p.set_defaults(func=cmd_hessian_check)

    p = sub.add_parser("scan-degeneracy", help="sweep a^2 across the threshold")
    _add_common(p)
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--samples", type=int, default=384)
    p.add_argument("--tol", type=float, default=dg.DEFAULT_TOL)
    p.set_defaults(func=cmd_scan_degeneracy)

    p = sub.add_parser("opnorm-decay", help="operator-norm decay experiments")
    _add_common(p)
    p.add_argument("--mode", choices=["generic", "dyadic"], default="generic")
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--lambdas", default="8,16,32")
    p.add_argument("--js", default="0,1,2,3")
    p.add_argument("--grid", type=int, default=24)
    p.add_argument("--slope-target", type=float, default=-1.5)
    p.add_argument("--slope-tol", type=float, default=0.2)
    p.add_argument("--uniformity-factor", type=float, default=2.0)
    p.add_argument("--increment-tol", type=float, default=0.15)
    p.add_argument("--strict-resolution", action="store_true",
                   help="error out when the pi/2-per-cell bound is exceeded")
    p.set_defaults(func=cmd_opnorm_decay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except osc.NyquistError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNRESOLVABLE


if __name__ == "__main__":
    sys.exit(main())
