"""Command-line front end: spectra, Laplacian and volume tables, check suites, series.

Exit codes: 0 all assertions passed, 1 an assertion failed (the report names
the seed and grid point), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import comparison as cmp
from . import geodesic as geo
from . import series as ser
from . import sym_op
from .curvature import Hyperquadric, SpaceFormHBSC, cp1_product
from .errors import KahlerCompError, PreconditionUnmet

SCHEMA = 1
HEADER = ("r", "actual", "bound", "gap")
INEQ_TOL = 1e-8
ODE_TOL = 1e-6

CATALOG = {
    "cpn": "complex projective space, Fubini-Study metric (HBSC 1)",
    "hyperbolic": "complex hyperbolic space (HBSC -1)",
    "flat": "complex Euclidean space",
    "hyperquadric": "quadric Q^n in CP^(n+1) (n >= 2; spectrum only)",
    "product": "n-fold product of CP^1, each factor with HSC n+1",
}

CHECKS = ("lemma31", "thm21", "product", "khessian", "diam", "example52", "sweep")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    check: str | None = None
    model: str = "cpn"
    n: int = 2
    c: float | None = None
    k: int | None = None
    mix: list | None = None
    grid: tuple | None = None
    seed: int = 0
    tol: float | None = None
    out: str | None = None
    format: str | None = None
    bound: str = "kahler"
    expect_violation: bool = False
    dump: str | None = None
    K: int = 12
    eval_r: float | None = None


@dataclass
class Outcome:
    rows: list = field(default_factory=list)
    passed: bool = True
    meta: dict = field(default_factory=dict)
    message: str = ""


def build_model(name: str, n: int):
    if name not in CATALOG:
        listing = "\n".join(f"  {k:13s} {v}" for k, v in CATALOG.items())
        raise UsageError(f"unknown model {name!r}; available models:\n{listing}")
    if name == "cpn":
        return SpaceFormHBSC(n, 1.0)
    if name == "hyperbolic":
        return SpaceFormHBSC(n, -1.0)
    if name == "flat":
        return SpaceFormHBSC(n, 0.0)
    if name == "hyperquadric":
        return Hyperquadric(n)
    return cp1_product(n)


def natural_c(name: str, n: int) -> float:
    """Largest comparison constant the model satisfies with equality somewhere."""
    return {"cpn": 1.0, "hyperbolic": -1.0, "flat": 0.0, "hyperquadric": 1.0,
            "product": (n + 1) / (2 * n)}[name]


def parse_grid(spec: str) -> tuple:
    try:
        a, b, m = spec.split(":")
        a, b, m = float(a), float(b), int(m)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like a:b:count, got {spec!r}")
    if m < 2 or not a < b:
        raise argparse.ArgumentTypeError("grid needs a < b and count >= 2")
    return a, b, m


def parse_mix(spec: str) -> list:
    try:
        return [float(x) for x in spec.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"mix must be comma-separated numbers, got {spec!r}")


def grid_points(cfg: RunConfig, default: tuple) -> np.ndarray:
    a, b, m = cfg.grid or default
    return np.linspace(a, b, m)


def _c(cfg: RunConfig) -> float:
    return natural_c(cfg.model, cfg.n) if cfg.c is None else cfg.c


def _tol(cfg: RunConfig, default: float = INEQ_TOL) -> float:
    return default if cfg.tol is None else cfg.tol


def _radial_model(cfg: RunConfig):
    model = build_model(cfg.model, cfg.n)
    if isinstance(model, Hyperquadric):
        raise UsageError("the hyperquadric has no radial data; use the spectrum command")
    return model


# --------------------------------------------------------------------------
# Commands


def cmd_spectrum(cfg: RunConfig) -> Outcome:
    model = build_model(cfg.model, cfg.n)
    T = model.tensor()
    S = sym_op.build(T)
    ks = [cfg.k] if cfg.k is not None else list(range(1, S.N + 1))
    payload = {
        "model": cfg.model,
        "n": T.n,
        "N": S.N,
        "eigenvalues": [float(x) for x in S.spectrum],
        "ksum": {str(k): sym_op.k_sum(S, k) for k in ks},
    }
    if cfg.dump:
        with open(cfg.dump, "w") as fh:
            fh.write(T.to_json())
    return Outcome(meta=payload)


def cmd_laplacian(cfg: RunConfig) -> Outcome:
    model = _radial_model(cfg)
    c = _c(cfg)
    rs = grid_points(cfg, (0.1, 1.0, 10))
    mixes = None if cfg.mix is None else [np.asarray(cfg.mix)]
    rows = []
    for r, actual, mix in geo.model_laplacian_rows(model, rs, mixes, cfg.seed):
        rows.append((r, actual, geo.bound_value(cfg.bound, model.n, c, r)))
    tol = _tol(cfg)
    return _inequality_outcome(rows, tol, cfg, {"model": cfg.model, "n": model.n, "c": c, "bound": cfg.bound})


def cmd_volume(cfg: RunConfig) -> Outcome:
    model = _radial_model(cfg)
    c = _c(cfg)
    rs = grid_points(cfg, (0.1, 1.0, 10))
    rows = []
    for r in rs:
        if cfg.model == "product":
            if model.n != 2:
                raise UsageError("product ball volumes are available for n = 2 only")
            h = model.n + 1
            actual = cmp.surface_product_ball_volume(h, h, r)
        else:
            actual = cmp.ball_volume(model.n, model.c, r)
        rows.append((float(r), actual, cmp.ball_volume(model.n, c, r)))
    ratios = [(r, a) for r, a, _ in rows]
    curve = cmp.bg_ratio(ratios, model.n, c, cfg.model)
    out = _inequality_outcome(rows, _tol(cfg), cfg, {"model": cfg.model, "n": model.n, "c": c})
    out.meta["ratio_non_increasing"] = curve.non_increasing
    if not curve.non_increasing:
        out.passed = False
        out.message = f"volume ratio increases (max step {curve.meta['max_increase']:.3e})"
    return out


def _inequality_outcome(rows, tol, cfg, meta) -> Outcome:
    """Rows (r, actual, bound): the inequality actual <= bound must hold up to tol."""
    full = [(r, a, b, b - a) for r, a, b in rows]
    bad = [row for row in full if row[3] < -tol]
    out = Outcome(full, not bad, dict(meta, tol=tol, seed=cfg.seed))
    if bad:
        w = min(bad, key=lambda row: row[3])
        out.message = f"{len(bad)} violation(s); worst at seed={cfg.seed} r={w[0]!r} gap={w[3]:.3e}"
    return out


def check_mixed_estimate(cfg: RunConfig) -> Outcome:
    n = cfg.n if cfg.n >= 2 else 4
    k = cfg.k or max(1, (n - 1) // 2)
    c = 1.0 if cfg.c is None else cfg.c
    tol = _tol(cfg)
    res = sym_op.mixed_estimate_sweep(n, k, c, seed=cfg.seed, tol=tol)
    rows = [(a, lhs, rhs, lhs - rhs) for a, lhs, rhs in zip(res.alphas, res.min_lhs, res.rhs)]
    out = Outcome(rows, res.violations == 0,
                  {"n": n, "k": k, "c": c, "trials": res.trials, "violations": res.violations,
                   "min_gap": res.min_gap, "tol": tol, "seed": cfg.seed})
    if res.violations:
        out.message = f"{res.violations} violation(s); worst {res.worst}"
    return out


def check_index_form(cfg: RunConfig) -> Outcome:
    n = cfg.n
    c = 1.0 if cfg.c is None else cfg.c
    tol = _tol(cfg)
    top = 0.9 * math.pi / math.sqrt(2 * c) if c > 0 else 2.0
    ells = grid_points(cfg, (0.2, top, 8))
    rows = []
    eq_gap = 0.0
    worst = None
    for i, ell in enumerate(ells):
        trials = geo.index_dominance_trials(n, c, float(ell), 25, cfg.seed + i)
        t = min(trials, key=lambda x: x.gap)
        rows.append((float(ell), t.hessian, t.bound, t.gap))
        if worst is None or t.gap < worst[1]:
            worst = (float(ell), t.gap, cfg.seed + i)
        frame = geo.geodesic_frame(SpaceFormHBSC(n, c))
        X = np.ones(n, dtype=complex) / math.sqrt(n)
        J = geo.jacobi_field(SpaceFormHBSC(n, c), X, float(ell))
        eq_gap = max(eq_gap, abs(geo.hessian_upper_bound(frame, X, J) - geo.hessian_value(frame, X, float(ell))))
    ok = worst[1] >= -tol and eq_gap <= ODE_TOL
    out = Outcome(rows, ok, {"n": n, "c": c, "tol": tol, "seed": cfg.seed, "equality_gap": eq_gap})
    if not ok:
        out.message = f"worst dominance gap {worst[1]:.3e} at ell={worst[0]!r} (seed={worst[2]}); equality gap {eq_gap:.3e}"
    return out


def check_product(cfg: RunConfig) -> Outcome:
    n = cfg.n
    tol = _tol(cfg, ODE_TOL)
    model = cp1_product(n)
    rs = grid_points(cfg, (0.05, 1.0, 50))
    rng = np.random.default_rng(cfg.seed)
    hsc = [n + 1.0] * n
    pairs = []
    for r in rs:
        lams = [np.sqrt(x) for x in rng.dirichlet(np.ones(n), size=20)]
        lams.append(np.full(n, 1 / math.sqrt(n)))
        for lam in lams:
            f = geo.geodesic_frame(model, lam / np.linalg.norm(lam))
            if float(r) < f.max_radius():
                pairs.append((float(r), f))
    S = geo.riccati_grid(np.array([f.kappas() for _, f in pairs]), [r for r, _ in pairs])
    best = {}
    worst = (0.0, None)
    for (r, f), s in zip(pairs, S):
        lam = f.mix
        closed = geo.product_laplacian(hsc, r, lam)
        ode = float(np.dot(f.multiplicities(), s))
        if worst[1] is None or abs(closed - ode) > abs(worst[0]):
            worst = (closed - ode, (r, tuple(float(x) for x in lam)))
        bc, bo = best.get(r, (-math.inf, -math.inf))
        best[r] = (max(bc, closed), max(bo, ode))
    rows = [(r, bo, bc, bc - bo) for r, (bc, bo) in best.items()]
    max_ok = all(bc <= geo.product_laplacian_max(n, r) + tol for r, (bc, _) in best.items())
    dev = max(abs(row[3]) for row in rows)
    ok = dev <= tol and max_ok
    out = Outcome(rows, ok, {"n": n, "tol": tol, "seed": cfg.seed, "max_abs_gap": dev})
    if not ok:
        out.message = f"closed form and Riccati differ by {worst[0]:.3e} at seed={cfg.seed} (r, mix)={worst[1]}"
    return out


def check_khessian(cfg: RunConfig) -> Outcome:
    model = _radial_model(cfg)
    k = cfg.k or 1
    c = 0.0 if cfg.c is None else cfg.c
    rs = grid_points(cfg, (0.1, 1.0, 10))
    mixes = None if cfg.mix is None else [np.asarray(cfg.mix)]
    rep = geo.k_hessian_check(model, k, rs, c, mixes, cfg.seed, _tol(cfg))
    rows = [(row.r, row.actual, row.bound, row.gap) for row in rep.rows]
    out = Outcome(rows, rep.passed, {"model": cfg.model, "n": model.n, "k": k, "c": c, "tol": rep.tol,
                                     "seed": cfg.seed})
    if not rep.passed:
        out.message = rep.reproducer()
    return out


def check_diam(cfg: RunConfig) -> Outcome:
    model = _radial_model(cfg)
    c = _c(cfg)
    T = model.tensor()
    N = T.n * (T.n + 1) // 2
    if cfg.k is None:
        # smallest admissible k gives the strongest bound
        k = next((kk for kk in range(1, N + 1) if sym_op.is_k_semipositive(T, c, kk)), None)
        if k is None:
            raise PreconditionUnmet(f"S - 2c id is not k-semipositive for any k with c={c}")
    else:
        k = cfg.k
        if not sym_op.is_k_semipositive(T, c, k):
            raise PreconditionUnmet(f"S - 2c id is not {k}-semipositive for c={c}")
    d = model.diameter()
    bound = cmp.diam_constants(k, c).bound
    tol = _tol(cfg)
    rows = [(d, d, bound, bound - d)]
    out = Outcome(rows, bound - d >= -tol, {"model": cfg.model, "n": model.n, "k": k, "c": c,
                                             "nu": cmp.diam_constants(k, c).nu, "tol": tol})
    if not out.passed:
        out.message = f"diameter {d} exceeds bound {bound}"
    return out


def check_counterexample(cfg: RunConfig) -> Outcome:
    top = math.pi / math.sqrt(2) - 0.01
    rs = grid_points(cfg, (0.01, top, 1000))
    model = cp1_product(2)
    rep = geo.comparison_sweep(model, "kahler", rs, 1.0, mixes=[np.full(2, 1 / math.sqrt(2))],
                               tol=_tol(cfg), expect="violation", method="closed")
    rows = [(row.r, row.actual, row.bound, row.gap) for row in rep.rows]
    strict = all(row.gap < 0 for row in rep.rows)
    ok = rep.passed and strict
    out = Outcome(rows, ok, {"model": "product", "n": 2, "c": 1.0, "expect": "violation",
                             "points_violating": len(rep.violations), "all_negative": strict,
                             "series_positive_upto_K": cfg.K if ser.positivity_verdict(cfg.K) else None})
    if not ok:
        out.message = f"naive bound was not violated as expected: {rep.reproducer()}"
    return out


def check_sweep(cfg: RunConfig) -> Outcome:
    model = _radial_model(cfg)
    c = _c(cfg)
    rs = grid_points(cfg, (0.1, 1.0, 20))
    mixes = None if cfg.mix is None else [np.asarray(cfg.mix)]
    expect = "violation" if cfg.expect_violation else "holds"
    rep = geo.comparison_sweep(model, cfg.bound, rs, c, cfg.k, mixes, cfg.seed, _tol(cfg), expect)
    rows = [(row.r, row.actual, row.bound, row.gap) for row in rep.rows]
    meta = {"model": cfg.model, "n": model.n, "c": c, "bound": cfg.bound, "expect": expect,
            "tol": rep.tol, "seed": cfg.seed}
    if rep.hypothesis is not None:
        meta["hypothesis"] = rep.hypothesis.route
    out = Outcome(rows, rep.passed, meta)
    if not rep.passed:
        out.message = rep.reproducer()
    return out


CHECK_HANDLERS = {
    "lemma31": check_mixed_estimate,
    "thm21": check_index_form,
    "product": check_product,
    "khessian": check_khessian,
    "diam": check_diam,
    "example52": check_counterexample,
    "sweep": check_sweep,
}


def cmd_series(cfg: RunConfig) -> Outcome:
    if cfg.eval_r is not None:
        r = cfg.eval_r
        s = ser.g_eval_series(r, max(cfg.K, 3))
        closed = ser.g_eval_closed(r)
        allowance = s.bound + ser.closed_rounding(r)
        gap = abs(s.value - closed)
        meta = {"r": r, "K": max(cfg.K, 3), "series": s.value, "closed": closed, "gap": gap,
                "tail": s.tail, "allowance": allowance}
        out = Outcome([], gap <= allowance, meta)
        if not out.passed:
            out.message = f"series and closed form differ by {gap:.3e} > {allowance:.3e} at r={r!r}"
        return out
    table = ser.series_table(cfg.K)
    verdict = ser.positivity_verdict(cfg.K)
    rows = [(row.k, str(row.T), str(row.c), float(row.c)) for row in table]
    return Outcome(rows, verdict, {"K": cfg.K, "positive_from_k3": verdict})


# --------------------------------------------------------------------------
# Output


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def render(cfg: RunConfig, out: Outcome) -> str:
    if cfg.command == "spectrum" or (cfg.command == "series" and cfg.eval_r is not None):
        if cfg.format == "json":
            return json.dumps(dict(schema=SCHEMA, passed=out.passed, **out.meta), indent=2) + "\n"
        if cfg.command == "spectrum":
            lines = ["index,eigenvalue"] + [f"{i},{_fmt(v)}" for i, v in enumerate(out.meta["eigenvalues"])]
        else:
            keys = list(out.meta)
            lines = [",".join(keys), ",".join(_fmt(out.meta[k]) for k in keys)]
        return "\n".join(lines) + "\n"
    header = ("k", "T_k", "c_k", "c_k_decimal") if cfg.command == "series" else HEADER
    if cfg.format == "json":
        payload = {"schema": SCHEMA, "command": cfg.command, "check": cfg.check, "passed": out.passed,
                   "meta": out.meta, "rows": [dict(zip(header, row)) for row in out.rows]}
        if out.message:
            payload["failure"] = out.message
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in out.rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def run(cfg: RunConfig) -> int:
    if cfg.format is None:
        cfg.format = "json" if cfg.command == "spectrum" else "csv"
    try:
        if cfg.tol is not None and not cfg.tol > 0:
            raise UsageError("--tol must be positive")
        if cfg.command == "spectrum":
            out = cmd_spectrum(cfg)
        elif cfg.command == "laplacian":
            out = cmd_laplacian(cfg)
        elif cfg.command == "volume":
            out = cmd_volume(cfg)
        elif cfg.command == "check":
            out = CHECK_HANDLERS[cfg.check](cfg)
        elif cfg.command == "series":
            out = cmd_series(cfg)
        else:
            raise UsageError(f"unknown command {cfg.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionUnmet as exc:
        print(f"error: hypotheses not met, refusing to run: {exc}", file=sys.stderr)
        return 2
    except KahlerCompError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    text = render(cfg, out)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.command == "series" and cfg.eval_r is None and cfg.format == "csv":
        word = "positive" if out.passed else "NOT positive"
        print(f"verdict: c_1 = c_2 = 0, c_k {word} for 3 <= k <= {cfg.K}", file=sys.stderr)
    if not out.passed:
        print(f"FAIL: {out.message}", file=sys.stderr)
        return 1
    return 0


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="cpn", help="one of: " + ", ".join(CATALOG))
    common.add_argument("--n", type=int, default=2, help="complex dimension")
    common.add_argument("--c", type=float, default=None, help="comparison constant (default: model's own)")
    common.add_argument("--k", type=int, default=None)
    common.add_argument("--mix", type=parse_mix, default=None, help="geodesic speeds per product factor, e.g. 0.6,0.8")
    common.add_argument("--grid", type=parse_grid, default=None, help="a:b:count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", default=None, help="write output to this file")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="default: json for spectrum, csv otherwise")

    p = argparse.ArgumentParser(prog="kahlercomp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("spectrum", parents=[common], help="eigenvalues of the symmetrized operator")
    sp.add_argument("--dump", default=None, help="also write the curvature tensor as JSON")
    for name, text in (("laplacian", "model Laplacian of r against a comparison bound"),
                       ("volume", "ball volumes against the constant-HBSC model")):
        q = sub.add_parser(name, parents=[common], help=text)
        q.add_argument("--bound", choices=geo.BOUNDS, default="kahler")
    ck = sub.add_parser("check", parents=[common], help="run a check suite")
    ck.add_argument("check", choices=CHECKS)
    ck.add_argument("--bound", choices=geo.BOUNDS, default="kahler")
    ck.add_argument("--expect-violation", action="store_true",
                    help="treat the sweep as a counterexample search")
    ck.add_argument("--K", type=int, default=12, help=argparse.SUPPRESS)
    se = sub.add_parser("series", parents=[common], help="Bernoulli series coefficients of g")
    se.add_argument("--K", type=int, default=12, help="number of coefficients")
    se.add_argument("--eval", dest="eval_r", type=float, default=None, help="evaluate g at r both ways")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
