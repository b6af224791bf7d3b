"""Command-line front end: ``qgeom <command> [options]``.

Exit codes: 0 success, 1 a feasibility check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

from . import cpolytope, exactform, feasibility, montecarlo, statespace
from .mathkernel import LogReal

SCHEMA = "qgeom/1"


class UsageError(Exception):
    pass


@dataclass
class Section:
    name: str
    columns: list
    rows: list


@dataclass
class Report:
    command: str
    params: dict
    sections: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    exit_code: int = 0


# --- serialisation -------------------------------------------------------------

def _json_value(v: Any) -> str:
    if type(v).__module__ == "numpy" and hasattr(v, "item"):  # numpy scalars
        v = v.item()
    if isinstance(v, bool) or v is None:
        return {True: "true", False: "false", None: "null"}[v]
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g") if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_json_value(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def render_json(rep: Report) -> str:
    obj = {"schema": SCHEMA, "command": rep.command, "params": rep.params}
    for s in rep.sections:
        obj[s.name] = [dict(zip(s.columns, r)) for r in s.rows]
    if rep.summary:
        obj["summary"] = rep.summary
    if rep.notes:
        obj["notes"] = rep.notes
    return _json_value(obj) + "\n"


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else v


def render_csv(rep: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    multi = len(rep.sections) > 1
    for i, s in enumerate(rep.sections):
        if i == 0 or multi:
            w.writerow((["section"] if multi else []) + s.columns)
        for r in s.rows:
            w.writerow(([s.name] if multi else []) + [_csv_cell(c) for c in r])
    return buf.getvalue()


def _table_cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def render_table(rep: Report) -> str:
    lines = [f"# {rep.command}  " + "  ".join(f"{k}={v}" for k, v in rep.params.items())]
    for s in rep.sections:
        cells = [[_table_cell(c) for c in r] for r in s.rows]
        widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(s.columns)]
        lines.append("")
        lines.append(f"[{s.name}]")
        lines.append("  ".join(c.ljust(wd) for c, wd in zip(s.columns, widths)))
        lines.append("  ".join("-" * wd for wd in widths))
        for r in cells:
            lines.append("  ".join(c.ljust(wd) for c, wd in zip(r, widths)))
    for k, v in rep.summary.items():
        lines.append(f"{k}: {_table_cell(v)}")
    for n in rep.notes:
        lines.append(f"note: {n}")
    return "\n".join(lines) + "\n"


RENDERERS = {"table": render_table, "json": render_json, "csv": render_csv}


def _lr(x: LogReal) -> tuple:
    """(float value, log10 |x|) with the float left as None on overflow."""
    v = float(x)
    return (v if math.isfinite(v) else None), x.log10()


# --- commands --------------------------------------------------------------------

def _check_d(d: int) -> int:
    if d is None:
        raise UsageError("--d is required")
    if d < 2:
        raise UsageError(f"--d must be >= 2, got {d}")
    return d


def cmd_statespace(args) -> Report:
    d = _check_d(args.d)
    D = d * d - 1
    t = statespace.intrinsic_table(d)
    forms = exactform.statespace_forms(d)
    quantities = [
        ("vol", "volume", statespace.volume(d)),
        ("surface", "surface", statespace.surface(d)),
        ("p''(0)", "p2", statespace.p2_at_zero(d)),
        ("p'''(0)", "p3", statespace.p3_at_zero(d)),
        ("a_2 = Vtilde_{D-2}", "a2", t.Vtilde(D - 2)),
        ("a_3 = Vtilde_{D-3}", "a3", t.Vtilde(D - 3)),
        (f"V_{D}", None, t.V(D)),
        (f"V_{D - 1}", "V_D-1", t.V(D - 1)),
        (f"V_{D - 2}", "V_D-2", t.V(D - 2)),
        (f"V_{D - 3}", "V_D-3", t.V(D - 3)),
    ]
    rows = []
    for name, key, val in quantities:
        v, l10 = _lr(val)
        exact = exactform.lookup(forms, key) if key else exactform.lookup(forms, "volume")
        rows.append([name, v, l10, val.logmag, exact])
    rep = Report("statespace", {"d": d, "D": D},
                 [Section("quantities", ["quantity", "value", "log10", "ln", "exact"], rows)])
    if d == 2:
        rep.notes.append("S_2 is the 3-ball of radius 1/√2: V_3 = π√2/3, V_2 = π, V_1 = 2√2, V_0 = 1")
    if d == 3:
        rep.notes.append("the published d=3 expansion lists √3·π³/5040 as constant term; "
                         "the volume formula gives √3·π³/2520")
    return rep


def cmd_polytope(args) -> Report:
    d = _check_d(args.d)
    D = d * d - 1
    t = cpolytope.intrinsic_table(d)
    forms = exactform.polytope_forms(d)
    keys = {D: "volume", D - 1: "surface", D - 2: "Vtilde_D-2", D - 3: "Vtilde_D-3"}
    vrows = []
    for N in (D, D - 1, D - 2, D - 3):
        vt, vt10 = _lr(t.Vtilde(N))
        v, v10 = _lr(t.V(N))
        vrows.append([N, vt, vt10, exactform.lookup(forms, keys[N]), v, v10])
    f2, f31, f32 = cpolytope.face_counts(d)
    counts = [["facets (codim 1)", cpolytope.facet_count(d)], ["codim 2", f2],
              ["codim 3, type 1", f31], ["codim 3, type 2", f32]]
    alpha, beta = cpolytope.angles(d)
    af = exactform.angle_forms(d)
    m2, m31, m32 = cpolytope.normal_cone_measures(d)
    arows = [["alpha", alpha, af["alpha"]], ["beta", beta, af["beta"]],
             ["normal cone, codim 2", m2, "alpha/2"],
             ["normal cone, codim 3 type 1", m31, "A(alpha,alpha,alpha)/3" if d >= 3 else None],
             ["normal cone, codim 3 type 2", m32, "2·A(alpha,alpha,beta)/3"]]
    return Report("polytope", {"d": d, "D": D}, [
        Section("intrinsic_volumes", ["N", "Vtilde", "log10_Vtilde", "exact", "V", "log10_V"], vrows),
        Section("face_counts", ["faces", "count"], counts),
        Section("angles", ["quantity", "value", "exact"], arows),
    ])


def cmd_compare(args) -> Report:
    d = _check_d(args.d)
    rows = []
    for r in feasibility.compare_polytope_statespace(d):
        p, _ = _lr(r.polytope)
        s, _ = _lr(r.state)
        q, _ = _lr(r.ratio)
        rows.append([r.N, p, s, q, r.ratio.log10(), r.flagged])
    flagged = [r[0] for r in rows if r[-1]]
    verdict = ("no intrinsic volume of P_d exceeds that of S_d" if not flagged
               else f"P_d exceeds S_d at N = {flagged}")
    return Report("compare", {"d": d, "D": d * d - 1},
                  [Section("rows", ["N", "V_N(P_d)", "V_N(S_d)", "ratio", "log10_ratio", "flagged"], rows)],
                  summary={"verdict": verdict, "flagged": len(flagged)})


def cmd_exclude(args) -> Report:
    d = _check_d(args.d)
    if args.k is not None and not 0 <= args.k <= 3:
        raise UsageError("--k must be in 0..3")
    rows = []
    for r in feasibility.exclusion_report(d):
        if args.k is not None and r.k != args.k:
            continue
        c, _ = _lr(r.cone)
        s, _ = _lr(r.state)
        rows.append([r.k, r.N, c, s, (r.cone / r.state).log10(), r.excluded])
    n_ex = sum(1 for r in rows if r[-1])
    return Report("exclude", {"d": d, "k": args.k},
                  [Section("rows", ["k", "N", "V_N(C)", "V_N(S_d)", "log10_ratio", "excluded"], rows)],
                  summary={"excluded": n_ex, "open": len(rows) - n_ex})


def cmd_feasible(args) -> Report:
    try:
        if args.kind:
            p = feasibility.generate_prescription(args.kind, _check_d(args.d), args.n)
        elif args.path:
            p = feasibility.load_prescription(args.path, args.d)
        else:
            raise UsageError("give a prescription file or --kind")
    except (feasibility.PrescriptionError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rep = feasibility.check_trivial_requirements(p, args.tol_psd, args.tol_rank)
    checks = [["diag", rep.diag_ok, None], ["nonneg", rep.nonneg_ok, None],
              ["psd", rep.psd_ok, f"min eigenvalue {rep.min_eigenvalue:.17g} "
                                  f"(threshold {rep.psd_threshold:.3g})"],
              ["rank", rep.rank_ok, f"rank {rep.rank} <= {p.d * p.d - 1}"],
              ["sum_bound", rep.sum_ok, f"sum {rep.sum_total:.17g} vs n^2/d {rep.sum_bound:.17g}"]]
    return Report("feasible", {"d": p.d, "n": p.n, "label": p.label, "tol_psd": args.tol_psd,
                               "tol_rank": args.tol_rank},
                  [Section("checks", ["check", "ok", "detail"], checks)],
                  summary={"all_ok": rep.all_ok, "failures": ", ".join(rep.failures()) or "none",
                           "min_eigenvalue": rep.min_eigenvalue, "rank": rep.rank},
                  exit_code=0 if rep.all_ok else 1)


def _truth_curve(oracle: montecarlo.ProjectionOracle):
    """Full closed-form vol(K_eps) where known, else None."""
    truth = oracle.steiner_truth()
    if truth is not None and oracle.ambient <= 3:
        return lambda e: math.fsum(c * e ** k for k, c in enumerate(truth))
    if oracle.kind is montecarlo.OracleKind.STATE_SPACE and oracle.d == 3:
        return statespace.d3_neighbourhood_volume
    return None


def cmd_montecarlo(args) -> Report:
    d = _check_d(args.d)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        oracle = montecarlo.ProjectionOracle.for_body(args.body, d, args.dim)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    R = oracle.circumradius
    lo = 0.02 * R if args.eps_min is None else args.eps_min
    hi = 0.5 * R if args.eps_max is None else args.eps_max
    if not 0 < lo < hi or args.eps_points < 8:
        raise UsageError("need 0 < eps-min < eps-max and eps-points >= 8")
    import numpy as np
    grid = np.geomspace(lo, hi, args.eps_points)
    seed = args.seed
    try:
        fit = montecarlo.fit_steiner_coefficients(oracle, grid, args.samples, seed, args.jobs)
    except montecarlo.IllConditionedFit as exc:
        raise UsageError(f"fit failed: {exc}") from exc
    curve = _truth_curve(oracle)
    erows = []
    for e in fit.estimates:
        closed = curve(e.epsilon) if curve else None
        z = None
        if closed is not None:
            n = e.samples
            pa = min(max(e.hit_fraction, 1.0 / (n + 2)), 1.0 - 1.0 / (n + 2))
            floor = e.box_volume * math.sqrt(pa * (1 - pa) / n)
            z = (e.value - closed) / max(e.stderr, floor)
        erows.append([e.epsilon, e.value, e.stderr, e.hits, closed, z])
    truth = oracle.steiner_truth()
    frows = []
    for k in range(4):
        c = truth[k] if truth else None
        z = (fit.coefficients[k] - c) / fit.stderr[k] if truth else None
        frows.append([f"a_{k}", float(fit.coefficients[k]), float(fit.stderr[k]), c, z])
    zs = [abs(r[-1]) for r in erows + frows if r[-1] is not None]
    summary = {"fit_degree": fit.degree, "chi2": fit.residual, "dof": len(grid) - fit.degree - 1}
    if zs:
        summary["max_abs_z"] = float(max(zs))
        summary["all_within_3_sigma"] = bool(max(zs) <= 3.0)
    return Report("montecarlo", {"body": args.body, "d": d, "ambient": oracle.ambient,
                                 "samples": args.samples, "seed": seed, "jobs": args.jobs,
                                 "eps_min": float(lo), "eps_max": float(hi),
                                 "eps_points": args.eps_points},
                  [Section("estimates", ["eps", "estimate", "stderr", "hits", "closed_form", "z"], erows),
                   Section("steiner_fit", ["coefficient", "fit", "stderr", "closed_form", "z"], frows)],
                  summary=summary)


# --- parser ------------------------------------------------------------------------

def _default_seed() -> int:
    raw = os.environ.get("QGEOM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QGEOM_SEED must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgeom", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=sorted(RENDERERS), default="table")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("statespace", parents=[common], help="closed forms for S_d")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_statespace)

    p = sub.add_parser("polytope", parents=[common], help="closed forms, faces and angles of P_d")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_polytope)

    p = sub.add_parser("compare", parents=[common], help="V_N(P_d) against V_N(S_d)")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("exclude", parents=[common], help="spherical-cone exclusion table")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_exclude)

    p = sub.add_parser("feasible", parents=[common], help="trivial requirements on a prescription")
    p.add_argument("path", nargs="?", help="JSON {\"d\", \"M\"} or CSV grid (needs --d)")
    p.add_argument("--d", type=int)
    p.add_argument("--kind", choices=["sic", "mub", "ortho"], help="generate instead of reading")
    p.add_argument("--n", type=int, help="vector count for --kind ortho")
    p.add_argument("--tol-psd", type=float, default=feasibility.TOL_PSD)
    p.add_argument("--tol-rank", type=float, default=feasibility.TOL_RANK)
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("montecarlo", parents=[common], help="hit-or-miss check of the Steiner coefficients")
    p.add_argument("--body", choices=["statespace", "polytope", "cone", "ball"], default="statespace")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--dim", type=int, help="ambient dimension for cone/ball bodies")
    p.add_argument("--samples", type=int, default=10 ** 6, help="samples per eps value")
    p.add_argument("--seed", type=int, default=None, help="default: $QGEOM_SEED or 0")
    p.add_argument("--eps-min", type=float)
    p.add_argument("--eps-max", type=float)
    p.add_argument("--eps-points", type=int, default=12)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_montecarlo)
    return ap


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        rep = args.func(args)
    except UsageError as exc:
        print(f"qgeom {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = RENDERERS[args.format](rep)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qgeom: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
