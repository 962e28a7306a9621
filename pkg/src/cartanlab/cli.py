"""cartanlab command line: build algebras, compute invariants, run the generator criteria.

Reports are JSON by default (sorted keys, no timings unless --timings), so the
same command with the same seed prints the same bytes.
"""

import argparse
import json
import os
import sys
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .cartan import contact_height_formulas
from .criterion import corollary_as_theorem, recipe_for, reproduce_counterexample, run_recipe
from .families import FAMILIES, FamilySpec, build_family
from .liecore import check_jacobi, depth_height, dump, is_simple, p_envelope
from .melikian import height_flags

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
ENVELOPE_DIM_LIMIT = 130
JACOBI_EXHAUSTIVE_LIMIT = 300
JACOBI_SAMPLES = 10 ** 4
COUNTEREXAMPLES = ("rumynin", "contact_p3")

# a nondegenerate antisymmetric 4x4 alpha (row-major), used by the grid
ALPHA_ND = (0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class JobSpec:
    command: str
    family: FamilySpec = None
    criterion: str = "auto"
    seed: int = 0
    fmt: str = "json"
    cache_dir: str = None
    name: str = None


@dataclass(frozen=True)
class GridPoint:
    spec: FamilySpec
    mode: str = "auto"
    expect_fail: tuple = ()       # conditions that must fail; empty means all must pass


def _fs(family, p, n, **kw):
    return FamilySpec(family, p, tuple(n), **kw)


CRITERION_GRID = (
    GridPoint(_fs("W", 5, (1,))),
    GridPoint(_fs("W", 5, (2,))),
    GridPoint(_fs("W", 5, (1, 1))),
    GridPoint(_fs("S", 5, (1, 1, 1))),
    GridPoint(_fs("H", 5, (1, 1))),
    GridPoint(_fs("H", 5, (1, 1, 1, 1))),
    GridPoint(_fs("M", 5, (1, 1))),
    GridPoint(_fs("K", 5, (1, 1, 1))),
    GridPoint(_fs("SPhiTau", 5, (1, 1, 1))),
    GridPoint(_fs("SPhiL", 5, (1, 1, 1))),
    GridPoint(_fs("H1st", 5, (2, 1, 1, 1))),
    GridPoint(_fs("H1st", 5, (2, 1, 1, 1), alpha=ALPHA_ND)),
    GridPoint(_fs("H2nd", 5, (1, 1, 1, 1))),
    GridPoint(_fs("W", 3, (1,)), "corollary", ("G III",)),
    GridPoint(_fs("H1st", 5, (1, 1, 1, 1)), "theorem", ("III",)),
)

# grid points that take more than a few seconds each
SLOW = {"H_p5_m4_n1111_level2", "H1st_p5_m4_n2111",
        "H1st_p5_m4_n2111_alpha" + "".join(str(a % 5) for a in ALPHA_ND)}


def grid_expectation(spec, mode):
    """Expected failing conditions for a grid point, or None if the point is not in the grid."""
    for g in CRITERION_GRID:
        if g.spec.canonical() == spec.canonical() and (mode == "auto" or g.mode in ("auto", mode)):
            return g.expect_fail
    return None


# -- parameters --------------------------------------------------------------------------

def _int_list(text, what):
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise UsageError("%s must be a comma-separated list of integers" % what)


def family_spec(args):
    if args.family is None:
        raise UsageError("--family is required (choose from %s)" % ", ".join(FAMILIES))
    p = args.p if args.p is not None else 5
    n = _int_list(args.n, "--n") if args.n else None
    m = args.m
    if n is None:
        n = (1,) * (m if m is not None else (2 if args.family == "M" else 1))
    elif m is not None and len(n) == 1 and m > 1:
        n = n * m
    if m is not None and len(n) != m:
        raise UsageError("--m %d disagrees with --n %s" % (m, args.n))
    alpha = None
    if args.alpha:
        a = _int_list(args.alpha, "--alpha")
        k = len(n)
        if len(a) == k * (k - 1) // 2:
            full = [0] * (k * k)
            it = iter(a)
            for i in range(k):
                for j in range(i + 1, k):
                    v = next(it)
                    full[i * k + j], full[j * k + i] = v, -v
            a = tuple(full)
        elif len(a) != k * k:
            raise UsageError("--alpha needs %d (upper triangle) or %d entries" % (k * (k - 1) // 2, k * k))
        alpha = a
    try:
        return FamilySpec(args.family, p, n, l=args.l, alpha=alpha, level=args.level)
    except ValueError as e:
        raise UsageError(str(e))


def cache_dir(flag):
    return Path(flag or os.environ.get("CARTANLAB_CACHE") or "cache")


# -- reports ------------------------------------------------------------------------------

def base_report(spec, L, seed):
    dh = depth_height(L)
    deg = L.grading if L.grading is not None else L.levels
    dims = Counter(deg) if deg is not None else {}
    flags = []
    if spec.family == "M":
        flags += height_flags(L)
    if spec.family == "K":
        # both closed forms are compared against the computed height
        f = contact_height_formulas(spec.shape())
        for case in ("generic", "exceptional"):
            verdict = "agrees" if dh[1] == f[case] else "disagrees"
            flags.append("contact-height-%s-formula-%s" % (case, verdict))
        if dh[1] != f[f["case"]]:
            flags.append("contact-height-formula-mismatch")
    if spec.family == "W" and spec.m == 1:
        flags.append("e_i-bracket-constant-derived-from-divided-powers")
    return {
        "family": spec.family,
        "shape": spec.canonical(),
        "dim": L.dim,
        "depth": dh[0] if dh else None,
        "height": dh[1] if dh else None,
        "graded": L.grading is not None,
        "degree_dims": {str(d): dims[d] for d in sorted(dims)},
        "simplicity": None,
        "p_envelope_dim": None,
        "criterion": None,
        "flags": flags,
        "version": __version__,
        "seed": seed,
    }


def _build(spec):
    try:
        return build_family(spec)
    except (ValueError, AssertionError) as e:
        raise UsageError("cannot build %s: %s" % (spec.canonical(), e))


def cmd_construct(job):
    t0 = time.perf_counter()
    L = _build(job.family)
    rep = base_report(job.family, L, job.seed)
    t1 = time.perf_counter()
    d = cache_dir(job.cache_dir)
    d.mkdir(parents=True, exist_ok=True)
    path = d / (job.family.canonical() + ".json")
    path.write_text(dump(L))
    rep["cache_file"] = path.name
    rep["timings"] = {"build": t1 - t0, "dump": time.perf_counter() - t1}
    return rep, EXIT_OK


def cmd_invariants(job):
    t0 = time.perf_counter()
    L = _build(job.family)
    rep = base_report(job.family, L, job.seed)
    if L.dim <= JACOBI_EXHAUSTIVE_LIMIT:
        rep["jacobi"] = {"mode": "exhaustive", "violations": check_jacobi(L)}
    else:
        rep["jacobi"] = {"mode": "sampled", "samples": JACOBI_SAMPLES,
                         "violations": check_jacobi(L, samples=JACOBI_SAMPLES, seed=job.seed)}
    if L.dim <= ENVELOPE_DIM_LIMIT:
        rep["p_envelope_dim"] = p_envelope(L).dim
    else:
        rep["flags"].append("p-envelope-skipped-above-dim-%d" % ENVELOPE_DIM_LIMIT)
    rep["timings"] = {"total": time.perf_counter() - t0}
    return rep, EXIT_OK if rep["jacobi"]["violations"] == 0 else EXIT_MISMATCH


def simplicity_json(v):
    out = {"status": v.status, "reason": v.reason, "trials": v.trials}
    if v.witness is not None:
        out["witness_dim"] = v.witness.dim
    return out


def cmd_simplicity(job):
    t0 = time.perf_counter()
    L = _build(job.family)
    rep = base_report(job.family, L, job.seed)
    v = is_simple(L, seed=job.seed)
    rep["simplicity"] = simplicity_json(v)
    rep["timings"] = {"total": time.perf_counter() - t0}
    return rep, EXIT_MISMATCH if v.status == "Inconclusive" else EXIT_OK


def run_criterion(L, spec, mode):
    rec = recipe_for(L, spec)
    if mode == "auto" or mode == rec.mode:
        return run_recipe(L, rec)
    if mode == "theorem":
        return corollary_as_theorem(L, rec.U, family=rec.family)
    if L.grading is None:
        raise UsageError("corollary mode needs a graded algebra; %s is only filtered" % spec.canonical())
    raise UsageError("no degree <= -1 recipe for %s in corollary mode" % spec.family)


def criterion_json(r, expect):
    out = r.to_json()
    out["failed"] = r.failed()
    out["in_grid"] = expect is not None
    out["expected_failures"] = list(expect or ())
    out["matches_expectation"] = sorted(r.failed()) == sorted(expect or ())
    return out


def cmd_verify(job):
    t0 = time.perf_counter()
    spec = job.family
    L = _build(spec)
    rep = base_report(spec, L, job.seed)
    try:
        r = run_criterion(L, spec, job.criterion)
    except ValueError as e:
        raise UsageError(str(e))
    expect = grid_expectation(spec, r.mode)
    rep["criterion"] = criterion_json(r, expect)
    rep["flags"] += [f for f in r.flags if f not in rep["flags"]]
    rep["timings"] = dict(r.timings, wall=time.perf_counter() - t0)
    return rep, EXIT_OK if rep["criterion"]["matches_expectation"] else EXIT_MISMATCH


def cmd_counterexample(job):
    if job.name not in COUNTEREXAMPLES:
        raise UsageError("unknown counterexample %r (choose from %s)" % (job.name, ", ".join(COUNTEREXAMPLES)))
    t0 = time.perf_counter()
    res = reproduce_counterexample(job.name)
    rep = {"counterexample": job.name, "result": res, "version": __version__, "seed": job.seed}
    if job.name == "rumynin":
        rep["claims"] = {"membership=false": res["membership"] is False,
                         "residue=ad(f)ad(h)": bool(res["residue_is_adf_adh"])}
    else:
        rep["claims"] = {"defect=-X1": bool(res["defect_equals_minus_x1"]),
                         "E not in L": res["E_in_L"] is False}
    rep["timings"] = {"total": time.perf_counter() - t0}
    # the expected outcome is that every claim holds
    return rep, EXIT_OK if all(rep["claims"].values()) else EXIT_MISMATCH


def cmd_selftest(job, quick=False):
    """Every criterion grid point, in grid order; one row per point."""
    rows = []
    t0 = time.perf_counter()
    for g in CRITERION_GRID:
        if quick and g.spec.canonical() in SLOW:
            continue
        t = time.perf_counter()
        L = build_family(g.spec)
        r = run_criterion(L, g.spec, g.mode)
        row = {"shape": g.spec.canonical(), "mode": r.mode, "dim": L.dim,
               "failed": r.failed(), "expected_failures": list(g.expect_fail),
               "ok": sorted(r.failed()) == sorted(g.expect_fail)}
        row["_time"] = time.perf_counter() - t
        rows.append(row)
    rep = {"selftest": "criterion-grid", "quick": quick, "rows": rows,
           "all_ok": all(r["ok"] for r in rows), "version": __version__, "seed": job.seed,
           "timings": {"total": time.perf_counter() - t0,
                       "rows": {r["shape"]: r.pop("_time") for r in rows}}}
    return rep, EXIT_OK if rep["all_ok"] else EXIT_MISMATCH


# -- output --------------------------------------------------------------------------------

def render_json(rep, timings=False):
    rep = dict(rep)
    if not timings:
        rep.pop("timings", None)
    return json.dumps(rep, sort_keys=True, indent=2)


def render_text(rep):
    lines = []
    if "rows" in rep:
        lines.append("%-40s %-10s %6s  %-14s %s" % ("shape", "mode", "dim", "failed", "status"))
        for r in rep["rows"]:
            lines.append("%-40s %-10s %6d  %-14s %s" % (r["shape"], r["mode"], r["dim"],
                                                       ",".join(r["failed"]) or "-",
                                                       "ok" if r["ok"] else "MISMATCH"))
        lines.append("all rows ok: %s" % rep["all_ok"])
        return "\n".join(lines)
    width = max(len(k) for k in rep)
    for k in sorted(rep):
        v = rep[k]
        if isinstance(v, dict):
            v = json.dumps(v, sort_keys=True)
        lines.append("%-*s  %s" % (width, k, v))
    return "\n".join(lines)


COMMANDS = {"construct": cmd_construct, "invariants": cmd_invariants, "simplicity": cmd_simplicity,
            "verify": cmd_verify, "counterexample": cmd_counterexample}


def parser():
    ap = argparse.ArgumentParser(prog="cartanlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version="cartanlab " + __version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp_):
        sp_.add_argument("--seed", type=int, default=0)
        sp_.add_argument("--format", choices=("json", "text"), default="json")
        sp_.add_argument("--timings", action="store_true", help="include wall-clock timings in JSON")
        sp_.add_argument("--cache-dir", default=None)

    for name in ("construct", "invariants", "simplicity", "verify"):
        sp_ = sub.add_parser(name)
        sp_.add_argument("--family", choices=FAMILIES)
        sp_.add_argument("--p", type=int)
        sp_.add_argument("--m", type=int)
        sp_.add_argument("--n", help="comma list, e.g. 1,1,1")
        sp_.add_argument("--l", type=int)
        sp_.add_argument("--alpha", help="antisymmetric matrix: m*m row-major or upper-triangle entries")
        sp_.add_argument("--level", type=int)
        sp_.add_argument("--criterion", choices=("auto", "theorem", "corollary"), default="auto")
        common(sp_)
    sp_ = sub.add_parser("counterexample")
    sp_.add_argument("name")
    common(sp_)
    sp_ = sub.add_parser("selftest")
    sp_.add_argument("--quick", action="store_true", help="skip the grid points that take more than a few seconds")
    common(sp_)
    return ap


def run(argv=None):
    """Parse argv and run; returns (report dict or None, exit code, output text)."""
    ap = parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return None, EXIT_USAGE if e.code else EXIT_OK, ""
    try:
        if args.command == "selftest":
            job = JobSpec("selftest", seed=args.seed, fmt=args.format, cache_dir=args.cache_dir)
            rep, code = cmd_selftest(job, quick=args.quick)
        elif args.command == "counterexample":
            job = JobSpec("counterexample", seed=args.seed, fmt=args.format, name=args.name)
            rep, code = cmd_counterexample(job)
        else:
            job = JobSpec(args.command, family_spec(args), args.criterion, args.seed, args.format,
                          args.cache_dir)
            rep, code = COMMANDS[args.command](job)
    except UsageError as e:
        return None, EXIT_USAGE, "cartanlab: error: %s" % e
    text = render_text(rep) if args.format == "text" else render_json(rep, args.timings)
    return rep, code, text


def main(argv=None):
    rep, code, text = run(argv)
    if text:
        print(text, file=sys.stdout if rep is not None else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
