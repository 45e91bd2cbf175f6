"""Command-line front end.

Subcommands: discriminant, spectrum, actions, hierarchy, ls-check, estimates,
verify-all.  Exit codes: 0 success, 2 configuration/parse error, 3 numerical
failure; failures emit a machine-readable diagnostics JSON on stderr.  All
output files are written atomically (temp file + rename) and all CSV floats
use shortest round-trip decimal formatting.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import estimates as est
from .actions import action_contour, compute_actions
from .discriminant import DiscriminantEvaluator
from .errors import BirkhoffError, ConfigError, RangeError
from .hierarchy import hierarchy_compute, trace_check
from .lyapunov_schmidt import (ReductionWorkspace, coefficient_bounds_check,
                               detS_roots, ls_coefficients,
                               operator_norm_checks)
from .pipeline import analyze, choose_n_max
from .potentials import (FourierPotential, Weight, potential_from_json,
                         sobolev_norm, weight_from_json)
from .spectrum import locate_spectrum

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _fmt(x):
    """Shortest decimal that round-trips (repr of a Python float/int/bool)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".birkhoff-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v
                              for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read %s file %r: %s" % (what, path, exc))
    except ValueError as exc:
        raise ConfigError("malformed JSON in %s file %r: %s" % (what, path, exc))


def _load_potential(path):
    return potential_from_json(_load_json(path, "potential"))


def _auto_nmax(phi, nmax):
    need = int(math.ceil(8.0 * sobolev_norm(phi, 1) ** 2)) + 2
    if nmax is None:
        return max(need, 24)
    if nmax < need:
        print("warning: nmax %d below threshold, raised to %d" % (nmax, need),
              file=sys.stderr)
        return need
    return int(nmax)


def _apply_threads(args):
    n = getattr(args, "threads", None)
    if n is None:
        envv = os.environ.get("BIRKHOFF_THREADS")
        n = int(envv) if envv else None
    if n is not None:
        try:
            import numba
            numba.set_num_threads(max(1, int(n)))
        except ImportError:
            pass


# ---------------------------------------------------------------------------
# subcommands


def cmd_discriminant(args):
    phi = _load_potential(args.potential)
    grid = _load_json(args.grid, "grid")
    if "points" in grid:
        lams = np.array([complex(p[0], p[1] if len(p) > 1 else 0.0)
                         for p in grid["points"]])
    elif {"start", "stop", "num"} <= set(grid):
        lams = np.linspace(float(grid["start"]), float(grid["stop"]),
                           int(grid["num"])) + 1j * float(grid.get("imag", 0.0))
    else:
        raise ConfigError("grid JSON needs 'points' or start/stop/num")
    ev = DiscriminantEvaluator(phi, subintervals=args.nx, scheme=args.scheme)
    d, d1, _, err = ev.raw(lams)
    rows = [(z.real, z.imag, dd.real, dd.imag, d1d.real, d1d.imag, e)
            for z, dd, d1d, e in zip(lams, d, d1, err)]
    _write_csv(args.out,
               ["lambda_re", "lambda_im", "delta_re", "delta_im",
                "ddelta_re", "ddelta_im", "err"], rows)
    return 0


def cmd_spectrum(args):
    phi = _load_potential(args.potential)
    nmax = _auto_nmax(phi, args.nmax)
    ev = DiscriminantEvaluator(phi, subintervals=args.nx, scheme=args.scheme)
    sp = locate_spectrum(ev, nmax)
    rows = []
    for n in sp.indices:
        r = sp.gap(n)
        rows.append((n, r.lamMinus, r.lamPlus, r.lamDot, r.tau, r.gamma,
                     r.collapsed, r.resMinus, r.resPlus, r.resDot))
    _write_csv(args.out,
               ["n", "lam_minus", "lam_plus", "lam_dot", "tau", "gamma",
                "collapsed", "res_minus", "res_plus", "res_dot"], rows)
    return 0


def cmd_actions(args):
    phi = _load_potential(args.potential)
    nmax = _auto_nmax(phi, args.nmax)
    levels = tuple(int(t) for t in args.levels.split(","))
    ev = DiscriminantEvaluator(phi, subintervals=args.nx, scheme=args.scheme)
    sp = locate_spectrum(ev, nmax)
    rows = []
    if args.method in ("gap-integral", "both"):
        as_ = compute_actions(ev, sp, levels=levels)
        contour = {}
        if args.method == "both":
            contour = {n: action_contour(ev, sp, n) for n in sp.indices}
        for n in sp.indices:
            for k in as_.levels:
                e = abs(contour[n] - as_.I[n]) if k == 1 and n in contour else 0.0
                rows.append((n, k, as_.J[(n, k)], "gap-integral", e))
        for n, v in contour.items():
            rows.append((n, 1, v, "contour", abs(v - as_.I[n])))
    elif args.method == "contour":
        for n in sp.indices:
            rows.append((n, 1, action_contour(ev, sp, n), "contour", 0.0))
    else:
        raise ConfigError("unknown method %r" % (args.method,))
    _write_csv(args.out, ["n", "k", "J", "method", "err"], rows)
    return 0


def cmd_hierarchy(args):
    phi = _load_potential(args.potential)
    hev = hierarchy_compute(phi, args.kmax, sign=args.sign)
    out = {str(k): {"re": hev.H[k].real, "im": hev.H[k].imag}
           for k in sorted(hev.H)}
    _write_json(args.out, out)
    return 0


def _parse_range(spec):
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in spec.split(",")]


def cmd_ls_check(args):
    phi = _load_potential(args.potential)
    w = weight_from_json(_load_json(args.weight, "weight")) if args.weight else None
    rows = []
    all_ok = True
    for n in _parse_range(args.n):
        ws = ReductionWorkspace(phi, n)
        c = ls_coefficients(ws)
        xi_p, xi_m = detS_roots(ws)
        gamma_sq = abs(xi_p - xi_m) ** 2
        gap_ok = gamma_sq <= 6.0 * abs(c["b_nPlus"] * c["b_nMinus"]) * (1 + 1e-9)
        ops_ok = bounds_ok = True
        if w is not None:
            ops_ok = operator_norm_checks(ws, w)["passed"]
            bounds_ok = coefficient_bounds_check(ws, w)["passed"]
        all_ok &= gap_ok and ops_ok and bounds_ok
        rows.append((n, xi_p.real, xi_p.imag, xi_m.real, xi_m.imag,
                     c["a_n"].real, c["a_n"].imag,
                     c["b_nPlus"].real, c["b_nPlus"].imag,
                     c["b_nMinus"].real, c["b_nMinus"].imag,
                     bool(gap_ok), bool(ops_ok), bool(bounds_ok)))
    _write_csv(args.out,
               ["n", "xi_plus_re", "xi_plus_im", "xi_minus_re", "xi_minus_im",
                "a_re", "a_im", "b_plus_re", "b_plus_im",
                "b_minus_re", "b_minus_im", "gap_bound_ok", "op_norms_ok",
                "coeff_bounds_ok"], rows)
    return 0 if all_ok else EXIT_NUMERICAL


def _family_from_json(obj):
    if "potentials" in obj:
        return [potential_from_json(p) for p in obj["potentials"]]
    return est.potential_family(
        count=int(obj.get("count", 20)), K=int(obj.get("K", 8)),
        s=float(obj.get("s", 1.0)),
        amplitude=float(obj.get("amplitude", 1.0)),
        seed0=int(obj.get("seed0", 100)))


def _report_obj(theorem, records, extra=None):
    rep = est.assemble_report(records)
    out = {"theorem": theorem, "perPotential": rep.perPotential,
           "empiricalConstant": rep.empiricalConstant, "passed": rep.passed}
    if extra:
        out.update(extra)
    return out


def cmd_estimates(args):
    fam = _family_from_json(_load_json(args.family, "family"))
    theorems = args.theorems.split(",")
    known = {"b-est", "act-sob", "act-west", "corollary", "h3", "sob-rep"}
    bad = [t for t in theorems if t not in known]
    if bad:
        raise ConfigError("unknown theorems %r (choose from %s)"
                          % (bad, sorted(known)))
    analyses = [analyze(phi) for phi in fam]
    reports = []
    for t in theorems:
        if t == "act-sob":
            for m in (1, 2, 3):
                reports.append(_report_obj(
                    "act-sob-i",
                    [est.check_act_sob_i(a.phi, m, a.actions) for a in analyses],
                    {"m": m}))
                reports.append(_report_obj(
                    "act-sob-ii",
                    [est.check_act_sob_ii(a.phi, m, a.actions) for a in analyses],
                    {"m": m}))
        elif t == "b-est":
            for m in (1, 2, 3):
                recs = [est.check_b_est(a.phi, m, a.actions) for a in analyses]
                reports.append(_report_obj(
                    "b-est-i", [r["i"] for r in recs], {"m": m}))
                reports.append(_report_obj(
                    "b-est-ii", [r["ii"] for r in recs], {"m": m}))
        elif t == "act-west":
            w = Weight("abel", 1.0, 0.2)
            recs = [est.check_act_west(a.phi, w, a.actions) for a in analyses]
            reports.append(_report_obj("act-west-i", [r["i"] for r in recs],
                                       {"weight": "abel(1,0.2)"}))
            reports.append(_report_obj("act-west-ii", [r["ii"] for r in recs],
                                       {"weight": "abel(1,0.2)"}))
        elif t == "corollary":
            for s in (1.0, 1.5, 2.5):
                reports.append(_report_obj(
                    "act-sob-corollary",
                    [est.check_act_sob_corollary(a.phi, s, a.actions)
                     for a in analyses], {"s": s}))
        elif t == "h3":
            recs = [est.check_H3_lemma(a.phi, a.actions, a.hierarchy)
                    for a in analyses]
            ok = all(r["passed"] for r in recs)
            reports.append({"theorem": "h3", "perPotential": recs,
                            "passed": ok})
        elif t == "sob-rep":
            for m in (1, 2, 3):
                recs = [est.check_sob_rep(a.phi, m, a.actions, a.hierarchy)
                        for a in analyses]
                ok = all(r["passed"] for r in recs)
                reports.append({"theorem": "sob-rep", "m": m,
                                "perPotential": recs, "passed": ok})
    _write_json(args.out, reports)
    return 0 if all(r["passed"] for r in reports) else EXIT_NUMERICAL


def cmd_verify_all(args):
    failures = []

    def check(name, ok):
        print("%-40s %s" % (name, "PASS" if ok else "FAIL"))
        if not ok:
            failures.append(name)

    # constant oracle
    a = 0.5
    phi = FourierPotential.constant(a)
    ev = DiscriminantEvaluator(phi, scheme="magnus4")
    lams = np.linspace(-20.0, 20.0, 100)
    d, _, _, _ = ev.real_grid(lams)
    exact = 2.0 * np.cos(np.sqrt(lams ** 2 - a * a + 0j)).real
    check("constant-potential discriminant",
          float(np.max(np.abs(d - exact) / np.abs(exact))) < 1e-8)

    an = analyze(phi)
    g0 = an.sp.gap(0)
    check("gamma_0 = 2a", abs(g0.gamma - 2 * a) < 1e-8)
    check("I_0 = a^2", abs(an.actions.I[0] - a * a) < 1e-7)

    # random potential: method agreement + trace formula
    count = 2 if args.quick else 5
    for phi in est.potential_family(count):
        an = analyze(phi)
        ok = True
        for n in an.sp.open_indices():
            ic = action_contour(an.ev, an.sp, n)
            ok &= abs(ic - an.actions.I[n]) <= max(1e-6 * an.actions.I[n], 1e-12)
        check("contour/gap-integral agreement", ok)
        tc = trace_check(phi, an.actions, 1, an.hierarchy)
        check("level-1 trace formula", tc.passed)
        h3 = est.check_H3_lemma(phi, an.actions, an.hierarchy)
        check("H3 inequalities", h3["passed"])
        sr = est.check_sob_rep(phi, 1, an.actions, an.hierarchy)
        check("Sobolev representation m=1", sr["passed"])
    return 0 if not failures else EXIT_NUMERICAL


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="birkhoff")
    p.add_argument("--threads", type=int, default=None,
                   help="numba thread count (overrides BIRKHOFF_THREADS)")
    sub = p.add_subparsers(dest="cmd", required=True)

    d = sub.add_parser("discriminant")
    d.add_argument("--potential", required=True)
    d.add_argument("--grid", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--nx", type=int, default=None)
    d.add_argument("--scheme", default="magnus4")
    d.set_defaults(fn=cmd_discriminant)

    s = sub.add_parser("spectrum")
    s.add_argument("--potential", required=True)
    s.add_argument("--nmax", type=int, default=None)
    s.add_argument("--out", required=True)
    s.add_argument("--nx", type=int, default=None)
    s.add_argument("--scheme", default="magnus4")
    s.set_defaults(fn=cmd_spectrum)

    a = sub.add_parser("actions")
    a.add_argument("--potential", required=True)
    a.add_argument("--nmax", type=int, default=None)
    a.add_argument("--levels", default="1,2,3,5,7")
    a.add_argument("--method", default="gap-integral",
                   choices=["gap-integral", "contour", "both"])
    a.add_argument("--out", required=True)
    a.add_argument("--nx", type=int, default=None)
    a.add_argument("--scheme", default="magnus4")
    a.set_defaults(fn=cmd_actions)

    h = sub.add_parser("hierarchy")
    h.add_argument("--potential", required=True)
    h.add_argument("--kmax", type=int, default=7)
    h.add_argument("--sign", default="calibrated")
    h.add_argument("--out", required=True)
    h.set_defaults(fn=cmd_hierarchy)

    ls = sub.add_parser("ls-check")
    ls.add_argument("--potential", required=True)
    ls.add_argument("--n", required=True, help="e.g. 4..32 or 4,8,12")
    ls.add_argument("--weight", default=None)
    ls.add_argument("--out", required=True)
    ls.set_defaults(fn=cmd_ls_check)

    e = sub.add_parser("estimates")
    e.add_argument("--family", required=True)
    e.add_argument("--theorems", default="b-est,act-sob,act-west")
    e.add_argument("--out", required=True)
    e.set_defaults(fn=cmd_estimates)

    v = sub.add_parser("verify-all")
    v.add_argument("--quick", action="store_true")
    v.set_defaults(fn=cmd_verify_all)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_threads(args)
    try:
        return args.fn(args)
    except (ConfigError, RangeError) as exc:
        json.dump({"error": "config", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except BirkhoffError as exc:
        json.dump({"error": "numerical", "kind": type(exc).__name__,
                   "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
