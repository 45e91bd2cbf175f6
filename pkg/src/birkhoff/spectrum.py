"""Locate the periodic spectrum: gap edges, critical points, lengths.

For real-type potentials everything is real and interlaced, so the solvers
are one-dimensional: vectorized Newton on dDelta for the critical points
lambda_n^bullet, then bracketed bisection + Newton on (-1)^n Delta - 2 for
the gap edges.  Indexing is validated by parity signs, strict ordering, and
an argument-principle count over the low-frequency box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BoundaryError, ConfigError, ConvergenceError,
                     IndexingError, RangeError)
from .potentials import jbracket, sobolev_norm, validate_weight, weighted_norm
from .tails import TailMajorant

__all__ = ["GapRecord", "PeriodicSpectrum", "locate_spectrum",
           "count_in_rectangle", "localization_report", "gap_report"]


@dataclass
class GapRecord:
    lamMinus: float
    lamPlus: float
    lamDot: float
    tau: float
    gamma: float
    collapsed: bool
    gDot: float        # (-1)^n Delta(lamDot) - 2
    resMinus: float
    resPlus: float
    resDot: float


@dataclass
class PeriodicSpectrum:
    entries: dict
    n_max: int
    n_loc: int
    box_half_width: float
    box_height: float
    h1: float
    gap_tol: float
    collapse_g_tol: float
    crit: dict = field(default_factory=dict)  # lambda_n^bullet for |n| <= n_max+1

    def gap(self, n):
        return self.entries[n]

    @property
    def indices(self):
        return sorted(self.entries)

    def open_indices(self):
        return [n for n in self.indices if not self.entries[n].collapsed]


def _newton_critical(ev, centers, radius=1.25, max_iter=60, tol=1e-11):
    """Vectorized Newton for dDelta = 0 from the given start points."""
    x = centers.astype(np.float64).copy()
    lo = centers - radius
    hi = centers + radius
    active = np.ones(x.shape, dtype=bool)
    for _ in range(max_iter):
        if not np.any(active):
            break
        _, d1, d2, _ = ev.real_grid(x[active])
        step = d1 / d2
        xa = np.clip(x[active] - step, lo[active], hi[active])
        moved = np.abs(xa - x[active])
        x[active] = xa
        sub = active.copy()
        sub[active] = moved > tol * np.maximum(1.0, np.abs(xa))
        active = sub
    # final residual pass
    _, d1, d2, _ = ev.real_grid(x)
    res = np.abs(d1) / np.maximum(1.0, np.abs(d2))
    return x, res


def _scan_low_critical(ev, lo, hi, step):
    """Critical points of Delta in (lo, hi) by sign-change scan on dDelta."""
    m = max(8, int(math.ceil((hi - lo) / step)))
    grid = np.linspace(lo, hi, m + 1)
    _, d1, _, _ = ev.real_grid(grid)
    sgn = np.sign(d1)
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    roots = []
    for i in flips:
        a, b = grid[i], grid[i + 1]
        fa = d1[i]
        for _ in range(60):
            mid = 0.5 * (a + b)
            _, fm, _, _ = ev.real_grid(np.asarray([mid]))
            fm = fm[0]
            if fa * fm <= 0:
                b = mid
            else:
                a, fa = mid, fm
            if b - a < 1e-13 * max(1.0, abs(a)):
                break
        roots.append(0.5 * (a + b))
    return np.asarray(roots)


def _bisect_edges(ev, signs, lo, hi, n_iter=40):
    """Vectorized bisection for g = sign*Delta - 2 = 0; g(lo) <= 0 <= g(hi)
    is arranged by the caller through bracket orientation (swap allowed)."""
    a = lo.copy()
    b = hi.copy()
    for _ in range(n_iter):
        mid = 0.5 * (a + b)
        d, _, _, _ = ev.real_grid(mid)
        g = signs * d - 2.0
        neg = g < 0.0
        a = np.where(neg, mid, a)
        b = np.where(neg, b, mid)
        if np.max(np.abs(b - a)) < 1e-12:
            break
    x = 0.5 * (a + b)
    # Newton polish, clipped to the bracket
    for _ in range(3):
        d, d1, _, _ = ev.real_grid(x)
        g = signs * d - 2.0
        gp = signs * d1
        step = np.where(np.abs(gp) > 1e-300, g / gp, 0.0)
        x = np.clip(x - step, np.minimum(a, b), np.maximum(a, b))
    return x


def locate_spectrum(ev, n_max, gap_tol=None, collapse_g_tol=1e-11, box_check=True):
    phi = ev.potential
    if not phi.real_type:
        raise ConfigError("locate_spectrum requires a real-type potential")
    h1 = sobolev_norm(phi, 1)
    n_loc = int(math.ceil(8.0 * h1 * h1))
    n_max = int(n_max)
    if n_max < n_loc + 2:
        raise RangeError("N_max=%d below localization threshold N_loc+2=%d"
                         % (n_max, n_loc + 2))
    if gap_tol is None:
        gap_tol = 1e-9 * max(1.0, h1)

    # critical points above threshold (padded by one index for brackets)
    lo_idx = max(n_loc - 1, 0)
    hi_idx = n_max + 1
    ns_hi = np.array([n for n in range(-hi_idx, hi_idx + 1) if abs(n) >= lo_idx])
    crit = {}
    xs, res = _newton_critical(ev, np.pi * ns_hi.astype(np.float64))
    if np.any(res > 1e-10):
        bad = ns_hi[res > 1e-10]
        raise ConvergenceError("critical-point Newton stagnated at n=%s" % bad.tolist())
    for n, x in zip(ns_hi, xs):
        crit[int(n)] = float(x)

    # low-frequency region: scan between the bracketing above-threshold points
    if n_loc >= 2:
        lo_b = crit[-(n_loc - 1)]
        hi_b = crit[n_loc - 1]
        expected = 2 * n_loc - 3
        step = math.pi / 8.0
        for _ in range(4):
            roots = _scan_low_critical(ev, lo_b + 1e-9, hi_b - 1e-9, step)
            if len(roots) == expected:
                break
            step *= 0.5
        if len(roots) != expected:
            raise IndexingError("found %d low critical points, expected %d"
                                % (len(roots), expected))
        for j, n in enumerate(range(-(n_loc - 2), n_loc - 1)):
            crit[n] = float(roots[j])

    ns_all = np.arange(-hi_idx, hi_idx + 1)
    lam_dot = np.array([crit[int(n)] for n in ns_all])
    if np.any(np.diff(lam_dot) <= 0):
        raise IndexingError("critical points not strictly increasing")

    d_dot, d1_dot, d2_dot, err_dot = ev.real_grid(lam_dot)
    signs = np.where(ns_all % 2 == 0, 1.0, -1.0)
    g_dot = signs * d_dot - 2.0
    if np.any(g_dot < -1e-6):
        n_bad = ns_all[np.argmin(g_dot)]
        raise IndexingError("parity check failed at n=%d: (-1)^n Delta = %.6g"
                            % (n_bad, (signs * d_dot)[np.argmin(g_dot)]))

    # argument-principle count of the low box
    if box_check and n_loc >= 2:
        lo_mid = 0.5 * (crit[-(n_loc - 1)] + crit[-(n_loc - 2)])
        hi_mid = 0.5 * (crit[n_loc - 2] + crit[n_loc - 1])
        center = complex(0.5 * (lo_mid + hi_mid), 0.0)
        # enough boundary nodes that the winding phase cannot alias
        count = count_in_rectangle(ev, center, 0.5 * (hi_mid - lo_mid), h1 + 0.5,
                                   base_nodes=max(256, 16 * (2 * n_loc - 3)))
        if count != 2 * (2 * n_loc - 3):
            raise IndexingError("box count %d != expected %d (winding check)"
                                % (count, 2 * (2 * n_loc - 3)))

    # gap edges for |n| <= n_max
    inner = (ns_all >= -n_max) & (ns_all <= n_max)
    idx = np.nonzero(inner)[0]
    col_tol = np.maximum(collapse_g_tol, 10.0 * err_dot[idx])
    is_col = g_dot[idx] <= col_tol
    open_pos = idx[~is_col]
    lam_minus = lam_dot.copy()
    lam_plus = lam_dot.copy()
    res_minus = np.zeros(lam_dot.shape)
    res_plus = np.zeros(lam_dot.shape)
    if open_pos.size:
        sg = signs[open_pos]
        lam_minus[open_pos] = _bisect_edges(ev, sg, lam_dot[open_pos - 1], lam_dot[open_pos])
        lam_plus[open_pos] = _bisect_edges(ev, sg, lam_dot[open_pos + 1], lam_dot[open_pos])
        for side, arr, res_arr in (("minus", lam_minus, res_minus), ("plus", lam_plus, res_plus)):
            d, d1, _, _ = ev.real_grid(arr[open_pos])
            r = np.abs(sg * d - 2.0) / np.maximum(1.0, np.abs(d1))
            res_arr[open_pos] = r
            if np.any(r > 1e-10):
                raise ConvergenceError("edge residual stagnation (%s side) at n=%s"
                                       % (side, ns_all[open_pos][r > 1e-10].tolist()))

    entries = {}
    for j, n in zip(idx, ns_all[idx]):
        collapsed = bool(g_dot[j] <= max(collapse_g_tol, 10.0 * err_dot[j]))
        if collapsed:
            lm = lp = float(lam_dot[j])
            gamma = 0.0
        else:
            lm, lp = float(lam_minus[j]), float(lam_plus[j])
            gamma = lp - lm
            if gamma < 0:
                raise IndexingError("negative gap length at n=%d" % n)
            if gamma <= gap_tol:
                collapsed = True
        entries[int(n)] = GapRecord(
            lamMinus=lm, lamPlus=lp, lamDot=float(lam_dot[j]),
            tau=0.5 * (lm + lp), gamma=gamma, collapsed=collapsed,
            gDot=float(g_dot[j]), resMinus=float(res_minus[j]),
            resPlus=float(res_plus[j]), resDot=float(np.abs(d1_dot[j])),
        )

    # ordering invariant across consecutive indices
    for n in range(-n_max, n_max):
        if not entries[n].lamPlus < entries[n + 1].lamMinus:
            raise IndexingError("ordering violated between n=%d and n=%d" % (n, n + 1))

    return PeriodicSpectrum(
        entries=entries, n_max=n_max, n_loc=n_loc,
        box_half_width=(8.0 * h1 * h1 - 0.5) * math.pi, box_height=h1,
        h1=h1, gap_tol=gap_tol, collapse_g_tol=collapse_g_tol,
        crit={int(n): float(crit[int(n)]) for n in ns_all},
    )


# ---------------------------------------------------------------------------


def count_in_rectangle(ev, center, half_width, half_height, base_nodes=256):
    """Winding number of Delta^2 - 4 along the rectangle boundary = number of
    periodic eigenvalues inside, with multiplicity."""
    for attempt in range(3):
        grow = 1.0 + 0.013 * attempt
        hw = half_width * grow
        hh = half_height * grow
        corners = [center + complex(-hw, -hh), center + complex(hw, -hh),
                   center + complex(hw, hh), center + complex(-hw, hh)]

        def boundary(t):
            # t in [0,1) around the perimeter, piecewise linear
            t = np.asarray(t) * 4.0
            seg = np.minimum(t.astype(int), 3)
            frac = t - seg
            z = np.empty(t.shape, dtype=np.complex128)
            for s in range(4):
                msk = seg == s
                if np.any(msk):
                    z0, z1 = corners[s], corners[(s + 1) % 4]
                    z[msk] = z0 + (z1 - z0) * frac[msk]
            return z

        ts = np.linspace(0.0, 1.0, base_nodes, endpoint=False)
        zs = boundary(ts)
        d, _, _, _ = ev.raw(zs)
        w = d * d - 4.0
        scale = max(np.max(np.abs(w)), 1.0)
        if np.min(np.abs(w)) < 1e-8 * scale:
            continue  # too close to a root; perturb
        ok = True
        for _ in range(16):
            dphi = np.angle(np.roll(w, -1) / w)
            coarse = np.abs(dphi) > 0.5 * math.pi
            if not np.any(coarse):
                break
            if ts.size > 2 ** 18:
                ok = False
                break
            # insert midpoints after every flagged segment
            nxt = np.roll(ts, -1)
            nxt = np.where(nxt > ts, nxt, nxt + 1.0)
            tmid = np.mod((ts + nxt)[coarse] / 2.0, 1.0)
            zm = boundary(tmid)
            dm, _, _, _ = ev.raw(zm)
            wm = dm * dm - 4.0
            if np.min(np.abs(wm)) < 1e-8 * scale:
                ok = False
                break
            ts = np.concatenate([ts, tmid])
            order = np.argsort(ts)
            ts = ts[order]
            w = np.concatenate([w, wm])[order]
        else:
            ok = False
        if not ok:
            continue
        total = float(np.sum(np.angle(np.roll(w, -1) / w)))
        wind = total / (2.0 * math.pi)
        if abs(wind - round(wind)) > 0.05:
            continue
        return int(round(wind))
    raise BoundaryError("rectangle boundary too close to a root after 3 perturbations")


# ---------------------------------------------------------------------------
# reports


@dataclass
class LocalizationReport:
    per_index: dict = field(default_factory=dict)
    worst_margin: float = np.inf
    passed: bool = False


def localization_report(sp, phi):
    """Displacement bounds for <n> >= N_loc; box membership below."""
    h1 = sp.h1
    rep = LocalizationReport()
    worst = np.inf
    ok_all = True
    for n, rec in sp.entries.items():
        an = 1 + abs(n)
        if an >= sp.n_loc:
            disp = max(abs(rec.lamMinus - n * math.pi), abs(rec.lamPlus - n * math.pi))
            bound = h1 * h1 / an + math.sqrt(2.0) * h1 / (1 + 2 * abs(n))
            cap_ok = bound <= math.pi / 5.0 + 1e-12
            ok = disp <= bound + 1e-12 and cap_ok
            margin = bound - disp
        else:
            disp = max(abs(rec.lamMinus), abs(rec.lamPlus))
            bound = sp.box_half_width
            ok = disp <= bound + 1e-12
            margin = bound - disp
        rep.per_index[n] = {"displacement": disp, "bound": bound, "ok": ok}
        ok_all &= ok
        worst = min(worst, margin)
    rep.worst_margin = float(worst)
    rep.passed = bool(ok_all)
    return rep


@dataclass
class GapEstimateReport:
    threshold: int = 0
    sum_lhs: float = 0.0
    sum_rhs: float = 0.0
    tail: float = 0.0
    individual: dict = field(default_factory=dict)
    below_threshold: dict = field(default_factory=dict)
    passed: bool = False


def gap_report(sp, phi, w, n_start=None):
    """Proposition-style weighted gap-sum bound plus per-index bounds."""
    wrep = validate_weight(w)
    if not wrep.m1:
        raise ConfigError("gap_report requires an M^1 weight")
    nw = weighted_norm(phi, w)
    if n_start is None:
        n_start = max(0, int(math.ceil(8.0 * nw * nw)) - 1)
    if 1 + n_start < 8.0 * nw * nw or n_start > sp.n_max:
        raise RangeError("threshold <N> >= 8||phi||_w^2 = %.3f unsatisfiable "
                         "within N_max=%d" % (8.0 * nw * nw, sp.n_max))
    rep = GapEstimateReport(threshold=int(n_start))

    lhs = 0.0
    for n, rec in sp.entries.items():
        if abs(n) >= n_start:
            lhs += float(w.values(np.asarray([2 * n]))[0]) ** 2 * rec.gamma ** 2
    tm = TailMajorant(phi, sp.n_max)
    tail = tm.weighted_gamma_sq_tail(lambda nn: w.log_values(2 * np.asarray(nn)))
    rep.tail = float(tail)
    lhs += tail

    # ||R_N phi||_w^2: lattice modes |2k| >= 2 n_start
    ks = phi.ks
    keep = np.abs(ks) >= n_start
    rn_sq = float(np.sum(
        (w.values(2 * ks[keep]) ** 2)
        * (np.abs(phi.c[keep]) ** 2 + np.abs(phi.p[::-1][keep]) ** 2)
    )) if np.any(keep) else 0.0
    rhs = 6.0 * rn_sq + 1152.0 * nw ** 6 / (1.0 + n_start)
    rep.sum_lhs = float(lhs)
    rep.sum_rhs = float(rhs)
    passed = lhs <= rhs * (1.0 + 1e-12)

    for n, rec in sp.entries.items():
        wn = float(w.values(np.asarray([2 * n]))[0])
        val = wn * rec.gamma
        bound = 4.0 * nw
        if 1 + abs(n) >= 8.0 * nw * nw:
            ok = val <= bound * (1.0 + 1e-12)
            rep.individual[n] = {"lhs": val, "rhs": bound, "ok": ok}
            passed &= ok
        else:
            rep.below_threshold[n] = {"lhs": val, "rhs": bound}
    rep.passed = bool(passed)
    return rep
