"""Action variables I_n and higher actions J_{n,k}.

Two independent methods:

* gap-integral: J_{n,k} = (2/pi) int_{lam_n^-}^{lam_n^+} lam^{k-1} f_n dlam
  with f_n = arccosh((-1)^n Delta/2), after lam = tau + (gamma/2) cos(theta)
  which removes the square-root endpoint singularity; Gauss-Legendre in theta
  with node doubling.
* contour: I_n = (1/pi) oint lam dDelta / sqrt(Delta^2 - 4) dlam over a
  rectangle around the gap, the root branch fixed on the top edge and
  continued by sign-continuity.

Weighted l^1 action norms and Birkhoff norms carry explicit truncation-tail
allowances from TailMajorant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConfigError, GeometryError, QuadratureError,
                     SpectrumInconsistencyError, UndefinedNodeError)
from .potentials import jbracket
from .tails import TailMajorant

__all__ = ["ActionSpectrum", "f_n", "action_gap_integral", "action_contour",
           "compute_actions", "action_norms", "birkhoff_norm",
           "mean_value_nodes"]


@dataclass
class ActionSpectrum:
    I: dict
    J: dict                      # (n, k) -> J_{n,k}
    quadratureNodes: int
    method: str
    n_max: int
    levels: tuple
    potential: object = None
    tail: TailMajorant | None = None
    node_counts: dict = field(default_factory=dict)


def _f_values(ev, n, lams):
    """f_n on an array of real lambda inside the closed n-th gap."""
    sign = 1.0 if n % 2 == 0 else -1.0
    d, _, _, _ = ev.real_grid(np.asarray(lams, dtype=np.float64))
    y = 0.5 * sign * d
    if np.any(y < 1.0 - 1e-12):
        raise SpectrumInconsistencyError(
            "(-1)^n Delta/2 = %.17g < 1 inside gap n=%d" % (float(np.min(y)), n))
    s = np.maximum(y - 1.0, 0.0)
    small = s < 1e-6
    # arccosh(1+s) = sqrt(2s) (1 - s/12 + 3 s^2/160 - ...)
    series = np.sqrt(2.0 * s) * (1.0 - s / 12.0 + 3.0 * s * s / 160.0)
    safe = np.arccosh(np.maximum(y, 1.0))
    return np.where(small, series, safe)


def f_n(ev, n, lam):
    return float(_f_values(ev, n, np.asarray([lam]))[0])


# ---------------------------------------------------------------------------
# gap-integral method


def _gap_integrals(ev, sp, n, ks, rel_tol=1e-9, atol=1e-5, max_doublings=8,
                   stall_tol=1e-6):
    """J_{n,k} for all k in ks from shared discriminant samples."""
    rec = sp.gap(n)
    if rec.collapsed:
        return {k: 0.0 for k in ks}, 0
    tau = rec.tau
    hg = 0.5 * rec.gamma
    m = 16
    prev = None
    prev_d = None
    for _ in range(max_doublings + 1):
        x, wq = np.polynomial.legendre.leggauss(m)
        th = 0.5 * math.pi * (x + 1.0)
        wth = 0.5 * math.pi * wq
        lam = tau + hg * np.cos(th)
        f = _f_values(ev, n, lam)
        base = (2.0 / math.pi) * hg * f * np.sin(th) * wth
        cur = {k: float(np.sum(lam ** (k - 1) * base)) for k in ks}
        if prev is not None:
            d = {k: abs(cur[k] - prev[k]) for k in ks}

            def done(k):
                if d[k] < rel_tol * max(abs(cur[k]), atol):
                    return True
                # stagnation at the discriminant noise floor: successive
                # doublings stop contracting while the change is already
                # below the noise-scale relative level
                return (prev_d is not None and d[k] > 0.25 * prev_d[k]
                        and d[k] < stall_tol * max(abs(cur[k]), atol))

            if all(done(k) for k in ks):
                return cur, m
            prev_d = d
        prev = cur
        m *= 2
    raise QuadratureError(
        "gap integral n=%d not converged after doubling to %d nodes: %r"
        % (n, m // 2, cur))


def action_gap_integral(ev, sp, n, k=1, rel_tol=1e-9, atol=1e-5,
                        max_doublings=8):
    vals, _ = _gap_integrals(ev, sp, n, (int(k),), rel_tol, atol, max_doublings)
    return vals[int(k)]


# ---------------------------------------------------------------------------
# contour method


def _continue_branch(v, r0):
    """Square root of v along a path, sign-continued from r0 at v[0]."""
    r = np.sqrt(v.astype(np.complex128))
    if abs(r[0] - r0) > abs(r[0] + r0):
        r = -r
    flips = np.cumsum(np.real(r[1:] * np.conj(r[:-1])) < 0.0)
    r[1:] *= np.where(flips % 2 == 0, 1.0, -1.0)
    return r


def _contour_nodes(rec, delta, total):
    """Closed CCW polyline starting at the top-center of the rectangle."""
    x0 = rec.lamMinus - delta
    x1 = rec.lamPlus + delta
    xc = 0.5 * (x0 + x1)
    pts = [complex(xc, delta), complex(x0, delta), complex(x0, -delta),
           complex(x1, -delta), complex(x1, delta), complex(xc, delta)]
    lens = np.array([abs(pts[i + 1] - pts[i]) for i in range(5)])
    counts = np.maximum(8, np.round(total * lens / np.sum(lens)).astype(int))
    z = []
    for i in range(5):
        seg = pts[i] + (pts[i + 1] - pts[i]) * np.arange(counts[i]) / counts[i]
        z.append(seg)
    return np.concatenate(z)


def action_contour(ev, sp, n, base_nodes=512, rel_tol=1e-8, max_doublings=6):
    rec = sp.gap(n)
    if rec.collapsed:
        return 0.0
    delta = max(rec.gamma, math.pi / 8.0) / 4.0
    left = sp.entries[n - 1].lamPlus if (n - 1) in sp.entries else sp.crit[n - 1]
    right = sp.entries[n + 1].lamMinus if (n + 1) in sp.entries else sp.crit[n + 1]
    room = min(rec.lamMinus - left, right - rec.lamPlus)
    if room <= 0:
        raise GeometryError("no room for contour around gap n=%d" % n)
    delta = min(delta, 0.45 * room)
    if delta < 1e-6:
        raise GeometryError("contour margin %.3g too small at n=%d" % (delta, n))

    # branch seed: climb from the real axis at tau, where the canonical root
    # equals (-1)^n * principal sqrt(Delta^2 - 4) > 0 on the upper side
    ladder = rec.tau + 1j * delta * 2.0 ** np.arange(-24.0, 0.5, 0.5)
    d, _, _, _ = ev.raw(ladder)
    v = d * d - 4.0
    if np.any(np.abs(np.angle(v[1:] / v[:-1])) > 0.5 * math.pi):
        raise GeometryError("branch seed ladder under-resolved at n=%d" % n)
    sign0 = 1.0 if n % 2 == 0 else -1.0
    r = _continue_branch(v, sign0 * np.sqrt(v[0]))
    r_top = r[-1]

    nodes = int(base_nodes)
    prev = None
    prev_rich = None
    for _ in range(max_doublings + 1):
        z = _contour_nodes(rec, delta, nodes)
        d, d1, _, _ = ev.raw(z)
        v = d * d - 4.0
        vn = np.roll(v, -1)
        if np.any(np.abs(np.angle(vn / v)) > 0.5 * math.pi):
            prev = prev_rich = None   # branch-jump risk: discard and refine
            nodes *= 2
            continue
        r = _continue_branch(v, r_top)
        # closed-loop branch consistency
        if abs(r[0] - r[-1]) > abs(r[0] + r[-1]):
            prev = prev_rich = None
            nodes *= 2
            continue
        g = z * d1 / r
        cur = float(np.real(
            np.sum(0.5 * (g + np.roll(g, -1)) * (np.roll(z, -1) - z)) / math.pi))
        # corners keep the raw trapezoid at O(h^2); converge on the O(h^4)
        # extrapolated sequence instead
        rich = None if prev is None else (4.0 * cur - prev) / 3.0
        if rich is not None and prev_rich is not None and \
                abs(rich - prev_rich) <= max(rel_tol * abs(rich), 1e-13):
            return rich
        prev, prev_rich = cur, rich
        nodes *= 2
    raise QuadratureError(
        "contour action n=%d not converged at %d nodes (last %r vs %r)"
        % (n, nodes // 2, prev_rich, prev))


# ---------------------------------------------------------------------------
# assembly, norms, nodes


def compute_actions(ev, sp, levels=(1, 2, 3, 5, 7), method="gap-integral",
                    rel_tol=1e-9, atol=1e-5, max_doublings=8):
    levels = tuple(sorted(set(int(k) for k in levels)))
    if any(k < 1 for k in levels):
        raise ConfigError("levels must be integers >= 1")
    if 1 not in levels:
        levels = (1,) + levels
    I = {}
    J = {}
    node_counts = {}
    worst = 0
    for n in sp.indices:
        if method == "gap-integral":
            vals, m = _gap_integrals(ev, sp, n, levels, rel_tol, atol,
                                     max_doublings)
        elif method == "contour":
            vals = {k: 0.0 for k in levels}
            vals[1] = action_contour(ev, sp, n)
            m = 0
        else:
            raise ConfigError("unknown method %r" % (method,))
        I[n] = vals[1]
        for k in levels:
            J[(n, k)] = vals[k]
        node_counts[n] = m
        worst = max(worst, m)
    return ActionSpectrum(I=I, J=J, quadratureNodes=worst, method=method,
                          n_max=sp.n_max, levels=levels,
                          potential=ev.potential,
                          tail=TailMajorant(ev.potential, sp.n_max),
                          node_counts=node_counts)


def action_norms(as_, s=None, w=None, include_tail=True):
    """sum <2 n pi>^s |I_n|  (Sobolev form)  or  sum w_{2n}^2 |I_n| (weight
    form), plus the truncation-tail allowance."""
    if (s is None) == (w is None):
        raise ConfigError("pass exactly one of s, w")
    ns = np.array(sorted(as_.I))
    iv = np.abs(np.array([as_.I[n] for n in ns]))
    if s is not None:
        main = float(np.sum(jbracket(2.0 * math.pi * ns) ** float(s) * iv))
        tail_fn = lambda nn: float(s) * np.log(jbracket(2.0 * math.pi * np.asarray(nn)))
    else:
        main = float(np.sum(w.values(2 * ns) ** 2 * iv))
        tail_fn = lambda nn: 2.0 * w.log_values(2 * np.asarray(nn))
    if include_tail and as_.tail is not None:
        main += float(as_.tail.weighted_action_tail(tail_fn))
    return main


def birkhoff_norm(as_, s=None, w=None, include_tail=True):
    """sqrt(2 sum <2 n pi>^{2s} I_n) resp. sqrt(2 sum w_{2n}^2 I_n)."""
    if (s is None) == (w is None):
        raise ConfigError("pass exactly one of s, w")
    if s is not None:
        return math.sqrt(2.0 * action_norms(as_, s=2.0 * float(s),
                                            include_tail=include_tail))
    return math.sqrt(2.0 * action_norms(as_, w=w, include_tail=include_tail))


def mean_value_nodes(as_, sp, n, m):
    """zeta_{n,m} = (J_{n,2m+1}/I_n)^{1/(2m)}, signed into the n-th gap."""
    m = int(m)
    if m < 1:
        raise ConfigError("m must be >= 1")
    I = as_.I.get(n, 0.0)
    if I <= 0.0:
        raise UndefinedNodeError("I_%d = 0; mean-value node undefined" % n)
    key = (n, 2 * m + 1)
    if key not in as_.J:
        raise ConfigError("level k=%d not computed; extend levels" % (2 * m + 1))
    z = (as_.J[key] / I) ** (1.0 / (2.0 * m))
    rec = sp.gap(n)
    tol = 1e-9 * max(1.0, abs(rec.lamMinus), abs(rec.lamPlus))
    for cand in (z, -z):
        if rec.lamMinus - tol <= cand <= rec.lamPlus + tol:
            return float(cand)
    raise SpectrumInconsistencyError(
        "mean-value node %.17g outside gap [%.17g, %.17g] at n=%d"
        % (z, rec.lamMinus, rec.lamPlus, n))
