"""Finite-section model of the two-mode reduction around lambda = n pi.

Basis e_m = exp(i pi m x) on the 2-periodic lattice; vector functions split
as f = (f_-, f_+) with f_- expanded in e_{-m}.  The anti-diagonal
multiplication operator Phi couples the blocks through the Hankel-banded
matrices

    Bminus[l, m] = c_{-(l+m)/2}   (l + m even),
    Bplus [l, m] = p_{ (l+m)/2}   (l + m even),

where c_k / p_k are the potential's 1-periodic Fourier modes, and
A_lambda^{-1} Q_n is the diagonal 1/(lambda - m pi) with the n-th entry
removed.  Everything is truncated to |m| <= K_t; convergence in K_t is a
tested invariant, not an assumption.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConditioningError, ConfigError, ConvergenceError,
                     ThresholdError)
from .potentials import jbracket, sobolev_norm, weighted_norm

__all__ = ["ReductionWorkspace", "ls_coefficients", "detS_roots",
           "operator_norm_checks", "coefficient_bounds_check"]


class ReductionWorkspace:
    """Truncated operator data for one index n at one spectral parameter."""

    def __init__(self, potential, n, lam=None, truncation=None,
                 enforce_strip=True):
        self.potential = potential
        self.n = int(n)
        if lam is None:
            lam = self.n * math.pi
        self.lam = complex(lam)
        K = potential.K
        if truncation is None:
            truncation = 4 * (abs(self.n) + K + 8)
        self.truncation = int(truncation)
        if self.truncation < abs(self.n) + 8 * K:
            raise ConfigError("truncation %d below |n| + 8K = %d"
                              % (self.truncation, abs(self.n) + 8 * K))
        if enforce_strip and abs(self.lam.real - self.n * math.pi) > math.pi / 2 + 1e-12:
            raise ConfigError("lambda outside the strip around n pi")

        # Neumann-series precondition in its weight-free form
        l0_sq = float(np.sum(np.abs(potential.c) ** 2))
        if 4.0 * l0_sq / (1 + abs(self.n)) >= 1.0:
            raise ThresholdError(
                "Neumann proxy 4||phi||_0^2/<n> = %.3f >= 1 at n=%d"
                % (4.0 * l0_sq / (1 + abs(self.n)), self.n))

        ms = np.arange(-self.truncation, self.truncation + 1)
        self.ms = ms
        tot = np.add.outer(ms, ms)
        even = tot % 2 == 0
        km = np.where(even, -tot // 2, 0)
        kp = np.where(even, tot // 2, 0)
        cs = np.zeros(2 * self.truncation + 2, dtype=np.complex128)
        ps = np.zeros(2 * self.truncation + 2, dtype=np.complex128)
        ks = potential.ks
        cs[ks] = potential.c
        ps[ks] = potential.p
        inband_m = even & (np.abs(km) <= K)
        inband_p = even & (np.abs(kp) <= K)
        # the transfer-matrix orientation swaps the component roles relative
        # to the reduction: the minus block couples through p, the plus
        # block through c (checked against the gauge-shifted constant, whose
        # open gap must appear at leading order as b_n^{pm} ~ c_n)
        self.Bminus = np.where(inband_m, ps[km], 0.0)
        self.Bplus = np.where(inband_p, cs[kp], 0.0)
        self._idx_n = np.searchsorted(ms, self.n)

    def resolvent_diag(self, lam=None):
        """diag of A_lambda^{-1} Q_n on the truncated lattice."""
        if lam is None:
            lam = self.lam
        denom = lam - self.ms * math.pi
        denom[self._idx_n] = 1.0
        d = 1.0 / denom
        d[self._idx_n] = 0.0
        return d

    def t_matrix(self, lam=None):
        """T_n as a 2x2 block matrix [[0, Bm D], [Bp D, 0]]."""
        d = self.resolvent_diag(lam)
        N = self.ms.size
        t = np.zeros((2 * N, 2 * N), dtype=np.complex128)
        t[:N, N:] = self.Bminus * d
        t[N:, :N] = self.Bplus * d
        return t

    def coefficients(self, lam=None, sym_tol=1e-9):
        """a_n, b_n+ and b_n- at the given lambda (default: the workspace's)."""
        d = self.resolvent_diag(lam)
        bm_d = self.Bminus * d
        bp_d = self.Bplus * d
        U = bm_d @ bp_d              # T_n^2 on the minus block
        V = bp_d @ bm_d              # T_n^2 on the plus block
        eye = np.eye(self.ms.size)
        i_n = self._idx_n
        try:
            x = np.linalg.solve(eye - U, self.Bminus[:, i_n])
            y = np.linalg.solve(eye - V, self.Bplus[:, i_n])
        except np.linalg.LinAlgError as exc:
            raise ConditioningError("(I - T_n^2) solve failed at n=%d: %s"
                                    % (self.n, exc))
        a_plus = complex((bp_d @ x)[i_n])
        a_minus = complex((bm_d @ y)[i_n])
        if abs(a_plus - a_minus) > sym_tol * max(1.0, abs(a_plus)):
            raise ConditioningError(
                "a_n^+ != a_n^- at n=%d: %r vs %r" % (self.n, a_plus, a_minus))
        return {"a_n": 0.5 * (a_plus + a_minus),
                "b_nPlus": complex(y[i_n]),
                "b_nMinus": complex(x[i_n])}


def ls_coefficients(ws):
    return ws.coefficients()


def _dets(ws, lam):
    c = ws.coefficients(lam)
    return ((lam - ws.n * math.pi - c["a_n"]) ** 2
            - c["b_nPlus"] * c["b_nMinus"])


def detS_roots(ws, tol=1e-12, max_iter=50):
    """Both roots of det S_n(lambda) = (lambda - n pi - a_n)^2 - b+ b-."""
    n = ws.n
    c0 = ws.coefficients(n * math.pi)
    sigma = cmath.sqrt(c0["b_nPlus"] * c0["b_nMinus"])
    center = n * math.pi + c0["a_n"]
    scale = max(abs(sigma), 1e-3)
    roots = []
    for base in (center + sigma, center - sigma):
        seeds = [base, base + 0.5 * scale, base - 0.5 * scale,
                 base + 0.5j * scale, base - 0.5j * scale]
        root = None
        for seed in seeds:
            lam = complex(seed)
            ok = False
            h = 1e-6
            for _ in range(max_iter):
                g = _dets(ws, lam)
                gp = (_dets(ws, lam + h) - _dets(ws, lam - h)) / (2.0 * h)
                if gp == 0:
                    break
                step = g / gp
                lam = lam - step
                if abs(step) < tol * max(1.0, abs(lam)):
                    ok = True
                    break
            if ok and abs(lam.real - n * math.pi) <= math.pi / 2 + 1e-9:
                root = lam
                break
        if root is None:
            raise ConvergenceError("det S_n Newton diverged at n=%d" % n)
        roots.append(root)
    xi_m, xi_p = sorted(roots, key=lambda z: z.real)
    return xi_p, xi_m


def coefficient_bounds_check(ws, w, lam=None):
    """|a_n| <= ||phi||_w^2/<n> and w_2n |b_n^pm - leading mode| <=
    (8/<n>) ||phi||_w^2 ||phi_pm||_w on the truncated model."""
    c = ws.coefficients(lam)
    phi = ws.potential
    n = ws.n
    an = 1 + abs(n)
    nw = weighted_norm(phi, w)
    w2 = w.values(2 * phi.ks) ** 2
    norm_minus = math.sqrt(float(np.sum(w2 * np.abs(phi.p) ** 2)))
    norm_plus = math.sqrt(float(np.sum(w2 * np.abs(phi.c) ** 2)))
    lead_plus = phi.coeff(n) if abs(n) <= phi.K else 0.0
    lead_minus = phi.plus_coeff(-n) if abs(n) <= phi.K else 0.0
    w2n = w.value(2 * n)
    a_ok = abs(c["a_n"]) <= nw * nw / an * (1.0 + 1e-10)
    bp = w2n * abs(c["b_nPlus"] - lead_plus)
    bm = w2n * abs(c["b_nMinus"] - lead_minus)
    b_rhs_p = 8.0 * nw * nw * norm_plus / an
    b_rhs_m = 8.0 * nw * nw * norm_minus / an
    return {
        "a_n": c["a_n"], "a_bound": nw * nw / an, "a_ok": bool(a_ok),
        "b_plus_lhs": bp, "b_plus_rhs": b_rhs_p,
        "b_minus_lhs": bm, "b_minus_rhs": b_rhs_m,
        "b_ok": bool(bp <= b_rhs_p * (1.0 + 1e-10)
                     and bm <= b_rhs_m * (1.0 + 1e-10)),
        "passed": bool(a_ok and bp <= b_rhs_p * (1.0 + 1e-10)
                       and bm <= b_rhs_m * (1.0 + 1e-10)),
    }


def operator_norm_checks(ws, w, lam=None):
    """Truncated shifted-weighted norms of T_n and T_n^2 against the bounds
    2 ||phi||_w and (4/<n>) ||phi||_w^2."""
    nw = weighted_norm(ws.potential, w)
    n = ws.n
    wn = np.concatenate([w.values(ws.ms + n)] * 2)
    wmn = np.concatenate([w.values(ws.ms - n)] * 2)
    t = ws.t_matrix(lam)
    # T_n : H_{w;-n} -> H_{w;n}
    t_norm = float(np.linalg.svd((wn[:, None] * t) / wmn[None, :],
                                 compute_uv=False)[0])
    t2 = t @ t
    t2_norm = float(np.linalg.svd((wn[:, None] * t2) / wn[None, :],
                                  compute_uv=False)[0])
    t_bound = 2.0 * nw
    t2_bound = 4.0 * nw * nw / (1 + abs(n))
    return {
        "t_norm": t_norm, "t_bound": t_bound,
        "t_ok": t_norm <= t_bound * (1.0 + 1e-10),
        "t2_norm": t2_norm, "t2_bound": t2_bound,
        "t2_ok": t2_norm <= t2_bound * (1.0 + 1e-10),
        "passed": (t_norm <= t_bound * (1.0 + 1e-10)
                   and t2_norm <= t2_bound * (1.0 + 1e-10)),
    }
