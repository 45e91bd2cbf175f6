"""Two-sided norm inequalities between a potential and its action spectrum.

Every check returns a record {lhs, rhs0, ratio} where rhs0 is the right-hand
side stripped of its absolute constant; the empirical constant for a family
is the maximum ratio.  Truncation tails are always folded in the pessimistic
direction: added to quantities on the left, omitted from quantities on the
right, so a finite ratio is sound despite truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .actions import action_norms, birkhoff_norm
from .errors import ConfigError
from .hierarchy import _sign_factor, hform_check, hierarchy_compute
from .potentials import (random_potential, sobolev_norm, weight_extension,
                         weighted_norm)

__all__ = ["EstimateReport", "check_act_sob_i", "check_act_sob_ii",
           "check_b_est", "check_act_west", "check_act_sob_corollary",
           "check_H3_lemma", "check_sob_rep", "potential_family",
           "assemble_report"]


@dataclass
class EstimateReport:
    family: str
    perPotential: list = field(default_factory=list)
    empiricalConstant: float = 0.0
    passed: bool = False


def assemble_report(records, family=""):
    ratios = [r["ratio"] for r in records]
    ok = all(math.isfinite(r) and r >= 0.0 for r in ratios)
    return EstimateReport(family=family, perPotential=list(records),
                          empiricalConstant=max(ratios) if ratios else 0.0,
                          passed=bool(ok))


def _record(lhs, rhs0):
    if lhs == 0.0 and rhs0 == 0.0:
        ratio = 0.0                      # vacuous inequality
    elif rhs0 == 0.0:
        ratio = math.inf
    else:
        ratio = lhs / rhs0
    return {"lhs": float(lhs), "rhs0": float(rhs0), "ratio": float(ratio)}


def _actions_for(phi, as_):
    if as_ is not None:
        return as_
    from .pipeline import analyze
    return analyze(phi).actions


def _check_m(m):
    m = int(m)
    if m < 1 or m > 3:
        raise ConfigError("m must be in 1..3")
    return m


def check_act_sob_i(phi, m, as_=None):
    """||I||_{l^1_{2m}} <= c_m^2 (||phi||_m^2 + (1+||phi||_1)^{4m} ||phi||_0^2)."""
    m = _check_m(m)
    as_ = _actions_for(phi, as_)
    lhs = action_norms(as_, s=2.0 * m)
    h0 = sobolev_norm(phi, 0)
    h1 = sobolev_norm(phi, 1)
    hm = sobolev_norm(phi, m)
    rhs0 = hm * hm + (1.0 + h1) ** (4 * m) * h0 * h0
    return _record(lhs, rhs0)


def check_act_sob_ii(phi, m, as_=None):
    """||phi||_m^2 <= d_m^2 (||I||_{l^1_{2m}} + (1+||I||_{l^1_2})^{4m-3} ||I||_{l^1})."""
    m = _check_m(m)
    as_ = _actions_for(phi, as_)
    hm = sobolev_norm(phi, m)
    i2m = action_norms(as_, s=2.0 * m, include_tail=False)
    i2 = action_norms(as_, s=2.0, include_tail=False)
    i0 = action_norms(as_, s=0.0, include_tail=False)
    rhs0 = i2m + (1.0 + i2) ** (4 * m - 3) * i0
    return _record(hm * hm, rhs0)


def check_b_est(phi, m, as_=None):
    """Both directions between ||Omega(phi)||_m and the Sobolev norms of phi."""
    m = _check_m(m)
    as_ = _actions_for(phi, as_)
    h0 = sobolev_norm(phi, 0)
    h1 = sobolev_norm(phi, 1)
    hm = sobolev_norm(phi, m)
    om = birkhoff_norm(as_, s=float(m))
    rec_i = _record(om, hm + (1.0 + h1) ** (2 * m) * h0)
    om_l = birkhoff_norm(as_, s=float(m), include_tail=False)
    o1 = birkhoff_norm(as_, s=1.0, include_tail=False)
    o0 = birkhoff_norm(as_, s=0.0, include_tail=False)
    rec_ii = _record(hm, om_l + (1.0 + o1) ** (4 * m - 3) * o0)
    return {"i": rec_i, "ii": rec_ii}


def check_act_west(phi, w, as_=None):
    """(i) sum w_{2n}^2 |I_n| <= c_w^2 w[16||phi||_w^2]^2 ||phi||_w^2 and
    (ii) ||Omega||_w <= c_w w[16||phi||_w^2] ||phi||_w."""
    as_ = _actions_for(phi, as_)
    nw = weighted_norm(phi, w)
    wext = weight_extension(w, 16.0 * nw * nw)
    lhs_i = action_norms(as_, w=w)
    rec_i = _record(lhs_i, wext * wext * nw * nw)
    rec_ii = _record(birkhoff_norm(as_, w=w), wext * nw)
    return {"i": rec_i, "ii": rec_ii}


def check_act_sob_corollary(phi, s, as_=None):
    """Real exponent s >= 1: ||I||_{l^1_{2s}} <= c_s^2 (1+||phi||_s)^{4s} ||phi||_s^2."""
    s = float(s)
    if s < 1.0:
        raise ConfigError("corollary requires s >= 1")
    as_ = _actions_for(phi, as_)
    lhs = action_norms(as_, s=2.0 * s)
    hs = sobolev_norm(phi, s)
    rhs0 = (1.0 + hs) ** (4.0 * s) * hs * hs
    return _record(lhs, rhs0)


def check_H3_lemma(phi, as_=None, hev=None):
    """H_3 - 2 H_1^2 <= sum (2 n pi)^2 I_n and
    (1/3) ||phi||_1^2 <= ||I||_{l^1_2} + ||I||_{l^1}^2; reports both slacks."""
    if not phi.real_type:
        raise ConfigError("H3 lemma requires a real-type potential")
    as_ = _actions_for(phi, as_)
    if hev is None or hev.k_max < 3:
        hev = hierarchy_compute(phi, 3)
    cal = _sign_factor("calibrated", 1) / _sign_factor(hev.sign, 1)
    h1 = (hev.H[1] * cal).real
    cal3 = _sign_factor("calibrated", 3) / _sign_factor(hev.sign, 3)
    h3 = (hev.H[3] * cal3).real
    lhs_a = h3 - 2.0 * h1 * h1
    ns = np.array(sorted(as_.I))
    rhs_a = float(np.sum((2.0 * math.pi * ns) ** 2
                         * np.array([as_.I[n] for n in ns])))
    lhs_b = sobolev_norm(phi, 1) ** 2 / 3.0
    i2 = action_norms(as_, s=2.0, include_tail=False)
    i0 = action_norms(as_, s=0.0, include_tail=False)
    rhs_b = i2 + i0 * i0
    slack_a = rhs_a - lhs_a
    slack_b = rhs_b - lhs_b
    tiny = 1e-12 * max(1.0, abs(rhs_a), abs(rhs_b))
    return {
        "kinetic_lhs": float(lhs_a), "kinetic_rhs": float(rhs_a),
        "kinetic_slack": float(slack_a),
        "norm_lhs": float(lhs_b), "norm_rhs": float(rhs_b),
        "norm_slack": float(slack_b),
        "passed": bool(slack_a >= -tiny and slack_b >= -tiny),
    }


def check_sob_rep(phi, m, as_=None, hev=None, tol=1e-4):
    """(1/2)||phi_(m)||_0^2 = 4^m sum_n J_{n,2m+1} - int p_{2m} dx, with the
    p-integral recovered as the remainder of the H_{2m+1} normal form."""
    m = _check_m(m)
    as_ = _actions_for(phi, as_)
    k = 2 * m + 1
    if hev is None or hev.k_max < k:
        hev = hierarchy_compute(phi, k)
    hf = hform_check(phi, m, hev)
    lhs = hf.derivative_energy          # = (1/2)||phi_(m)||_0^2 for real type
    js = sum(as_.J[(n, k)] for n in as_.I if (n, k) in as_.J)
    if any((n, k) not in as_.J for n in as_.I):
        raise ConfigError("level k=%d missing from action spectrum" % k)
    rhs = 4.0 ** m * js - hf.remainder
    tail = 0.0
    if as_.tail is not None:
        tail = 4.0 ** m * float(as_.tail.weighted_action_tail(
            lambda nn: 2.0 * m * np.log(math.pi * np.asarray(nn) + 1.0)))
    residual = max(0.0, abs(lhs - rhs) - tail) / max(abs(lhs), 1.0)
    return {"lhs": float(lhs), "rhs": float(rhs), "tail": float(tail),
            "residual": float(residual), "passed": bool(residual <= tol)}


def potential_family(count=20, K=8, s=1.0, amplitude=1.0, seed0=100):
    """Seeded random potentials rescaled to H^1 norms sweeping [0.4, 2.0]."""
    out = []
    for i in range(int(count)):
        target = 0.4 + 1.6 * (i % 10) / 9.0
        phi = random_potential(K=K, s=s, seed=seed0 + i, amplitude=amplitude)
        h1 = sobolev_norm(phi, 1)
        out.append(phi.scaled(target / h1))
    return out
