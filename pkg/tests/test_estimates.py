import math

import numpy as np
import pytest

from birkhoff.errors import ConfigError
from birkhoff.estimates import (assemble_report, check_act_sob_corollary,
                                check_act_sob_i, check_act_sob_ii,
                                check_act_west, check_b_est, check_H3_lemma,
                                check_sob_rep, potential_family)
from birkhoff.pipeline import analyze
from birkhoff.potentials import (FourierPotential, Weight, sobolev_norm)


@pytest.fixture(scope="module")
def zero_an():
    return analyze(FourierPotential.zero())


def test_const_act_sob_i(const_half):
    rec = check_act_sob_i(const_half.phi, 1, const_half.actions)
    assert rec["lhs"] == pytest.approx(0.25, abs=1e-7)
    assert rec["rhs0"] == pytest.approx(
        0.5 + (1 + math.sqrt(0.5)) ** 4 * 0.5, rel=1e-12)
    assert rec["ratio"] == pytest.approx(0.0527, abs=2e-4)


def test_const_act_sob_ii(const_half):
    rec = check_act_sob_ii(const_half.phi, 1, const_half.actions)
    assert rec["lhs"] == pytest.approx(0.5)
    assert rec["rhs0"] == pytest.approx(0.5625, abs=1e-7)
    assert rec["ratio"] == pytest.approx(8.0 / 9.0, abs=1e-4)


def test_const_b_est(const_half):
    rec = check_b_est(const_half.phi, 1, const_half.actions)
    assert rec["i"]["lhs"] == pytest.approx(math.sqrt(0.5), abs=1e-7)
    assert rec["ii"]["lhs"] == pytest.approx(math.sqrt(0.5))
    assert rec["i"]["ratio"] > 0 and rec["ii"]["ratio"] > 0


def test_const_act_west(const_half):
    w = Weight("sobolev", s=1.0)
    rec = check_act_west(const_half.phi, w, const_half.actions)
    wext = 1.0 + 8.0 * math.pi      # piecewise-linear extension at t = 8
    assert rec["i"]["lhs"] == pytest.approx(0.25, abs=1e-7)
    assert rec["i"]["rhs0"] == pytest.approx(wext ** 2 * 0.5, rel=1e-12)
    assert rec["ii"]["rhs0"] == pytest.approx(wext * math.sqrt(0.5), rel=1e-12)


def test_const_h3(const_half):
    rec = check_H3_lemma(const_half.phi, const_half.actions)
    assert rec["kinetic_lhs"] == pytest.approx(-0.0625)
    assert rec["passed"]


def test_const_sob_rep(const_half):
    rec = check_sob_rep(const_half.phi, 1, const_half.actions)
    assert rec["lhs"] == 0.0
    assert abs(rec["rhs"]) < 1e-10
    assert rec["passed"]


def test_zero_conventions(zero_an):
    assert check_act_sob_i(zero_an.phi, 1, zero_an.actions)["ratio"] == 0.0
    assert check_act_west(zero_an.phi, Weight("sobolev", s=1.0),
                          zero_an.actions)["i"]["ratio"] == 0.0
    assert check_H3_lemma(zero_an.phi, zero_an.actions)["passed"]
    assert check_sob_rep(zero_an.phi, 3, zero_an.actions)["residual"] == 0.0


def test_family_norm_targets():
    fam = potential_family(20)
    h1s = [sobolev_norm(phi, 1) for phi in fam]
    assert max(h1s) == pytest.approx(2.0, rel=1e-12)
    assert min(h1s) == pytest.approx(0.4, rel=1e-12)
    assert np.array_equal(fam[0].c, potential_family(20)[0].c)


def test_family_estimates_finite(family20):
    sub = family20[:6]
    for m in (1, 2, 3):
        rep = assemble_report(
            [check_act_sob_i(a.phi, m, a.actions) for a in sub])
        assert rep.passed and np.isfinite(rep.empiricalConstant)
        rep = assemble_report(
            [check_act_sob_ii(a.phi, m, a.actions) for a in sub])
        assert rep.passed and np.isfinite(rep.empiricalConstant)


def test_b_est_linked_to_act_sob_by_norm_identity(family20):
    # ||Omega||_m^2 = 2 ||I||_{l^1_{2m}}, so the squared map-norm lhs equals
    # twice the action-norm lhs and both checks share their constants
    from birkhoff.actions import action_norms, birkhoff_norm
    for an in family20[:4]:
        for m in (1, 2, 3):
            om = birkhoff_norm(an.actions, s=float(m))
            i2m = action_norms(an.actions, s=2.0 * m)
            assert om ** 2 == pytest.approx(2.0 * i2m, rel=1e-12)
            b = check_b_est(an.phi, m, an.actions)
            assert np.isfinite(b["i"]["ratio"]) and np.isfinite(b["ii"]["ratio"])


def test_corollary_real_exponents(family20):
    for an in family20[:4]:
        for s in (1.0, 1.5, 2.5):
            rec = check_act_sob_corollary(an.phi, s, an.actions)
            assert np.isfinite(rec["ratio"]) and rec["ratio"] >= 0.0
    with pytest.raises(ConfigError):
        check_act_sob_corollary(family20[0].phi, 0.5, family20[0].actions)


def test_m_validation(const_half):
    with pytest.raises(ConfigError):
        check_act_sob_i(const_half.phi, 4, const_half.actions)
    with pytest.raises(ConfigError):
        check_sob_rep(const_half.phi, 0, const_half.actions)
