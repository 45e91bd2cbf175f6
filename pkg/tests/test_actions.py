import math

import numpy as np
import pytest

from birkhoff.actions import (action_contour, action_gap_integral,
                              action_norms, birkhoff_norm, compute_actions,
                              f_n, mean_value_nodes)
from birkhoff.errors import ConfigError, UndefinedNodeError
from birkhoff.pipeline import analyze
from birkhoff.potentials import (FourierPotential, Weight, gauge_shift,
                                 jbracket, sobolev_norm)


@pytest.fixture(scope="module")
def const_actions(const_half):
    return const_half.actions


def test_constant_actions_oracle(const_half, const_actions):
    a = 0.5
    as_ = const_actions
    assert as_.I[0] == pytest.approx(a * a, abs=1e-7)
    assert as_.J[(0, 3)] == pytest.approx(a ** 4 / 4.0, abs=1e-9)
    assert as_.J[(0, 5)] == pytest.approx(a ** 6 / 8.0, abs=1e-9)
    for n in as_.I:
        if n != 0:
            assert abs(as_.I[n]) < 1e-10


def test_constant_contour_matches(const_half):
    a = 0.5
    ic = action_contour(const_half.ev, const_half.sp, 0)
    assert ic == pytest.approx(a * a, abs=1e-9)


def test_f_n_positive_inside_gap(const_half):
    rec = const_half.sp.gap(0)
    mid = 0.5 * (rec.lamMinus + rec.lamPlus)
    assert f_n(const_half.ev, 0, mid) > 0.0
    assert f_n(const_half.ev, 0, rec.lamPlus) == pytest.approx(0.0, abs=1e-6)


def test_gap_integral_odd_levels_even_vanish(const_half):
    # psi = const is even; J_{0,2} integrates an odd function around tau = 0
    j2 = action_gap_integral(const_half.ev, const_half.sp, 0, k=2)
    assert abs(j2) < 1e-12


def test_parseval_identity(family20):
    # ||Omega(phi)||_0^2 = 2 sum I_n = ||phi||_0^2
    for an in family20[:5]:
        b0 = birkhoff_norm(an.actions, s=0.0)
        assert b0 == pytest.approx(sobolev_norm(an.phi, 0), rel=1e-6)


def test_action_norm_forms_agree(family20):
    an = family20[1]
    for s in (0.0, 1.0, 2.0):
        w = Weight("sobolev", s=0.5 * s)
        assert action_norms(an.actions, s=s, include_tail=False) == \
            pytest.approx(action_norms(an.actions, w=w, include_tail=False),
                          rel=1e-12)


def test_tail_allowance_is_positive_and_small(family20):
    an = family20[0]
    with_tail = action_norms(an.actions, s=2.0)
    without = action_norms(an.actions, s=2.0, include_tail=False)
    assert without < with_tail < without * (1.0 + 1e-4)


def test_mean_value_nodes_inside_gap(family20):
    an = family20[4]
    sp, as_ = an.sp, an.actions
    for n in sp.open_indices():
        if as_.I[n] <= 1e-12:
            continue
        for m in (1, 2, 3):
            z = mean_value_nodes(as_, sp, n, m)
            rec = sp.gap(n)
            assert rec.lamMinus - 1e-9 <= z <= rec.lamPlus + 1e-9


def test_mean_value_node_undefined_on_collapsed(const_half):
    with pytest.raises(UndefinedNodeError):
        mean_value_nodes(const_half.actions, const_half.sp, 1, 1)


def test_action_ratio_approaches_gap_square(family20):
    # 4 I_n / gamma_n^2 -> 1 for the largest open indices
    an = family20[6]
    sp, as_ = an.sp, an.actions
    opens = [n for n in sp.open_indices() if n != 0 and as_.I[n] > 1e-12]
    top = sorted(opens, key=lambda n: abs(n))[-max(1, len(opens) // 4):]
    for n in top:
        ratio = 4.0 * as_.I[n] / sp.gap(n).gamma ** 2
        assert abs(ratio - 1.0) <= 0.5


def test_gap_to_action_explicit_constant(family20):
    # |I_n| <= 2^11 (1 + ||phi||_1^2) gamma_n^2 above the localization index
    for an in family20[:5]:
        sp, as_ = an.sp, an.actions
        cap = 2048.0 * (1.0 + an.sp.h1 ** 2)
        for n in sp.indices:
            if 1 + abs(n) >= 8.0 * sp.h1 ** 2:
                assert abs(as_.I[n]) <= cap * sp.gap(n).gamma ** 2 + 1e-15


def test_gauge_shift_preserves_actions():
    phi = FourierPotential({0: 0.05, 1: 0.03})
    m = 1
    a0 = analyze(phi)
    a1 = analyze(gauge_shift(phi, m), n_max=a0.n_max + m)
    for n in a0.sp.open_indices():
        assert a1.actions.I[n + m] == pytest.approx(a0.actions.I[n],
                                                    rel=1e-6, abs=1e-12)


def test_levels_validation(const_half):
    with pytest.raises(ConfigError):
        compute_actions(const_half.ev, const_half.sp, levels=(0, 1))
    as_ = compute_actions(const_half.ev, const_half.sp, levels=(3,))
    assert 1 in as_.levels   # level 1 always present


def test_birkhoff_norm_requires_one_argument(const_half):
    with pytest.raises(ConfigError):
        birkhoff_norm(const_half.actions)
    with pytest.raises(ConfigError):
        action_norms(const_half.actions, s=1.0, w=Weight("sobolev", s=1.0))
