import math

import numpy as np
import pytest

from birkhoff.discriminant import DiscriminantEvaluator
from birkhoff.errors import ConfigError, RangeError
from birkhoff.pipeline import analyze
from birkhoff.potentials import (FourierPotential, Weight, gauge_shift,
                                 random_potential, sobolev_norm)
from birkhoff.spectrum import (count_in_rectangle, gap_report,
                               localization_report, locate_spectrum)


@pytest.fixture(scope="module")
def const_sp(const_half):
    return const_half.sp


def test_constant_gap_zero(const_sp):
    g0 = const_sp.gap(0)
    assert g0.gamma == pytest.approx(1.0, abs=1e-8)   # gamma_0 = 2a
    assert g0.lamMinus == pytest.approx(-0.5, abs=1e-8)
    assert g0.lamPlus == pytest.approx(0.5, abs=1e-8)


def test_constant_all_other_gaps_collapsed(const_sp):
    for n in const_sp.indices:
        rec = const_sp.gap(n)
        if n != 0:
            assert rec.collapsed
            mu = math.copysign(math.sqrt((n * math.pi) ** 2 + 0.25), n)
            assert rec.lamPlus == pytest.approx(mu, abs=1e-8)


def test_interlacing(family20):
    for an in family20[:4]:
        sp = an.sp
        seq = []
        for n in sp.indices:
            rec = sp.gap(n)
            assert rec.lamMinus <= rec.lamPlus + 1e-12
            seq.extend([rec.lamMinus, rec.lamPlus])
        assert np.all(np.diff(seq) > -1e-10)


def test_discriminant_large_inside_gap_small_between(family20):
    an = family20[3]
    sp = an.sp
    for n in sp.open_indices()[:6]:
        rec = sp.gap(n)
        sign = 1.0 if n % 2 == 0 else -1.0
        t = np.linspace(rec.lamMinus, rec.lamPlus, 19)[1:-1]
        d, _, _, _ = an.ev.real_grid(t)
        assert np.all(sign * d >= 2.0 - 1e-9)
    ns = sp.indices
    for i in range(len(ns) - 1):
        mid = 0.5 * (sp.gap(ns[i]).lamPlus + sp.gap(ns[i + 1]).lamMinus)
        d, _, _, _ = an.ev.real_grid(np.array([mid]))
        assert abs(d[0]) <= 2.0 + 1e-12


def test_critical_points_tracked(const_sp):
    for n in const_sp.indices:
        assert n in const_sp.crit
        rec = const_sp.gap(n)
        assert rec.lamMinus - 1e-9 <= const_sp.crit[n] <= rec.lamPlus + 1e-9


def test_count_in_rectangle_matches_indexing(family20):
    # a rectangle cut at the midpoints between gap clusters must contain
    # exactly two eigenvalues per enclosed index
    an = family20[2]
    sp = an.sp
    k = 3
    lo = 0.5 * (sp.gap(-k - 1).lamPlus + sp.gap(-k).lamMinus)
    hi = 0.5 * (sp.gap(k).lamPlus + sp.gap(k + 1).lamMinus)
    cnt = count_in_rectangle(an.ev, 0.5 * (lo + hi), 0.5 * (hi - lo),
                             sp.h1 + 0.5, base_nodes=512)
    assert cnt == 2 * (2 * k + 1)


def test_localization_report(family20):
    for an in family20[:5]:
        rep = localization_report(an.sp, an.phi)
        assert rep.passed
        assert rep.worst_margin > 0


def test_gauge_shift_spectrum_translation():
    # shifted potentials translate the whole periodic spectrum by m pi
    phi = random_potential(seed=8, amplitude=0.15)
    m = 1
    a0 = analyze(phi)
    a1 = analyze(gauge_shift(phi, m), n_max=a0.n_max + m)
    for n in a0.sp.indices:
        if abs(n + m) > a1.sp.n_max:
            continue
        r0 = a0.sp.gap(n)
        r1 = a1.sp.gap(n + m)
        assert r1.gamma == pytest.approx(r0.gamma, abs=5e-7)
        assert r1.tau == pytest.approx(r0.tau + m * math.pi, abs=5e-7)


def test_gap_report_abel(family20):
    an = family20[0]
    rep = gap_report(an.sp, an.phi, Weight("abel", 1.0, 0.2))
    assert rep.passed
    assert rep.sum_lhs <= rep.sum_rhs


def test_gap_report_requires_m1_weight():
    an = analyze(FourierPotential.constant(0.25))
    w = Weight("custom", table=np.ones(200))   # flat weight is not M^1
    with pytest.raises(ConfigError):
        gap_report(an.sp, an.phi, w)


def test_nmax_below_threshold_rejected():
    phi = random_potential(seed=2).scaled(2.0 / sobolev_norm(
        random_potential(seed=2), 1))
    ev = DiscriminantEvaluator(phi, scheme="magnus4")
    with pytest.raises((ConfigError, RangeError)):
        locate_spectrum(ev, 5)


def test_residuals_small(const_sp):
    for n in const_sp.indices:
        rec = const_sp.gap(n)
        assert abs(rec.resDot) < 1e-9
        assert abs(rec.resMinus) < 1e-9 and abs(rec.resPlus) < 1e-9
