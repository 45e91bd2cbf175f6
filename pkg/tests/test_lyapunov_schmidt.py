import cmath
import math

import numpy as np
import pytest

from birkhoff.errors import ConfigError, ThresholdError
from birkhoff.lyapunov_schmidt import (ReductionWorkspace,
                                       coefficient_bounds_check, detS_roots,
                                       ls_coefficients, operator_norm_checks)
from birkhoff.potentials import (FourierPotential, Weight, gauge_shift,
                                 random_potential)


def test_zero_potential_double_roots():
    ws = ReductionWorkspace(FourierPotential.zero(), 3)
    c = ls_coefficients(ws)
    assert abs(c["a_n"]) < 1e-14
    assert abs(c["b_nPlus"]) < 1e-14
    xi_p, xi_m = detS_roots(ws)
    assert abs(xi_p - 3 * math.pi) < 1e-9
    assert abs(xi_m - 3 * math.pi) < 1e-9


def test_constant_potential_roots():
    a = 0.5
    n = 4
    ws = ReductionWorkspace(FourierPotential.constant(a), n)
    xi_p, xi_m = detS_roots(ws)
    mu = math.sqrt((n * math.pi) ** 2 + a * a)
    assert abs(xi_p - mu) < 1e-9
    assert abs(xi_m - mu) < 1e-9


def test_gauge_shifted_constant_oracle():
    # the open gap of e^{2 pi i x} * 0.1 sits at n=1 with half-width 0.1
    phi = gauge_shift(FourierPotential.constant(0.1), 1)
    ws = ReductionWorkspace(phi, 1)
    c = ls_coefficients(ws)
    assert abs(c["a_n"]) < 1e-12
    assert c["b_nPlus"] == pytest.approx(0.1, abs=1e-12)
    assert c["b_nMinus"] == pytest.approx(0.1, abs=1e-12)
    xi_p, xi_m = detS_roots(ws)
    assert xi_p - xi_m == pytest.approx(0.2, abs=1e-10)
    assert 0.5 * (xi_p + xi_m) == pytest.approx(math.pi, abs=1e-10)


def test_truncation_stability():
    phi = random_potential(seed=5, amplitude=0.8)
    n = 12
    base = ReductionWorkspace(phi, n)
    fine = ReductionWorkspace(phi, n, truncation=2 * base.truncation)
    cb = ls_coefficients(base)
    cf = ls_coefficients(fine)
    for key in cb:
        assert abs(cb[key] - cf[key]) <= 1e-8 * max(1.0, abs(cf[key]))


def test_a_n_is_analytic():
    # Cauchy-Riemann residual of a_n on a 5-point stencil
    phi = random_potential(seed=5, amplitude=0.8)
    ws = ReductionWorkspace(phi, 10)
    lam0 = 10 * math.pi + 0.1
    h = 1e-4
    a = {d: ls_coefficients_at(ws, lam0 + d)["a_n"]
         for d in (0, h, -h, 1j * h, -1j * h)}
    dx = (a[h] - a[-h]) / (2 * h)
    dy = (a[1j * h] - a[-1j * h]) / (2 * h)
    assert abs(dx - dy / 1j) < 1e-6


def ls_coefficients_at(ws, lam):
    return ws.coefficients(lam)


def test_operator_norm_bounds():
    phi = random_potential(seed=5, amplitude=0.8)
    w = Weight("abel", 1.0, 0.2)
    for n in (10, 14):
        rep = operator_norm_checks(ReductionWorkspace(phi, n), w)
        assert rep["passed"], rep
        assert rep["t_norm"] <= rep["t_bound"]
        assert rep["t2_norm"] <= rep["t2_bound"]


def test_coefficient_bounds():
    phi = random_potential(seed=5, amplitude=0.8)
    w = Weight("abel", 1.0, 0.2)
    rep = coefficient_bounds_check(ReductionWorkspace(phi, 12), w)
    assert rep["passed"], rep


def test_neumann_threshold_enforced():
    with pytest.raises(ThresholdError):
        ReductionWorkspace(FourierPotential.constant(3.0), 2)


def test_config_validation():
    phi = random_potential(seed=1)
    with pytest.raises(ConfigError):
        ReductionWorkspace(phi, 4, truncation=10)
    with pytest.raises(ConfigError):
        ReductionWorkspace(phi, 4, lam=9 * math.pi)


def test_root_gap_bound():
    # |xi+ - xi-|^2 <= 6 |b+ b-| at every checked index
    phi = random_potential(seed=7, amplitude=1.0)
    for n in (6, 7, 8):
        ws = ReductionWorkspace(phi, n)
        c = ls_coefficients(ws)
        xi_p, xi_m = detS_roots(ws)
        assert abs(xi_p - xi_m) ** 2 <= \
            6.0 * abs(c["b_nPlus"] * c["b_nMinus"]) * (1 + 1e-9)
