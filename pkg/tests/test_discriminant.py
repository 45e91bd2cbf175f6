import math

import numpy as np
import pytest

from birkhoff.discriminant import DiscriminantEvaluator
from birkhoff.errors import ConfigError
from birkhoff.potentials import (FourierPotential, gauge_shift,
                                 random_potential)


def exact_constant_delta(a, lam):
    return 2.0 * np.cos(np.sqrt(np.asarray(lam, dtype=np.complex128) ** 2
                                - a * a))


@pytest.mark.parametrize("a", [0.25, 0.5, 1.0])
@pytest.mark.parametrize("scheme", ["midpoint", "magnus4"])
def test_constant_oracle(a, scheme):
    ev = DiscriminantEvaluator(FourierPotential.constant(a), scheme=scheme)
    lams = np.linspace(-20.0, 20.0, 100)
    d, _, _, _ = ev.real_grid(lams)
    exact = exact_constant_delta(a, lams).real
    assert np.max(np.abs(d - exact) / np.maximum(np.abs(exact), 1e-30)) < 1e-8


def test_zero_potential_exact():
    ev = DiscriminantEvaluator(FourierPotential.zero())
    lams = np.linspace(-30.0, 30.0, 50)
    d, d1, _, _ = ev.real_grid(lams)
    assert np.allclose(d, 2.0 * np.cos(lams), atol=1e-10)
    assert np.allclose(d1, -2.0 * np.sin(lams), atol=1e-10)


def test_conjugation_symmetry():
    ev = DiscriminantEvaluator(random_potential(seed=5), scheme="magnus4")
    z = np.array([1.0 + 0.5j, -3.0 + 2.0j, 7.0 - 1.0j])
    d, _, _, _ = ev.raw(z)
    dc, _, _, _ = ev.raw(np.conj(z))
    assert np.allclose(dc, np.conj(d), rtol=1e-12)


def test_derivative_consistency_with_finite_differences():
    ev = DiscriminantEvaluator(random_potential(seed=9), scheme="magnus4")
    rng = np.random.default_rng(0)
    lams = rng.uniform(-15.0, 15.0, 12)
    h = 1e-5
    d, d1, d2, _ = ev.real_grid(lams)
    dp, d1p, _, _ = ev.real_grid(lams + h)
    dm, d1m, _, _ = ev.real_grid(lams - h)
    fd1 = (dp - dm) / (2 * h)
    fd2 = (d1p - d1m) / (2 * h)
    assert np.max(np.abs(fd1 - d1) / np.maximum(np.abs(d1), 1.0)) < 1e-6
    assert np.max(np.abs(fd2 - d2) / np.maximum(np.abs(d2), 1.0)) < 1e-6


@pytest.mark.parametrize("scheme,order", [("midpoint", 2), ("magnus4", 4)])
def test_scheme_order_by_doubling(scheme, order):
    phi = random_potential(seed=3)
    lams = np.linspace(-10.0, 10.0, 7)
    ref = DiscriminantEvaluator(phi, subintervals=4096, scheme=scheme)
    dref, _, _, _ = ref.real_grid(lams)
    errs = []
    for nx in (64, 128, 256):
        ev = DiscriminantEvaluator(phi, subintervals=nx, scheme=scheme,
                                   richardson=False)
        d, _, _, _ = ev.real_grid(lams)
        errs.append(np.max(np.abs(d - dref)))
    rate1 = math.log2(errs[0] / errs[1])
    rate2 = math.log2(errs[1] / errs[2])
    assert rate1 > order - 0.5 and rate2 > order - 0.5


def test_gauge_identity():
    # shifting the potential by mode m translates and alternates Delta
    phi = random_potential(seed=6, amplitude=0.5)
    m = 3
    ev = DiscriminantEvaluator(phi, scheme="magnus4")
    evm = DiscriminantEvaluator(gauge_shift(phi, m), scheme="magnus4")
    lams = np.linspace(-8.0, 8.0, 25)
    d, _, _, _ = ev.real_grid(lams - m * math.pi)
    dm, _, _, _ = evm.real_grid(lams)
    assert np.allclose(dm, (-1.0) ** m * d, atol=1e-9)


def test_product_representation_constant():
    # -4 prod (lam_n^+ - lam)(lam_n^- - lam)/pi_n^2 ~ Delta^2 - 4 for psi = a
    a = 0.5
    from birkhoff.pipeline import analyze
    an = analyze(FourierPotential.constant(a), n_max=60)
    sp = an.sp
    lams = np.linspace(-4.0, 4.0, 9) + 0.37
    d, _, _, _ = an.ev.real_grid(lams)
    target = d * d - 4.0
    prod = -4.0 * np.ones_like(lams)
    for n in sp.indices:
        rec = sp.gap(n)
        pin = n * math.pi if n != 0 else 1.0
        prod *= (rec.lamPlus - lams) * (rec.lamMinus - lams) / pin ** 2
    # analytic tail: beyond the computed range every gap is collapsed at the
    # known double eigenvalue +-sqrt((n pi)^2 + a^2); each pair contributes
    # the factor ((mu_n^2 - lam^2)/(n pi)^2)^2 = (1 + (a^2-lam^2)/(n pi)^2)^2
    ns = np.arange(sp.n_max + 1, 200000)[:, None]
    log_tail = np.sum(2.0 * np.log1p((a * a - lams ** 2) / (math.pi * ns) ** 2),
                      axis=0)
    # asymptotic remainder of the log sum: 2(a^2-lam^2)/pi^2 * sum_{n>N} n^-2
    log_tail += 2.0 * (a * a - lams ** 2) / (math.pi ** 2 * (ns[-1, 0] + 0.5))
    prod *= np.exp(log_tail)
    assert np.max(np.abs(prod - target) / np.abs(target)) < 1e-4


def test_error_estimate_is_small_and_reported():
    ev = DiscriminantEvaluator(random_potential(seed=1), scheme="magnus4",
                               subintervals=512)
    lams = np.linspace(-60.0, 60.0, 40)
    _, _, _, err = ev.real_grid(lams)
    assert np.all(np.isfinite(err))
    assert np.max(err) < 1e-10


def test_evaluate_rejects_lambda_beyond_cap():
    ev = DiscriminantEvaluator(FourierPotential.constant(0.5))
    with pytest.raises(ConfigError):
        ev.evaluate(1e9)


def test_subintervals_validation():
    with pytest.raises(ConfigError):
        DiscriminantEvaluator(FourierPotential.constant(0.5), subintervals=4)


def test_numpy_fallback_matches_numba_kernel():
    # the kernel path is frozen at import time, so run the fallback in a
    # subprocess and compare checksums
    import json
    import os
    import subprocess
    import sys
    prog = (
        "import json, sys; import numpy as np;"
        "from birkhoff.potentials import random_potential;"
        "from birkhoff.discriminant import DiscriminantEvaluator;"
        "from birkhoff import kernels;"
        "ev = DiscriminantEvaluator(random_potential(seed=3), scheme='magnus4');"
        "d, d1, d2, _ = ev.raw(np.linspace(-40, 40, 97) + 0.3j);"
        "json.dump({'numba': kernels.USE_NUMBA,"
        "  's': [float(np.abs(x).sum()) for x in (d, d1, d2)]}, sys.stdout)"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, BIRKHOFF_NO_NUMBA=flag)
        r = subprocess.run([sys.executable, "-c", prog], env=env,
                           capture_output=True, text=True, check=True)
        outs.append(json.loads(r.stdout))
    assert outs[0]["numba"] and not outs[1]["numba"]
    assert np.allclose(outs[0]["s"], outs[1]["s"], rtol=1e-12)
