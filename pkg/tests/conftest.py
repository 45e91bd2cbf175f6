import numpy as np
import pytest

from birkhoff.discriminant import DiscriminantEvaluator
from birkhoff.estimates import potential_family
from birkhoff.pipeline import analyze
from birkhoff.potentials import FourierPotential


@pytest.fixture(scope="session", autouse=True)
def jit_warmup():
    # compile the transfer-matrix kernels once so timed tests measure math,
    # not JIT latency
    ev = DiscriminantEvaluator(FourierPotential.constant(0.3), scheme="magnus4")
    ev.raw(np.array([1.0 + 0.0j]))
    ev2 = DiscriminantEvaluator(FourierPotential.constant(0.3))
    ev2.raw(np.array([1.0 + 0.0j]))


@pytest.fixture(scope="session")
def family20():
    """20 seeded potentials with H^1 norms sweeping [0.4, 2.0], analyzed
    lazily (each Analysis caches its spectrum/actions/hierarchy)."""
    return [analyze(phi) for phi in potential_family(20)]


@pytest.fixture(scope="session")
def const_half():
    return analyze(FourierPotential.constant(0.5))
