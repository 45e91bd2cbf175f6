"""Periodic Zakharov-Shabat spectrum, action variables, hierarchy
Hamiltonians, and two-sided norm-estimate verification for band-limited
real-type potentials."""

from .potentials import FourierPotential, Weight
from .discriminant import DiscriminantEvaluator
from .spectrum import locate_spectrum
from .actions import compute_actions
from .hierarchy import hierarchy_compute
from .pipeline import analyze

__version__ = "0.1.0"

__all__ = ["FourierPotential", "Weight", "DiscriminantEvaluator",
           "locate_spectrum", "compute_actions", "hierarchy_compute",
           "analyze", "__version__"]
