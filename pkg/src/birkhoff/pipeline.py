"""One-stop analysis of a potential: discriminant evaluator, periodic
spectrum, actions, hierarchy — built lazily and cached, with the truncation
index sized so every downstream report is admissible (localization threshold,
and optionally the thresholds of requested weights)."""

from __future__ import annotations

import math

from .actions import compute_actions
from .discriminant import DiscriminantEvaluator
from .hierarchy import hierarchy_compute
from .potentials import Weight, sobolev_norm, weighted_norm
from .spectrum import locate_spectrum

__all__ = ["Analysis", "analyze"]

_DEF_WEIGHTS = (Weight("abel", 1.0, 0.2),)


def choose_n_max(phi, weights=_DEF_WEIGHTS, floor=24):
    h1 = sobolev_norm(phi, 1)
    n = max(int(math.ceil(8.0 * h1 * h1)) + 2, floor)
    for w in weights:
        nw = weighted_norm(phi, w)
        n = max(n, int(math.ceil(8.0 * nw * nw)) + 1)
    return n


class Analysis:
    def __init__(self, phi, n_max=None, subintervals=None, scheme="magnus4",
                 levels=(1, 2, 3, 5, 7), collapse_g_tol=1e-11, k_max=7,
                 weights=_DEF_WEIGHTS):
        self.phi = phi
        if subintervals is None:
            subintervals = max(512, 16 * phi.K)
        if n_max is None:
            n_max = choose_n_max(phi, weights)
        self.n_max = int(n_max)
        self.levels = tuple(levels)
        self.collapse_g_tol = collapse_g_tol
        self.k_max = int(k_max)
        self.ev = DiscriminantEvaluator(phi, subintervals=subintervals,
                                        scheme=scheme)
        self._sp = None
        self._actions = None
        self._hierarchy = None

    @property
    def sp(self):
        if self._sp is None:
            self._sp = locate_spectrum(self.ev, self.n_max,
                                       collapse_g_tol=self.collapse_g_tol)
        return self._sp

    @property
    def actions(self):
        if self._actions is None:
            self._actions = compute_actions(self.ev, self.sp,
                                            levels=self.levels)
        return self._actions

    @property
    def hierarchy(self):
        if self._hierarchy is None:
            self._hierarchy = hierarchy_compute(self.phi, self.k_max)
        return self._hierarchy


def analyze(phi, **kwargs):
    return Analysis(phi, **kwargs)
