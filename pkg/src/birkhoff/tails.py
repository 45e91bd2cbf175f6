"""Rigorous truncation-tail bounds for gap and action sums.

Beyond the computed index range the only handles are the individual gap
estimate w_{2n} gamma_n <= 4 ||phi||_w (valid once <n> >= 8 ||phi||_w^2) and
|I_n| <= 2^11 (1 + ||phi||_1^2) gamma_n^2.  We pick the strongest Abel weight
whose threshold is already met at n_max + 1, which makes the resulting
geometric tails negligible for band-limited potentials.
"""

import math

import numpy as np

from .potentials import Weight, jbracket, sobolev_norm, weighted_norm

_MAX_TAIL_TERMS = 20000

_ABEL_A_MAX = 1.5


class TailMajorant:
    """Per-potential data from which all tail sums are assembled."""

    def __init__(self, phi, n_max):
        self.n_max = int(n_max)
        self.h1 = sobolev_norm(phi, 1)
        self.abel_a = None
        self.abel_norm = np.inf

        def feasible(a):
            nw = weighted_norm(phi, Weight(kind="abel", s=1.0, a=a))
            return 8.0 * nw * nw <= 1.0 + (n_max + 1), nw

        ok0, nw0 = feasible(0.0)
        if ok0:
            # largest exponential rate still meeting the threshold at n_max+1
            lo, nw_lo = 0.0, nw0
            ok_hi, nw_hi = feasible(_ABEL_A_MAX)
            if ok_hi:
                lo, nw_lo = _ABEL_A_MAX, nw_hi
            else:
                hi = _ABEL_A_MAX
                for _ in range(50):
                    mid = 0.5 * (lo + hi)
                    ok, nw = feasible(mid)
                    if ok:
                        lo, nw_lo = mid, nw
                    else:
                        hi = mid
            self.abel_a = lo
            self.abel_norm = nw_lo

    def usable(self):
        return self.abel_a is not None

    def log_gamma_bound(self, n):
        """log of the gamma_n upper bound, |n| > n_max."""
        n = np.abs(np.asarray(n, dtype=np.float64))
        with np.errstate(divide="ignore"):       # zero potential -> -inf bound
            log_norm = np.log(4.0 * self.abel_norm)
        return (log_norm
                - np.log(jbracket(2.0 * np.pi * n)) - self.abel_a * 2.0 * n)

    def gamma_bound(self, n):
        """Upper bound for gamma_n, |n| > n_max."""
        n = np.abs(np.asarray(n, dtype=np.float64))
        if not self.usable():
            return np.full_like(n, np.inf)
        return np.exp(self.log_gamma_bound(n))

    def log_action_bound(self, n):
        """log of the I_n upper bound, |n| > n_max (needs <n> >= 8||phi||_1^2:
        holds since the Abel threshold at n_max+1 is stronger)."""
        return (11.0 * math.log(2.0) + math.log1p(self.h1 ** 2)
                + 2.0 * self.log_gamma_bound(n))

    def action_bound(self, n):
        if not self.usable():
            return np.full_like(np.asarray(n, dtype=np.float64), np.inf)
        return np.exp(self.log_action_bound(n))

    def _log_tail(self, log_term_fn):
        """sum over |n| > n_max of exp(log_term_fn(n)), both signs, in blocks;
        each term evaluated in log space so huge weights cannot overflow."""
        if not self.usable():
            return np.inf
        total = 0.0
        n = self.n_max + 1
        block = 64
        while n < self.n_max + 1 + _MAX_TAIL_TERMS:
            ns = np.arange(n, n + block)
            lt = math.log(2.0) + log_term_fn(ns)
            if np.any(lt > 700.0):
                return np.inf
            terms = np.exp(lt)
            total += float(np.sum(terms))
            if terms[-1] < 1e-300 or terms[-1] < 1e-18 * max(total, 1e-300):
                return total
            n += block
        return np.inf

    def weighted_action_tail(self, log_weight_fn):
        """sum_{|n| > n_max} exp(log_weight_fn(n)) * I_n upper bound."""
        return self._log_tail(
            lambda ns: log_weight_fn(ns) + self.log_action_bound(ns))

    def weighted_gamma_sq_tail(self, log_weight_fn):
        """sum_{|n| > n_max} exp(log_weight_fn(n))^2 * gamma_n^2 upper bound."""
        return self._log_tail(
            lambda ns: 2.0 * log_weight_fn(ns) + 2.0 * self.log_gamma_bound(ns))
