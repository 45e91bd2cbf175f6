"""Floquet discriminant Delta(lambda) = tr M(1, lambda) of L(phi) f = lambda f.

The fundamental solution solves f' = A(x, lambda) f with

    A = [[ i*lambda, -i*phi_minus ],
         [ i*phi_plus, -i*lambda ]],

so A is trace-zero and A^2 = (phi_minus*phi_plus - lambda^2) I.  On each of
N_x subintervals the coefficient matrix is replaced by an exponential factor:

* scheme "midpoint": W = h*A(midpoint) — exact for constant potentials,
  second order otherwise.
* scheme "magnus4": two-point Gauss nodes with the first commutator term,
  W = (h/2)(A1+A2) + (sqrt(3)/12) h^2 [A2, A1] — fourth order, still exact
  for constants and still affine in lambda, so the same kernel applies.

Richardson extrapolation combines the N_x and 2*N_x sweeps; the difference of
the two sweeps feeds the per-sample error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, OverflowSampleError

__all__ = ["DiscriminantEvaluator", "DiscriminantSample"]

_LAMBDA_CAP = 1.0e6


@dataclass
class DiscriminantSample:
    lam: complex
    delta: complex
    deltaDot: complex
    deltaDotDot: complex
    errorEstimate: float
    error: str | None = None


def _coefficient_factors(phi, nx, scheme):
    """Per-subinterval (Om1, Om0) with W_j = lambda*Om1_j + Om0_j."""
    h = 1.0 / nx
    om1 = np.zeros((nx, 2, 2), dtype=np.complex128)
    om0 = np.zeros((nx, 2, 2), dtype=np.complex128)
    if scheme == "midpoint":
        xm = (np.arange(nx) + 0.5) * h
        pm = phi.sample_minus(xm)
        pp = phi.sample_plus(xm)
        om1[:, 0, 0] = 1j * h
        om1[:, 1, 1] = -1j * h
        om0[:, 0, 1] = -1j * h * pm
        om0[:, 1, 0] = 1j * h * pp
    elif scheme == "magnus4":
        off = h * math.sqrt(3.0) / 6.0
        xc = (np.arange(nx) + 0.5) * h
        x1 = xc - off
        x2 = xc + off
        pm1, pp1 = phi.sample_minus(x1), phi.sample_plus(x1)
        pm2, pp2 = phi.sample_minus(x2), phi.sample_plus(x2)
        cfac = math.sqrt(3.0) / 12.0 * h * h
        # B(x) = [[0, -i phi_minus], [i phi_plus, 0]], C = diag(i, -i)
        # [C, B] = [[0, -2 phi_minus], [-2 phi_plus, 0]] * ... computed entrywise:
        # (C B - B C)_{01} = i*(-i pm) - (-i pm)(-i) = pm - (-pm)?  done explicitly below
        dm = pm1 - pm2
        dp = pp1 - pp2
        # [C, B1 - B2]: C diag(i,-i), (B)_{01} = -i dm, (B)_{10} = i dp
        # commutator off-diagonals: (C B - B C)_{01} = i*(-i dm) - (-i dm)*(-i) = dm + i^2 dm ... :
        om1[:, 0, 0] = 1j * h
        om1[:, 1, 1] = -1j * h
        om1[:, 0, 1] = cfac * (2j * (-1j * dm))  # = 2 dm * cfac
        om1[:, 1, 0] = cfac * (-2j * (1j * dp))  # = 2 dp * cfac
        om0[:, 0, 1] = -1j * (h / 2.0) * (pm1 + pm2)
        om0[:, 1, 0] = 1j * (h / 2.0) * (pp1 + pp2)
        # [B2, B1] is diagonal: (B2 B1 - B1 B2)_{00} = (-i pm2)(i pp1) - (-i pm1)(i pp2)
        comm_d = pm2 * pp1 - pm1 * pp2
        om0[:, 0, 0] = cfac * comm_d
        om0[:, 1, 1] = -cfac * comm_d
    else:
        raise ConfigError("unknown scheme %r" % (scheme,))
    return om1, om0


class DiscriminantEvaluator:
    """Configured transfer-matrix evaluator for (Delta, dDelta, d2Delta)."""

    def __init__(self, potential, subintervals=None, scheme="midpoint",
                 richardson=True, lambda_cap=_LAMBDA_CAP):
        if subintervals is None:
            subintervals = max(256, 16 * potential.K)
        if subintervals < 8:
            raise ConfigError("subintervals must be >= 8")
        self.potential = potential
        self.subintervals = int(subintervals)
        self.scheme = scheme
        self.richardson = bool(richardson)
        self.lambda_cap = float(lambda_cap)
        self._order = 2 if scheme == "midpoint" else 4
        self._coarse = _coefficient_factors(potential, self.subintervals, scheme)
        if self.richardson:
            self._fine = _coefficient_factors(potential, 2 * self.subintervals, scheme)

    # -- raw grid evaluation --------------------------------------------

    def raw(self, lams):
        """(delta, ddot, dddot, abs_err_estimate) arrays; no finiteness checks."""
        lams = np.ascontiguousarray(lams, dtype=np.complex128)
        d_c, d1_c, d2_c = kernels.transfer_trace(self._coarse[0], self._coarse[1], lams)
        if not self.richardson:
            err = np.full(lams.shape, np.nan)
            return d_c, d1_c, d2_c, err
        d_f, d1_f, d2_f = kernels.transfer_trace(self._fine[0], self._fine[1], lams)
        fac = float(2 ** self._order)
        d = (fac * d_f - d_c) / (fac - 1.0)
        d1 = (fac * d1_f - d1_c) / (fac - 1.0)
        d2 = (fac * d2_f - d2_c) / (fac - 1.0)
        err = np.abs(d_f - d_c)
        return d, d1, d2, err

    def real_grid(self, lams):
        """Fast path for real lambda and real-type potentials: real arrays."""
        d, d1, d2, err = self.raw(np.asarray(lams, dtype=np.float64))
        return d.real, d1.real, d2.real, err

    # -- public API -------------------------------------------------------

    def evaluate(self, lam):
        if abs(lam) > self.lambda_cap:
            raise ConfigError("|lambda| exceeds cap %g" % self.lambda_cap)
        s = self.evaluate_grid([lam])[0]
        if s.error is not None:
            raise OverflowSampleError(s.error)
        return s

    def evaluate_grid(self, lams):
        lams = np.asarray(list(lams), dtype=np.complex128)
        if lams.size == 0:
            return []
        d, d1, d2, err = self.raw(lams)
        rel = err / np.maximum(1.0, np.abs(d))
        out = []
        for i in range(lams.size):
            bad = not (np.isfinite(d[i]) and np.isfinite(d1[i]) and np.isfinite(d2[i]))
            if bad:
                out.append(DiscriminantSample(
                    complex(lams[i]), complex("nan"), complex("nan"), complex("nan"),
                    float("inf"),
                    error="non-finite intermediate at lambda=%s; reduce |Im lambda|" % lams[i],
                ))
            else:
                e = float(rel[i]) if np.isfinite(rel[i]) else 0.0
                out.append(DiscriminantSample(
                    complex(lams[i]), complex(d[i]), complex(d1[i]), complex(d2[i]), e,
                ))
        return out
