"""Hierarchy Hamiltonians H_k from the recursion u_{k+1} = u_k' + phi_- sum u_{k-l} u_l.

All arithmetic is exact trigonometric-polynomial band arithmetic: derivative
multiplies coefficient j by 2 pi i j, products are centered convolutions, and
integrals over the period read off the zero mode.  The nominal pseudospectral
grid size M only gates the admissible band (guard-band overflow -> grid-size
error); no floating-point collocation is needed at these sizes.

Sign conventions for H_k = s_k int phi_- u_k dx:
  calibrated      s_1 = -1, s_k = +1 for k >= 2 (H_1 = ||psi||_0^2 > 0 and the
                  level-1 trace formula reads sum I_n = H_1)
  alternating     s_k = (-1)^k
  plain           s_k = +1
Trace checks normalize through s_k, so every convention verifies the same
identity sum_n J_{n,k} = -H_k^{app} / (2i)^{k-1} with H_k^{app} = H_k / s_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GridSizeError
from .tails import TailMajorant

__all__ = ["HierarchyEvaluation", "hierarchy_compute", "trace_check",
           "hform_check"]

_SIGNS = ("calibrated", "alternating", "plain")


@dataclass
class HierarchyEvaluation:
    gridSize: int
    u: dict                 # k -> grid samples on gridSize uniform points
    H: dict                 # k -> complex
    bands: dict = field(default_factory=dict)   # k -> (coeffs, halfwidth)
    sign: str = "calibrated"
    k_max: int = 0


def _sign_factor(sign, k):
    if sign == "calibrated":
        return -1.0 if k == 1 else 1.0
    if sign == "alternating":
        return -1.0 if k % 2 else 1.0
    if sign == "plain":
        return 1.0
    raise ConfigError("hierarchySign must be one of %s" % (_SIGNS,))


def _deriv(arr, hw):
    js = np.arange(-hw, hw + 1)
    return arr * (2j * math.pi * js)


def _grid_values(arr, hw, M):
    spec = np.zeros(M, dtype=np.complex128)
    js = np.arange(-hw, hw + 1)
    spec[np.mod(js, M)] = arr
    return M * np.fft.ifft(spec)


def hierarchy_compute(phi, k_max, sign="calibrated", grid_size=None):
    k_max = int(k_max)
    if k_max < 1 or k_max > 9:
        raise ConfigError("k_max must be in 1..9")
    if sign not in _SIGNS:
        raise ConfigError("hierarchySign must be one of %s" % (_SIGNS,))
    K = phi.K
    m_req = 1
    while m_req < 4 * (K + 1) * (k_max + 1):
        m_req *= 2
    if grid_size is None:
        grid_size = m_req
    M = int(grid_size)
    if M & (M - 1):
        raise GridSizeError("grid size %d is not a power of two" % M)

    band_cap = M // 2 - 1                  # guard band: modes above this alias
    cm = phi.c.astype(np.complex128)       # phi_minus coefficients, -K..K
    cp = phi.p.astype(np.complex128)       # phi_plus coefficients
    u = {1: (-cp, K)}
    for k in range(1, k_max):
        arr, hw = u[k]
        acc, ahw = _deriv(arr, hw), hw
        if k >= 2:
            # phi_- * sum_{l=1}^{k-1} u_{k-l} u_l
            s_hw = max(u[k - l][1] + u[l][1] for l in range(1, k))
            s = np.zeros(2 * s_hw + 1, dtype=np.complex128)
            for l in range(1, k):
                a1, h1 = u[k - l]
                a2, h2 = u[l]
                prod = np.convolve(a1, a2)
                off = s_hw - (h1 + h2)
                s[off:off + prod.size] += prod
            prod = np.convolve(cm, s)
            phw = K + s_hw
            new_hw = max(ahw, phw)
            out = np.zeros(2 * new_hw + 1, dtype=np.complex128)
            out[new_hw - ahw:new_hw + ahw + 1] += acc
            out[new_hw - phw:new_hw + phw + 1] += prod
            acc, ahw = out, new_hw
        if ahw > (k + 1) * K + k:
            raise GridSizeError("band bookkeeping violated at k=%d" % (k + 1))
        if ahw > band_cap:
            raise GridSizeError(
                "aliasing: u_%d band %d exceeds guard band of grid %d"
                % (k + 1, ahw, M))
        u[k + 1] = (acc, ahw)

    H = {}
    grids = {}
    for k in range(1, k_max + 1):
        arr, hw = u[k]
        full = np.convolve(cm, arr)
        zero_mode = full[K + hw]           # integral over the period
        H[k] = complex(_sign_factor(sign, k) * zero_mode)
        grids[k] = _grid_values(arr, hw, M)
    return HierarchyEvaluation(gridSize=M, u=grids, H=H, bands=u,
                               sign=sign, k_max=k_max)


# ---------------------------------------------------------------------------
# reports


@dataclass
class TraceCheckReport:
    k: int
    lhs: float
    rhs: float
    tail: float
    residual: float
    passed: bool


def trace_check(phi, as_, k, hev=None, tol=1e-5):
    """sum_n J_{n,k} against -H_k^{app}/(2i)^{k-1}, truncation tail allowed."""
    k = int(k)
    if hev is None or hev.k_max < k:
        hev = hierarchy_compute(phi, k)
    h_app = hev.H[k] / _sign_factor(hev.sign, k)
    rhs = complex(-h_app / (2j) ** (k - 1))
    if abs(rhs.imag) > 1e-9 * max(1.0, abs(rhs)):
        raise ConfigError("trace rhs not real at k=%d: %r" % (k, rhs))
    rhs = rhs.real
    lhs = float(sum(as_.J[(n, k)] for n in as_.I if (n, k) in as_.J))
    if any((n, k) not in as_.J for n in as_.I):
        raise ConfigError("level k=%d missing from action spectrum" % k)
    tm = as_.tail if as_.tail is not None else TailMajorant(phi, as_.n_max)
    # |J_{n,k}| <= max_gap |lambda|^{k-1} I_n <= (pi|n| + 1)^{k-1} I_n
    tail = tm.weighted_action_tail(
        lambda nn: (k - 1.0) * np.log(math.pi * np.asarray(nn) + 1.0))
    excess = max(0.0, abs(lhs - rhs) - tail)
    resid = excess / max(abs(rhs), 1e-300)
    # both sides can vanish identically (k=2 momentum of real type): mixed rule
    passed = excess <= tol * max(abs(rhs), 1.0) or excess <= 1e-10
    return TraceCheckReport(k=k, lhs=lhs, rhs=rhs, tail=float(tail),
                            residual=float(resid), passed=bool(passed))


@dataclass
class HFormReport:
    m: int
    h_value: float
    derivative_energy: float
    remainder: float
    empirical_c: float
    passed: bool


def hform_check(phi, m, hev=None):
    """(-1)^{m+1} H_{2m+1} = ||psi^(m)||^2 + remainder, with the remainder
    tested against eps ||psi^(m)||^2 + C (1 + ||psi||_0^{4m}) ||psi||_0^2
    at eps = 1; C is reported empirically."""
    m = int(m)
    if m < 1 or m > 3:
        raise ConfigError("m must be in 1..3")
    if not phi.real_type:
        raise ConfigError("hform_check requires a real-type potential")
    k = 2 * m + 1
    if hev is None or hev.k_max < k:
        hev = hierarchy_compute(phi, k)
    h_app = hev.H[k] / _sign_factor(hev.sign, k)
    # calibrated orientation: H_{2m+1} = -(-1)^{... } fixed through s_k
    h_cal = h_app * _sign_factor("calibrated", k)
    if abs(h_cal.imag) > 1e-10 * max(1.0, abs(h_cal)):
        raise ConfigError("H_%d not real: %r" % (k, h_cal))
    val = (-1.0) ** (m + 1) * h_cal.real
    ks = phi.ks
    energy = float(np.sum((2.0 * math.pi * np.abs(ks)) ** (2 * m)
                          * np.abs(phi.c) ** 2))
    r = val - energy
    l0_sq = float(np.sum(np.abs(phi.c) ** 2))
    denom = (1.0 + l0_sq ** (2 * m)) * l0_sq
    excess = abs(r) - energy               # eps = 1
    emp_c = max(0.0, excess) / denom if denom > 0 else 0.0
    passed = phi.is_zero() or abs(r) <= energy + (emp_c + 1e-12) * denom
    return HFormReport(m=m, h_value=val, derivative_energy=energy,
                       remainder=float(r), empirical_c=float(emp_c),
                       passed=bool(passed))
