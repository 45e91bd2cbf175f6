"""Transfer-matrix sweep kernels.

Each spatial subinterval contributes a factor exp(W_j(lambda)) with
W_j = lambda*Om1_j + Om0_j a trace-zero 2x2 matrix, so
exp(W) = c(z) I + s(z) W with z = -det W, c = cosh(sqrt z),
s = sinh(sqrt z)/sqrt z.  The sweep accumulates M = prod_j exp(W_j) together
with its first and second lambda-derivatives (product rule, analytic
d/dz of c and s) and returns the traces.

The numba kernel is the default; set BIRKHOFF_NO_NUMBA=1 to force the
pure-numpy path (same arithmetic, vectorized over lambda).
"""

import cmath
import os

import numpy as np

_SERIES_CUT = 0.25

USE_NUMBA = os.environ.get("BIRKHOFF_NO_NUMBA", "0").lower() not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit, prange
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if not USE_NUMBA:  # identity decorators so the same source compiles either way
    def njit(*args, **kwargs):
        def wrap(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range


@njit(cache=True)
def _expfuns(z):
    """c, s, ds/dz, d2s/dz2 for c = cosh(sqrt z), s = sinh(sqrt z)/sqrt z."""
    if abs(z) < _SERIES_CUT:
        c = 1.0 + z * (1.0 / 2.0 + z * (1.0 / 24.0 + z * (1.0 / 720.0 + z * (1.0 / 40320.0 + z / 3628800.0))))
        s = 1.0 + z * (1.0 / 6.0 + z * (1.0 / 120.0 + z * (1.0 / 5040.0 + z * (1.0 / 362880.0 + z / 39916800.0))))
        sz = 1.0 / 6.0 + z * (1.0 / 60.0 + z * (1.0 / 1680.0 + z * (1.0 / 90720.0 + z / 7983360.0)))
        szz = 1.0 / 60.0 + z * (1.0 / 840.0 + z * (1.0 / 30240.0 + z / 1995840.0))
    else:
        w = cmath.sqrt(z)
        c = cmath.cosh(w)
        s = cmath.sinh(w) / w
        sz = (c - s) / (2.0 * z)
        szz = (0.5 * s - 3.0 * sz) / (2.0 * z)
    return c, s, sz, szz


@njit(cache=True)
def _sweep_one(om1, om0, lam):
    """Accumulate tr M, tr dM/dlam, tr d2M/dlam2 for a single lambda."""
    m00 = 1.0 + 0.0j
    m01 = 0.0 + 0.0j
    m10 = 0.0 + 0.0j
    m11 = 1.0 + 0.0j
    p00 = 0.0 + 0.0j
    p01 = 0.0 + 0.0j
    p10 = 0.0 + 0.0j
    p11 = 0.0 + 0.0j
    q00 = 0.0 + 0.0j
    q01 = 0.0 + 0.0j
    q10 = 0.0 + 0.0j
    q11 = 0.0 + 0.0j
    nsteps = om1.shape[0]
    for j in range(nsteps):
        a00 = om1[j, 0, 0]
        a01 = om1[j, 0, 1]
        a10 = om1[j, 1, 0]
        a11 = om1[j, 1, 1]
        w00 = lam * a00 + om0[j, 0, 0]
        w01 = lam * a01 + om0[j, 0, 1]
        w10 = lam * a10 + om0[j, 1, 0]
        w11 = lam * a11 + om0[j, 1, 1]
        z = w01 * w10 - w00 * w11  # -det W
        # z(lam) is quadratic; derivatives from the bilinear expansion
        zp = a01 * w10 + w01 * a10 - a00 * w11 - w00 * a11
        zpp = 2.0 * (a01 * a10 - a00 * a11)
        c, s, sz, szz = _expfuns(z)
        cz = 0.5 * s
        czz = 0.5 * sz
        # E = c I + s W and its two lambda-derivatives
        e00 = c + s * w00
        e01 = s * w01
        e10 = s * w10
        e11 = c + s * w11
        f_c = cz * zp
        f_s = sz * zp
        d00 = f_c + f_s * w00 + s * a00
        d01 = f_s * w01 + s * a01
        d10 = f_s * w10 + s * a10
        d11 = f_c + f_s * w11 + s * a11
        g_c = czz * zp * zp + cz * zpp
        g_s = szz * zp * zp + sz * zpp
        h00 = g_c + g_s * w00 + 2.0 * sz * zp * a00
        h01 = g_s * w01 + 2.0 * sz * zp * a01
        h10 = g_s * w10 + 2.0 * sz * zp * a10
        h11 = g_c + g_s * w11 + 2.0 * sz * zp * a11
        # Q <- E'' M + 2 E' P + E Q ; P <- E' M + E P ; M <- E M
        n00 = h00 * m00 + h01 * m10 + 2.0 * (d00 * p00 + d01 * p10) + e00 * q00 + e01 * q10
        n01 = h00 * m01 + h01 * m11 + 2.0 * (d00 * p01 + d01 * p11) + e00 * q01 + e01 * q11
        n10 = h10 * m00 + h11 * m10 + 2.0 * (d10 * p00 + d11 * p10) + e10 * q00 + e11 * q10
        n11 = h10 * m01 + h11 * m11 + 2.0 * (d10 * p01 + d11 * p11) + e10 * q01 + e11 * q11
        r00 = d00 * m00 + d01 * m10 + e00 * p00 + e01 * p10
        r01 = d00 * m01 + d01 * m11 + e00 * p01 + e01 * p11
        r10 = d10 * m00 + d11 * m10 + e10 * p00 + e11 * p10
        r11 = d10 * m01 + d11 * m11 + e10 * p01 + e11 * p11
        t00 = e00 * m00 + e01 * m10
        t01 = e00 * m01 + e01 * m11
        t10 = e10 * m00 + e11 * m10
        t11 = e10 * m01 + e11 * m11
        q00, q01, q10, q11 = n00, n01, n10, n11
        p00, p01, p10, p11 = r00, r01, r10, r11
        m00, m01, m10, m11 = t00, t01, t10, t11
    return m00 + m11, p00 + p11, q00 + q11


@njit(cache=True, parallel=True)
def _sweep_numba(om1, om0, lams, delta, ddelta, d2delta):
    for i in prange(lams.shape[0]):
        d0, d1, d2 = _sweep_one(om1, om0, lams[i])
        delta[i] = d0
        ddelta[i] = d1
        d2delta[i] = d2


def _sweep_numpy(om1, om0, lams):
    L = lams.shape[0]
    eye = np.ones(L, dtype=np.complex128)
    zero = np.zeros(L, dtype=np.complex128)
    m = [eye.copy(), zero.copy(), zero.copy(), eye.copy()]
    p = [zero.copy() for _ in range(4)]
    q = [zero.copy() for _ in range(4)]
    for j in range(om1.shape[0]):
        a = om1[j].ravel()
        b = om0[j].ravel()
        w = [lams * a[i] + b[i] for i in range(4)]
        z = w[1] * w[2] - w[0] * w[3]
        zp = a[1] * w[2] + w[1] * a[2] - a[0] * w[3] - w[0] * a[3]
        zpp = 2.0 * (a[1] * a[2] - a[0] * a[3])
        c, s, sz, szz = _expfuns_vec(z)
        cz = 0.5 * s
        czz = 0.5 * sz
        f_c = cz * zp
        f_s = sz * zp
        g_c = czz * zp * zp + cz * zpp
        g_s = szz * zp * zp + sz * zpp
        e = [c + s * w[0], s * w[1], s * w[2], c + s * w[3]]
        d = [
            f_c + f_s * w[0] + s * a[0],
            f_s * w[1] + s * a[1],
            f_s * w[2] + s * a[2],
            f_c + f_s * w[3] + s * a[3],
        ]
        h = [
            g_c + g_s * w[0] + 2.0 * sz * zp * a[0],
            g_s * w[1] + 2.0 * sz * zp * a[1],
            g_s * w[2] + 2.0 * sz * zp * a[2],
            g_c + g_s * w[3] + 2.0 * sz * zp * a[3],
        ]
        q = _mat2mul(h, m, _mat2axpy(_mat2mul(d, p), 2.0, _mat2mul(e, q)))
        p = _mat2mul(d, m, _mat2mul(e, p))
        m = _mat2mul(e, m)
    return m[0] + m[3], p[0] + p[3], q[0] + q[3]


def _mat2mul(x, y, add=None):
    out = [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
    if add is not None:
        out = [o + a for o, a in zip(out, add)]
    return out


def _mat2axpy(x, alpha, y):
    return [alpha * xi + yi for xi, yi in zip(x, y)]


def _expfuns_vec(z):
    small = np.abs(z) < _SERIES_CUT
    zs = np.where(small, z, 0.0)
    c_s = 1.0 + zs * (1.0 / 2.0 + zs * (1.0 / 24.0 + zs * (1.0 / 720.0 + zs * (1.0 / 40320.0 + zs / 3628800.0))))
    s_s = 1.0 + zs * (1.0 / 6.0 + zs * (1.0 / 120.0 + zs * (1.0 / 5040.0 + zs * (1.0 / 362880.0 + zs / 39916800.0))))
    sz_s = 1.0 / 6.0 + zs * (1.0 / 60.0 + zs * (1.0 / 1680.0 + zs * (1.0 / 90720.0 + zs / 7983360.0)))
    szz_s = 1.0 / 60.0 + zs * (1.0 / 840.0 + zs * (1.0 / 30240.0 + zs / 1995840.0))
    zb = np.where(small, 1.0, z)
    w = np.sqrt(zb)
    c_b = np.cosh(w)
    s_b = np.sinh(w) / w
    sz_b = (c_b - s_b) / (2.0 * zb)
    szz_b = (0.5 * s_b - 3.0 * sz_b) / (2.0 * zb)
    c = np.where(small, c_s, c_b)
    s = np.where(small, s_s, s_b)
    sz = np.where(small, sz_s, sz_b)
    szz = np.where(small, szz_s, szz_b)
    return c, s, sz, szz


def transfer_trace(om1, om0, lams):
    """Return (tr M, tr M', tr M'') over the lambda array."""
    lams = np.ascontiguousarray(lams, dtype=np.complex128)
    om1 = np.ascontiguousarray(om1, dtype=np.complex128)
    om0 = np.ascontiguousarray(om0, dtype=np.complex128)
    if USE_NUMBA:
        delta = np.empty(lams.shape[0], dtype=np.complex128)
        ddelta = np.empty_like(delta)
        d2delta = np.empty_like(delta)
        _sweep_numba(om1, om0, lams, delta, ddelta, d2delta)
        return delta, ddelta, d2delta
    return _sweep_numpy(om1, om0, lams)
