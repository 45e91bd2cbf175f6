"""Band-limited potentials, weight sequences, and the norms built from them.

A potential is the pair phi = (phi_minus, phi_plus) with phi_minus = psi a
trigonometric polynomial of period 1 and, in the real-type case, phi_plus the
complex conjugate of psi.  All spectral quantities index Fourier modes on the
period-2 lattice, so the coefficient of psi at frequency k sits at lattice
index 2k.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, RangeError

__all__ = [
    "FourierPotential",
    "Weight",
    "WeightReport",
    "sobolev_norm",
    "weighted_norm",
    "weight_extension",
    "validate_weight",
    "gauge_shift",
    "random_potential",
    "potential_from_json",
    "weight_from_json",
]


def jbracket(x):
    """Japanese bracket <x> = 1 + |x| (works on arrays)."""
    return 1.0 + np.abs(x)


class FourierPotential:
    """psi(x) = sum_{|k| <= K} c_k e^{2 pi i k x}; real type means phi = (psi, conj(psi))."""

    def __init__(self, coeffs, real_type=True, plus_coeffs=None):
        if plus_coeffs is not None and real_type:
            raise ConfigError("plus_coeffs only allowed for non-real-type potentials")
        items = {int(k): complex(v) for k, v in dict(coeffs).items()}
        items = {k: v for k, v in items.items() if v != 0.0}
        pitems = None
        if plus_coeffs is not None:
            pitems = {int(k): complex(v) for k, v in dict(plus_coeffs).items()}
            pitems = {k: v for k, v in pitems.items() if v != 0.0}
        K = 0
        for k in items:
            K = max(K, abs(k))
        if pitems:
            for k in pitems:
                K = max(K, abs(k))
        self.K = K
        self.real_type = bool(real_type)
        # dense centered arrays, index k + K
        c = np.zeros(2 * K + 1, dtype=np.complex128)
        for k, v in items.items():
            if not np.isfinite(v):
                raise ConfigError("non-finite coefficient at k=%d" % k)
            c[k + K] = v
        self._c = c
        if self.real_type:
            self._p = np.conj(c[::-1]).copy()  # p_k = conj(c_{-k})
        else:
            p = np.zeros(2 * K + 1, dtype=np.complex128)
            if pitems:
                for k, v in pitems.items():
                    if not np.isfinite(v):
                        raise ConfigError("non-finite plus coefficient at k=%d" % k)
                    p[k + K] = v
            self._p = p

    # -- coefficient access -------------------------------------------------

    def coeff(self, k):
        """c_k of psi = phi_minus."""
        if abs(k) > self.K:
            return 0.0 + 0.0j
        return complex(self._c[k + self.K])

    def plus_coeff(self, k):
        """Coefficient p_k of phi_plus = sum p_k e^{2 pi i k x}."""
        if abs(k) > self.K:
            return 0.0 + 0.0j
        return complex(self._p[k + self.K])

    def lattice_minus(self, n):
        """phi^-_{2n}: the minus-component lattice coefficient driving gap n."""
        return self.coeff(n)

    def lattice_plus(self, n):
        """phi^+_{2n} (equals conj(phi^-_{2n}) for real type)."""
        return self.plus_coeff(-n)

    @property
    def ks(self):
        return np.arange(-self.K, self.K + 1)

    @property
    def c(self):
        """Dense centered coefficient array of psi, index k + K."""
        return self._c

    @property
    def p(self):
        """Dense centered coefficient array of phi_plus, index k + K."""
        return self._p

    def is_zero(self):
        return not (np.any(self._c) or np.any(self._p))

    # -- sampling -----------------------------------------------------------

    def sample_minus(self, x):
        x = np.asarray(x, dtype=np.float64)
        phase = np.exp(2j * np.pi * np.outer(x, self.ks))
        return phase @ self._c

    def sample_plus(self, x):
        x = np.asarray(x, dtype=np.float64)
        phase = np.exp(2j * np.pi * np.outer(x, self.ks))
        return phase @ self._p

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(a):
        return FourierPotential({0: a})

    @staticmethod
    def zero():
        return FourierPotential({})

    def scaled(self, t):
        if self.real_type:
            return FourierPotential({int(k): t * v for k, v in zip(self.ks, self._c)})
        return FourierPotential(
            {int(k): t * v for k, v in zip(self.ks, self._c)},
            real_type=False,
            plus_coeffs={int(k): t * v for k, v in zip(self.ks, self._p)},
        )

    def to_json(self):
        return {
            "type": "fourier",
            "coeffs": [
                {"k": int(k), "re": float(v.real), "im": float(v.imag)}
                for k, v in zip(self.ks, self._c)
                if v != 0.0
            ],
        }

    def __repr__(self):
        return "FourierPotential(K=%d, real_type=%s)" % (self.K, self.real_type)


def gauge_shift(phi, m):
    """psi_m(x) = psi(x) e^{2 pi i m x}; pure index shift, preserves all norms."""
    if not phi.real_type:
        raise ConfigError("gauge_shift requires a real-type potential")
    return FourierPotential({int(k) + m: v for k, v in zip(phi.ks, phi.c) if v != 0.0})


def sobolev_norm(phi, s):
    """||phi||_s = sqrt(sum <2 n pi>^{2s} (|phi^-_{2n}|^2 + |phi^+_{2n}|^2))."""
    if s < 0:
        raise ConfigError("Sobolev exponent must be >= 0")
    ks = phi.ks
    wts = jbracket(2.0 * np.pi * ks) ** (2.0 * s)
    total = np.sum(wts * (np.abs(phi.c) ** 2 + np.abs(phi.p[::-1]) ** 2))
    return float(np.sqrt(total))


def weighted_norm(phi, w):
    """||phi||_w with w evaluated on the period-2 lattice (index 2n)."""
    ks = phi.ks
    wts = w.values(2 * ks) ** 2
    total = np.sum(wts * (np.abs(phi.c) ** 2 + np.abs(phi.p[::-1]) ** 2))
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class Weight:
    """Normalized symmetric submultiplicative monotone weight sequence.

    Built-in kinds are evaluated analytically at any index; custom weights
    carry an explicit table for n = 0..N_w (optionally a separate negative
    side, used only to exercise the symmetry check).
    """

    kind: str
    s: float = 0.0
    a: float = 0.0
    sigma: float = 0.5
    table: np.ndarray | None = None
    table_neg: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("sobolev", "abel", "gevrey", "loglight", "custom"):
            raise ConfigError("unknown weight kind %r" % (self.kind,))
        if self.kind == "custom" and self.table is None:
            raise ConfigError("custom weights must supply a table")
        if self.table is not None:
            object.__setattr__(self, "table", np.asarray(self.table, dtype=np.float64))
        if self.table_neg is not None:
            object.__setattr__(self, "table_neg", np.asarray(self.table_neg, dtype=np.float64))

    def values(self, n):
        n = np.asarray(n)
        an = np.abs(n)
        if self.kind == "sobolev":
            out = jbracket(np.pi * an) ** self.s
        elif self.kind == "abel":
            out = jbracket(np.pi * an) ** self.s * np.exp(self.a * an)
        elif self.kind == "gevrey":
            out = jbracket(an) ** self.s * np.exp(self.a * an ** self.sigma)
        elif self.kind == "loglight":
            out = jbracket(an) ** self.s * np.exp(
                self.a * an / (1.0 + np.log(jbracket(an)) ** self.sigma)
            )
        else:
            if np.any(an > len(self.table) - 1):
                raise RangeError(
                    "index %d beyond custom weight table (N_w=%d)"
                    % (int(np.max(an)), len(self.table) - 1)
                )
            out = self.table[an]
            if self.table_neg is not None:
                neg = n < 0
                if np.any(neg):
                    out = np.where(neg, self.table_neg[an], out)
        return np.asarray(out, dtype=np.float64)

    def value(self, n):
        return float(self.values(np.asarray([n]))[0])

    def log_values(self, n):
        """log w_n, overflow-safe for the analytic kinds."""
        n = np.asarray(n)
        an = np.abs(n)
        if self.kind == "sobolev":
            return self.s * np.log(jbracket(np.pi * an))
        if self.kind == "abel":
            return self.s * np.log(jbracket(np.pi * an)) + self.a * an
        if self.kind == "gevrey":
            return self.s * np.log(jbracket(an)) + self.a * an ** self.sigma
        if self.kind == "loglight":
            return self.s * np.log(jbracket(an)) + self.a * an / (
                1.0 + np.log(jbracket(an)) ** self.sigma)
        return np.log(self.values(n))

    def max_index(self):
        if self.kind == "custom":
            return len(self.table) - 1
        return None


def weight_extension(w, t):
    """Piecewise-linear extension w[t] for real t >= 0."""
    if t < 0:
        raise RangeError("weight extension requires t >= 0")
    lo = int(math.floor(t))
    if lo == t:
        return w.value(lo)
    frac = t - lo
    return (1.0 - frac) * w.value(lo) + frac * w.value(lo + 1)


@dataclass
class WeightReport:
    violations: list = field(default_factory=list)
    m1: bool = False
    passed: bool = False


def validate_weight(w, n_check=96):
    """Check the four weight axioms on 0..n_check and decide M^1 membership."""
    if w.kind == "custom":
        n_check = min(n_check, w.max_index())
    rep = WeightReport()
    n = np.arange(0, n_check + 1)
    vals = w.values(n)
    if np.any(vals < 1.0 - 1e-12):
        i = int(np.argmax(vals < 1.0 - 1e-12))
        rep.violations.append("normalization: w_%d = %.6g < 1" % (i, vals[i]))
    neg = w.values(-n)
    bad = np.abs(neg - vals) > 1e-12 * np.maximum(1.0, vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        rep.violations.append("symmetry: w_%d = %.6g != w_-%d = %.6g" % (i, vals[i], i, neg[i]))
    if np.any(np.diff(vals) < -1e-12 * vals[:-1]):
        i = int(np.argmax(np.diff(vals) < -1e-12 * vals[:-1]))
        rep.violations.append("monotonicity: w_%d > w_%d" % (i, i + 1))
    rep.violations.extend(_submult_violations(vals, "w"))
    rep.passed = not rep.violations

    # M^1: v_n = w_n / <n> must itself satisfy all four axioms
    v = vals / jbracket(n)
    m1_ok = not (
        np.any(v < 1.0 - 1e-12)
        or np.any(np.diff(v) < -1e-12 * v[:-1])
        or _submult_violations(v, "v")
    )
    rep.m1 = bool(rep.passed and m1_ok)
    return rep


def _submult_violations(vals, name):
    # w_{n+m} <= w_n w_m on all stored nonnegative pairs
    n_check = len(vals) - 1
    prod = np.outer(vals, vals)
    idx = np.add.outer(np.arange(n_check + 1), np.arange(n_check + 1))
    mask = idx <= n_check
    lhs = vals[np.where(mask, idx, 0)]
    bad = mask & (lhs > prod * (1.0 + 1e-12))
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        return [
            "submultiplicativity: %s_%d > %s_%d * %s_%d" % (name, i + j, name, i, name, j)
        ]
    return []


# ---------------------------------------------------------------------------
# JSON specs


def random_potential(K=8, decay="sobolev", s=1.0, a=0.5, seed=0, amplitude=1.0):
    """Random band-limited real-type potential with seeded unit-complex phases."""
    rng = np.random.default_rng(seed)
    coeffs = {}
    for k in range(-K, K + 1):
        u = np.exp(2j * np.pi * rng.random())
        if decay == "sobolev":
            mag = jbracket(2.0 * np.pi * k) ** (-s - 1.0)
        elif decay == "abel":
            mag = math.exp(-a * abs(k)) * jbracket(2.0 * np.pi * k) ** (-1.0)
        else:
            raise ConfigError("unknown decay %r" % (decay,))
        coeffs[k] = amplitude * mag * u
    return FourierPotential(coeffs)


def potential_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        kind = obj["type"]
    except (TypeError, KeyError):
        raise ConfigError("potential spec must be an object with a 'type' field")
    if kind == "fourier":
        coeffs = {}
        for item in obj.get("coeffs", []):
            coeffs[int(item["k"])] = complex(float(item["re"]), float(item.get("im", 0.0)))
        return FourierPotential(coeffs)
    if kind == "constant":
        return FourierPotential.constant(complex(obj["a"]))
    if kind == "random":
        return random_potential(
            K=int(obj.get("K", 8)),
            decay=obj.get("decay", "sobolev"),
            s=float(obj.get("s", 1.0)),
            a=float(obj.get("a", 0.5)),
            seed=int(obj.get("seed", 0)),
            amplitude=float(obj.get("amplitude", 1.0)),
        )
    raise ConfigError("unknown potential type %r" % (kind,))


def weight_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        kind = obj["kind"]
    except (TypeError, KeyError):
        raise ConfigError("weight spec must be an object with a 'kind' field")
    if kind == "custom":
        return Weight(kind="custom", table=np.asarray(obj["table"], dtype=np.float64))
    if kind not in ("sobolev", "abel", "gevrey", "loglight"):
        raise ConfigError("unknown weight kind %r" % (kind,))
    return Weight(
        kind=kind,
        s=float(obj.get("s", 0.0)),
        a=float(obj.get("a", 0.0)),
        sigma=float(obj.get("sigma", 0.5)),
    )
