"""The planar decoherence kernel M(t, z) and its limiting forms.

``M(t, z)`` multiplies the rank-l multipoles of the reduced density matrix
with ``z = Z(l)``.  Times are in units of tau0 unless stated otherwise.

Routes
------
series      double power series in t and z (extended precision internally)
quadrature  torus integral, evaluated as an exact trapezoid sum via FFT
bessel      M = sum_{k>=1} z^(k-1) k^2 J_k(2t)^2 / t^2
psi         scaling limit Psi(t (1 - z)) for z -> 1
asymptotic  leading large-t form
"""
from dataclasses import dataclass
import math

import mpmath
import numpy as np
from scipy.special import gammaln, jv, roots_legendre

__all__ = [
    "KernelRouteError",
    "KernelTable",
    "SeriesDivergence",
    "kernel_table",
    "m_asymptotic",
    "m_bessel",
    "m_hat",
    "m_kernel",
    "m_quadrature",
    "m_series",
    "phi",
    "phi_asymptotic",
    "psi",
    "psi_series",
]

SERIES_RADIUS = 12.0
QUAD_MAX_NODES = 1 << 21
PSI_THRESHOLD = 1e-4


class SeriesDivergence(ArithmeticError):
    """Time beyond the radius where the power series is trusted."""


class KernelRouteError(ValueError):
    """Parameters outside the validity range of a route."""


def _check_z(z):
    if not -1 <= z <= 1:
        raise KernelRouteError(f"z={z} outside [-1, 1]")


def m_series(t, z, radius=SERIES_RADIUS):
    """Power-series route.

    The terms grow like exp(4t) before cancelling, so the sum is carried in
    mpmath with enough digits for the requested t.
    """
    _check_z(z)
    t = float(t)
    if abs(t) > radius:
        raise SeriesDivergence(f"t={t} beyond series radius {radius}")
    if t == 0:
        return 1.0
    m_max = max(40, math.ceil(4 * t * t) + 20)
    dps = 20 + int(4 * abs(t) / math.log(10)) + 5
    with mpmath.workdps(dps):
        t2 = mpmath.mpf(t) ** 2
        zz = mpmath.mpf(z)
        total = mpmath.mpf(0)
        tpow = mpmath.mpf(1)
        for m in range(m_max + 1):
            inner = mpmath.mpf(0)
            zpow = mpmath.mpf(1)
            for n in range(m + 1):
                inner += (-zpow if n % 2 else zpow) * (n + 1) ** 2 / (
                    mpmath.factorial(m - n) * mpmath.factorial(m + n + 2))
                zpow *= zz
            coef = 2 * (2 * m + 1) * mpmath.factorial(2 * m) / (
                mpmath.factorial(m) * mpmath.factorial(m + 1))
            term = tpow * coef * inner
            total += -term if m % 2 else term
            tpow *= t2
            if m > 4 * t * t + 10 and abs(term) < mpmath.mpf(10) ** (-dps + 2):
                break
        return float(total)


def _torus_nodes(t, margin):
    k = max(256, math.ceil(16 * abs(t)) + 64, math.ceil(40 / margin))
    k = 1 << (k - 1).bit_length()
    if k > QUAD_MAX_NODES:
        raise KernelRouteError("pole too close to the integration torus; use the psi route")
    return k


def torus_sum(u, v, kernel):
    """(1/K^2) sum_{a,b} u[a] v[b] kernel[(a+b) mod K] via FFT."""
    conv = np.fft.ifft(np.fft.fft(u) * np.fft.fft(v))
    return np.sum(kernel * conv) / len(u) ** 2


def m_quadrature(t, z):
    """Torus route: (1/4pi^2) double integral over theta1, theta2.

    The integrand depends on the angles only through theta1, theta2 and their
    sum, so the trapezoid rule is a circular convolution.
    """
    _check_z(z)
    margin = 1 - abs(z)
    if margin <= 0:
        raise KernelRouteError("|z| = 1 puts the pole on the torus")
    k = _torus_nodes(t, margin)
    th = 2 * np.pi * np.arange(k) / k
    w = np.exp(1j * th)
    u = np.exp(-2j * t * np.cos(th)) * (w * w - 1)
    v = np.exp(2j * t * np.cos(th)) * (w * w - 1)
    val = torus_sum(u, v, 1 / (1 - z * w))
    return float(val.real)


def m_bessel(t, z):
    """Bessel-sum route, exact and cheap for any t; O(t) terms."""
    _check_z(z)
    t = float(t)
    if abs(t) < 1e-4:
        # J_k(2t)^2 / t^2 underflows; the truncated small-t expansion is exact to O(t^4)
        t2 = t * t
        return 1 + t2 * (z - 1) + t2 * t2 * (5 - 8 * z + 3 * z * z) / 12
    kmax = int(2 * abs(t) + 60 + 10 * abs(2 * t) ** (1 / 3))
    k = np.arange(1, kmax + 1)
    terms = k ** 2 * jv(k, 2 * t) ** 2
    zp = np.power(float(z), k - 1)
    return float(np.sum(zp * terms) / t ** 2)


def m_asymptotic(t, z):
    """Leading t^-3 behaviour for |z| < 1."""
    return ((1 + z) / (1 - z) ** 3 - (1 - z) / (1 + z) ** 3 * np.sin(4 * t)) / (2 * np.pi * t ** 3)


def _gl(n):
    x, w = roots_legendre(n)
    return x * (np.pi / 2), w * (np.pi / 2)


def psi(tp):
    """Psi(t') = (2/pi) int_{-pi/2}^{pi/2} cos^2(theta) exp(-2 t' cos theta) d theta."""
    tp = np.asarray(tp, dtype=float)
    n = 96 + int(8 * math.sqrt(max(float(np.max(np.abs(tp), initial=0.0)), 0.0)))
    th, w = _gl(n)
    c = np.cos(th)
    vals = (2 / np.pi) * np.sum(w * c ** 2 * np.exp(-2 * tp[..., None] * c), axis=-1)
    return vals if vals.ndim else float(vals)


def psi_series(tp, terms=None):
    """Power series of Psi; suitable for t' below a few units."""
    tp = float(tp)
    terms = terms or max(40, int(8 * abs(tp)) + 40)
    if tp == 0:
        return 1.0
    k = np.arange(terms)
    logmag = gammaln((3 + k) / 2) - gammaln(k + 1) - gammaln(2 + k / 2)
    lt = math.log(2 * abs(tp))
    vals = np.where(k == 0, np.exp(logmag),
                    np.exp(logmag + k * lt) * np.where(k % 2, -np.sign(tp), 1.0))
    return float(2 / math.sqrt(math.pi) * np.sum(vals))


PHI_SPLIT = 6.0


def phi(t):
    """First-order correction Phi(t) = 1 - 1F2(-1/2; 1, 2; -4t^2).

    Series below ``PHI_SPLIT``; above it the equivalent Bessel sum
    -sum_k (k-1) k^2 J_k(2t)^2 / t^2, which has no cancellation problem.
    """
    t = float(t)
    if t == 0:
        return 0.0
    if abs(t) <= PHI_SPLIT:
        x = -4 * t * t
        total, term = 0.0, 1.0
        for k in range(200):
            if k:
                term *= (-0.5 + k - 1) * x / (k * (k + 1) * k)
            total += term
            if k > 4 and abs(term) < 1e-17 * max(1.0, abs(total)):
                break
        return 1 - total
    kmax = int(2 * abs(t) + 60 + 10 * abs(2 * t) ** (1 / 3))
    k = np.arange(1, kmax + 1)
    return float(-np.sum((k - 1) * k ** 2 * jv(k, 2 * t) ** 2) / t ** 2)


def phi_asymptotic(t):
    """Algebraic large-t form 1 - 16 t/(3 pi) - 1/(2 pi t)."""
    return 1 - 16 * t / (3 * np.pi) - 1 / (2 * np.pi * t)


def m_kernel(t, z, method="auto", psi_threshold=PSI_THRESHOLD):
    """M(t, z) by the requested route.

    ``auto`` returns 1 for z = 1, Psi(t(1-z)) when 1 - z < ``psi_threshold``,
    the series for t <= 1 and the torus quadrature otherwise.
    """
    _check_z(z)
    if method == "series":
        return m_series(t, z)
    if method == "quadrature":
        return m_quadrature(t, z)
    if method == "bessel":
        return m_bessel(t, z)
    if method == "psi":
        return psi(t * (1 - z))
    if method == "asymptotic":
        return float(m_asymptotic(t, z))
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if z == 1:
        return 1.0
    if 1 - z < psi_threshold:
        return psi(t * (1 - z))
    if abs(t) <= 1:
        return _series_float(t, z)
    return m_quadrature(t, z)


def _series_float(t, z):
    # plain double precision is fine for |t| <= 1 (terms stay below e^4)
    total = 0.0
    t2 = t * t
    for m in range(60):
        n = np.arange(m + 1)
        inner = np.sum((-z) ** n * (n + 1) ** 2 * np.exp(-gammaln(m - n + 1) - gammaln(m + n + 3)))
        coef = 2 * (2 * m + 1) * math.exp(gammaln(2 * m + 1) - gammaln(m + 1) - gammaln(m + 2))
        term = (-1) ** m * t2 ** m * coef * inner
        total += term
        if m > 8 and abs(term) < 1e-18:
            break
    return float(total)


def m_hat(derived, l, t, absolute_time=False, method="auto"):
    """Kernel factor M^(l)(t) = M(t, Z(l)) for a derived coupling."""
    tau = derived.timescales.tau0 if absolute_time else 1.0
    z = float(derived.z[l])
    return m_kernel(t / tau, z, method)


@dataclass
class KernelTable:
    times: np.ndarray
    ls: np.ndarray
    values: np.ndarray          # shape (len(ls), len(times))
    method: str

    def factors(self, i_t):
        """Per-rank factors at the i-th time."""
        return self.values[:, i_t]


def kernel_table(derived, times, absolute_time=False, method="auto"):
    times = np.atleast_1d(np.asarray(times, dtype=float))
    ls = np.arange(derived.spec.two_j + 1)
    vals = np.empty((len(ls), len(times)))
    cache = {}
    for i, l in enumerate(ls):
        z = float(derived.z[l])
        for k, t in enumerate(times):
            key = (z, t)
            if key not in cache:
                cache[key] = m_hat(derived, l, t, absolute_time, method)
            vals[i, k] = cache[key]
    return KernelTable(times, ls, vals, method)
