"""Spin coupled to a bath that also has its own (l = 0) dynamics.

Energies are measured in units of 1/tau0 and times in units of tau0, so the
bare bath density of states is a semicircle of half-width 2 sqrt(Z_av).
The contour variable H runs over the unit circle with X = H + 1/H and
W = Z_av H + 1/H.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import quad
from scipy.special import jv, roots_legendre

from .kernel import KernelRouteError, torus_sum, _torus_nodes
from .coupling import SpecError
from .states import coherent

__all__ = [
    "BathSpec",
    "ResolventError",
    "ResolventResult",
    "algebraic_tail",
    "diffusion_coefficient",
    "diffusion_golden",
    "fast_bath_harmonics",
    "m_external",
    "m_scaling",
    "n_bessel",
    "n_contour",
    "planar_gaussian",
    "randomized_profile",
    "self_consistent_resolvent",
]


@dataclass(frozen=True)
class BathSpec:
    """Bare bath spectrum: semicircle of half-width ``e0`` or a tabulated density."""

    e0: float
    energies: np.ndarray | None = None
    density: np.ndarray | None = None

    @classmethod
    def from_coupling(cls, spec):
        if spec.delta_bar[0] <= 0:
            raise SpecError("delta_bar[0]", "bath dynamics need a positive l=0 entry")
        return cls(2 * math.sqrt(spec.delta_bar[0]))

    def nu(self, e):
        e = np.asarray(e, dtype=float)
        if self.energies is not None:
            return np.interp(e, self.energies, self.density, left=0.0, right=0.0)
        return 2 / (math.pi * self.e0 ** 2) * np.sqrt(np.clip(self.e0 ** 2 - e ** 2, 0, None))

    def stieltjes(self, w):
        """int nu(E) / (w - E) dE."""
        w = complex(w)
        if self.energies is None:
            root = w * np.sqrt(1 - (self.e0 / w) ** 2 + 0j)
            if abs(w - root) > abs(w + root):
                root = -root
            return 2 * (w - root) / self.e0 ** 2
        return complex(np.trapezoid(self.density / (w - self.energies), self.energies))


class ResolventError(ArithmeticError):
    """The fixed-point iteration did not converge."""

    def __init__(self, x, residual, iterations):
        super().__init__(f"no convergence at x={x} after {iterations} iterations "
                         f"(residual {residual:.3e})")
        self.residual = residual


@dataclass
class ResolventResult:
    average: complex
    per_energy: np.ndarray | None
    iterations: int
    converged: bool


def self_consistent_resolvent(bath, x, hat_delta_prime, energies=None,
                              relax=0.5, tol=1e-12, max_iter=10_000):
    """Solve c = int nu(E) / (x - E - Delta' c) dE by damped iteration.

    Returns the energy average and, when ``energies`` is given, the
    energy-resolved values 1 / (x - E - Delta' c).  Raises
    :class:`ResolventError` when the iteration stalls.
    """
    c = 1 / complex(x) if x != 0 else -1j
    converged = False
    for it in range(1, max_iter + 1):
        new = bath.stieltjes(x - hat_delta_prime * c)
        step = new - c
        c = c + relax * step
        if abs(step) < tol * max(1.0, abs(c)):
            converged = True
            break
    if not converged:
        raise ResolventError(x, abs(step), it)
    per = None
    if energies is not None:
        per = 1 / (x - np.asarray(energies, dtype=float) - hat_delta_prime * c)
    return ResolventResult(c, per, it, converged)


def _check_zs(z_l, z_av):
    if not 0 <= z_av < 1:
        raise KernelRouteError(f"Z_av={z_av} must lie in [0, 1)")
    if not -1 < z_l < 1:
        raise KernelRouteError(f"Z={z_l} must lie in (-1, 1)")


def m_external(t, e, z_l, z_av):
    """Kernel factor for bath energy ``e`` with bath dynamics of strength Z_av.

    Reduces to M(t, Z) for Z_av = 0, e = 0 and to |N(t, Z)|^2 for Z = Z_av, e = 0.
    """
    _check_zs(z_l, z_av)
    if abs(e) > 2 * math.sqrt(z_av):
        raise KernelRouteError(f"E={e} outside the band 2 sqrt(Z_av)")
    margin = min(1 - z_av, 1 - abs(z_l))
    k = _torus_nodes(t, margin)
    th = 2 * np.pi * np.arange(k) / k
    h = np.exp(1j * th)
    x = 2 * np.cos(th)
    w = z_av * h + 1 / h
    common = (h - 1 / h) / (w - e)
    u = common * np.exp(-1j * t * x)
    v = common * np.exp(1j * t * x)
    p = h  # H1 H2 on the sum angle
    kern = (1 - z_av * p) / (1 - z_l * p)
    return float(torus_sum(u, v, kern).real)


def n_contour(t, z):
    """N(t, Z) from a single unit-circle integral."""
    if not -1 < z < 1:
        raise KernelRouteError("need |Z| < 1")
    k = _torus_nodes(t, 1 - abs(z))
    th = 2 * np.pi * np.arange(k) / k
    h = np.exp(1j * th)
    vals = (h - 1 / h) * np.exp(-2j * t * np.cos(th)) / (z * h + 1 / h)
    return complex(np.mean(vals))


def n_bessel(t, z):
    """N(t, Z) = -sum_k Z^k (2k+1) J_(2k+1)(2t) / t."""
    if abs(t) < 1e-4:
        return -(1 - t * t * (1 - z) / 2)
    kmax = int(abs(t) + 40 + 6 * abs(2 * t) ** (1 / 3))
    k = np.arange(kmax + 1)
    return float(-np.sum(np.power(float(z), k) * (2 * k + 1) * jv(2 * k + 1, 2 * t)) / t)


def m_scaling(tp, e, z_av):
    """Scaling form of the kernel for t (1 - Z) = t' fixed and Z -> Z_av.

    (1/pi) int_0^pi 2 sin^2 q (1 - Z_av) e^(-2 t' sin q)
        / (((1 + Z_av) cos q - E)^2 + (1 - Z_av)^2 sin^2 q) dq
    """
    a, b = 1 + z_av, 1 - z_av

    def integrand(q):
        s = math.sin(q)
        return 2 * s * s * b * math.exp(-2 * tp * s) / ((a * math.cos(q) - e) ** 2 + (b * s) ** 2)

    qc = math.acos(max(-1.0, min(1.0, e / a)))
    pts = sorted({0.0, qc, math.pi})
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi > lo:
            val, _ = quad(integrand, lo, hi, limit=500, epsabs=1e-14, epsrel=1e-12)
            total += val
    return total / math.pi


def algebraic_tail(tp, e, z_av):
    """Leading t'^-3 tail of :func:`m_scaling`."""
    a, b = 1 + z_av, 1 - z_av
    return b * (a * a + e * e) / (math.pi * tp ** 3 * (a * a - e * e) ** 2)


def _s1(spec):
    l = np.arange(spec.two_j + 1)
    return float(np.sum(np.array(spec.delta_bar) * l * (l + 1) * (2 * l + 1)))


def diffusion_coefficient(spec, e):
    """D(E) = D0 sqrt(E0^2 - E^2) / (4 j (j+1)) with D0 = S1 / Delta_bar(0).

    ``e`` is in the units of the coupling spectrum (not scaled by tau0).
    """
    bath = BathSpec.from_coupling(spec)
    j = spec.j
    d0_bath = _s1(spec) / spec.delta_bar[0]
    return d0_bath * np.sqrt(np.clip(bath.e0 ** 2 - np.asarray(e) ** 2, 0, None)) / (4 * j * (j + 1))


def diffusion_golden(spec, e, coupling_norm2=None):
    """Golden-rule route D = 2 pi nu(E) ||C||^2 / (4 j (j+1)).

    ``coupling_norm2`` is the per-state squared matrix element of the spin
    coupling, tr(C.C)/(N(2j+1)); by default its ensemble value.
    """
    bath = BathSpec.from_coupling(spec)
    j = spec.j
    c2 = _s1(spec) if coupling_norm2 is None else coupling_norm2
    return 2 * math.pi * bath.nu(e) * c2 / (4 * j * (j + 1))


def fast_bath_harmonics(spec, e, t, direction=(0.0, 0.0)):
    """Coherent-state multipoles damped by exp(-t l(l+1) D(E))."""
    d = diffusion_coefficient(spec, e)
    l = np.arange(spec.two_j + 1)
    w0 = coherent(spec.two_j, *direction).harmonics()
    return w0.scaled(np.exp(-t * l * (l + 1) * d))


def planar_gaussian(u, d, t):
    """(1 / (4 pi D t)) exp(-u^2 / (4 D t))."""
    u = np.asarray(u, dtype=float)
    return np.exp(-u * u / (4 * d * t)) / (4 * math.pi * d * t)


def randomized_profile(u, t, d_max, weight="semicircle", n=400):
    """Average of planar Gaussians over bath energies.

    The energy is written E = E0 cos(alpha), D(E) = d_max sin(alpha).
    ``weight`` is ``"semicircle"``, ``("delta", cos_alpha)`` or a callable
    giving the (normalized) weight density in alpha on (0, pi).
    """
    u = np.asarray(u, dtype=float)
    if isinstance(weight, tuple) and weight[0] == "delta":
        sin_a = math.sqrt(max(1 - weight[1] ** 2, 0.0))
        return planar_gaussian(u, d_max * sin_a, t)
    x, w = roots_legendre(n)
    alpha = (x + 1) * math.pi / 2
    w = w * math.pi / 2
    if weight == "semicircle":
        dens = 2 / math.pi * np.sin(alpha) ** 2
    elif callable(weight):
        dens = np.asarray(weight(alpha), dtype=float)
    else:
        raise ValueError(f"unknown weight {weight!r}")
    dvals = d_max * np.sin(alpha)
    g = planar_gaussian(u[..., None], dvals, t)
    out = np.sum(w * dens * g, axis=-1)
    return out if out.ndim else float(out)
