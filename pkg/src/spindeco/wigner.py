"""Multipole (spherical tensor) expansion of spin-j operators and phase-space fields.

An operator ``A`` on the spin-j space is expanded as

    A = sum_{l,m} W[l, m] B(l, m),
    B(l, m)_{r s} = sqrt((2l+1)/(2j+1)) <j r; l m | j s>,

with ``l = 0..2j``.  The ``B(l, m)`` are real and orthonormal under the
Hilbert-Schmidt product, so ``tr(A B^dagger) = sum W_A conj(W_B)``.
Matrix rows and columns are ordered by ``m = -j..j``.
"""
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, roots_legendre

from .su2 import cg

__all__ = [
    "EXACT_TWO_J_MAX",
    "HarmonicSpectrum",
    "PhaseSpaceField",
    "SphereGrid",
    "coherent_harmonics",
    "field",
    "from_harmonics",
    "gauss_grid",
    "husimi_weights",
    "spin_component",
    "sph_harm_table",
    "spin_operators",
    "stereographic_grid",
    "tensor_operator",
    "to_harmonics",
]

# up to this size the basis is assembled from exact Clebsch-Gordan values
EXACT_TWO_J_MAX = 24


@lru_cache(maxsize=8)
def _diagonals_exact(two_j):
    """Rows l=|m|..2j of B(l, m) restricted to the m-th diagonal, for m<=0."""
    out = {}
    for m in range(-two_j, 1):
        rows = []
        for l in range(-m, two_j + 1):
            pref = math.sqrt((2 * l + 1) / (two_j + 1))
            # row index r runs from -j - m to j (doubled: tr)
            rows.append([pref * cg(two_j, tr, 2 * l, 2 * m, two_j, tr + 2 * m)
                         for tr in range(-two_j - 2 * m, two_j + 1, 2)])
        out[m] = np.array(rows)
    return out


@lru_cache(maxsize=4)
def _diagonals_spectral(two_j):
    """Same as :func:`_diagonals_exact` via the l(l+1) eigenproblem.

    On a fixed diagonal the superoperator X -> sum_mu [S_mu, [S_mu, X]] is a
    symmetric tridiagonal matrix whose eigenvectors are the B(l, m).  The sign
    is fixed by the stretched entry r = j, which is positive.
    """
    j = two_j / 2
    jj = j * (j + 1)
    out = {}
    for m in range(-two_j, 1):
        a = np.arange(-j - m, j + 0.5)          # row projections
        b = a + m
        diag = 2 * jj - 2 * a * b
        off = -np.sqrt(np.clip(jj - a[1:] * (a[1:] - 1), 0, None)) * \
            np.sqrt(np.clip(jj - b[1:] * (b[1:] - 1), 0, None))
        if len(a) == 1:
            out[m] = np.ones((1, 1))
            continue
        _, vec = eigh_tridiagonal(diag, off)
        vec = vec.T * np.sign(vec[-1, :])[:, None]
        out[m] = vec
    return out


def _diagonals(two_j):
    if two_j <= EXACT_TWO_J_MAX:
        return _diagonals_exact(two_j)
    return _diagonals_spectral(two_j)


def _diag_rows(two_j, m):
    """Matrix of B(l, m) diagonal entries, rows l=|m|..2j."""
    base = _diagonals(two_j)
    if m <= 0:
        return base[m]
    return (-1) ** m * base[-m]


@dataclass
class HarmonicSpectrum:
    """Coefficients ``W[l, m]`` stored as ``coeffs[l, m + 2j]``."""

    two_j: int
    coeffs: np.ndarray

    def __post_init__(self):
        n = self.two_j + 1
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (n, 2 * self.two_j + 1):
            raise ValueError(f"coeffs must have shape {(n, 2 * self.two_j + 1)}")

    @classmethod
    def zeros(cls, two_j):
        return cls(two_j, np.zeros((two_j + 1, 2 * two_j + 1), complex))

    @property
    def j(self):
        return self.two_j / 2

    @property
    def lmax(self):
        return self.two_j

    def __getitem__(self, lm):
        l, m = lm
        if abs(m) > l or l > self.two_j:
            return 0j
        return self.coeffs[l, m + self.two_j]

    def __setitem__(self, lm, value):
        l, m = lm
        if abs(m) > l or l > self.two_j:
            raise IndexError(f"(l, m) = {lm} out of range")
        self.coeffs[l, m + self.two_j] = value

    def component(self, l):
        """Coefficients for m = -l..l."""
        return self.coeffs[l, self.two_j - l:self.two_j + l + 1].copy()

    def scaled(self, factors):
        """Multiply each rank l by ``factors[l]``."""
        factors = np.asarray(factors)
        return HarmonicSpectrum(self.two_j, self.coeffs * factors[:, None])

    def norm2(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def copy(self):
        return HarmonicSpectrum(self.two_j, self.coeffs.copy())


def to_harmonics(matrix):
    """Expand a (2j+1)x(2j+1) matrix into its multipole coefficients."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    two_j = a.shape[0] - 1
    out = HarmonicSpectrum.zeros(two_j)
    for m in range(-two_j, two_j + 1):
        rows = _diag_rows(two_j, m)
        out.coeffs[abs(m):, m + two_j] = rows @ np.diagonal(a, offset=m)
    return out


def from_harmonics(spectrum):
    """Inverse of :func:`to_harmonics`."""
    two_j = spectrum.two_j
    n = two_j + 1
    a = np.zeros((n, n), complex)
    idx = np.arange(n)
    for m in range(-two_j, two_j + 1):
        vals = spectrum.coeffs[abs(m):, m + two_j] @ _diag_rows(two_j, m)
        if m >= 0:
            a[idx[:n - m], idx[:n - m] + m] = vals
        else:
            a[idx[:n + m] - m, idx[:n + m]] = vals
    return a


def tensor_operator(two_j, l, m):
    """The real basis matrix B(l, m)."""
    spec = HarmonicSpectrum.zeros(two_j)
    spec[l, m] = 1.0
    return from_harmonics(spec).real


def spin_component(spectrum, l):
    """The spin-l part of the operator, as a matrix."""
    part = HarmonicSpectrum.zeros(spectrum.two_j)
    part.coeffs[l] = spectrum.coeffs[l]
    return from_harmonics(part)


@lru_cache(maxsize=16)
def spin_operators(two_j):
    """(Sx, Sy, Sz) for spin j, basis ordered m = -j..j."""
    j = two_j / 2
    m = np.arange(-j, j + 0.5)
    sz = np.diag(m).astype(complex)
    sp = np.zeros((two_j + 1, two_j + 1), complex)
    # <m+1|S+|m>
    sp[np.arange(1, two_j + 1), np.arange(two_j)] = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    sx = (sp + sp.conj().T) / 2
    sy = (sp - sp.conj().T) / 2j
    for op in (sx, sy, sz):
        op.flags.writeable = False
    return sx, sy, sz


@lru_cache(maxsize=16)
def husimi_weights(two_j):
    """<j j; l 0 | j j> for l = 0..2j, the Husimi smoothing factors."""
    if two_j <= EXACT_TWO_J_MAX:
        return np.array([cg(two_j, two_j, 2 * l, 0, two_j, two_j)
                         for l in range(two_j + 1)])
    # closed form of the stretched coefficient
    l = np.arange(two_j + 1)
    logv = (np.log(two_j + 1.0) + 2 * gammaln(two_j + 1)
            - gammaln(two_j - l + 1) - gammaln(two_j + l + 2))
    return np.exp(0.5 * logv)


def coherent_harmonics(two_j):
    """|W^(l,0)| of a coherent state pointing along +z."""
    l = np.arange(two_j + 1)
    logv = (2 * gammaln(two_j + 1) + np.log(2 * l + 1)
            - gammaln(two_j + l + 2) - gammaln(two_j - l + 1))
    return np.exp(0.5 * logv)


@dataclass
class SphereGrid:
    """Sample points on the unit sphere with optional quadrature weights.

    ``xy`` holds the plane coordinates when the grid comes from a projection.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray | None = None
    xy: np.ndarray | None = None
    kind: str = "sphere"
    meta: dict = dc_field(default_factory=dict)
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self):
        return self.theta.size

    def unit_vectors(self):
        st = np.sin(self.theta)
        return np.stack([st * np.cos(self.phi), st * np.sin(self.phi),
                         np.cos(self.theta)], axis=-1)


def gauss_grid(n_theta, n_phi=None):
    """Gauss-Legendre in cos(theta) times uniform phi.

    Integrates spherical harmonics up to degree ``min(2 n_theta - 1, n_phi - 1)``
    exactly; weights sum to 4 pi.
    """
    if n_phi is None:
        n_phi = 2 * n_theta
    x, w = roots_legendre(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(np.arccos(x), phi, indexing="ij")
    weights = np.repeat(w[:, None], n_phi, axis=1) * (2 * np.pi / n_phi)
    return SphereGrid(th.ravel(), ph.ravel(), weights.ravel(), kind="gauss",
                      meta={"n_theta": n_theta, "n_phi": n_phi})


@lru_cache(maxsize=8)
def default_grid(two_j):
    """Grid integrating products of two spin-j fields exactly."""
    return gauss_grid(two_j + 2, 2 * two_j + 3)


def stereographic_grid(resolution, r_max=4.0, radial="tan"):
    """Square plane grid mapped onto the sphere.

    ``radial="tan"`` uses r = 2 tan(theta/2) (stereographic projection from the
    south pole); ``radial="arctan"`` uses r = 2 arctan(theta/2).
    """
    axis = np.linspace(-r_max, r_max, resolution)
    x, y = np.meshgrid(axis, axis, indexing="xy")
    r = np.hypot(x, y)
    if radial == "tan":
        theta = 2 * np.arctan(r / 2)
    elif radial == "arctan":
        theta = np.minimum(2 * np.tan(np.minimum(r / 2, np.arctan(np.pi / 2))), np.pi)
    else:
        raise ValueError(f"unknown radial map {radial!r}")
    phi = np.arctan2(y, x)
    return SphereGrid(theta.ravel(), phi.ravel(), None,
                      np.stack([x.ravel(), y.ravel()], axis=1), kind="plane",
                      meta={"resolution": resolution, "r_max": r_max, "radial": radial})


_KIND_EXPONENT = {"wigner": 0, "husimi": 1, "p": -1}


def _legendre_by_m(lmax, x):
    """Yield ``(m, P)`` with P[l - m] the normalized associated Legendre
    function sqrt((2l+1)/4pi (l-m)!/(l+m)!) P_l^m(x), Condon-Shortley phase."""
    sn = np.sqrt(np.clip(1 - x * x, 0, None))
    pmm = np.full(x.size, 1 / math.sqrt(4 * math.pi))
    for m in range(lmax + 1):
        if m:
            pmm = -pmm * math.sqrt((2 * m + 1) / (2 * m)) * sn
        plm = np.zeros((lmax + 1 - m, x.size))
        plm[0] = pmm
        if m < lmax:
            plm[1] = math.sqrt(2 * m + 3) * x * pmm
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            plm[l - m] = a * (x * plm[l - m - 1] - b * plm[l - m - 2])
        yield m, plm


def sph_harm_table(lmax, theta, phi):
    """Y_l^m(theta, phi) for all l <= lmax, |m| <= l (Condon-Shortley phase).

    Returns an array of shape ``(npts, lmax + 1, 2 lmax + 1)`` indexed by
    ``[point, l, m + lmax]``; entries with |m| > l are zero.  Uses the
    normalized associated Legendre recursion in l at fixed m.
    """
    x = np.cos(np.asarray(theta, dtype=float)).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    out = np.zeros((x.size, lmax + 1, 2 * lmax + 1), complex)
    for m, plm in _legendre_by_m(lmax, x):
        ylm = plm.T * np.exp(1j * m * phi)[:, None]
        out[:, m:, lmax + m] = ylm
        if m:
            out[:, m:, lmax - m] = (-1) ** m * ylm.conj()
    return out


# largest dense conj(Y) table (complex entries) kept on a grid
TABLE_CACHE_LIMIT = 1 << 24
_POINT_CHUNK = 4096


def _harmonics_matrix(two_j, grid):
    """conj(Y_l^m) at grid points, columns ordered like ``coeffs.ravel()``.

    The conjugate pairs with the row/column convention of :func:`to_harmonics`
    so that the normalized Husimi field is exactly <n|A|n>.  Cached on the grid.
    """
    cache = grid._cache
    if two_j not in cache:
        y = sph_harm_table(two_j, grid.theta, grid.phi)
        cache[two_j] = np.conj(y.reshape(grid.size, -1))
    return cache[two_j]


def _field_streaming(coeffs, two_j, grid):
    """sum_lm coeffs[l, m] conj(Y_l^m) without materializing the table."""
    out = np.zeros(grid.size, complex)
    for lo in range(0, grid.size, _POINT_CHUNK):
        sl = slice(lo, lo + _POINT_CHUNK)
        x = np.cos(grid.theta[sl])
        phi = grid.phi[sl]
        acc = np.zeros(x.size, complex)
        for m, plm in _legendre_by_m(two_j, x):
            pos = coeffs[m:, two_j + m] @ plm
            acc += pos * np.exp(-1j * m * phi)
            if m:
                neg = coeffs[m:, two_j - m] @ plm
                acc += (-1) ** m * neg * np.exp(1j * m * phi)
        out[sl] = acc
    return out


def field(spectrum, grid, kind="wigner", normalized=False):
    """Evaluate a phase-space field sum_l w_l sum_m W[l,m] conj(Y_l^m) on a grid.

    ``kind`` is ``"wigner"``, ``"husimi"`` or ``"p"``.  With ``normalized=True``
    the field is multiplied by sqrt(4 pi/(2j+1)); the normalized Husimi field of
    an operator A is then <n|A|n>.
    """
    if kind not in _KIND_EXPONENT:
        raise ValueError(f"unknown field kind {kind!r}")
    two_j = spectrum.two_j
    w = husimi_weights(two_j) ** _KIND_EXPONENT[kind]
    coeffs = spectrum.coeffs * w[:, None]
    if two_j in grid._cache or grid.size * (two_j + 1) * (2 * two_j + 1) <= TABLE_CACHE_LIMIT:
        vals = _harmonics_matrix(two_j, grid) @ coeffs.ravel()
    else:
        vals = _field_streaming(coeffs, two_j, grid)
    if normalized:
        vals = vals * math.sqrt(4 * math.pi / (two_j + 1))
    return vals


@dataclass
class PhaseSpaceField:
    """Field values on a grid plus enough metadata to reproduce them."""

    grid: SphereGrid
    values: np.ndarray
    kind: str
    two_j: int
    time: float | None = None
    normalized: bool = False
    meta: dict = dc_field(default_factory=dict)

    def sidecar(self):
        info = {"kind": self.kind, "two_j": self.two_j, "time": self.time,
                "normalized": self.normalized, "grid": self.grid.kind,
                **self.grid.meta, **self.meta}
        return info

    def to_csv(self, path):
        """Write ``x,y,value`` (plane) or ``theta,phi,value`` rows plus a JSON sidecar."""
        from .io import write_csv, write_json
        vals = np.real_if_close(self.values)
        if self.grid.xy is not None:
            header = ["x", "y", "value"]
            cols = [self.grid.xy[:, 0], self.grid.xy[:, 1], np.real(vals)]
        else:
            header = ["theta", "phi", "value"]
            cols = [self.grid.theta, self.grid.phi, np.real(vals)]
        write_csv(path, header, np.column_stack(cols))
        write_json(str(path).rsplit(".", 1)[0] + ".json", self.sidecar())
        return path
