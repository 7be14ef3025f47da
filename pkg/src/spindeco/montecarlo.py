"""Random-matrix sampling of the spin-bath Hamiltonian.

H = sum_{l,m} B(l, m) (x) W(l, m), where B(l, m) are the spin tensor
operators of :mod:`spindeco.wigner` and each bath block has i.i.d. complex
entries with E|W(l,m)_ab|^2 = Delta(l), subject to Hermiticity
W(l,-m)_ba = (-1)^m conj(W(l,m)_ab).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .coupling import derive
from .io import thread_count
from .kernel import m_kernel
from .wigner import spin_operators, tensor_operator, to_harmonics

__all__ = [
    "DimensionError",
    "HamiltonianSample",
    "KernelEstimate",
    "bootstrap_sigma",
    "commutator_norm_check",
    "empirical_kernel",
    "evolve_exact",
    "sample_hamiltonian",
    "semicircle_cdf",
    "validate",
]

DIM_CAP = 4096


class DimensionError(ValueError):
    """(2j+1) N exceeds the configured cap."""


@dataclass
class HamiltonianSample:
    two_j: int
    N: int
    H: np.ndarray
    bath_h: np.ndarray            # the l = 0 bath block W(0,0)/sqrt(2j+1)
    seed: int | None = None
    _eig: tuple | None = None

    @property
    def dim(self):
        return (self.two_j + 1) * self.N

    def eigh(self):
        if self._eig is None:
            self._eig = np.linalg.eigh(self.H)
        return self._eig

    def spectrum(self):
        return self.eigh()[0]

    def interaction(self):
        """H minus its l = 0 part."""
        return self.H - np.kron(np.eye(self.two_j + 1), self.bath_h)


def _gue(rng, n, var):
    g = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) * math.sqrt(var / 2)
    return (g + g.conj().T) / math.sqrt(2)


def sample_hamiltonian(spec, N, seed, dim_cap=DIM_CAP):
    d = spec.dim
    if d * N > dim_cap:
        raise DimensionError(f"(2j+1) N = {d * N} exceeds cap {dim_cap}")
    rng = np.random.default_rng(seed)
    delta = spec.delta(N)
    H = np.zeros((d * N, d * N), complex)
    bath_h = np.zeros((N, N), complex)
    for l in range(spec.two_j + 1):
        if delta[l] == 0:
            continue
        w0 = _gue(rng, N, delta[l])
        H += np.kron(tensor_operator(spec.two_j, l, 0), w0)
        if l == 0:
            bath_h = w0 / math.sqrt(d)
        for m in range(1, l + 1):
            g = (rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))) * math.sqrt(delta[l] / 2)
            H += np.kron(tensor_operator(spec.two_j, l, m), g)
            H += np.kron(tensor_operator(spec.two_j, l, -m), (-1) ** m * g.conj().T)
    H = (H + H.conj().T) / 2
    return HamiltonianSample(spec.two_j, N, H, bath_h, seed)


def evolve_exact(rho_s, sample, times, env_init="maximally_mixed"):
    """Reduced spin density matrices at ``times`` (array of shape (T, d, d)).

    ``env_init`` is ``"maximally_mixed"`` or an integer index of an
    eigenstate of the bath Hamiltonian (ascending energy).  Works in the
    eigenbasis of H, so each time costs O(d^2 D^2) rather than O(D^3).
    """
    d, N = sample.two_j + 1, sample.N
    lam, vec = sample.eigh()
    rho_s = np.asarray(rho_s, dtype=complex)
    blocks = vec.reshape(d, N, -1)                 # V_r = rows of spin state r
    if env_init == "maximally_mixed":
        x = sum(rho_s[s, t] * blocks[s].conj().T @ blocks[t]
                for s in range(d) for t in range(d) if rho_s[s, t] != 0) / N
    else:
        _, bvec = np.linalg.eigh(sample.bath_h)
        e = bvec[:, int(env_init)]
        proj = blocks.conj().transpose(0, 2, 1) @ e      # (d, D): V_s^dagger e
        x = np.einsum("st,sa,tb->ab", rho_s, proj, proj.conj())
    # rho(t)_{ru} = sum_ab (V_r^T conj V_u)_{ab} X_{ab} e^{-i(lam_a - lam_b) t}
    kernels = np.empty((d, d) + x.shape, complex)
    for r in range(d):
        for u in range(d):
            kernels[r, u] = (blocks[r].T @ blocks[u].conj()) * x
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.empty((len(times), d, d), complex)
    for i, t in enumerate(times):
        ph = np.exp(-1j * lam * t)
        out[i] = np.einsum("ruab,a,b->ru", kernels, ph, ph.conj())
    return out


def bootstrap_sigma(values, n_resamples=1000, seed=0):
    """Bootstrap standard error of the mean along axis 0."""
    values = np.asarray(values)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(values), size=(n_resamples, len(values)))
    means = values[idx].mean(axis=1)
    return means.std(axis=0, ddof=1)


@dataclass
class KernelEstimate:
    times: np.ndarray
    l: int
    m: int
    empirical: np.ndarray
    sigma: np.ndarray
    planar: np.ndarray

    def deviation(self):
        return np.abs(self.empirical - self.planar)

    def passes(self, n_sigma=3.0, floor=0.02):
        tol = np.maximum(n_sigma * self.sigma, floor)
        return bool(np.all(self.deviation() <= tol))


def _sample_ratios(args):
    spec, N, seed, rho0, times, modes, w0 = args
    sample = sample_hamiltonian(spec, N, seed)
    rhos = evolve_exact(rho0, sample, times)
    vals = np.empty((len(modes), len(times)))
    for k, rho in enumerate(rhos):
        w = to_harmonics(rho)
        for i, (l, m) in enumerate(modes):
            vals[i, k] = (w[l, m] / w0[l, m]).real
    return vals


def empirical_kernel(spec, N, n_samples, seed, rho0, times, modes, bootstrap=1000):
    """Ensemble-averaged multipole ratios W(l,m)(t)/W(l,m)(0).

    Samples are drawn from independent child seeds and reduced in a fixed
    order, so results do not depend on the thread count.
    """
    times = np.asarray(times, dtype=float)
    w0 = to_harmonics(rho0)
    for l, m in modes:
        if abs(w0[l, m]) < 1e-8:
            raise ValueError(f"initial state has no ({l}, {m}) component")
    children = np.random.SeedSequence(seed).spawn(n_samples)
    jobs = [(spec, N, c, rho0, times, modes, w0) for c in children]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        per_sample = np.array(list(pool.map(_sample_ratios, jobs)))
    derived = derive(spec)
    tau0 = derived.timescales.tau0
    out = []
    for i, (l, m) in enumerate(modes):
        vals = per_sample[:, i, :]
        planar = np.array([m_kernel(t / tau0, float(derived.z[l])) for t in times])
        out.append(KernelEstimate(times, l, m, vals.mean(axis=0),
                                  bootstrap_sigma(vals, bootstrap, seed), planar))
    return out


def semicircle_cdf(x, radius):
    x = np.clip(np.asarray(x, dtype=float) / radius, -1, 1)
    return 0.5 + (x * np.sqrt(1 - x * x) + np.arcsin(x)) / np.pi


def commutator_norm_check(spec, N, n_samples, seed):
    """Monte Carlo ||[S, H']||^2 / (||S||^2 ||H'||^2) with normalized traces.

    Returns ``(mc_value, expected)``; ``expected`` is
    D0 / (j (j+1) (1 - Z_av)).  Both are ``None`` when H' vanishes.
    """
    derived = derive(spec)
    if derived.z_av >= 1:
        return None, None
    j = spec.j
    s_ops = spin_operators(spec.two_j)
    eye = np.eye(N)
    num = den = 0.0
    for child in np.random.SeedSequence(seed).spawn(n_samples):
        hp = sample_hamiltonian(spec, N, child).interaction()
        dim = hp.shape[0]
        for s in s_ops:
            big = np.kron(s, eye)
            c = big @ hp - hp @ big
            num += np.sum(np.abs(c) ** 2) / dim
        den += np.sum(np.abs(hp) ** 2) / dim
    mc = num / (j * (j + 1) * den)
    expected = derived.d0 / (j * (j + 1) * (1 - derived.z_av))
    return mc, expected


def validate(spec, N, n_samples, seed, times, rho0=None, modes=None):
    """Compare empirical kernels against the planar prediction."""
    if rho0 is None:
        from .states import coherent
        rho0 = coherent(spec.two_j, 1.0, 0.5).density_matrix()
    if modes is None:
        modes = [(l, m) for l in range(1, spec.two_j + 1) for m in range(-l, l + 1)]
    return empirical_kernel(spec, N, n_samples, seed, rho0, times, modes)
