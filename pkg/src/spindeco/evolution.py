"""Time evolution of the reduced spin state in multipole space.

Each rank l of the initial multipole spectrum is multiplied by the kernel
factor M(t, Z(l)); rank 0 is untouched, so the trace is conserved.
"""
import math
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_legendre

from .io import manifest_hash, write_json
from .kernel import kernel_table, m_hat
from .wigner import (PhaseSpaceField, default_grid, field, from_harmonics,
                     spin_operators, to_harmonics)

__all__ = [
    "diffusion_profile_quantum",
    "entropy",
    "evolve",
    "frames",
    "gaussian_matched",
    "kurtosis_quantum",
    "magnetization",
    "profile_moment",
    "purity",
    "second_moment_quantum",
    "w_quantum",
    "width",
]


def evolve(spectrum, derived, t, absolute_time=False, method="auto"):
    """Multipoles at time t."""
    if derived.spec.two_j != spectrum.two_j:
        raise ValueError("spin of state and coupling differ")
    table = kernel_table(derived, [t], absolute_time, method)
    return spectrum.scaled(table.factors(0))


def purity(spectrum):
    """tr(rho^2), from Parseval."""
    return spectrum.norm2()


def entropy(spectrum):
    """von Neumann entropy in nats."""
    rho = from_harmonics(spectrum)
    ev = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    ev = ev[ev > 1e-15]
    return float(-np.sum(ev * np.log(ev)))


def frames(spectrum, derived, times, grid, kind="husimi", out_dir=None,
           absolute_time=False, normalized=True, method="auto"):
    """Phase-space fields of the evolving state at ``times``.

    With ``out_dir`` each frame is written as numbered CSV + sidecar and a
    manifest.json is added; the list of fields is returned either way.
    """
    table = kernel_table(derived, times, absolute_time, method)
    out = []
    for i, t in enumerate(table.times):
        spec_t = spectrum.scaled(table.factors(i))
        vals = field(spec_t, grid, kind, normalized).real
        out.append(PhaseSpaceField(grid, vals, kind, spectrum.two_j, float(t), normalized))
    if out_dir is not None:
        out_dir = Path(out_dir)
        manifest = {"two_j": spectrum.two_j, "kind": kind,
                    "times": [float(t) for t in table.times],
                    "coupling": derived.spec.to_json(), "grid": grid.meta}
        h = manifest_hash(manifest)
        names = []
        for i, fr in enumerate(out):
            fr.meta["manifest_hash"] = h
            name = f"frame_{i:04d}.csv"
            fr.to_csv(out_dir / name)
            names.append(name)
        write_json(out_dir / "manifest.json", {**manifest, "files": names, "hash": h})
    return out


def _w_quantum_unit(r, n=200):
    x, w = roots_legendre(n)
    th = x * np.pi / 2
    w = w * np.pi / 2
    c = np.cos(th)
    r = np.asarray(r, dtype=float)
    expo = -(r[..., None] ** 2) * (3 * np.pi / 16) / c
    return 3 / (8 * np.pi) * np.sum(w * c * np.exp(expo), axis=-1)


def w_quantum(r):
    """Self-similar quantum diffusion profile at t' = 1 as a function of |z|."""
    vals = _w_quantum_unit(r)
    return vals if vals.ndim else float(vals)


def diffusion_profile_quantum(z_abs, tp):
    """W(z, t') = W_1(|z| / sqrt(t')) / t'."""
    z_abs = np.asarray(z_abs, dtype=float)
    vals = _w_quantum_unit(z_abs / math.sqrt(tp)) / tp
    return vals if vals.ndim else float(vals)


def second_moment_quantum():
    """<|z|^2> of the t' = 1 profile, 128/(9 pi^2)."""
    return 128 / (9 * math.pi ** 2)


def kurtosis_quantum():
    """<|z|^4>/<|z|^2>^2 of the quantum profile; a planar Gaussian gives 2."""
    return 27 * math.pi ** 2 / 128


def gaussian_matched(r):
    """Planar Gaussian with the same <|z|^2> as :func:`w_quantum`."""
    s = second_moment_quantum() / 2
    return np.exp(-np.asarray(r) ** 2 / (2 * s)) / (2 * math.pi * s)


def profile_moment(profile, power, r_max=40.0):
    """2 pi int_0^inf r^(1+power) profile(r) dr."""
    val, _ = quad(lambda r: 2 * math.pi * r ** (1 + power) * profile(r), 0, r_max, limit=200)
    return val


def width(spectrum, grid=None):
    """Angular rms spread of the Husimi distribution about its mean direction."""
    grid = grid or default_grid(spectrum.two_j)
    q = field(spectrum, grid, "husimi", True).real
    q = np.clip(q, 0, None) * grid.weights
    n = grid.unit_vectors()
    centre = q @ n
    centre /= np.linalg.norm(centre)
    ang = np.arccos(np.clip(n @ centre, -1, 1))
    return float(math.sqrt(np.sum(q * ang ** 2) / np.sum(q)))


def magnetization(rho0, derived, times, absolute_time=False, method="auto"):
    """<S_z>(t) = M(t, Z(1)) <S_z>(0)."""
    rho0 = np.asarray(rho0)
    sz = spin_operators(derived.spec.two_j)[2]
    s0 = float(np.trace(rho0 @ sz).real)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return np.array([m_hat(derived, 1, t, absolute_time, method) * s0 for t in times])
