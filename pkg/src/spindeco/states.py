"""Spin-j pure states: coherent states, cat superpositions, random states."""
from dataclasses import dataclass
import json

import numpy as np
from scipy.special import gammaln

from .wigner import to_harmonics

__all__ = ["SpinState", "cat2", "cat3", "coherent", "random_state", "superposition"]


@dataclass
class SpinState:
    """Normalized amplitudes over m = -j..j."""

    two_j: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.two_j + 1,):
            raise ValueError("amplitude vector has the wrong length")

    def density_matrix(self):
        a = self.amplitudes
        return np.outer(a, a.conj())

    def harmonics(self):
        return to_harmonics(self.density_matrix())

    def to_json(self):
        return json.dumps({"two_j": self.two_j,
                           "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes]})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(int(data["two_j"]), amps)


def _check_angles(theta, phi):
    if not (np.isfinite(theta) and np.isfinite(phi)):
        raise ValueError("angles must be finite")
    if not 0 <= theta <= np.pi:
        raise ValueError(f"theta={theta} outside [0, pi]")


def coherent(two_j, theta, phi):
    """Spin coherent state |n> with <n|S|n> = j n."""
    _check_angles(theta, phi)
    k = np.arange(two_j + 1)               # k = j + m
    m = k - two_j / 2
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    logbin = 0.5 * (gammaln(two_j + 1) - gammaln(k + 1) - gammaln(two_j - k + 1))
    if c == 0 or s == 0:
        mag = (k == (two_j if s == 0 else 0)).astype(float)
    else:
        mag = np.exp(logbin + k * np.log(abs(c)) + (two_j - k) * np.log(abs(s)))
    sign = np.sign(c) ** k * np.sign(s) ** (two_j - k)
    sign[mag == 0] = 1
    return SpinState(two_j, mag * sign * np.exp(-1j * m * phi))


def superposition(two_j, directions, coeffs):
    """Normalized sum of coherent states at ``directions = [(theta, phi), ...]``."""
    if len(directions) != len(coeffs):
        raise ValueError("need one coefficient per direction")
    vec = sum(c * coherent(two_j, th, ph).amplitudes for (th, ph), c in zip(directions, coeffs))
    norm = np.linalg.norm(vec)
    if norm < 1e-14:
        raise ValueError("superposition has zero norm")
    return SpinState(two_j, vec / norm)


def cat2(two_j, n1, n2, c1=1.0, c2=1.0):
    return superposition(two_j, [n1, n2], [c1, c2])


def cat3(two_j, n1, n2, n3, c=(1.0, 1.0, 1.0)):
    return superposition(two_j, [n1, n2, n3], list(c))


def random_state(two_j, seed):
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=two_j + 1) + 1j * rng.normal(size=two_j + 1)
    return SpinState(two_j, vec / np.linalg.norm(vec))
