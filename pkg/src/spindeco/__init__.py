"""Decoherence of a large spin coupled to a random-matrix environment."""

__version__ = "0.1.0"

from .coupling import CouplingSpec, derive, z_of_l
from .kernel import m_kernel, psi, phi
from .states import coherent, cat2, cat3, random_state
from .wigner import HarmonicSpectrum, from_harmonics, to_harmonics

__all__ = [
    "CouplingSpec",
    "HarmonicSpectrum",
    "cat2",
    "cat3",
    "coherent",
    "derive",
    "from_harmonics",
    "m_kernel",
    "phi",
    "psi",
    "random_state",
    "to_harmonics",
    "z_of_l",
]
