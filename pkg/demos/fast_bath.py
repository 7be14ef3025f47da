"""A bath with its own dynamics turns quantum diffusion into Brownian motion
at fixed bath energy, and back into the quantum profile after averaging
over energies.

Run with ``python demos/fast_bath.py``.
"""
import math

import numpy as np

from spindeco import CouplingSpec
from spindeco.evolution import gaussian_matched, w_quantum
from spindeco.external import (algebraic_tail, diffusion_coefficient, m_scaling,
                               randomized_profile)

# Exponential decay at rate 2 first, then a slow t'^-3 tail.
z_av = 0.999
for tp in (1, 3, 5, 8, 12, 20):
    m = m_scaling(tp, 0.0, z_av)
    print(f"t'={tp:3d}  M={m:.3e}  exp(-2t')={math.exp(-2 * tp):.3e}  tail={algebraic_tail(tp, 0.0, z_av):.3e}")

# The diffusion constant vanishes at the band edges.
spec = CouplingSpec.from_mapping(20, {0: 1.0, 1: 1.0})
for e in (0.0, 1.0, 1.9, 2.0):
    print(f"E={e:.1f}  D={float(diffusion_coefficient(spec, e)):.5f}")

# Averaging Gaussians over the semicircle reproduces the non-Gaussian profile.
r = np.linspace(0, 3, 7)
mix = randomized_profile(r, 1.0, 4 / (3 * math.pi))
for x, q, g, m in zip(r, w_quantum(r), gaussian_matched(r), mix):
    print(f"r={x:.1f}  quantum={q:.5f}  mixture={m:.5f}  gaussian={g:.5f}")
