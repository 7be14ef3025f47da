"""Interference fringes of a two-component cat state vanish long before the
components themselves blur.  Frames are written as CSV for plotting.

Run with ``python demos/cat_state_movie.py [out_dir]``.
"""
import math
import sys

import numpy as np

from spindeco import CouplingSpec, derive
from spindeco.evolution import evolve, frames, width
from spindeco.states import cat2, coherent
from spindeco.wigner import SphereGrid, field, gauss_grid, stereographic_grid, to_harmonics

two_j = 40
d = derive(CouplingSpec.from_mapping(two_j, {1: 1.0}))
ts = d.timescales
left, right = (math.pi / 2, 0.0), (math.pi / 2, math.pi)
state = cat2(two_j, left, right)

# Split the state into the two blobs and the interference term between them.
a, b = coherent(two_j, *left).amplitudes, coherent(two_j, *right).amplitudes
blobs = 0.5 * (np.outer(a, a.conj()) + np.outer(b, b.conj()))
fringes = to_harmonics(state.density_matrix() - blobs)
whole = state.harmonics()
sphere = gauss_grid(60, 120)
centres = SphereGrid(np.array([left[0], right[0]]), np.array([left[1], right[1]]))
f0 = np.abs(field(fringes, sphere, "wigner", True)).max()
p0 = field(whole, centres, "wigner", True).real

print(" t/tau1   fringes   peak height")
for k in (0.0, 0.5, 1.0, 2.0, 3.0):
    t = k * ts.tau1
    f = np.abs(field(evolve(fringes, d, t, absolute_time=True), sphere, "wigner", True)).max()
    p = field(evolve(whole, d, t, absolute_time=True), centres, "wigner", True).real
    print(f"{k:6.1f}   {f / f0:7.4f}   {np.min(p / p0):7.3f}")

# A lone coherent state spreads diffusively once t exceeds tau2.
coh = coherent(two_j, 0.0, 0.0).harmonics()
w0 = width(coh)
for t in np.geomspace(ts.tau2, ts.tau3, 5):
    w = width(evolve(coh, d, t, absolute_time=True))
    print(f"t/tau2={t / ts.tau2:7.2f}  width={w:.4f}  excess={math.sqrt(max(w * w - w0 * w0, 0)):.4f}")

if len(sys.argv) > 1:
    times = np.linspace(0, 3 * ts.tau1, 7)
    frames(whole, d, times, stereographic_grid(121, 4.0), kind="wigner",
           out_dir=sys.argv[1], absolute_time=True)
    print("frames written to", sys.argv[1])
