"""Brute-force check of the planar kernel with finite random matrices.

A spin 1/2 is coupled to an N-level bath through rank-1 terms only.  The
ensemble average of its Bloch vector decays like M(t/tau0, Z(1)).

Run with ``python demos/random_matrix_check.py``.
"""
import numpy as np

from spindeco import CouplingSpec, derive
from spindeco.montecarlo import commutator_norm_check, validate

spec = CouplingSpec.from_mapping(1, {1: 1.0})
tau0 = derive(spec).timescales.tau0
times = np.linspace(0, 5, 11) * tau0
est = validate(spec, N=128, n_samples=60, seed=7, times=times)

print(" t/tau0   sampled   planar   sigma")
e = est[1]
for t, emp, ref, sig in zip(times / tau0, e.empirical, e.planar, e.sigma):
    print(f"{t:6.1f}  {emp:8.4f} {ref:8.4f}  {sig:.4f}")
print("all channels within tolerance:", all(x.passes() for x in est))

mc, expected = commutator_norm_check(CouplingSpec.from_mapping(2, {1: 1.0}), 64, 4, 0)
print(f"commutator norm ratio: sampled {mc:.4f}, expected {expected:.4f}")
