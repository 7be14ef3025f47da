"""How the coupling spectrum controls decoherence of each multipole rank.

Run with ``python demos/kernel_tour.py``.
"""
import numpy as np

from spindeco import CouplingSpec, derive
from spindeco.coupling import appendix_families
from spindeco.kernel import m_kernel, psi

# A spin j = 40 coupled through ranks l <= 3 with equal strength.
spec = CouplingSpec.from_mapping(80, {0: 1.0, 1: 1.0, 2: 1.0, 3: 1.0})
d = derive(spec)
print("Z(l) for the first ranks:", np.round(d.z[:6], 5))
print("time scales in units of tau0:", d.timescales.in_tau0().as_dict())

# Low ranks have Z close to 1 and decohere slowly; high ranks decay on tau0.
for l in (1, 5, 20, 80):
    z = float(d.z[l])
    row = [m_kernel(t, z) for t in (0.5, 2.0, 8.0)]
    print(f"l={l:2d}  Z={z:+.4f}  M(t)=", np.round(row, 4))

# Near z = 1 the kernel collapses onto a single curve of t (1 - z).
for z in (0.99, 0.999):
    xs = np.linspace(0.2, 5, 25)
    gap = max(abs(m_kernel(x / (1 - z), z) - psi(x)) for x in xs)
    print(f"z={z}: largest gap to the scaling curve {gap:.4f}")

# Parity of the couplings decides the sign of Z at the top rank.
for name, fam in appendix_families(80).items():
    print(f"{name:>10}: Z(2j) = {derive(fam).z[-1]:+.3f}")
