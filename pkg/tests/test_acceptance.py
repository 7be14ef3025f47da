"""Acceptance criteria, one check per criterion.

Each check returns ``(passed, detail)``; the wall time is compared against the
criterion's budget.  Run with pytest (a summary of PASS/FAIL lines is printed
at the end of the session) or directly with ``python tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from spindeco.coupling import CouplingSpec, d0, derive, y_scaling, z_of_l
from spindeco.evolution import evolve, gaussian_matched, magnetization, profile_moment, w_quantum, width
from spindeco.external import (algebraic_tail, m_external, m_scaling, n_bessel,
                               randomized_profile)
from spindeco.kernel import m_kernel, psi
from spindeco.montecarlo import sample_hamiltonian, semicircle_cdf, validate
from spindeco.states import cat2, coherent
from spindeco.wigner import SphereGrid, field, gauss_grid, to_harmonics

RESULTS = []


def kernel_small_t():
    t = 0.1
    errs = [abs(m_kernel(t, z) - (1 + t * t * (z - 1))) for z in (-0.5, 0.0, 0.5)]
    return max(errs) <= 5e-3, f"max error {max(errs):.2e} (tol 5e-3)"


def kernel_large_t():
    z = 0.5
    t = np.linspace(20, 40, 4001)
    m = np.array([m_kernel(x, z) for x in t])
    edges = np.arange(20, 40 + 1e-9, math.pi / 2)
    tops, vals = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (t >= a) & (t < b)
        i = np.argmax(np.abs(m[sel]))
        tops.append(t[sel][i])
        vals.append(abs(m[sel][i]))
    slope = np.polyfit(np.log(tops), np.log(vals), 1)[0]
    design = np.column_stack([np.ones_like(t), -np.sin(4 * t)])
    a_fit = np.linalg.lstsq(design, t ** 3 * m, rcond=None)[0][0]
    a_ref = (1 + z) / (2 * math.pi * (1 - z) ** 3)
    ok = abs(slope + 3) <= 0.1 and abs(a_fit / a_ref - 1) <= 0.1
    return ok, f"envelope exponent {slope:.3f}, A fit {a_fit:.4f} vs {a_ref:.4f}"


def psi_collapse():
    x = np.linspace(0.2, 5, 97)
    errs = {z: max(abs(m_kernel(v / (1 - z), z) - psi(v)) for v in x) for z in (0.99, 0.995)}
    return max(errs.values()) <= 0.02, ", ".join(f"z={z}: {e:.4f}" for z, e in errs.items())


def z_structure():
    spec = CouplingSpec.from_mapping(80, {0: 1, 1: 1, 2: 1, 3: 1})
    z = z_of_l(spec)
    j = 40
    l = np.arange(1, 5)
    expansion = 1 - l * (l + 1) * d0(spec) / (4 * j * (j + 1))
    rel = np.max(np.abs((1 - z[l]) / (1 - expansion) - 1))
    big = CouplingSpec.from_mapping(800, {0: 1, 1: 1, 2: 1, 3: 1})
    lb = np.arange(801)
    sup = np.max(np.abs(z_of_l(big) - y_scaling(big, lb / 800)))
    ok = z[0] == 1.0 and np.all(np.abs(z[1:]) < 1) and rel <= 0.01 and sup <= 0.01
    return ok, f"Z(0)={z[0]}, max|Z(l>0)|={np.max(np.abs(z[1:])):.4f}, expansion rel err {rel:.2e}, j=400 sup {sup:.4f}"


def worked_timescales():
    ts = derive(CouplingSpec.from_mapping(40, {1: 1.0})).timescales.in_tau0()
    got = (float(ts.tau0), float(ts.tau1), float(ts.tau2))
    return got == (1.0, 1.0, 10.0), f"(tau0, tau1, tau2) = {got}"


def monte_carlo_oracle():
    spec = CouplingSpec.from_mapping(1, {1: 1.0})
    tau0 = derive(spec).timescales.tau0
    times = np.linspace(0, 5, 11) * tau0
    est = validate(spec, 256, 200, 1, times)
    worst = max(float(np.max(e.deviation() - np.maximum(3 * e.sigma, 0.02))) for e in est)
    ok = all(e.passes(3.0, 0.02) for e in est)
    sig = max(float(e.sigma.max()) for e in est)
    return ok, f"max excess over tolerance {worst:.4f} (<= 0 passes), bootstrap sigma <= {sig:.4f}"


def ensemble_spectrum():
    spec = CouplingSpec(2, (1.0, 1.0, 1.0))
    radius = 2 * math.sqrt(derive(spec).hat_delta[0])
    ev = np.sort(np.concatenate([sample_hamiltonian(spec, 200, s).spectrum() for s in range(50)]))
    cdf = np.arange(1, ev.size + 1) / ev.size
    dev = max(np.max(np.abs(cdf - semicircle_cdf(ev, radius))),
              np.max(np.abs(cdf - 1 / ev.size - semicircle_cdf(ev, radius))))
    return dev <= 0.03, f"CDF sup deviation {dev:.4f} (tol 0.03)"


def diffusion_profile():
    norm = profile_moment(w_quantum, 0)
    r = np.linspace(0, 4, 401)
    wq = w_quantum(r)
    rel_dev = np.max(np.abs(wq - gaussian_matched(r)) / wq)
    tp = 1.0
    rand = randomized_profile(r, 1.0, 4 * tp / (3 * math.pi))
    rand_err = np.max(np.abs(rand - wq))
    ok = abs(norm - 1) <= 1e-6 and rel_dev > 0.01 and rand_err <= 1e-4
    return ok, f"norm-1 {norm - 1:.1e}, max Gaussian deviation {rel_dev:.3f}, randomized error {rand_err:.1e}"


def degeneracy_chain():
    t = np.linspace(0, 10, 41)
    e1 = max(abs(m_external(x, 0.0, z, 0.0) - m_kernel(x, z, "bessel"))
             for x in t for z in (-0.5, 0.3, 0.8))
    e2 = max(abs(m_external(x, 0.0, z, z) - n_bessel(x, z) ** 2) for x in t for z in (0.1, 0.5, 0.8))
    return max(e1, e2) <= 1e-6, f"M(t,0,Z,0) error {e1:.1e}, |N|^2 error {e2:.1e}"


def fast_bath_regime():
    za = 0.999
    tp = np.linspace(1, 5, 17)
    slope = np.polyfit(tp, np.log([m_scaling(x, 0.0, za) for x in tp]), 1)[0]
    log_scale = math.log(1 / (1 - za))
    # crossover: where the exponential part has fallen to the size of the t'^-3 part
    cross = brentq(lambda x: math.log(m_scaling(x, 0.0, za) / (2 * algebraic_tail(x, 0.0, za))), 2, 30)
    late = [m_scaling(x, 0.0, za) / algebraic_tail(x, 0.0, za) for x in (2 * log_scale, 3 * log_scale)]
    ok = abs(slope / -2 - 1) <= 0.05 and abs(cross / log_scale - 1) <= 0.25 \
        and all(abs(v - 1) <= 0.05 for v in late)
    return ok, (f"slope {slope:.3f}, crossover t'={cross:.2f} vs log(1/(1-Z_av))={log_scale:.2f}, "
                f"M/tail beyond {late[0]:.3f}, {late[1]:.3f}")


def magnetization_decay():
    two_j = 200
    d = derive(CouplingSpec.from_mapping(two_j, {1: 1.0}))
    tau_equ = d.timescales.tau3
    rho = coherent(two_j, 0.0, 0.0).density_matrix()
    t = np.linspace(0, 5 * tau_equ, 201)
    ratio = magnetization(rho, d, t, absolute_time=True) / (two_j / 2)
    target = psi(8 * t / (3 * math.pi * tau_equ))
    err = np.max(np.abs(ratio - target))
    tail_t = np.geomspace(40 * tau_equ, 200 * tau_equ, 12)
    tail = magnetization(rho, d, tail_t, absolute_time=True)
    slope = np.polyfit(np.log(tail_t), np.log(tail), 1)[0]
    ok = err <= 0.02 and abs(slope + 3) <= 0.1
    return ok, f"max |ratio - Psi| {err:.4f} (tol 0.02), tail exponent {slope:.3f}"


def movie_criteria():
    two_j = 40
    d = derive(CouplingSpec.from_mapping(two_j, {1: 1.0}))
    ts = d.timescales
    n1, n2 = (math.pi / 2, 0.0), (math.pi / 2, math.pi)
    a, b = coherent(two_j, *n1).amplitudes, coherent(two_j, *n2).amplitudes
    rho = cat2(two_j, n1, n2).density_matrix()
    mixture = 0.5 * (np.outer(a, a.conj()) + np.outer(b, b.conj()))
    fringes = to_harmonics(rho - mixture)
    whole = to_harmonics(rho)
    grid = gauss_grid(60, 120)
    peaks = SphereGrid(np.array([n1[0], n2[0]]), np.array([n1[1], n2[1]]))
    t = 3 * ts.tau1
    f0 = np.max(np.abs(field(fringes, grid, "wigner", True)))
    f1 = np.max(np.abs(field(evolve(fringes, d, t, absolute_time=True), grid, "wigner", True)))
    p0 = field(whole, peaks, "wigner", True).real
    p1 = field(evolve(whole, d, t, absolute_time=True), peaks, "wigner", True).real
    fringe_ratio, peak_ratio = f1 / f0, float(np.min(p1 / p0))
    coh = coherent(two_j, 0.0, 0.0).harmonics()
    w0 = width(coh)
    times = np.geomspace(2 * ts.tau2, ts.tau3 / 3, 8)
    widths = np.array([width(evolve(coh, d, x, absolute_time=True)) for x in times])
    excess = np.sqrt(widths ** 2 - w0 ** 2)
    exponent = np.polyfit(np.log(times), np.log(excess), 1)[0]
    ok = fringe_ratio < 0.1 and peak_ratio > 0.7 and abs(exponent - 0.5) <= 0.05
    return ok, (f"fringes {fringe_ratio:.4f} of initial, peaks {peak_ratio:.3f}, "
                f"width exponent {exponent:.3f}")


CRITERIA = [
    (1, "kernel small-t law", kernel_small_t, 1),
    (2, "kernel large-t law", kernel_large_t, 10),
    (3, "Psi scaling collapse", psi_collapse, 30),
    (4, "Z(l) structure", z_structure, 60),
    (5, "worked timescales", worked_timescales, None),
    (6, "Monte Carlo oracle", monte_carlo_oracle, 600),
    (7, "ensemble spectrum", ensemble_spectrum, 120),
    (8, "diffusion profile", diffusion_profile, 10),
    (9, "degeneracy chain", degeneracy_chain, 60),
    (10, "fast-bath exponential regime", fast_bath_regime, 30),
    (11, "magnetization", magnetization_decay, 10),
    (12, "movie criteria", movie_criteria, 300),
]


def evaluate(number, name, check, budget):
    start = time.perf_counter()
    ok, detail = check()
    elapsed = time.perf_counter() - start
    in_time = budget is None or elapsed <= budget
    limit = "" if budget is None else f" / {budget} s"
    line = (f"{'PASS' if ok and in_time else 'FAIL'} criterion {number:2d} {name}: "
            f"{detail}; {elapsed:.1f} s{limit}")
    return ok and in_time, line


@pytest.mark.parametrize("number,name,check,budget", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, name, check, budget):
    ok, line = evaluate(number, name, check, budget)
    RESULTS.append((number, line))
    print(line)
    assert ok, line


if __name__ == "__main__":
    for crit in CRITERIA:
        print(evaluate(*crit)[1], flush=True)
