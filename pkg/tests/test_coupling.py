import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy.special import eval_legendre, hyp2f1

from spindeco.coupling import (CouplingSpec, SpecError, appendix_families, d0, derive,
                               f_poly, hat_delta, timescales, y_scaling, z_of_l)


def single(two_j, l, value=1.0, **kw):
    return CouplingSpec.from_mapping(two_j, {l: value}, **kw)


def test_spin_half_single_channel():
    spec = single(1, 1)
    hd6 = hat_delta(spec, "6j")
    hdr = hat_delta(spec, "racah")
    assert hd6[0] == pytest.approx(spec.delta_tilde()[1] * 3 / 2)
    assert_allclose(hd6, hdr, rtol=1e-12)
    assert z_of_l(spec)[1] == pytest.approx(-1 / 3)


@pytest.mark.parametrize("two_j", [3, 8, 15, 24])
def test_racah_and_sixj_routes_agree(two_j):
    vals = np.random.default_rng(two_j).random(two_j + 1)
    spec = CouplingSpec(two_j, tuple(vals))
    h6 = hat_delta(spec, "6j")
    assert_allclose(hat_delta(spec, "racah"), h6, atol=1e-11 * h6[0])


@pytest.mark.parametrize("two_j", [2, 9, 40, 201])
def test_l1_only_closed_form(two_j):
    j = two_j / 2
    l = np.arange(two_j + 1)
    assert_allclose(z_of_l(single(two_j, 1)), 1 - l * (l + 1) / (2 * j * (j + 1)), atol=1e-13)
    assert d0(single(two_j, 1)) == 2.0


@pytest.mark.parametrize("two_j", [2, 5, 10])
def test_equal_variances_give_gue(two_j):
    spec = CouplingSpec(two_j, (1.0,) * (two_j + 1))
    z = z_of_l(spec, "6j")
    assert z[0] == 1.0
    assert_allclose(z[1:], 0, atol=1e-12)
    assert hat_delta(spec)[0] == pytest.approx((two_j + 1) ** 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2 ** 32 - 1))
def test_z_invariants(two_j, seed):
    rng = np.random.default_rng(seed)
    vals = rng.random(two_j + 1) * (rng.random(two_j + 1) < 0.6)
    vals[rng.integers(two_j + 1)] = 1.0
    spec = CouplingSpec(two_j, tuple(vals))
    d = derive(spec)
    assert d.z[0] == 1.0
    assert np.all(np.abs(d.z[1:]) <= 1 + 1e-12)
    assert d.z_av == pytest.approx(spec.delta_bar[0] / d.hat_delta[0])
    # Z_av is the (2l+1)-weighted mean of Z(l)
    l = np.arange(two_j + 1)
    assert np.sum((2 * l + 1) * d.z) / (two_j + 1) ** 2 == pytest.approx(d.z_av, abs=1e-10)
    ts = d.timescales
    assert ts.tau0 <= ts.tau1
    assert d.interaction_norm() ** 2 / d.hamiltonian_norm() ** 2 == pytest.approx(1 - d.z_av, abs=1e-12)


def test_strict_bound_away_from_pure_parity():
    spec = CouplingSpec.from_mapping(80, {0: 1, 1: 1, 2: 1, 3: 1})
    z = z_of_l(spec)
    assert np.all(np.abs(z[1:]) < 1)


def test_parity_families_approach_plus_minus_one():
    prev_even, prev_odd = 0.0, 0.0
    for two_j in (50, 200, 800):
        even = z_of_l(CouplingSpec.from_mapping(two_j, {2: 1.0, 4: 0.5}))[-1]
        odd = z_of_l(CouplingSpec.from_mapping(two_j, {1: 1.0, 3: 0.5}))[-1]
        assert even > prev_even and odd < prev_odd
        prev_even, prev_odd = even, odd
    assert prev_even > 0.98 and prev_odd < -0.98


def test_f_poly_is_legendre():
    x = np.linspace(0, 1, 11)
    for lp in range(8):
        assert_allclose(f_poly(lp, x), eval_legendre(lp, 1 - 2 * x ** 2), atol=1e-12)
        assert_allclose(f_poly(lp, x), hyp2f1(1 + lp, -lp, 1, x ** 2), atol=1e-12)


def test_scaling_limit_convergence():
    errs = []
    for two_j in (100, 400, 800):
        spec = CouplingSpec.from_mapping(two_j, {0: 1, 1: 1, 2: 1, 3: 1})
        l = np.arange(two_j + 1)
        errs.append(np.abs(z_of_l(spec) - y_scaling(spec, l / two_j)).max())
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] <= 0.01


def test_small_l_expansion():
    spec = CouplingSpec.from_mapping(80, {0: 1, 1: 1, 2: 1, 3: 1})
    z = z_of_l(spec)
    j = 40
    l = np.arange(5)
    approx = 1 - l * (l + 1) * d0(spec) / (4 * j * (j + 1))
    assert_allclose(1 - z[1:5], 1 - approx[1:5], rtol=0.01)


def test_d0_examples():
    assert d0(single(6, 1)) == 2.0
    dominant = CouplingSpec.from_mapping(6, {0: 100.0, 1: 1.0})
    assert d0(dominant) < 0.1
    for l0 in (20, 40, 80):
        spec = CouplingSpec(400, tuple(1.0 if l <= l0 else 0.0 for l in range(401)))
        assert d0(spec) / (l0 ** 2 / 2) == pytest.approx(1, abs=2.5 / l0)


def test_worked_timescales():
    ts = timescales(single(40, 1)).in_tau0()
    assert (ts.tau0, ts.tau1, ts.tau2) == (1.0, 1.0, 10.0)
    assert ts.tau3 == 200.0


def test_no_interaction_means_infinite_tau1():
    ts = timescales(CouplingSpec.from_mapping(4, {0: 1.0}))
    assert math.isinf(ts.tau1)
    assert math.isinf(ts.tau2)


def test_rescalings_and_raw_variances():
    spec = CouplingSpec.from_mapping(4, {1: 2.0}, N=10)
    assert spec.delta_tilde()[1] == pytest.approx(5 * 2.0)
    assert spec.delta()[1] == pytest.approx(5 * 2.0 / 10)
    with pytest.raises(SpecError):
        single(4, 1).delta()


def test_json_round_trip_and_validation():
    spec = CouplingSpec.from_mapping(6, {0: 0.5, 3: 2.0}, N=32)
    again = CouplingSpec.from_json(spec.to_json())
    assert again == spec
    bad = [
        ('{"delta_bar": {"1": 1}}', "two_j"),
        ('{"two_j": 2.5, "delta_bar": {"1": 1}}', "two_j"),
        ('{"two_j": -1, "delta_bar": {"0": 1}}', "two_j"),
        ('{"two_j": 4, "delta_bar": {"9": 1}}', "delta_bar[9]"),
        ('{"two_j": 4, "delta_bar": {"1": -1}}', "delta_bar[1]"),
        ('{"two_j": 4, "delta_bar": {"1": 0}}', "delta_bar"),
        ('{"two_j": 4, "delta_bar": {"x": 1}}', "delta_bar['x']"),
        ('{"two_j": 4, "delta_bar": {"1": 1}, "N": 0}', "N"),
    ]
    for text, field in bad:
        with pytest.raises(SpecError) as info:
            CouplingSpec.from_json(text)
        assert info.value.field == field


def test_appendix_families():
    fams = appendix_families(80, l0=3)
    assert len(fams) == 7
    for name, spec in fams.items():
        z = z_of_l(spec)
        assert z[0] == 1.0
        assert np.all(np.abs(z) <= 1 + 1e-12)
    assert z_of_l(fams["all-odd"])[-1] < 0
    assert z_of_l(fams["single-odd"])[-1] < 0
    assert z_of_l(fams["all-even"])[-1] > 0
    # a large l=0 entry pulls the whole curve towards 1
    assert np.all(z_of_l(fams["large-l0"]) >= z_of_l(fams["equal"]) - 1e-12)
