import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from porostab.baseflow import (LARGE_M, SMALL_M, BaseFlow, DimensionalParams, derive_flow_params,
                               eval_profile, profile_table, write_profile_csv)
from porostab.errors import DomainError, UsageError
from porostab.spectral import build_grid

import oracles


def dim(**kw):
    base = dict(density=1.0, viscosity=1.0, velocity=1.0, half_width=1.0, porosity=1.0,
                permeability=1.0)
    base.update(kw)
    return DimensionalParams(**base)


@pytest.mark.parametrize("kw, R, M", [
    ({}, 1.0, 1.0),
    ({"porosity": 0.5, "permeability": 0.125}, 1.0, 2.0),
    ({"density": 1000.0, "viscosity": 0.001, "velocity": 0.01, "half_width": 0.01}, 100.0, None),
])
def test_derive_flow_params(kw, R, M):
    fp = derive_flow_params(dim(**kw))
    assert fp.reynolds == pytest.approx(R, rel=1e-14)
    if M is not None:
        assert fp.M == pytest.approx(M, rel=1e-14)


def test_derive_flow_params_M_matches_definition():
    p = dim(porosity=0.3, permeability=2e-4, half_width=0.05)
    assert derive_flow_params(p).M ** 2 == pytest.approx(p.porosity * p.half_width**2 / p.permeability)
    assert p.darcy == pytest.approx(2e-4 / 0.05**2)


@pytest.mark.parametrize("field", ["density", "viscosity", "velocity", "half_width", "porosity",
                                   "permeability"])
def test_non_positive_input_names_field(field):
    with pytest.raises(DomainError, match=field):
        dim(**{field: 0.0})


def test_porosity_above_one_rejected():
    with pytest.raises(DomainError, match="porosity"):
        dim(porosity=1.2)


def test_small_M_recovers_poiseuille():
    U, _, _ = eval_profile(1e-12, 0.5)
    assert abs(U - 0.75) < 1e-9


@pytest.mark.parametrize("M", [0.0, 1e-9, 5e-5, 1e-4, 0.3, 2.0, 10.0, 49.9, 50.1, 500.0, 2000.0])
def test_normalization(M):
    assert eval_profile(M, 0.0)[0] == 1.0
    assert eval_profile(M, 1.0)[0] == 0.0
    assert eval_profile(M, -1.0)[0] == 0.0


def test_M2_against_extended_precision():
    # direct cosh ratio at 50 digits; frozen value cross-checked here
    expected = 0.8033880667585181
    assert oracles.profile_mp(2, 0.5) == pytest.approx(expected, abs=1e-16)
    assert eval_profile(2.0, 0.5)[0] == pytest.approx(expected, abs=2e-16)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_profile(1.0, 1.5)
    with pytest.raises(DomainError):
        eval_profile(-0.1, 0.0)
    with pytest.raises(DomainError):
        BaseFlow(-1.0)


def test_profile_table_rows():
    t = profile_table(1e-14, [-1.0, 0.0, 1.0])
    np.testing.assert_allclose(t[:, 1], [0.0, 1.0, 0.0], atol=1e-15)
    z = build_grid(9).z
    t = profile_table(5.0, z)
    U, dU, d2U = eval_profile(5.0, z)
    np.testing.assert_array_equal(t, np.column_stack([z, U, dU, d2U]))


def test_profile_table_M10_near_walls():
    z = np.array([0.999, -0.9999, 1 - 1e-7, -1.0, 1.0])
    t = profile_table(10.0, z)
    assert np.all(np.isfinite(t))
    assert np.all((t[:, 1] >= 0) & (t[:, 1] <= 1))
    ref = np.array([oracles.profile_mp(10, zz) for zz in z])
    np.testing.assert_allclose(t[:, 1], ref, rtol=1e-12, atol=1e-17)


def test_profile_table_empty():
    with pytest.raises(UsageError):
        profile_table(1.0, [])


def test_csv_export(tmp_path):
    table = profile_table(3.0, build_grid(9).z)
    path = write_profile_csv(table, tmp_path / "p.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "z,U,dU,d2U"
    assert len(lines) == 10
    back = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(back, table)  # 17 significant digits round-trip exactly


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 20), st.floats(-1, 1))
def test_symmetry(M, z):
    U1, d1, _ = eval_profile(M, z)
    U2, d2, _ = eval_profile(M, -z)
    assert abs(U1 - U2) < 1e-14
    assert abs(d1 + d2) < 1e-13


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 60), st.floats(-1, 1))
def test_bounds(M, z):
    U = eval_profile(M, z)[0]
    assert 0.0 <= U <= 1.0


def test_derivative_at_centre_vanishes():
    for M in (0.0, 1e-6, 1.0, 10.0, 80.0):
        assert eval_profile(M, 0.0)[1] == 0.0


@pytest.mark.parametrize("M", [0.0, 0.5, 3.0, 10.0])
def test_finite_difference_order(M):
    z = np.linspace(-0.9, 0.9, 7)
    errs1, errs2 = [], []
    for h in (1e-2, 5e-3):
        Up = eval_profile(M, z + h)[0]
        Um = eval_profile(M, z - h)[0]
        U0, dU, d2U = eval_profile(M, z)
        errs1.append(np.abs((Up - Um) / (2 * h) - dU).max())
        errs2.append(np.abs((Up - 2 * U0 + Um) / h**2 - d2U).max())
    if M == 0:  # U is a quadratic and both differences are exact
        assert max(errs1 + errs2) < 1e-8
        return
    assert math.log2(errs1[0] / errs1[1]) >= 1.9
    assert math.log2(errs2[0] / errs2[1]) >= 1.9


def test_limit_uniform():
    z = np.linspace(-1, 1, 2001)
    assert np.abs(eval_profile(1e-8, z)[0] - (1 - z**2)).max() < 1e-12


def test_large_M_is_finite():
    z = np.linspace(-1, 1, 501)
    U, dU, d2U = eval_profile(500.0, z)
    assert np.all(np.isfinite(U) & np.isfinite(dU) & np.isfinite(d2U))
    assert np.all((U >= 0) & (U <= 1))


@pytest.mark.parametrize("threshold", [SMALL_M, LARGE_M])
def test_branches_agree_at_switch(threshold):
    z = np.linspace(-1, 1, 41)
    lo = np.array(eval_profile(threshold * (1 - 1e-9), z))
    hi = np.array(eval_profile(threshold * (1 + 1e-9), z))
    np.testing.assert_allclose(lo, hi, rtol=1e-7, atol=1e-10)


def test_sinh_branch_vs_direct_formula():
    z = np.linspace(-1, 1, 21)
    for M in (0.5, 2.0, 7.0):
        ref = oracles.poiseuille_profile(M, z)
        got = eval_profile(M, z)
        for r, g in zip(ref, got):
            np.testing.assert_allclose(g, r, rtol=1e-12, atol=1e-13)


def test_second_derivative_is_analytic():
    bf = BaseFlow(4.0)
    z = 0.3
    assert bf.d2U(z) == pytest.approx(-16 * math.cosh(4 * z) / (math.cosh(4) - 1), rel=1e-14)
    assert bf.max_shear() == pytest.approx(4 * math.sinh(4) / (math.cosh(4) - 1), rel=1e-14)
