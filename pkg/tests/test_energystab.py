import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from porostab.energystab import (Energy3DProblem, OrrEnergyProblem, critical_point_energy_spanwise,
                                 energy3d_solve, energy_RE, orr_energy_eigen, orr_energy_ritz,
                                 production_bound, rayleigh_quotient, spanwise_fields,
                                 verify_squire_energy)
from porostab.errors import DomainError, UsageError
from porostab.spectral import apply_bc, build_grid

from conftest import energy_critical

# second-order finite differences with Richardson extrapolation (tests/oracles.py);
# the extrapolated values are good to a few parts in 1e6
FD_CRIT_M0 = (2.1017874889810724, 87.59363852600357)
FD_CRIT_M1 = (2.145856112982651, 96.6234262685252)
FD_RE_A21 = {0.0: 87.59382980525655, 5.0: 364.33914857868734}


def test_spectrum_is_symmetric():
    vals = orr_energy_eigen(OrrEnergyProblem(1.0, 2.0, 64)).values
    pos = np.sort(vals[vals > 0])[:8]
    neg = np.sort(-vals[vals < 0])[:8]
    np.testing.assert_allclose(pos, neg, rtol=1e-8)


def test_kept_eigenvalues_are_real():
    sol = orr_energy_eigen(OrrEnergyProblem(0.0, 2.1, 64))
    assert np.all(sol.residuals <= 1e-8)
    assert np.all(np.abs(1 / sol.values) <= production_bound(0.0) * (1 + 1e-6))


@pytest.mark.parametrize("M", [0.0, 5.0])
def test_matches_fd_oracle(M):
    assert energy_RE(M, 2.1, 64) == pytest.approx(FD_RE_A21[M], rel=1e-5)


def test_collocation_and_ritz_agree():
    for M, a in [(0.0, 2.1), (2.0, 1.3), (8.0, 3.0)]:
        p = OrrEnergyProblem(M, a, 64)
        assert energy_RE(M, a, 64, "ritz") == pytest.approx(energy_RE(M, a, 64), rel=1e-9)
        ritz = np.sort(orr_energy_ritz(p).values[:6])
        coll = np.sort(orr_energy_eigen(p).values[:6])
        np.testing.assert_allclose(ritz, coll, rtol=1e-8)


def test_unknown_route():
    with pytest.raises(UsageError):
        energy_RE(0.0, 2.0, 32, route="galerkin")


@pytest.mark.parametrize("M, ref", [(0.0, FD_CRIT_M0), (1.0, FD_CRIT_M1)])
def test_critical_points(M, ref):
    cp = energy_critical(M)
    assert cp.R_c == pytest.approx(ref[1], rel=1e-5)
    assert cp.a_c == pytest.approx(ref[0], abs=1e-2)  # a_c sits in a flat minimum
    assert cp.converged


def test_drag_raises_threshold():
    assert energy_RE(5.0, 2.1) > energy_RE(0.0, 2.1)
    values = [energy_RE(M, 2.1) for M in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)]
    assert np.all(np.diff(values) > 0)


def test_empty_range():
    with pytest.raises(UsageError):
        critical_point_energy_spanwise(0.0, 32, a_range=(1.0, 1.0))


def test_problem_validation():
    with pytest.raises(DomainError):
        Energy3DProblem(0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        OrrEnergyProblem(0.0, -2.0)


@pytest.mark.parametrize("M", [0.0, 3.0])
def test_3d_spanwise_reduces_to_2d(M):
    res = energy3d_solve(Energy3DProblem(M, 2.1, 0.0, 64))
    assert 1 / res.m == pytest.approx(energy_RE(M, 2.1, 64), rel=1e-8)
    assert np.abs(res.v).max() < 1e-8 * max(np.abs(res.u).max(), np.abs(res.w).max())


def test_3d_streamwise_independent_limit():
    # classical energy threshold of plane Poiseuille flow for x-independent rolls
    res = energy3d_solve(Energy3DProblem(0.0, 0.01, 2.044, 64))
    assert 1 / res.m == pytest.approx(49.6, rel=2e-3)


def test_3d_eigenfunction_is_stationary_point():
    g = build_grid(64)
    for a, b in [(2.1, 0.0), (0.5, 2.0)]:
        res = energy3d_solve(Energy3DProblem(0.0, a, b, 64))
        rq = rayleigh_quotient(g, 0.0, res.u, res.v, res.w, a, b)
        assert rq.value == pytest.approx(res.m, rel=1e-6)


def test_spanwise_mode_quotient():
    N, M, a = 64, 1.0, 2.0
    sol = orr_energy_eigen(OrrEnergyProblem(M, a, N), vectors=True)
    j = int(np.flatnonzero(sol.values > 0)[0])
    rec = apply_bc(build_grid(N), "clamped")
    u, v, w = spanwise_fields(rec, sol.vectors[:, j], a)
    rq = rayleigh_quotient(build_grid(N), M, u, v, w, a)
    assert rq.value == pytest.approx(1 / sol.values[j], rel=1e-6)


def test_pure_v_field_produces_nothing():
    g = build_grid(32)
    v = 1 - g.z**2
    rq = rayleigh_quotient(g, 1.0, 0 * v, v, 0 * v, 1.0, 1.0)
    assert rq.value == 0.0
    assert rq.denominator > 0


def _sample_field(seed):
    g = build_grid(32)
    rng = np.random.default_rng(seed)
    bump = 1 - g.z**2
    fields = [bump * (rng.standard_normal(32) + 1j * rng.standard_normal(32)) for _ in range(3)]
    return g, fields


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-3, 1e3), st.floats(0, 2 * np.pi))
def test_quotient_scale_invariance(seed, scale, phase):
    g, (u, v, w) = _sample_field(seed)
    c = scale * np.exp(1j * phase)
    r0 = rayleigh_quotient(g, 1.0, u, v, w, 1.5, 0.5).value
    r1 = rayleigh_quotient(g, 1.0, c * u, c * v, c * w, 1.5, 0.5).value
    assert r1 == pytest.approx(r0, rel=1e-12, abs=1e-15)


def test_quotient_sign_flip():
    g, (u, v, w) = _sample_field(3)
    r0 = rayleigh_quotient(g, 0.0, u, v, w, 1.0).value
    r1 = rayleigh_quotient(g, 0.0, -u, v, w, 1.0).value
    assert r1 == pytest.approx(-r0, rel=1e-12)


def test_quotient_rejects_bad_fields():
    g = build_grid(16)
    zero = np.zeros(16)
    with pytest.raises(DomainError):
        rayleigh_quotient(g, 0.0, zero, zero, zero, 1.0)
    with pytest.raises(DomainError):
        rayleigh_quotient(g, 0.0, np.ones(16), zero, zero, 1.0)


def test_squire_single_spanwise_point_passes():
    rep = verify_squire_energy(0.0, [2.1], [0.0], 48)
    assert rep.passed and rep.status == "PASSED"
    assert rep.rows()[0][:3] == (0.0, 2.1, 0.0)


def test_squire_requires_spanwise_column():
    with pytest.raises(UsageError):
        verify_squire_energy(0.0, [1.0], [0.5, 1.0], 32)


def test_squire_report_bookkeeping():
    rep = verify_squire_energy(0.0, [0.5, 2.0], [0.0, 2.0], 48, workers=2)
    assert len(rep.table) == 4
    span = max(m for a, b, m in rep.table if b == 0)
    assert all(b != 0 and m > span for a, b, m in rep.offending)
    assert rep.best[2] == max(m for *_, m in rep.table)
    assert rep.passed == (not rep.offending)
