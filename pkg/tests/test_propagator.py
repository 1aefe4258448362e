import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radnls.core import ConfigurationError, RadialField, TestFunctionSpec, make_grid, sample_field
from radnls.norms import mass, region_mask
from radnls.propagator import (
    BoundaryError,
    EvolutionResult,
    SolverConfig,
    evolve_linear_series,
    evolve_nls,
    geometric_times,
    linear_flow,
    perturbation_series,
    rescale_run,
)
from radnls.transforms import DecompositionParams
from radnls.wavesplit import band_piece, banded_component, l2_norm, relative_error

GRID = make_grid(128, 8192)


def gaussian(width=1.0, amplitude=1.0, grid=GRID):
    return sample_field(TestFunctionSpec("gaussian", width=width, amplitude=amplitude), grid)


def free_gaussian(r, t):
    # e^{it Laplace} exp(-pi r^2): the spectrum exp(-pi a rho^2) with a = 1 + 4 pi i t
    a = 1.0 + 4j * np.pi * t
    return a**-1.5 * np.exp(-np.pi * r**2 / a)


# linear flow


def test_zero_time_is_identity():
    f = gaussian(0.8)
    assert relative_error(linear_flow(f, 0.0), f) <= 1e-10


def test_gaussian_free_evolution_matches_closed_form():
    t = 0.5
    u = linear_flow(gaussian(), t)
    trusted = GRID.r <= 0.9 * GRID.r_max
    diff = RadialField(GRID, np.where(trusted, u.values - free_gaussian(GRID.r, t), 0.0))
    assert l2_norm(diff) <= 1e-6


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_group_law(s, t):
    f = sample_field(TestFunctionSpec("smooth-bump", width=2.0), GRID)
    lhs = linear_flow(linear_flow(f, s), t)
    assert relative_error(lhs, linear_flow(f, s + t)) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(st.floats(-1, 1))
def test_unitary_and_reversible(t):
    f = sample_field(TestFunctionSpec("power-tail", sigma=2.5), GRID)
    u = linear_flow(f, t)
    assert abs(mass(u) - mass(f)) <= 1e-10 * mass(f)
    assert relative_error(linear_flow(u, -t), f) <= 1e-9


# linear series


def test_series_at_zero_only():
    f = gaussian()
    run = evolve_linear_series(f, [0.0])
    assert len(run) == 1
    assert relative_error(run.field(0), f) <= 1e-10


def test_series_mass_constant():
    run = evolve_linear_series(gaussian(0.7), np.linspace(0, 1, 9))
    assert run.mass_drift <= 1e-10


def test_outgoing_band_leaves_inside_region():
    g = make_grid(512, 1 << 17)
    k, delta = 4, 0.25
    f = sample_field(TestFunctionSpec("power-tail", sigma=2.0), g)
    v0 = banded_component(band_piece(f, k), k - 1, k + 1, "out", DecompositionParams(), None)
    times = np.linspace(0.0, 0.25, 6)
    # the r^-2 tail already reaches the outer shell at t = 0, so no margin check
    run = evolve_linear_series(v0, times)
    frac = []
    for t, u in zip(run.times, run.fields()):
        inside = RadialField(g, u.values * region_mask(g.r, delta, k, t, "inside"))
        frac.append(mass(inside) / mass(u))
    assert np.all(np.diff(frac) < 0)


def test_linear_series_flags_boundary():
    g = make_grid(8, 512)
    f = sample_field(TestFunctionSpec("gaussian", width=0.3), g)
    with pytest.raises(BoundaryError):
        evolve_linear_series(f, [0.0, 0.5], margin_tol=1e-8)


# nonlinear flow


def test_mu_zero_matches_linear_flow():
    f = gaussian()
    run = evolve_nls(f, SolverConfig(dt=1e-2, t_end=0.5, mu=0, snapshot_stride=10))
    for t, u in zip(run.times, run.fields()):
        assert relative_error(u, linear_flow(f, t)) <= 1e-9


def test_defocusing_mass_conserved():
    run = evolve_nls(gaussian(), SolverConfig(dt=5e-3, t_end=4.0, mu=1, snapshot_stride=20), store=False)
    assert run.times[-1] == pytest.approx(4.0)
    assert run.mass_drift <= 1e-10


def test_strang_second_order():
    dts = [1e-2, 5e-3, 2.5e-3]
    drifts = [
        evolve_nls(gaussian(), SolverConfig(dt=dt, t_end=1.0, mu=1, snapshot_stride=5), store=False).energy_drift
        for dt in dts
    ]
    assert drifts[0] / drifts[1] == pytest.approx(4.0, abs=0.5)
    p = np.polyfit(np.log(dts), np.log(drifts), 1)[0]
    assert p >= 1.9


def test_snapshot_stride_and_final_time():
    run = evolve_nls(gaussian(), SolverConfig(dt=1e-2, t_end=0.25, mu=1, snapshot_stride=10))
    assert np.allclose(run.times, [0.0, 0.1, 0.2, 0.25])
    assert run.snapshots.shape == (4, GRID.n)


def test_focusing_guard_aborts():
    u0 = gaussian(1.0, amplitude=3.0)
    run = evolve_nls(u0, SolverConfig(dt=1e-4, t_end=0.2, mu=-1, snapshot_stride=10, guard=5.0), store=False)
    assert run.aborted
    assert run.times[-1] < 0.2


def test_nls_boundary_violation_is_loud():
    g = make_grid(8, 512)
    u0 = sample_field(TestFunctionSpec("gaussian", width=0.3), g)
    with pytest.raises(BoundaryError, match="enlarge r_max"):
        evolve_nls(u0, SolverConfig(dt=1e-2, t_end=1.0, mu=1))


@pytest.mark.parametrize(
    "kw", [{"dt": 0.0}, {"dt": 0.05}, {"t_end": -1.0}, {"mu": 2}, {"snapshot_stride": 0}, {"dealias_fraction": 0.0}]
)
def test_solver_config_validation(kw):
    with pytest.raises(ConfigurationError):
        SolverConfig(**kw)


def test_result_rejects_unsorted_times():
    with pytest.raises(ConfigurationError):
        EvolutionResult(GRID, np.array([0.0, 0.0]), None, np.zeros(2), np.zeros(2))


# perturbation bookkeeping


def test_perturbation_with_zero_v_is_u():
    u = evolve_nls(gaussian(), SolverConfig(dt=1e-2, t_end=0.2, mu=1, snapshot_stride=5))
    v = evolve_linear_series(RadialField.zeros(GRID), u.times)
    w = perturbation_series(u, v)
    assert np.array_equal(w.snapshots, u.snapshots)
    assert "hdot1" in w.densities


def test_perturbation_vanishes_for_linear_u():
    f = gaussian()
    u = evolve_nls(f, SolverConfig(dt=1e-2, t_end=0.2, mu=0, snapshot_stride=5))
    v = evolve_linear_series(f, u.times)
    w = perturbation_series(u, v)
    assert np.max(np.abs(w.snapshots)) <= 1e-9


def test_perturbation_time_mismatch():
    f = gaussian()
    u = evolve_linear_series(f, [0.0, 0.1])
    v = evolve_linear_series(f, [0.0, 0.2])
    with pytest.raises(ConfigurationError):
        perturbation_series(u, v)


# helpers


def test_rescale_run_is_grid_exact():
    run = evolve_linear_series(gaussian(), [0.0, 0.5])
    scaled = rescale_run(run, 2.0)
    assert scaled.grid.r_max == GRID.r_max / 2
    assert np.allclose(scaled.times, [0.0, 0.125])
    assert np.array_equal(scaled.snapshots, np.sqrt(2.0) * run.snapshots)


def test_geometric_times():
    t = geometric_times(1e-3, 0.5, 2.0, 4, 0.25)
    assert t[0] == 0 and t[1] == pytest.approx(1e-3)
    assert np.all(np.diff(t) > 0)
    assert np.allclose(t[t >= 0.5], [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0])
    with pytest.raises(ConfigurationError):
        geometric_times(0.0, 0.5, 1.0, 4, 0.1)
