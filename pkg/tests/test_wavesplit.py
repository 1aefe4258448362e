import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from radnls.core import (
    DomainError,
    InfeasibleError,
    PreconditionError,
    RadialField,
    ResolutionError,
    SpectralField,
    TestFunctionSpec,
    cutoff_geq,
    make_grid,
    sample_field,
)
from radnls.transforms import DecompositionParams, inverse_radial_fourier, lp_project, sobolev_norm
from radnls.wavesplit import (
    CALIBRATION,
    band_mask,
    band_piece,
    band_remainder,
    band_remainder_ratio,
    banded_component,
    choose_N,
    component_by_kernels,
    component_split,
    incoming_component,
    kernel_J,
    kernel_J_quad,
    kernel_K,
    l2_norm,
    measure_calibration,
    modified_components,
    outgoing_component,
    relative_error,
    split_initial_data,
    tail_norm,
)

GRID = make_grid(128, 8192)
P = DecompositionParams()
FAMILY_SPECS = [
    TestFunctionSpec("gaussian"),
    TestFunctionSpec("smooth-bump", width=2.0),
    TestFunctionSpec("power-tail", sigma=2.0),
    TestFunctionSpec("rough-spectral", s0=0.9, seed=3, rho_cap=8.0),
]
IDS = [s.family for s in FAMILY_SPECS]


# kernels


def test_J_at_zero():
    assert kernel_J(0.0) == 1.0
    assert kernel_J_quad(0.0) == pytest.approx(1.0, abs=1e-14)


def test_J_at_one_matches_quadrature():
    closed = (np.exp(2j * np.pi) - 1) / (2j * np.pi)
    assert abs(kernel_J(1.0) - closed) <= 1e-15
    assert abs(kernel_J_quad(1.0) - closed) <= 1e-10


@given(st.floats(-60, 60))
def test_J_conjugation_and_bound(s):
    assert kernel_J(-s) == pytest.approx(np.conj(kernel_J(s)), abs=1e-15)
    assert abs(kernel_J(s)) <= 1.0 + 1e-15


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-4, 0.05))
def test_J_series_branch_matches_quadrature(s):
    assert abs(kernel_J(s) - kernel_J_quad(s)) <= 1e-12


def test_K_values():
    assert kernel_K(1.0) == 0
    assert kernel_K(3.0) == pytest.approx(1j / (6 * np.pi), abs=1e-16)
    with pytest.raises(DomainError):
        kernel_K(-1.0)


def test_far_field_spherical_waves():
    r = np.linspace(2.2, 50, 400)
    wave = np.exp(2j * np.pi * r) / (2j * np.pi * r)
    assert np.max(np.abs(kernel_J(r) - kernel_K(r) - wave)) <= 1e-10
    assert np.max(np.abs(kernel_J(-r) + kernel_K(r) + np.exp(-2j * np.pi * r) / (2j * np.pi * r))) <= 1e-10


def test_calibration_constant():
    assert measure_calibration() == pytest.approx(1 / (2 * np.pi), abs=1e-10)
    assert CALIBRATION == pytest.approx(2 * np.pi)


# components


@pytest.mark.parametrize("spec", FAMILY_SPECS, ids=IDS)
def test_reconstruction(spec):
    f = sample_field(spec, GRID)
    assert component_split(f, P).reconstruction_error <= 1e-6
    assert modified_components(f, P).reconstruction_error <= 1e-6


@pytest.mark.parametrize("spec", FAMILY_SPECS, ids=IDS)
def test_l2_bound(spec):
    f = sample_field(spec, GRID)
    assert l2_norm(outgoing_component(f, P)) <= 3 * l2_norm(f)


def test_fast_path_matches_kernel_quadrature():
    f = sample_field(TestFunctionSpec("power-tail", sigma=2.0), GRID)
    nodes = [3, 64, 100, 141, 700, 4000]
    for direction, fn in (("out", outgoing_component), ("in", incoming_component)):
        fast = fn(f, P).values[nodes]
        slow = component_by_kernels(f, P, direction, nodes)
        assert np.max(np.abs(fast - slow)) <= 1e-10 * np.max(np.abs(f.values))


def _shell(rho0=4.0, sigma=0.5):
    F = np.exp(-(((GRID.rho - rho0) / sigma) ** 2))
    return inverse_radial_fourier(SpectralField(GRID.drho, GRID.n, F), GRID)


@pytest.mark.parametrize("direction", ["out", "in"])
def test_single_shell_is_a_spherical_wave(direction):
    rho0, sigma = 4.0, 0.5
    f = _shell(rho0, sigma)
    comp = (outgoing_component if direction == "out" else incoming_component)(f, P)
    sign = 1 if direction == "out" else -1
    # far field: sign / (i r) * int exp(sign 2 pi i rho r) rho F(rho) d rho
    F = lambda rho: np.exp(-(((rho - rho0) / sigma) ** 2))
    idx = np.arange(int(1.1 / GRID.dr), int(6.0 / GRID.dr), 37)
    ref = []
    for j in idx:
        r = GRID.r[j]
        re = integrate.quad(lambda x: np.cos(2 * np.pi * x * r) * x * F(x), 0, 10, limit=400)[0]
        im = integrate.quad(lambda x: np.sin(2 * np.pi * x * r) * x * F(x), 0, 10, limit=400)[0]
        ref.append(sign * (re + sign * 1j * im) / (1j * r))
    ref = np.array(ref)
    scale = np.max(np.abs(ref))
    assert np.max(np.abs(comp.values[idx] - ref)) <= 1e-2 * scale
    # the carrier is exp(+-2 pi i rho0 r) / r: unwind it where the envelope is visible
    dense = np.arange(int(1.1 / GRID.dr), int(6.0 / GRID.dr))
    live = dense[np.abs(comp.values[dense]) >= 1e-3 * np.max(np.abs(comp.values[dense]))]
    assert live.size >= 20
    carrier = comp.values[live] * GRID.r[live] * np.exp(-sign * 2j * np.pi * rho0 * GRID.r[live])
    assert np.all(np.abs(np.diff(np.unwrap(np.angle(carrier)))) < 0.5)


def test_conjugation_duality():
    f = sample_field(TestFunctionSpec("power-tail", sigma=2.5), GRID)
    a = incoming_component(f.conj(), P)
    b = outgoing_component(f, P).conj()
    assert relative_error(a, b) <= 1e-12


@settings(max_examples=10, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.sampled_from(["out", "in"]))
def test_components_linear(a, b, direction):
    g = make_grid(32, 1024)
    f = sample_field(TestFunctionSpec("gaussian", width=1.3), g)
    h = sample_field(TestFunctionSpec("power-tail", sigma=2.2), g)
    fn = outgoing_component if direction == "out" else incoming_component
    lhs = fn(a * f + b * h, P, None).values
    rhs = a * fn(f, P, None).values + b * fn(h, P, None).values
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12 * (1 + abs(a) + abs(b)))


def test_resolution_error_names_bound():
    g = make_grid(32, 1024)
    f = sample_field(TestFunctionSpec("rough-spectral", rho_cap=g.rho_max), g)
    with pytest.raises(ResolutionError, match="dr <="):
        outgoing_component(f, P)


def test_direction_validated():
    f = sample_field(TestFunctionSpec(), make_grid(16, 256))
    with pytest.raises(DomainError):
        component_by_kernels(f, P, "sideways", [3])
    with pytest.raises(DomainError):
        banded_component(f, 0, 1, "sideways", P)


# banded components and remainders

POWER = sample_field(TestFunctionSpec("power-tail", sigma=2.0), GRID)


def test_full_band_mask_equals_unbanded():
    g = band_piece(POWER, 2)
    banded = banded_component(g, 0, 4, "out", P, None)
    assert relative_error(banded, outgoing_component(g, P, None)) <= 1e-8


def test_disjoint_band_vanishes():
    g = band_piece(POWER, 2)
    assert l2_norm(banded_component(g, 6, 7, "out", P, None)) <= 1e-8 * l2_norm(g)


def test_band_captures_component():
    g = band_piece(POWER, 4)
    full = outgoing_component(g, P, None)
    banded = banded_component(g, 3, 5, "out", P, None)
    assert l2_norm(banded) ** 2 >= 0.999 * l2_norm(full) ** 2


def test_empty_band_rejected():
    with pytest.raises(DomainError):
        band_mask(GRID.rho, 3, 2)


def test_remainder_small_for_gaussian_tail_and_converged():
    for g in (GRID, make_grid(128, 16384)):
        f = sample_field(TestFunctionSpec("gaussian", width=0.5), g)
        assert band_remainder_ratio(f, 4, P) < 1e-3


def test_remainder_linear():
    f = sample_field(TestFunctionSpec("gaussian", width=0.5), GRID)
    p = DecompositionParams(beta=0.5)
    lhs = band_remainder(2 * POWER + 3 * f, 3, p).values
    rhs = 2 * band_remainder(POWER, 3, p).values + 3 * band_remainder(f, 3, p).values
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-10 * np.max(np.abs(rhs)))


def test_remainder_vanishes_without_deformation():
    # beta = 0: h_k is zero up to the roundoff of one transform round trip
    g = make_grid(128, 32768)
    f = sample_field(TestFunctionSpec("power-tail", sigma=2.0), g)
    for k in (2, 3, 4, 5):
        assert l2_norm(band_remainder(f, k, P)) <= 1e-14 * l2_norm(band_piece(f, k))


def test_remainder_index_checked():
    with pytest.raises(DomainError):
        band_remainder(POWER, -1, P)


# modified components


def test_modified_components_halve_low_frequency_data():
    # width 4: the spectrum is ~4e-6 at the cutoff, so the projection leaves no spatial tail
    f = lp_project(sample_field(TestFunctionSpec("gaussian", width=4.0), GRID), "leq", 0.5)
    # with eps0 beyond the support of f nothing is sent through the wave split
    s = modified_components(f, DecompositionParams(epsilon0=16.0))
    assert relative_error(s.out, 0.5 * f) <= 1e-6
    assert relative_error(s.in_, 0.5 * f) <= 1e-6


def test_modified_power_tail_reconstruction():
    assert modified_components(POWER, P).reconstruction_error <= 1e-5


# choosing N and splitting


def test_choose_N_smooth_gaussian():
    # chi_{>=1} ramps over [1, 1.1], which puts H^0.9 mass out to rho ~ 50
    p = DecompositionParams(delta0=1e-3)
    coarse = sample_field(TestFunctionSpec("gaussian"), make_grid(128, 32768))
    fine = sample_field(TestFunctionSpec("gaussian"), make_grid(128, 131072))
    assert choose_N(coarse, p) == choose_N(fine, p) == 64
    assert tail_norm(fine, 32, 0.9) > 1e-3 >= tail_norm(fine, 64, 0.9)
    assert tail_norm(coarse, 64, 0.9) == pytest.approx(tail_norm(fine, 64, 0.9), rel=1e-2)


def test_choose_N_vacuous():
    f = sample_field(TestFunctionSpec("gaussian"), GRID)
    big = sobolev_norm(f.apply(lambda r: cutoff_geq(1.0, r)), 0.9) * 1.01
    assert choose_N(f, DecompositionParams(delta0=big)) == 1


def test_choose_N_monotone_and_minimal():
    g = make_grid(128, 16384)
    f = sample_field(TestFunctionSpec("rough-spectral", s0=0.9, seed=0, amplitude=0.05, rho_cap=32.0), g)
    loose = choose_N(f, DecompositionParams(delta0=0.5))
    tight = choose_N(f, DecompositionParams(delta0=0.1))
    assert tight > loose
    for N, d0 in ((loose, 0.5), (tight, 0.1)):
        assert tail_norm(f, N, 0.9) <= d0
        if N > 1:
            assert tail_norm(f, N // 2, 0.9) > d0


def test_choose_N_infeasible_reports_floor():
    g = make_grid(32, 1024)
    f = sample_field(TestFunctionSpec("rough-spectral", rho_cap=g.rho_max), g)
    with pytest.raises(InfeasibleError) as err:
        choose_N(f, DecompositionParams(delta0=1e-12))
    assert err.value.floor > 1e-12


@pytest.mark.parametrize("N", [1, 4, 16])
def test_split_telescopes(N):
    g = make_grid(128, 16384)
    f = sample_field(TestFunctionSpec("rough-spectral", s0=0.9, seed=2, rho_cap=32.0), g)
    d = split_initial_data(f, DecompositionParams(N=N))
    assert relative_error(d.v0 + d.w0, d.f_plus) <= 1e-8
    far = f.apply(lambda r: cutoff_geq(1.0, r))
    assert d.tail_H_s0 == sobolev_norm(lp_project(far, "geq", N), 0.9)
    assert d.w0_hdot1 == sobolev_norm(d.w0, 1.0, homogeneous=True)


def test_split_requires_unit_eps():
    f = sample_field(TestFunctionSpec(), GRID)
    with pytest.raises(PreconditionError):
        split_initial_data(f, DecompositionParams(epsilon0=0.5, N=4))
