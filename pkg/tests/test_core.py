import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radnls.core import (
    ConfigurationError,
    CutoffProfile,
    DomainError,
    RadialField,
    SpectralField,
    TestFunctionSpec,
    cutoff_band,
    cutoff_between,
    cutoff_geq,
    cutoff_leq,
    extrapolate_origin,
    make_grid,
    sample_field,
)


def test_grid_spacing():
    g = make_grid(64, 4096)
    assert g.dr == 1 / 64
    assert g.drho == 1 / 128
    assert g.rho_max == pytest.approx(32.0)


def test_grid_node_formula():
    g = make_grid(128, 8192)
    assert g.r[100] == pytest.approx(1.5625, abs=0)
    assert g.node(100) == 1.5625


@pytest.mark.parametrize("r_max,n", [(0, 64), (-1, 64), (10, 8), (10, 20.5)])
def test_grid_rejects_bad_input(r_max, n):
    with pytest.raises(ConfigurationError):
        make_grid(r_max, n)


def test_cutoff_plateaus():
    assert cutoff_leq(1, 0.5) == 1.0
    assert cutoff_leq(1, 1.2) == 0.0
    v1, v2 = cutoff_leq(2, 2.1), cutoff_leq(2, 2.15)
    assert 0 < v1 < 1 and v1 >= v2


def test_band_values():
    assert cutoff_band(1, 1.5) == 1.0
    assert cutoff_band(1, 0.9) == 0.0


def test_cutoff_rejects_nonpositive_threshold():
    with pytest.raises(DomainError):
        cutoff_leq(0.0, 1.0)
    with pytest.raises(DomainError):
        CutoffProfile(-1.0)


def test_cutoff_profile_matches_functions():
    prof = CutoffProfile(3.0)
    x = np.linspace(0, 10, 101)
    assert np.array_equal(prof.leq(x), cutoff_leq(3.0, x))
    assert np.array_equal(prof.geq(x), cutoff_geq(3.0, x))
    assert np.array_equal(prof.band(x), cutoff_band(3.0, x))
    assert np.array_equal(cutoff_between(1.0, 3.0, x), cutoff_leq(3.0, x) - cutoff_leq(1.0, x))


@given(st.floats(0.01, 100), st.floats(0, 300))
def test_cutoff_range_and_exact_plateaus(a, x):
    v = cutoff_leq(a, x)
    assert 0.0 <= v <= 1.0
    if x <= a:
        assert v == 1.0
    if x >= 1.1 * a * (1 + 1e-12):
        assert v == 0.0
    assert cutoff_geq(a, x) == 1.0 - v


@given(st.floats(0.01, 100), st.floats(0, 2), st.floats(0, 2))
def test_cutoff_monotone(a, s, t):
    lo, hi = sorted([s, t])
    assert cutoff_leq(a, lo * a) >= cutoff_leq(a, hi * a)


@given(st.integers(0, 12), st.floats(0, 1))
def test_partition_of_unity(K, frac):
    x = frac * 2.0**K
    total = cutoff_leq(1, x) + sum(cutoff_band(2.0**k, x) for k in range(K + 1))
    assert total == pytest.approx(cutoff_leq(2.0 ** (K + 1), x), abs=1e-15)
    assert abs(total - 1.0) <= 1e-15


def test_telescoping_on_grid():
    x = np.linspace(0, 300, 30001)
    K = 6
    total = cutoff_leq(1, x) + sum(cutoff_band(2.0**k, x) for k in range(K + 1))
    assert np.max(np.abs(total - cutoff_leq(2.0 ** (K + 1), x))) <= 1e-15


def test_gaussian_sampling():
    g = make_grid(16, 256)
    f = sample_field(TestFunctionSpec("gaussian", width=1.0), g)
    assert np.array_equal(f.values, np.exp(-np.pi * g.r**2))


def test_power_tail_value():
    g = make_grid(64, 4096)
    f = sample_field(TestFunctionSpec("power-tail", sigma=2.0), g)
    j = int(round(2.0 / g.dr))
    assert f.values[j] == pytest.approx(0.25, abs=0)
    assert np.all(f.values[g.r <= 1.0] == 0)


def test_power_tail_requires_l2():
    with pytest.raises(ConfigurationError):
        TestFunctionSpec("power-tail", sigma=1.5)


def test_unknown_family():
    with pytest.raises(ConfigurationError):
        TestFunctionSpec("sawtooth")


def test_rough_spectral_is_deterministic():
    g = make_grid(64, 4096)
    spec = TestFunctionSpec("rough-spectral", s0=0.9, seed=7)
    a, b = sample_field(spec, g), sample_field(spec, g)
    assert np.array_equal(a.values, b.values)
    c = sample_field(TestFunctionSpec("rough-spectral", s0=0.9, seed=8), g)
    assert not np.array_equal(a.values, c.values)


def test_rough_spectral_normalized_and_windowed():
    g = make_grid(64, 4096)
    f = sample_field(TestFunctionSpec("rough-spectral", s0=0.9, seed=1, amplitude=0.5), g)
    mass = 4 * np.pi * g.dr * np.sum(g.r**2 * np.abs(f.values) ** 2)
    assert np.sqrt(mass) == pytest.approx(0.5, rel=1e-12)
    assert np.all(f.values[g.r <= 1.0] == 0)
    assert np.all(f.values[g.r >= 4.4] == 0)


def test_rough_cap_beyond_grid():
    g = make_grid(64, 4096)
    with pytest.raises(ConfigurationError):
        sample_field(TestFunctionSpec("rough-spectral", rho_cap=1e3), g)


def test_field_shape_and_grid_checks():
    g = make_grid(8, 64)
    with pytest.raises(ConfigurationError):
        RadialField(g, np.zeros(10))
    with pytest.raises(ConfigurationError):
        RadialField(g, np.full(64, np.nan))
    h = make_grid(8, 128)
    with pytest.raises(ConfigurationError):
        RadialField.zeros(g) + RadialField.zeros(h)


def test_field_values_are_read_only():
    g = make_grid(8, 64)
    f = RadialField(g, np.ones(64))
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_field_arithmetic():
    g = make_grid(8, 64)
    a = RadialField(g, np.arange(64.0))
    b = RadialField(g, 1j * np.ones(64))
    assert np.array_equal((a + b).values, np.arange(64.0) + 1j)
    assert np.array_equal((2 * a - a).values, a.values)
    assert np.array_equal((a * b).conj().values, -1j * np.arange(64.0))
    assert (-a).allclose(a * -1)


def test_spectral_field_conjugate_grid():
    g = make_grid(32, 1024)
    F = SpectralField(g.drho, g.n, np.zeros(g.n))
    assert F.grid == g
    assert F.rho[1] == g.drho


def test_extrapolate_origin_exact_for_even_quadratic():
    r = np.arange(5) * 0.1
    assert extrapolate_origin(3.0 - 2.0 * r**2) == pytest.approx(3.0, abs=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["gaussian", "smooth-bump", "power-tail"]), st.floats(0.5, 3), st.floats(1.6, 4))
def test_sample_field_is_pure(family, width, sigma):
    g = make_grid(16, 256)
    spec = TestFunctionSpec(family, width=width, sigma=sigma)
    assert np.array_equal(sample_field(spec, g).values, sample_field(spec, g).values)
