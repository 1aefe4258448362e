"""Radial grids, fields, smooth cutoffs and test-function families.

A radial function u(x) = u(|x|) on R^3 is stored by its samples on a uniform
grid r_j = j * dr, j = 0 .. n-1.  The node r_n = r_max is an implicit zero
(Dirichlet) node, which is what makes the sine transform in
:mod:`radnls.transforms` an exact discrete involution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

# Transition band of chi_{<=a} is [a, TRANSITION * a].
TRANSITION = 11.0 / 10.0


class ConfigurationError(ValueError):
    """Invalid grid, field or experiment configuration."""


class DomainError(ValueError):
    """Parameter outside the mathematical domain of an operation."""


class PreconditionError(ValueError):
    """Input violates a documented precondition."""


class ResolutionError(RuntimeError):
    """The discretization cannot resolve the requested quantity."""


class InfeasibleError(RuntimeError):
    """A requested bound cannot be met on the given grid."""

    def __init__(self, message: str, floor: float | None = None):
        super().__init__(message)
        self.floor = floor


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid ``r_j = j * r_max / n`` for ``j = 0 .. n-1``."""

    r_max: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.r_max) or self.r_max <= 0:
            raise ConfigurationError(f"r_max must be positive, got {self.r_max!r}")
        if int(self.n) != self.n or self.n < 16:
            raise ConfigurationError(f"n must be an integer >= 16, got {self.n!r}")
        object.__setattr__(self, "r_max", float(self.r_max))
        object.__setattr__(self, "n", int(self.n))

    @property
    def dr(self) -> float:
        return self.r_max / self.n

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.n) * self.dr

    # conjugate frequency grid of the sine transform
    @property
    def drho(self) -> float:
        return 1.0 / (2.0 * self.r_max)

    @property
    def rho(self) -> np.ndarray:
        return np.arange(self.n) * self.drho

    @property
    def rho_max(self) -> float:
        return 1.0 / (2.0 * self.dr)

    def node(self, j: int) -> float:
        return j * self.dr

    def zoom(self, factor: float) -> "RadialGrid":
        """Same node count, radii divided by ``factor``."""
        return RadialGrid(self.r_max / factor, self.n)


def make_grid(r_max: float, n: int) -> RadialGrid:
    return RadialGrid(r_max, n)


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.complex128, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class RadialField:
    """Complex radial profile sampled on a :class:`RadialGrid`."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.grid.n,):
            raise ConfigurationError(
                f"field has shape {values.shape}, grid expects ({self.grid.n},)"
            )
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("field contains non-finite samples")
        object.__setattr__(self, "values", values)

    @property
    def r(self) -> np.ndarray:
        return self.grid.r

    def _check(self, other: "RadialField"):
        if other.grid != self.grid:
            raise ConfigurationError("fields live on different grids")

    def __add__(self, other: "RadialField") -> "RadialField":
        self._check(other)
        return RadialField(self.grid, self.values + other.values)

    def __sub__(self, other: "RadialField") -> "RadialField":
        self._check(other)
        return RadialField(self.grid, self.values - other.values)

    def __mul__(self, c) -> "RadialField":
        if isinstance(c, RadialField):
            self._check(c)
            return RadialField(self.grid, self.values * c.values)
        return RadialField(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "RadialField":
        return RadialField(self.grid, -self.values)

    def conj(self) -> "RadialField":
        return RadialField(self.grid, np.conj(self.values))

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> "RadialField":
        """Multiply pointwise by ``fn(r)``."""
        return RadialField(self.grid, self.values * fn(self.grid.r))

    def allclose(self, other: "RadialField", rtol: float = 0.0, atol: float = 0.0) -> bool:
        self._check(other)
        return bool(np.allclose(self.values, other.values, rtol=rtol, atol=atol))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.n))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Complex samples F(rho_j) on the uniform grid rho_j = j * drho."""

    drho: float
    n: int
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.n,):
            raise ConfigurationError(f"spectral field has shape {values.shape}, expected ({self.n},)")
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("spectral field contains non-finite samples")
        if not self.drho > 0:
            raise ConfigurationError("drho must be positive")
        object.__setattr__(self, "values", values)

    @property
    def rho(self) -> np.ndarray:
        return np.arange(self.n) * self.drho

    @property
    def rho_max(self) -> float:
        return (self.n - 1) * self.drho

    @property
    def grid(self) -> RadialGrid:
        """Spatial grid this spectrum is conjugate to."""
        return RadialGrid(1.0 / (2.0 * self.drho), self.n)


# ---------------------------------------------------------------------------
# smooth cutoffs


def _g(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _ramp_down(t: np.ndarray) -> np.ndarray:
    # 1 for t <= 0, 0 for t >= 1, C-infinity in between; exact at the plateaus
    a = _g(1.0 - t)
    return a / (a + _g(t))


def cutoff_leq(a: float, x: ArrayLike) -> ArrayLike:
    """chi_{<=a}(x): exactly 1 for |x| <= a, exactly 0 for |x| >= 11a/10.

    The transition is the mollifier ramp g(t)/(g(t)+g(1-t)), g(t) = exp(-1/t),
    rescaled to [a, 11a/10].
    """
    if not a > 0:
        raise DomainError(f"cutoff threshold must be positive, got {a!r}")
    scalar = np.ndim(x) == 0
    x = np.abs(np.asarray(x, dtype=float))
    t = np.atleast_1d((x - a) / ((TRANSITION - 1.0) * a))
    out = _ramp_down(t)
    return float(out[0]) if scalar else out.reshape(x.shape)


def cutoff_geq(a: float, x: ArrayLike) -> ArrayLike:
    """chi_{>=a} = 1 - chi_{<=a}."""
    return 1.0 - cutoff_leq(a, x)


def cutoff_band(a: float, x: ArrayLike) -> ArrayLike:
    """chi_a = chi_{<=2a} - chi_{<=a}; supported in [a, 2.2a]."""
    return cutoff_leq(2.0 * a, x) - cutoff_leq(a, x)


def cutoff_between(a: float, b: float, x: ArrayLike) -> ArrayLike:
    """chi_{a<=.<=b} = chi_{<=b} - chi_{<=a}."""
    return cutoff_leq(b, x) - cutoff_leq(a, x)


@dataclass(frozen=True)
class CutoffProfile:
    """The cutoff family at a fixed threshold ``a``."""

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"cutoff threshold must be positive, got {self.a!r}")

    def leq(self, x):
        return cutoff_leq(self.a, x)

    def geq(self, x):
        return cutoff_geq(self.a, x)

    def band(self, x):
        return cutoff_band(self.a, x)


# ---------------------------------------------------------------------------
# test-function families

FAMILIES = ("gaussian", "smooth-bump", "power-tail", "rough-spectral")

# exponent slack that keeps rough-spectral data just inside H^{s0}
ROUGH_SLACK = 0.01


@dataclass(frozen=True)
class TestFunctionSpec:
    """Parameters of one test-function family.

    ``width`` scales the gaussian and the bump, ``sigma`` is the power-tail
    exponent, ``s0``/``seed``/``rho_cap`` control the rough-spectral family and
    ``amplitude`` multiplies every family.  Rough-spectral data is windowed to
    ``r_inner <= r <= r_outer`` and normalized to L^2 norm ``amplitude``.
    """

    __test__ = False  # not a pytest class

    family: str = "gaussian"
    width: float = 1.0
    sigma: float = 2.0
    s0: float = 0.9
    seed: int = 0
    amplitude: float = 1.0
    rho_cap: float | None = None
    r_inner: float = 1.0
    r_outer: float = 4.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown test-function family {self.family!r}")
        if self.family == "power-tail" and not self.sigma > 1.5:
            raise ConfigurationError("power-tail needs sigma > 3/2 to lie in L^2")
        if self.width <= 0:
            raise ConfigurationError("width must be positive")
        if self.family == "rough-spectral":
            if not 0 < self.s0 < 1.5:
                raise ConfigurationError("rough-spectral s0 must lie in (0, 3/2)")
            if not 0 <= self.r_inner < self.r_outer:
                raise ConfigurationError("need 0 <= r_inner < r_outer")

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "width": self.width,
            "sigma": self.sigma,
            "s0": self.s0,
            "seed": self.seed,
            "amplitude": self.amplitude,
            "rho_cap": self.rho_cap,
            "r_inner": self.r_inner,
            "r_outer": self.r_outer,
        }


def sample_field(spec: TestFunctionSpec, grid: RadialGrid) -> RadialField:
    """Sample a test function on ``grid``; pure in ``(spec, grid)``."""
    r = grid.r
    if spec.family == "gaussian":
        values = spec.amplitude * np.exp(-np.pi * (r / spec.width) ** 2)
    elif spec.family == "smooth-bump":
        s = r / spec.width
        values = np.zeros_like(r)
        inside = s < 1
        values[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        values = spec.amplitude * values
    elif spec.family == "power-tail":
        values = np.zeros_like(r)
        pos = r > 0
        values[pos] = cutoff_geq(1.0, r[pos]) * r[pos] ** (-spec.sigma)
        values = spec.amplitude * values
    elif spec.family == "rough-spectral":
        return _rough_spectral(spec, grid)
    else:  # pragma: no cover - guarded by TestFunctionSpec validation
        raise ConfigurationError(f"unknown test-function family {spec.family!r}")
    return RadialField(grid, values)


def _rough_spectral(spec: TestFunctionSpec, grid: RadialGrid) -> RadialField:
    from .transforms import inverse_radial_fourier

    rho = grid.rho
    cap = spec.rho_cap if spec.rho_cap is not None else grid.rho_max / 2
    if cap > grid.rho_max:
        raise ConfigurationError(f"rho_cap {cap} exceeds grid rho_max {grid.rho_max}")
    live = (rho > 0) & (rho <= cap)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=int(live.sum()))
    spectrum = np.zeros(grid.n, dtype=np.complex128)
    decay = -(spec.s0 + 1.5 + ROUGH_SLACK)
    spectrum[live] = (1.0 + rho[live] ** 2) ** (decay / 2) * np.exp(1j * phases)
    raw = inverse_radial_fourier(SpectralField(grid.drho, grid.n, spectrum), grid)
    window = cutoff_leq(spec.r_outer, grid.r)
    if spec.r_inner > 0:
        window = window * cutoff_geq(spec.r_inner, grid.r)
    values = raw.values * window
    norm = np.sqrt(4 * np.pi * grid.dr * np.sum(grid.r**2 * np.abs(values) ** 2))
    if norm == 0:
        raise ConfigurationError("rough-spectral window is empty on this grid")
    return RadialField(grid, spec.amplitude * values / norm)


def extrapolate_origin(values: np.ndarray) -> complex:
    """Value at r = 0 of an even profile from its first two interior nodes."""
    return (4.0 * values[1] - values[2]) / 3.0
