"""Free Schrodinger flow and a Strang split-step solver for radial quintic NLS.

The equation is ``i u_t + Laplace u = mu |u|^4 u`` on R^3.  Under the 2 pi
Fourier convention ``e^{it Laplace}`` multiplies the radial spectrum by
``exp(-4 pi^2 i rho^2 t)``.  The nonlinear sub-step is the exact phase rotation
``u -> u exp(-i mu |u|^4 tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import ConfigurationError, RadialField, RadialGrid
from .norms import energy, mass
from .transforms import _analyze, _synthesize

Density = Callable[[RadialField, float], float]


class BoundaryError(RuntimeError):
    """Mass reached the untrusted outer shell of the computational domain."""


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters.

    ``boundary_margin`` is the outer fraction of ``r_max`` treated as
    untrusted; the largest mass fraction seen there is recorded as the
    boundary leak and, when ``enforce_margin`` is set, a leak above
    ``margin_tol`` raises :class:`BoundaryError`.  ``guard`` bounds the growth
    of ``sup |u|`` relative to the initial value before a run is aborted.
    """

    dt: float = 5e-3
    t_end: float = 1.0
    mu: int = 1
    snapshot_stride: int = 1
    dealias_fraction: float = 2.0 / 3.0
    boundary_margin: float = 0.1
    margin_tol: float = 1e-8
    enforce_margin: bool = True
    guard: float = 1e3
    max_dt: float = 1e-2

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if self.dt > self.max_dt:
            raise ConfigurationError(f"dt = {self.dt} exceeds the accuracy bound {self.max_dt}")
        if not self.t_end >= 0:
            raise ConfigurationError("t_end must be non-negative")
        if self.mu not in (-1, 0, 1):
            raise ConfigurationError("mu must be +1, -1 or 0")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ConfigurationError("snapshot_stride must be a positive integer")
        if not 0 < self.dealias_fraction <= 1:
            raise ConfigurationError("dealias_fraction must lie in (0, 1]")
        if not 0 <= self.boundary_margin < 1:
            raise ConfigurationError("boundary_margin must lie in [0, 1)")
        if not self.guard > 1:
            raise ConfigurationError("guard must exceed 1")

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "t_end": self.t_end,
            "mu": self.mu,
            "snapshot_stride": self.snapshot_stride,
            "dealias_fraction": self.dealias_fraction,
            "boundary_margin": self.boundary_margin,
            "margin_tol": self.margin_tol,
            "enforce_margin": self.enforce_margin,
            "guard": self.guard,
        }


@dataclass(eq=False)
class EvolutionResult:
    """Time-stamped snapshots and scalar series of one run.

    ``snapshots`` is an (m, n) complex array or ``None`` for streaming runs, in
    which case only ``densities`` (name -> per-snapshot values) are kept.
    """

    grid: RadialGrid
    times: np.ndarray
    snapshots: np.ndarray | None
    mass_series: np.ndarray
    energy_series: np.ndarray
    densities: dict = field(default_factory=dict)
    mu: int = 0
    aborted: bool = False
    boundary_leak: float = 0.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or self.times.size == 0:
            raise ConfigurationError("a run needs at least one time")
        if np.any(np.diff(self.times) <= 0):
            raise ConfigurationError("times must be strictly increasing")
        m = self.times.size
        if self.snapshots is not None and self.snapshots.shape != (m, self.grid.n):
            raise ConfigurationError("snapshot array does not match times and grid")
        for name, series in [("mass", self.mass_series), ("energy", self.energy_series)]:
            if len(series) != m:
                raise ConfigurationError(f"{name} series length differs from times")
        for name, series in self.densities.items():
            if len(series) != m:
                raise ConfigurationError(f"density {name!r} length differs from times")

    def __len__(self) -> int:
        return self.times.size

    def field(self, i: int) -> RadialField:
        if self.snapshots is None:
            raise ConfigurationError("run was streamed without snapshots")
        return RadialField(self.grid, self.snapshots[i])

    def fields(self):
        for i in range(len(self)):
            yield self.field(i)

    @property
    def mass_drift(self) -> float:
        m0 = self.mass_series[0]
        if m0 == 0:
            return 0.0
        return float(np.max(np.abs(self.mass_series - m0)) / m0)

    @property
    def energy_drift(self) -> float:
        e0 = self.energy_series[0]
        scale = abs(e0) if e0 != 0 else 1.0
        return float(np.max(np.abs(self.energy_series - e0)) / scale)


# ---------------------------------------------------------------------------
# linear flow


def free_multiplier(grid: RadialGrid, t: float) -> np.ndarray:
    rho = grid.rho
    return np.exp(-4j * np.pi**2 * rho**2 * t)


def linear_flow(f: RadialField, t: float) -> RadialField:
    """e^{it Laplace} f, exactly in the discrete spectral representation."""
    if t == 0:
        return RadialField(f.grid, _synthesize(_analyze(f.values, f.grid), f.grid))
    spec = _analyze(f.values, f.grid) * free_multiplier(f.grid, t)
    return RadialField(f.grid, _synthesize(spec, f.grid))


def outer_mass_fraction(values: np.ndarray, grid: RadialGrid, margin: float) -> float:
    """Fraction of the mass at r > r_max * (1 - margin)."""
    w = grid.r**2 * np.abs(values) ** 2
    tot = float(np.sum(w))
    if tot == 0:
        return 0.0
    return float(np.sum(w[grid.r > grid.r_max * (1.0 - margin)]) / tot)


def _record(values, grid, t, mu, densities, store, acc):
    f = RadialField(grid, values)
    acc["t"].append(t)
    acc["mass"].append(mass(f))
    acc["energy"].append(energy(f, mu))
    for name, fn in densities.items():
        acc[name].append(float(fn(f, t)))
    if store:
        acc["snap"].append(np.array(values))


def _assemble(grid, acc, densities, store, mu, aborted, leak) -> EvolutionResult:
    return EvolutionResult(
        grid=grid,
        times=np.array(acc["t"]),
        snapshots=np.array(acc["snap"]) if store else None,
        mass_series=np.array(acc["mass"]),
        energy_series=np.array(acc["energy"]),
        densities={k: np.array(acc[k]) for k in densities},
        mu=mu,
        aborted=aborted,
        boundary_leak=leak,
    )


def evolve_linear_series(
    v0: RadialField,
    times: Sequence[float],
    densities: Mapping[str, Density] | None = None,
    store: bool = True,
    boundary_margin: float = 0.1,
    margin_tol: float | None = None,
) -> EvolutionResult:
    """v(t) = e^{it Laplace} v0 at each requested time.

    With ``store=False`` only the mass/energy series and ``densities`` are
    kept.  ``margin_tol`` (if given) makes a boundary leak above it fatal.
    """
    densities = dict(densities or {})
    times = np.asarray(times, dtype=float)
    grid = v0.grid
    spec0 = _analyze(v0.values, grid)
    acc = {"t": [], "mass": [], "energy": [], "snap": [], **{k: [] for k in densities}}
    leak = 0.0
    for t in times:
        # t = 0 keeps v0 as given, matching the first record of evolve_nls
        values = _synthesize(spec0 * free_multiplier(grid, t), grid) if t != 0 else np.array(v0.values, dtype=np.complex128)
        leak = max(leak, outer_mass_fraction(values, grid, boundary_margin))
        _record(values, grid, float(t), 0, densities, store, acc)
    if margin_tol is not None and leak > margin_tol:
        raise BoundaryError(f"boundary leak {leak:.3e} exceeds {margin_tol:.1e}")
    return _assemble(grid, acc, densities, store, 0, False, leak)


# ---------------------------------------------------------------------------
# nonlinear flow


def dealias_mask(grid: RadialGrid, fraction: float) -> np.ndarray:
    return (grid.rho <= fraction * grid.rho_max).astype(float)


def evolve_nls(
    u0: RadialField,
    cfg: SolverConfig,
    densities: Mapping[str, Density] | None = None,
    store: bool = True,
) -> EvolutionResult:
    """Strang split-step evolution of ``i u_t + Laplace u = mu |u|^4 u``.

    Each step is a half nonlinear phase, an exact linear step with 2/3-rule
    style dealiasing, and a second half phase.  Adjacent half phases between
    snapshot steps are fused.  On a guard trip the run stops and the partial
    result is returned with ``aborted = True``.
    """
    densities = dict(densities or {})
    grid = u0.grid
    mu = cfg.mu
    dt = cfg.dt
    lin = free_multiplier(grid, dt) * dealias_mask(grid, cfg.dealias_fraction)
    acc = {"t": [], "mass": [], "energy": [], "snap": [], **{k: [] for k in densities}}

    u = np.array(u0.values, dtype=np.complex128)
    sup0 = float(np.max(np.abs(u))) or 1.0
    leak = outer_mass_fraction(u, grid, cfg.boundary_margin)
    _record(u, grid, 0.0, mu, densities, store, acc)
    aborted = False
    steps = cfg.steps
    half = 0.5 * dt * mu
    pending_half = False
    for step in range(1, steps + 1):
        if mu:
            tau = 2 * half if pending_half else half
            u = u * np.exp(-1j * tau * np.abs(u) ** 4)
        u = _synthesize(_analyze(u, grid) * lin, grid)
        pending_half = True
        snap = step % cfg.snapshot_stride == 0 or step == steps
        if snap:
            if mu:
                u = u * np.exp(-1j * half * np.abs(u) ** 4)
            pending_half = False
            leak = max(leak, outer_mass_fraction(u, grid, cfg.boundary_margin))
            if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > cfg.guard * sup0:
                aborted = True
                break
            _record(u, grid, step * dt, mu, densities, store, acc)
    if cfg.enforce_margin and leak > cfg.margin_tol and not aborted:
        raise BoundaryError(
            f"boundary leak {leak:.3e} exceeds margin_tol {cfg.margin_tol:.1e}; enlarge r_max"
        )
    return _assemble(grid, acc, densities, store, mu, aborted, leak)


def perturbation_series(u: EvolutionResult, v: EvolutionResult) -> EvolutionResult:
    """w = u - v snapshotwise, with ``hdot1`` (||w||_{Hdot^1}) in the densities."""
    from .transforms import sobolev_norm

    if u.grid != v.grid:
        raise ConfigurationError("runs live on different grids")
    if u.times.shape != v.times.shape or not np.allclose(u.times, v.times, rtol=0, atol=1e-12):
        raise ConfigurationError("runs have different time grids")
    if u.snapshots is None or v.snapshots is None:
        raise ConfigurationError("perturbation series needs stored snapshots")
    w = u.snapshots - v.snapshots
    fields = [RadialField(u.grid, row) for row in w]
    return EvolutionResult(
        grid=u.grid,
        times=u.times.copy(),
        snapshots=w,
        mass_series=np.array([mass(f) for f in fields]),
        energy_series=np.array([energy(f, u.mu) for f in fields]),
        densities={"hdot1": np.array([sobolev_norm(f, 1.0, homogeneous=True) for f in fields])},
        mu=u.mu,
        aborted=u.aborted or v.aborted,
        boundary_leak=max(u.boundary_leak, v.boundary_leak),
    )


def rescale_run(run: EvolutionResult, lam: float) -> EvolutionResult:
    """Critical rescaling u_lam(t, x) = lam^(1/2) u(lam^2 t, lam x).

    Grid-exact: radii are divided by ``lam`` (same node count), values scaled
    by ``lam^(1/2)`` and times divided by ``lam^2``.  Stored densities are
    dropped since they are not scale-covariant in general.
    """
    if not lam > 0:
        raise ConfigurationError("scale factor must be positive")
    if run.snapshots is None:
        raise ConfigurationError("rescaling needs stored snapshots")
    grid = run.grid.zoom(lam)
    snaps = np.sqrt(lam) * run.snapshots
    fields = [RadialField(grid, row) for row in snaps]
    return EvolutionResult(
        grid=grid,
        times=run.times / lam**2,
        snapshots=snaps,
        mass_series=np.array([mass(f) for f in fields]),
        energy_series=np.array([energy(f, run.mu) for f in fields]),
        densities={},
        mu=run.mu,
        aborted=run.aborted,
        boundary_leak=run.boundary_leak,
    )


def geometric_times(t_first: float, t_switch: float, t_end: float, per_decade: int, step: float) -> np.ndarray:
    """0, a geometric ramp from ``t_first`` to ``t_switch``, then uniform ``step`` to ``t_end``."""
    if not 0 < t_first < t_switch <= t_end:
        raise ConfigurationError("need 0 < t_first < t_switch <= t_end")
    decades = np.log10(t_switch / t_first)
    ramp = np.logspace(np.log10(t_first), np.log10(t_switch), int(np.ceil(decades * per_decade)) + 1)
    tail = np.arange(t_switch, t_end + 0.5 * step, step)
    return np.unique(np.concatenate([[0.0], ramp[:-1], tail]))
