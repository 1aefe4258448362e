"""Spatial, spacetime and diagnostic functionals of radial fields and runs.

Spatial integrals use the radial measure ``4 pi r^2 dr`` with the rectangle
rule on the grid (the trapezoid rule with the zero endpoint node at r_max).
Time integrals use the trapezoid rule over snapshot times; an interval whose
endpoints fall between snapshots is closed by linear interpolation of the
spatial norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Iterable, Mapping, Sequence

import numpy as np

from .core import (
    ConfigurationError,
    DomainError,
    RadialField,
    RadialGrid,
    ResolutionError,
    cutoff_geq,
    cutoff_leq,
)
from .transforms import _analyze, _synthesize, radial_derivative, sobolev_norm, sobolev_weight, spectral_l2

if TYPE_CHECKING:  # pragma: no cover
    from .propagator import EvolutionResult

INF = float("inf")
SUPPORTED_P = {1.0, 2.0, 3.0, 4.0, 6.0 / 5.0, 12.0 / 5.0, 6.0, 8.0, 10.0, 12.0, INF}
# minimum snapshot density for time integrals (largest allowed gap)
MAX_TIME_GAP = 1.0 / 8.0
S0_FAMILY = ((INF, 2.0), (8.0, 12.0 / 5.0), (4.0, 3.0), (2.0, 6.0))


def _check_p(p: float, extra: Iterable[float] = ()) -> float:
    p = float(p)
    allowed = SUPPORTED_P | {float(x) for x in extra}
    if not any(np.isclose(p, a, rtol=1e-12, atol=0) or (p == a) for a in allowed):
        raise DomainError(f"unsupported Lebesgue exponent {p}")
    return p


# ---------------------------------------------------------------------------
# spatial functionals


def gradient(f: RadialField) -> np.ndarray:
    """|grad f| = |d f / dr| sampled on the grid (spectral derivative)."""
    return np.abs(radial_derivative(f))


def _lp(samples: np.ndarray, grid: RadialGrid, p: float) -> float:
    a = np.abs(samples)
    if p == INF:
        return float(np.max(a))
    return float((4.0 * np.pi * grid.dr * np.sum(grid.r**2 * a**p)) ** (1.0 / p))


def lebesgue_norm(
    f: RadialField, p: float, derivative: bool = False, extra: Iterable[float] = ()
) -> float:
    """||f||_{L^p} or ||grad f||_{L^p}; p = inf is the grid max."""
    p = _check_p(p, extra)
    samples = radial_derivative(f) if derivative else f.values
    return _lp(samples, f.grid, p)


def mass(f: RadialField) -> float:
    """M = int |f|^2 dx."""
    g = f.grid
    return float(4.0 * np.pi * g.dr * np.sum(g.r**2 * np.abs(f.values) ** 2))


def kinetic(f: RadialField) -> float:
    """int |grad f|^2 dx, evaluated spectrally."""
    return sobolev_norm(f, 1.0, homogeneous=True) ** 2


def potential(f: RadialField) -> float:
    """int |f|^6 dx."""
    g = f.grid
    return float(4.0 * np.pi * g.dr * np.sum(g.r**2 * np.abs(f.values) ** 6))


def energy(f: RadialField, mu: float) -> float:
    """E = 1/2 int |grad f|^2 + mu/6 int |f|^6."""
    return 0.5 * kinetic(f) + mu / 6.0 * potential(f)


def morawetz_density(f: RadialField) -> float:
    """M = Im int (x/|x|) . grad f  conj(f) dx."""
    g = f.grid
    d = radial_derivative(f)
    return float(4.0 * np.pi * g.dr * np.sum(g.r**2 * np.imag(d * np.conj(f.values))))


def action_density(f: RadialField) -> float:
    """int |f|^6 / |x| dx."""
    g = f.grid
    return float(4.0 * np.pi * g.dr * np.sum(g.r * np.abs(f.values) ** 6))


def origin_density(f: RadialField) -> float:
    """|f(0)|^2 with f(0) from the extrapolated origin node."""
    return float(abs(f.values[0]) ** 2)


# ---------------------------------------------------------------------------
# time series helpers


@dataclass(frozen=True, eq=False)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ConfigurationError("times and values must be 1D of equal length")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("time series contains non-finite values")
        if np.any(np.diff(t) <= 0):
            raise ConfigurationError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


def density_key(p: float, derivative: bool = False) -> str:
    """Name of a streamed spatial-norm density."""
    tag = "inf" if p == INF else f"{float(p):.6g}"
    return f"L{tag}{'_grad' if derivative else ''}"


def spatial_density(p: float, derivative: bool = False) -> Callable[[RadialField, float], float]:
    """Density callable for :func:`radnls.propagator.evolve_nls` streaming."""
    p = _check_p(p)

    def fn(f: RadialField, t: float) -> float:
        return lebesgue_norm(f, p, derivative)

    return fn


def _clip_series(times: np.ndarray, values: np.ndarray, a: float, b: float):
    """Restrict (times, values) to [a, b], interpolating the endpoints."""
    if a < times[0] - 1e-12 or b > times[-1] + 1e-12 or b < a:
        raise ConfigurationError(
            f"interval [{a}, {b}] not inside covered range [{times[0]}, {times[-1]}]"
        )
    a = max(a, times[0])
    b = min(b, times[-1])
    inner = (times > a) & (times < b)
    t = np.concatenate([[a], times[inner], [b]]) if b > a else np.array([a])
    v = np.interp(t, times, values)
    return t, v


def _check_density(t: np.ndarray):
    if t.size > 1 and np.max(np.diff(t)) > MAX_TIME_GAP * (1 + 1e-9):
        raise ResolutionError(
            f"snapshot gap {np.max(np.diff(t)):.4g} exceeds {MAX_TIME_GAP} (need >= 8 per unit time)"
        )


def time_norm(times: np.ndarray, values: np.ndarray, q: float, interval=None, check: bool = True) -> float:
    """(int |values|^q dt)^(1/q) over ``interval`` (trapezoid); q = inf is the max."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    a, b = interval if interval is not None else (times[0], times[-1])
    t, v = _clip_series(times, values, a, b)
    if q == INF:
        return float(np.max(np.abs(v)))
    if check:
        _check_density(t)
    if t.size == 1:
        return 0.0
    return float(np.trapezoid(np.abs(v) ** q, t) ** (1.0 / q))


# ---------------------------------------------------------------------------
# mixed norms


@dataclass(frozen=True)
class MixedNormSpec:
    """L^q_t L^p_x over ``interval`` (None = whole run), optionally of grad u."""

    q: float
    p: float
    interval: tuple | None = None
    derivative: bool = False

    def __post_init__(self):
        if not (self.q == INF or self.q >= 1):
            raise DomainError("time exponent q must be >= 1 or inf")
        _check_p(self.p)


def spatial_series(run: "EvolutionResult", p: float, derivative: bool = False) -> np.ndarray:
    """||u(t)||_{L^p} per snapshot, from streamed densities when available."""
    key = density_key(p, derivative)
    if key in run.densities:
        return np.asarray(run.densities[key], dtype=float)
    if run.snapshots is None:
        raise ConfigurationError(f"streamed run lacks density {key!r}")
    return np.array([lebesgue_norm(f, p, derivative) for f in run.fields()])


def mixed_norm(run: "EvolutionResult", spec: MixedNormSpec) -> float:
    """(int ||u(t)||_{L^p}^q dt)^(1/q) by snapshot trapezoid; q = inf is the max."""
    values = spatial_series(run, spec.p, spec.derivative)
    return time_norm(run.times, values, spec.q, spec.interval)


def s_norm(run: "EvolutionResult", interval=None) -> float:
    """||grad u||_{L^2 L^6} + ||u||_{L^8 L^12}."""
    return mixed_norm(run, MixedNormSpec(2, 6, interval, True)) + mixed_norm(
        run, MixedNormSpec(8, 12, interval)
    )


def s0_strichartz_norm(run: "EvolutionResult", interval=None) -> tuple[float, dict]:
    """Max over the admissible pairs (q, r) in {(inf,2), (8,12/5), (4,3), (2,6)}."""
    terms = {}
    for q, r in S0_FAMILY:
        terms[f"L{'inf' if q == INF else int(q)}L{r:.6g}"] = mixed_norm(run, MixedNormSpec(q, r, interval))
    return max(terms.values()), terms


Y_TERMS = (
    ("grad_L2L6", 2.0, 6.0, True, -5.0 / 6.0),
    ("L8L12", 8.0, 12.0, False, -7.0 / 24.0),
    ("LinfL6", INF, 6.0, False, -1.0 / 3.0),
    ("L2Linf", 2.0, INF, False, 0.0),
)


@dataclass(frozen=True)
class WeightedNorm:
    """Weighted sum of norm terms with per-term exponents of N."""

    total: float
    terms: dict
    weights: dict
    exponents: dict
    raw: dict


def y_weights(N: float, s0: float) -> dict:
    return {name: float(N) ** (s0 + shift) for name, _, _, _, shift in Y_TERMS}


def y_norm(run: "EvolutionResult", N: float, s0: float, interval=None) -> WeightedNorm:
    """N^(s0-5/6)||grad v||_{L2L6} + N^(s0-7/24)||v||_{L8L12} + N^(s0-1/3)||v||_{LinfL6} + N^s0 ||v||_{L2Linf}."""
    raw = {
        name: mixed_norm(run, MixedNormSpec(q, p, interval, d)) for name, q, p, d, _ in Y_TERMS
    }
    w = y_weights(N, s0)
    terms = {k: w[k] * raw[k] for k in raw}
    exps = {name: s0 + shift for name, _, _, _, shift in Y_TERMS}
    return WeightedNorm(float(sum(terms.values())), terms, w, exps, raw)


def hdot1_series(run: "EvolutionResult") -> np.ndarray:
    if "hdot1" in run.densities:
        return np.asarray(run.densities["hdot1"], dtype=float)
    if run.snapshots is None:
        raise ConfigurationError("streamed run lacks the hdot1 density")
    return np.array([sobolev_norm(f, 1.0, homogeneous=True) for f in run.fields()])


def x_norm(run: "EvolutionResult", N: float, s0: float, interval=None) -> WeightedNorm:
    """N^(3(s0-1)) ||h||_{L^inf Hdot^1} + N^(9/8 (s0-1)) ||h||_{L^8_{t,x}}."""
    raw = {
        "LinfHdot1": time_norm(run.times, hdot1_series(run), INF, interval),
        "L8L8": mixed_norm(run, MixedNormSpec(8, 8, interval)),
    }
    exps = {"LinfHdot1": 3.0 * (s0 - 1.0), "L8L8": 9.0 / 8.0 * (s0 - 1.0)}
    w = {k: float(N) ** e for k, e in exps.items()}
    terms = {k: w[k] * raw[k] for k in raw}
    return WeightedNorm(float(sum(terms.values())), terms, w, exps, raw)


# ---------------------------------------------------------------------------
# region-masked norms


def region_mask(r: np.ndarray, delta: float, k: int, t: float, side: str) -> np.ndarray:
    """chi_{<=R} (inside) or chi_{>=R} (outside), R = delta (1 + 2^k t)."""
    if not delta > 0:
        raise DomainError("delta must be positive")
    R = delta * (1.0 + 2.0**k * t)
    if side == "inside":
        return cutoff_leq(R, r)
    if side == "outside":
        return cutoff_geq(R, r)
    raise DomainError(f"side must be 'inside' or 'outside', got {side!r}")


def region_key(delta: float, k: int, side: str, p: float, derivative: bool = False) -> str:
    return f"{side}_d{delta:.6g}_k{k}_{density_key(p, derivative)}"


def region_density(delta: float, k: int, side: str, p: float, derivative: bool = False):
    """Density callable: ||mask_t u(t)||_{L^p} (or of grad(mask_t u))."""
    p = _check_p(p)

    def fn(f: RadialField, t: float) -> float:
        g = RadialField(f.grid, f.values * region_mask(f.grid.r, delta, k, t, side))
        return lebesgue_norm(g, p, derivative)

    return fn


def region_masked_norm(
    run: "EvolutionResult",
    delta: float,
    k: int,
    side: str,
    spec: MixedNormSpec,
) -> float:
    """Mixed norm of chi_{<=/>= delta(1 + 2^k t)} u, mask recomputed per snapshot."""
    key = region_key(delta, k, side, spec.p, spec.derivative)
    if key in run.densities:
        values = np.asarray(run.densities[key], dtype=float)
    else:
        if run.snapshots is None:
            raise ConfigurationError(f"streamed run lacks density {key!r}")
        fn = region_density(delta, k, side, spec.p, spec.derivative)
        values = np.array([fn(f, t) for f, t in zip(run.fields(), run.times)])
    return time_norm(run.times, values, spec.q, spec.interval)


# ---------------------------------------------------------------------------
# Morawetz ledger


@dataclass(frozen=True, eq=False)
class MorawetzReport:
    """M(t) series, the action int int |u|^6/|x| and the origin term.

    ``residual = M(T) - M(0) - (2/3) action`` is the quantity bounded below by
    zero for a pure defocusing run.  For radial solutions the exact balance is

        M(T) - M(0) = (4/3) action + 4 pi int |u(t,0)|^2 dt,

    and ``identity_defect`` is the discrete mismatch of that balance.
    """

    M_series: TimeSeries
    action: float
    origin_term: float
    residual: float
    identity_defect: float


# d/dt M = NONLINEAR_WEIGHT int |u|^6/|x| + ORIGIN_WEIGHT |u(t,0)|^2 for radial defocusing data
NONLINEAR_WEIGHT = 4.0 / 3.0
ORIGIN_WEIGHT = 4.0 * np.pi


def _run_density(run: "EvolutionResult", key: str, fn) -> np.ndarray:
    if key in run.densities:
        return np.asarray(run.densities[key], dtype=float)
    if run.snapshots is None:
        raise ConfigurationError(f"streamed run lacks density {key!r}")
    return np.array([fn(f) for f in run.fields()])


MORAWETZ_DENSITIES = {
    "morawetz_M": lambda f, t: morawetz_density(f),
    "morawetz_action": lambda f, t: action_density(f),
    "origin_sq": lambda f, t: origin_density(f),
}


def morawetz_report(run: "EvolutionResult") -> MorawetzReport:
    t = run.times
    _check_density(t)
    M = _run_density(run, "morawetz_M", morawetz_density)
    A = _run_density(run, "morawetz_action", action_density)
    O = _run_density(run, "origin_sq", origin_density)
    action = float(np.trapezoid(A, t)) if t.size > 1 else 0.0
    origin = ORIGIN_WEIGHT * float(np.trapezoid(O, t)) if t.size > 1 else 0.0
    residual = float(M[-1] - M[0] - 2.0 / 3.0 * action)
    defect = float(M[-1] - M[0] - run.mu * NONLINEAR_WEIGHT * action - origin)
    return MorawetzReport(TimeSeries(t, M), action, origin, residual, defect)


# ---------------------------------------------------------------------------
# scattering profile


@dataclass(frozen=True, eq=False)
class ScatteringReport:
    u_plus: RadialField
    convergence: TimeSeries
    horizon_warning: bool
    integrand_norms: TimeSeries


# the horizon is flagged when the Duhamel integrand at T exceeds this share of its peak
HORIZON_FRACTION = 1e-2


def scattering_profile(
    run: "EvolutionResult", mu: float, f_plus: RadialField, dealias_fraction: float | None = 2.0 / 3.0
) -> ScatteringReport:
    """u_+ = f_+ - i mu int_0^T e^{-is Laplace}(|u|^4 u)(s) ds by snapshot trapezoid.

    ``convergence(t) = ||u(t) - e^{it Laplace} u_+||_{H^1}``, evaluated
    spectrally.  The Duhamel integrand is dealiased with the solver's mask.
    """
    if run.snapshots is None:
        raise ConfigurationError("scattering profile needs stored snapshots")
    grid = run.grid
    rho = grid.rho
    t = run.times
    mask = np.ones(grid.n) if dealias_fraction is None else (rho <= dealias_fraction * grid.rho_max)
    wts = np.zeros(t.size)
    if t.size > 1:
        dt = np.diff(t)
        wts[:-1] += dt / 2
        wts[1:] += dt / 2
    acc = np.zeros(grid.n, dtype=np.complex128)
    h1 = sobolev_weight(rho, 1.0)
    integrand = np.zeros(t.size)
    for i, s in enumerate(t):
        u = run.snapshots[i]
        nl = _analyze(np.abs(u) ** 4 * u, grid) * mask * np.exp(4j * np.pi**2 * rho**2 * s)
        integrand[i] = spectral_l2(nl, grid, h1)
        acc += wts[i] * nl
    spec_plus = _analyze(f_plus.values, grid) - 1j * mu * acc
    u_plus = RadialField(grid, _synthesize(spec_plus, grid))
    conv = np.empty(t.size)
    for i, s in enumerate(t):
        diff = _analyze(run.snapshots[i], grid) - spec_plus * np.exp(-4j * np.pi**2 * rho**2 * s)
        conv[i] = spectral_l2(diff, grid, h1)
    peak = float(np.max(integrand)) if integrand.size else 0.0
    warn = bool(peak > 0 and integrand[-1] > HORIZON_FRACTION * peak)
    return ScatteringReport(u_plus, TimeSeries(t, conv), warn, TimeSeries(t, integrand))


# ---------------------------------------------------------------------------
# exponent fitting


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual: float


def fit_exponent(points: Sequence[tuple[float, float]]) -> ExponentFit:
    """Least squares of log(value) on log(N); residual is the RMS misfit."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise DomainError("need at least three (N, value) points")
    if np.any(pts <= 0):
        raise DomainError("fit_exponent needs positive abscissae and values")
    x = np.log(pts[:, 0])
    y = np.log(pts[:, 1])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.sqrt(np.mean((A @ np.array([slope, intercept]) - y) ** 2)))
    return ExponentFit(float(slope), float(intercept), res)


# ---------------------------------------------------------------------------
# threshold interval splitting


@dataclass(frozen=True)
class IntervalSplit:
    """Boundaries t_0 < ... < t_J and the per-interval norm values."""

    boundaries: tuple
    eta: float
    values: tuple

    @property
    def J(self) -> int:
        return len(self.boundaries) - 1


def split_by_threshold(
    density: TimeSeries | Sequence[tuple[TimeSeries, float]], eta: float
) -> IntervalSplit:
    """Greedy left-to-right splitting by a norm threshold.

    ``density`` is either one series accumulated linearly, or a list of
    ``(series, q)`` pairs where ``series`` holds ||.||^q integrands (for the
    S-norm: (||grad u||_{L^6}^2, 2) and (||u||_{L^12}^8, 8)).  An interval is
    closed once any term reaches ``int series >= eta^q``; the interval's norm
    value is ``max_i (int series_i)^(1/q_i)``, which is ``eta`` on every closed
    interval.  Boundaries are placed by linear interpolation of the running
    integral.
    """
    if not eta > 0:
        raise DomainError("eta must be positive")
    terms = [(density, 1.0)] if isinstance(density, TimeSeries) else list(density)
    t = terms[0][0].times
    for ts, q in terms:
        if ts.times.shape != t.shape or not np.allclose(ts.times, t, rtol=0, atol=0):
            raise ConfigurationError("all density terms must share one time grid")
        if np.any(ts.values < 0):
            raise DomainError("densities must be non-negative")
    cum = []
    for ts, q in terms:
        c = np.zeros(t.size)
        c[1:] = np.cumsum(0.5 * (ts.values[1:] + ts.values[:-1]) * np.diff(t))
        cum.append((c, float(q)))

    def at(c, s):
        return float(np.interp(s, t, c))

    bounds = [float(t[0])]
    values = []
    start = float(t[0])
    while True:
        hit = np.inf
        for c, q in cum:
            target = at(c, start) + eta**q
            idx = int(np.searchsorted(c, target, side="left"))
            if idx < t.size and c[idx] >= target and target > at(c, start):
                j = max(idx - 1, 0)
                if c[idx] == c[j]:
                    s = float(t[idx])
                else:
                    s = float(t[j] + (target - c[j]) / (c[idx] - c[j]) * (t[idx] - t[j]))
                hit = min(hit, max(s, start))
        if not np.isfinite(hit) or hit >= t[-1]:
            break
        values.append(max((at(c, hit) - at(c, start)) ** (1.0 / q) for c, q in cum))
        bounds.append(hit)
        start = hit
    if bounds[-1] < t[-1]:
        values.append(max(max(at(c, float(t[-1])) - at(c, start), 0.0) ** (1.0 / q) for c, q in cum))
        bounds.append(float(t[-1]))
    return IntervalSplit(tuple(bounds), float(eta), tuple(values))


def s_norm_split(run: "EvolutionResult", eta: float) -> IntervalSplit:
    """Split a run by the S-norm power-accumulation rule."""
    g6 = spatial_series(run, 6, True)
    u12 = spatial_series(run, 12, False)
    return split_by_threshold(
        [(TimeSeries(run.times, g6**2), 2.0), (TimeSeries(run.times, u12**8), 8.0)], eta
    )


# ---------------------------------------------------------------------------
# inequality harness


@dataclass(frozen=True)
class InequalityRow:
    field: str
    inequality: str
    lhs: float
    rhs: float
    ratio: float
    flagged: bool


def weighted_lebesgue(f: RadialField, alpha: float, q: float) -> float:
    """|| |x|^alpha f ||_{L^q} (origin node skipped for negative alpha).

    When ``2 + alpha q = 0`` the radial integrand r^(2 + alpha q) |f|^q stays
    finite at the origin and enters with the trapezoid half weight.
    """
    g = f.grid
    w = np.zeros(g.n)
    if alpha < 0:
        w[1:] = g.r[1:] ** alpha
    else:
        w = g.r**alpha
    norm = _lp(w * f.values, g, q)
    if q != INF and alpha < 0 and np.isclose(2.0 + alpha * q, 0.0):
        origin = 0.5 * 4.0 * np.pi * g.dr * abs(f.values[0]) ** q
        norm = float((norm**q + origin) ** (1.0 / q))
    return norm


def fractional_lp(f: RadialField, s: float, p: float) -> float:
    """|| |grad|^s f ||_{L^p} via the spectral multiplier (2 pi rho)^s."""
    spec = _analyze(f.values, f.grid) * sobolev_weight(f.grid.rho, s, homogeneous=True)
    return _lp(_synthesize(spec, f.grid), f.grid, p)


def radial_sobolev_valid(alpha: float, q: float, s: float, p: float, d: int = 3) -> bool:
    """Parameter region of the radial Sobolev inequality."""
    iq = 0.0 if q == INF else 1.0 / q
    ip = 0.0 if p == INF else 1.0 / p
    if not (alpha > -d * iq and iq <= ip <= iq + s and 1 <= p and 1 <= q and 0 < s < d):
        return False
    if not np.isclose(alpha + s, d * (ip - iq)):
        return False
    equalities = [p == 1, p == INF, q == 1, q == INF, np.isclose(ip, iq + s)]
    return sum(bool(e) for e in equalities) <= 1


DEFAULT_SOBOLEV_TUPLES = ((0.5, INF, 1.0, 2.0), (0.0, 6.0, 1.0, 2.0), (0.5, 6.0, 0.5, 2.0))


def inequality_report(
    corpus: Mapping[str, RadialField],
    sobolev_tuples: Sequence[tuple] = DEFAULT_SOBOLEV_TUPLES,
    hardy_p: Sequence[float] = (2.0,),
    budget: float = 20.0,
) -> list[InequalityRow]:
    """LHS, RHS and ratio of the Hardy and radial Sobolev inequalities per field.

    Tuples are ``(alpha, q, s, p)`` for || |x|^alpha u ||_{L^q} <= C || |grad|^s u ||_{L^p};
    tuples outside the validity region raise :class:`DomainError`.  A zero
    field gets ratio 0 by convention.
    """
    for tup in sobolev_tuples:
        if not radial_sobolev_valid(*tup):
            raise DomainError(f"radial Sobolev tuple {tup} outside the validity region")
    for p in hardy_p:
        if not 1 < p < 3:
            raise DomainError("Hardy inequality needs 1 < p < 3")
    rows = []
    for name, f in corpus.items():
        for p in hardy_p:
            lhs = weighted_lebesgue(f, -1.0, p)
            rhs = _lp(radial_derivative(f), f.grid, p)
            rows.append(_row(name, f"hardy(p={p:g})", lhs, rhs, budget))
        for a, q, s, p in sobolev_tuples:
            lhs = weighted_lebesgue(f, a, q)
            rhs = fractional_lp(f, s, p)
            label = f"radial_sobolev(alpha={a:g},q={'inf' if q == INF else f'{q:g}'},s={s:g},p={p:g})"
            rows.append(_row(name, label, lhs, rhs, budget))
    return rows


def _row(name, label, lhs, rhs, budget) -> InequalityRow:
    if lhs == 0 and rhs == 0:
        ratio = 0.0
    else:
        ratio = lhs / rhs if rhs > 0 else INF
    return InequalityRow(name, label, float(lhs), float(rhs), float(ratio), bool(ratio > budget))
