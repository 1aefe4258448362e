"""Incoming/outgoing wave decomposition of radial data.

The kernels

    J(s) = int_0^{pi/2} exp(2 pi i s sin(theta)) cos(theta) dtheta
         = (exp(2 pi i s) - 1) / (2 pi i s),
    K(s) = chi_{>=2}(s) * i / (2 pi s),

split the radial sine kernel sin(2 pi s) / (pi s) = J(s) + J(-s) into an
outgoing piece J - K and an incoming piece J(-.) + K.  With the bare kernels the
two components sum to ``c * f`` with ``c = 1 / (2 pi)``; the constant
``CALIBRATION = 2 pi`` is folded into both kernels so that ``f_out + f_in = f``.
:func:`measure_calibration` recovers ``c`` independently by adaptive quadrature.

Fast path
---------
Writing ``Q(rho) = rho * m(rho) * FT(r^beta f)(rho)`` for a spectral mask ``m``,

    f_out(r) = r^(-beta-1) [S(r) - i (C(r) - X(r))],
    f_in(r)  = r^(-beta-1) [S(r) + i (C(r) - X(r))],

with ``S = int Q sin(2 pi r rho)``, ``C = int Q cos(2 pi r rho)`` and
``X = int Q chi_{<=2}(r rho)``.  On the conjugate grids ``r_j rho_k = jk/(2n)``,
so ``S`` and ``C`` are a DST-I and a DCT-I, and ``X`` is a prefix sum over the
plateau ``jk <= 4n`` plus an explicit sum over the thin transition band
``4n < jk < 4.4n``.  The power ``alpha`` cancels between the deformed transform
and the kernel weight.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .core import (
    DomainError,
    InfeasibleError,
    PreconditionError,
    RadialField,
    RadialGrid,
    ResolutionError,
    TRANSITION,
    cutoff_geq,
    cutoff_leq,
    extrapolate_origin,
)
from .transforms import (
    DecompositionParams,
    _analyze,
    _cosine,
    _sine,
    deformed_fourier,
    lp_multiplier,
    lp_project,
    sobolev_norm,
)

CALIBRATION = 2.0 * np.pi
DIRECTIONS = ("out", "in")

# relative spectral mass allowed above rho_max / 2
SPECTRAL_TAIL_TOL = 1e-2


# ---------------------------------------------------------------------------
# kernels


def kernel_J(s):
    """J(s) = (exp(2 pi i s) - 1) / (2 pi i s), with J(0) = 1."""
    s = np.asarray(s, dtype=float)
    z = 2j * np.pi * s
    small = np.abs(z) < 0.05
    out = np.empty(s.shape, dtype=np.complex128)
    zl = z[~small]
    out[~small] = (np.exp(zl) - 1.0) / zl
    # Taylor series sum z^m / (m+1)!; nine terms reach roundoff for |z| < 0.05
    zs = z[small]
    acc = np.zeros_like(zs)
    for m in range(9, -1, -1):
        acc = acc * zs / (m + 2) + 1.0
    out[small] = acc
    return out[()] if out.ndim == 0 else out


def kernel_J_quad(s: float) -> complex:
    """J(s) by adaptive quadrature of the defining theta-integral."""
    w = 2.0 * np.pi * s
    re = integrate.quad(lambda th: np.cos(w * np.sin(th)) * np.cos(th), 0, np.pi / 2,
                        epsabs=1e-14, epsrel=1e-13, limit=400)[0]
    im = integrate.quad(lambda th: np.sin(w * np.sin(th)) * np.cos(th), 0, np.pi / 2,
                        epsabs=1e-14, epsrel=1e-13, limit=400)[0]
    return complex(re, im)


def kernel_K(s):
    """K(s) = chi_{>=2}(s) * i / (2 pi s) for s >= 0 (zero on s <= 2)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("kernel_K is defined for non-negative arguments")
    out = np.zeros(s.shape, dtype=np.complex128)
    live = s > 2.0
    out[live] = cutoff_geq(2.0, s[live]) * 1j / (2.0 * np.pi * s[live])
    return out[()] if out.ndim == 0 else out


def outgoing_kernel(s):
    """J(s) - K(s) for s >= 0."""
    return kernel_J(s) - kernel_K(s)


def incoming_kernel(s):
    """J(-s) + K(s) for s >= 0."""
    return kernel_J(-np.asarray(s, dtype=float)) + kernel_K(s)


def measure_calibration(radii=(0.3, 0.7, 1.1, 1.6), beta: float = 0.0) -> float:
    """Measure c in ``f_out + f_in = c f`` for the uncalibrated kernels.

    Uses ``f = exp(-pi r^2)`` whose transform is known in closed form and
    integrates the kernel sum against it by adaptive quadrature (no grids).
    Only ``beta = 0`` admits the closed-form spectrum; ``alpha`` cancels.
    """
    if beta != 0.0:
        raise DomainError("the calibration oracle uses beta = 0")
    ratios = []
    for r in radii:

        def integrand(rho, part):
            k = kernel_J(rho * r) + kernel_J(-rho * r)
            val = k * rho**2 * np.exp(-np.pi * rho**2)
            return val.real if part == 0 else val.imag

        re = integrate.quad(integrand, 0, 12, args=(0,), epsabs=1e-15, epsrel=1e-13, limit=500)[0]
        ratios.append(re / np.exp(-np.pi * r**2))
    return float(np.mean(ratios))


# ---------------------------------------------------------------------------
# fast component evaluation


def band_mask(rho: np.ndarray, k_lo: int, k_hi: int) -> np.ndarray:
    """sum_{j=k_lo..k_hi} chi_{2^j}(rho) = chi_{<=2^(k_hi+1)} - chi_{<=2^k_lo}."""
    if k_lo > k_hi:
        raise DomainError(f"empty band {k_lo}..{k_hi}")
    return cutoff_leq(2.0 ** (k_hi + 1), rho) - cutoff_leq(2.0**k_lo, rho)


def _plateau_sum(Q: np.ndarray, n: int) -> np.ndarray:
    """X_j = sum_k chi_{<=2}(jk / (2n)) Q_k for j = 0..n-1."""
    X = np.zeros(n, dtype=np.complex128)
    csum = np.cumsum(Q)
    j = np.arange(1, n)
    # plateau jk <= 4n
    k_plat = np.minimum((4 * n) // j, n - 1)
    X[1:] = csum[k_plat]
    X[0] = csum[-1]
    # transition 4n < jk < 4.4n (exclusive ends give weights in (0, 1))
    k_lo = k_plat + 1
    k_hi = np.minimum(np.ceil(TRANSITION * 4 * n / j).astype(np.int64) - 1, n - 1)
    counts = np.maximum(k_hi - k_lo + 1, 0)
    total = int(counts.sum())
    if total:
        rows = np.repeat(j, counts)
        starts = np.repeat(k_lo - np.cumsum(counts) + counts, counts)
        ks = np.arange(total) + starts
        w = cutoff_leq(2.0, rows * ks / (2.0 * n))
        np.add.at(X, rows, w * Q[ks])
    return X


def _weighted_spectrum(f: RadialField, p: DecompositionParams) -> np.ndarray:
    """rho * FT(r^beta f)(rho), via the deformed transform."""
    spec = deformed_fourier(f, p).values
    rho = f.grid.rho
    out = np.zeros_like(spec)
    out[1:] = rho[1:] ** (1.0 - p.alpha) * spec[1:]
    return out


def spectral_tail_fraction(spectrum: np.ndarray, grid: RadialGrid) -> float:
    """Fraction of sum rho^2 |F|^2 carried above rho_max / 2."""
    rho = grid.rho
    w = rho**2 * np.abs(spectrum) ** 2
    tot = float(np.sum(w))
    if tot == 0:
        return 0.0
    return float(np.sum(w[rho > grid.rho_max / 2]) / tot)


def _check_resolution(rhoF: np.ndarray, grid: RadialGrid, tol: float | None):
    if tol is None:
        return
    spec = rhoF / np.maximum(grid.rho, grid.drho)
    frac = spectral_tail_fraction(spec, grid)
    if frac > tol:
        w = np.cumsum(grid.rho**2 * np.abs(spec) ** 2)
        band = float(grid.rho[np.searchsorted(w, (1.0 - tol) * w[-1])])
        raise ResolutionError(
            f"input spectrum carries relative mass {frac:.3e} above rho_max/2 "
            f"(allowed {tol:.1e}); its {1 - tol:.0%} bandwidth {band:.4g} needs "
            f"rho_max >= {2 * band:.4g}, i.e. dr <= {1 / (4 * band):.4g} (now {grid.dr:.4g})"
        )


def _components(
    f: RadialField,
    p: DecompositionParams,
    mask: np.ndarray | None,
    resolution_tol: float | None,
):
    rhoF = _weighted_spectrum(f, p)
    _check_resolution(rhoF, f.grid, resolution_tol)
    return _components_from_spectrum(rhoF, f.grid, p, mask)


def _components_from_spectrum(rhoF: np.ndarray, grid: RadialGrid, p: DecompositionParams, mask: np.ndarray | None):
    n = grid.n
    Q = rhoF if mask is None else rhoF * mask
    S = grid.drho * _sine(Q)
    CX = grid.drho * (_cosine(Q) - _plateau_sum(Q, n))
    r = grid.r
    scale = np.zeros(n)
    scale[1:] = r[1:] ** (-p.beta - 1.0)
    out = scale * (S - 1j * CX)
    inc = scale * (S + 1j * CX)
    out[0] = extrapolate_origin(out)
    inc[0] = extrapolate_origin(inc)
    return out, inc


def _component(f, p, direction, mask=None, resolution_tol=SPECTRAL_TAIL_TOL) -> RadialField:
    if direction not in DIRECTIONS:
        raise DomainError(f"direction must be 'out' or 'in', got {direction!r}")
    out, inc = _components(f, p, mask, resolution_tol)
    return RadialField(f.grid, out if direction == "out" else inc)


def outgoing_component(
    f: RadialField, p: DecompositionParams, resolution_tol: float | None = SPECTRAL_TAIL_TOL
) -> RadialField:
    """Calibrated outgoing component f_out.

    Raises :class:`ResolutionError` when the deformed spectrum of ``f`` carries
    more than ``resolution_tol`` of its mass above rho_max / 2.
    """
    return _component(f, p, "out", None, resolution_tol)


def incoming_component(
    f: RadialField, p: DecompositionParams, resolution_tol: float | None = SPECTRAL_TAIL_TOL
) -> RadialField:
    """Calibrated incoming component f_in (see :func:`outgoing_component`)."""
    return _component(f, p, "in", None, resolution_tol)


def split_components(
    f: RadialField, p: DecompositionParams, resolution_tol: float | None = SPECTRAL_TAIL_TOL
) -> tuple[RadialField, RadialField]:
    """(f_out, f_in) from one shared transform."""
    out, inc = _components(f, p, None, resolution_tol)
    return RadialField(f.grid, out), RadialField(f.grid, inc)


def component_by_kernels(
    f: RadialField,
    p: DecompositionParams,
    direction: str,
    nodes,
    mask: np.ndarray | None = None,
) -> np.ndarray:
    """Direct kernel quadrature of a component at selected node indices.

    Evaluates ``CAL * r^-beta * sum_k kernel(rho_k r) rho_k^(2-alpha) Ff(rho_k) drho``
    with the kernels :func:`outgoing_kernel` / :func:`incoming_kernel`.  Costs
    O(n) per node; used as an independent check of the fast path.
    """
    grid = f.grid
    nodes = np.atleast_1d(np.asarray(nodes, dtype=int))
    if np.any(nodes < 1) or np.any(nodes >= grid.n):
        raise DomainError("kernel quadrature needs interior nodes 1..n-1")
    spec = deformed_fourier(f, p).values[1:]
    rho = grid.rho[1:]
    weight = rho ** (2.0 - p.alpha) * spec
    if mask is not None:
        weight = weight * mask[1:]
    kern = outgoing_kernel if direction == "out" else incoming_kernel
    if direction not in DIRECTIONS:
        raise DomainError(f"direction must be 'out' or 'in', got {direction!r}")
    out = np.empty(nodes.size, dtype=np.complex128)
    for i, j in enumerate(nodes):
        r = grid.r[j]
        out[i] = CALIBRATION * r ** (-p.beta) * grid.drho * np.sum(kern(rho * r) * weight)
    return out


# ---------------------------------------------------------------------------
# banded components


def banded_component(
    f: RadialField,
    k_lo: int,
    k_hi: int,
    direction: str,
    p: DecompositionParams,
    resolution_tol: float | None = SPECTRAL_TAIL_TOL,
) -> RadialField:
    """Component with the band mask sum_{j=k_lo..k_hi} chi_{2^j}(rho) in the kernel."""
    mask = band_mask(f.grid.rho, k_lo, k_hi)
    return _component(f, p, direction, mask, resolution_tol)


def band_remainder(
    f: RadialField,
    k: int,
    p: DecompositionParams,
    direction: str = "out",
) -> RadialField:
    """h_k: component of P_{2^k}(chi_{>=1} f) minus its (k-1..k+1)-banded version.

    Evaluated directly with the complementary mask ``1 - band_mask(k-1, k+1)``
    so that no cancellation between two O(1) fields occurs.  With ``beta = 0``
    the spectrum of P_{2^k} g sits inside the band and h_k vanishes identically;
    a nonzero ``beta`` spreads it.
    """
    if k < 0:
        raise DomainError("band index k must be non-negative")
    if direction not in DIRECTIONS:
        raise DomainError(f"direction must be 'out' or 'in', got {direction!r}")
    grid = f.grid
    mask = 1.0 - band_mask(grid.rho, k - 1, k + 1)
    if p.beta == 0:
        # the deformed spectrum of P_{2^k} g is then exactly chi_{2^k} times that of g;
        # skipping the round trip keeps h_k free of transform roundoff
        far = f.apply(lambda r: cutoff_geq(1.0, r))
        rhoF = _weighted_spectrum(far, p) * lp_multiplier(grid, "band", 2.0**k)
    else:
        rhoF = _weighted_spectrum(band_piece(f, k), p)
    out, inc = _components_from_spectrum(rhoF, grid, p, mask)
    return RadialField(grid, out if direction == "out" else inc)


def band_piece(f: RadialField, k: int) -> RadialField:
    """P_{2^k}(chi_{>=1} f)."""
    return lp_project(f.apply(lambda r: cutoff_geq(1.0, r)), "band", 2.0**k)


def band_remainder_ratio(f: RadialField, k: int, p: DecompositionParams, direction: str = "out") -> float:
    """||h_k||_{H^2} / ||P_{2^k} chi_{>=1} f||_{L^2}."""
    h = band_remainder(f, k, p, direction)
    base = sobolev_norm(band_piece(f, k), 0.0)
    if base == 0:
        return 0.0
    return sobolev_norm(h, 2.0) / base


# ---------------------------------------------------------------------------
# modified components and data splitting


@dataclass(frozen=True, eq=False)
class SplitOutput:
    """``out``/``in_`` with ``reconstruction_error = ||out + in_ - f|| / ||f||``."""

    out: RadialField
    in_: RadialField
    reconstruction_error: float


def l2_norm(f: RadialField) -> float:
    g = f.grid
    return float(np.sqrt(4.0 * np.pi * g.dr * np.sum(g.r**2 * np.abs(f.values) ** 2)))


def relative_error(approx: RadialField, exact: RadialField) -> float:
    den = l2_norm(exact)
    num = l2_norm(approx - exact)
    return num / den if den > 0 else num


def component_split(
    f: RadialField, p: DecompositionParams, resolution_tol: float | None = SPECTRAL_TAIL_TOL
) -> SplitOutput:
    """(f_out, f_in) with the reconstruction error recorded."""
    out, inc = split_components(f, p, resolution_tol)
    return SplitOutput(out, inc, relative_error(out + inc, f))


def modified_components(
    f: RadialField, p: DecompositionParams, resolution_tol: float | None = SPECTRAL_TAIL_TOL
) -> SplitOutput:
    """Modified components f_+ and f_-.

    f_+/- = P_{<=1} f / 2 + P_{>=1}(chi_{<=eps0} f) / 2 + (P_{>=1}(chi_{>=eps0} f))_{out/in}.
    """
    eps = p.epsilon0
    low = lp_project(f, "leq", 1.0)
    near = lp_project(f.apply(lambda r: cutoff_leq(eps, r)), "geq", 1.0)
    far = lp_project(f.apply(lambda r: cutoff_geq(eps, r)), "geq", 1.0)
    out, inc = split_components(far, p, resolution_tol)
    common = 0.5 * (low + near)
    f_plus = common + out
    f_minus = common + inc
    return SplitOutput(f_plus, f_minus, relative_error(f_plus + f_minus, f))


def tail_norm(f: RadialField, N: float, s0: float) -> float:
    """||P_{>=N} chi_{>=1} f||_{H^s0}."""
    return sobolev_norm(lp_project(f.apply(lambda r: cutoff_geq(1.0, r)), "geq", N), s0)


def choose_N(f: RadialField, p: DecompositionParams) -> int:
    """Smallest dyadic N with ||P_{>=N} chi_{>=1} f||_{H^s0} <= delta0.

    The tail norm is non-increasing in N, so the first dyadic hit is minimal.
    Only N <= rho_max / 2 are tried: above that the projector sees too little
    of the grid for a vanishing tail to mean anything.  Raises
    :class:`InfeasibleError` carrying the smallest tail seen when none of them
    meets the budget.
    """
    g = f.apply(lambda r: cutoff_geq(1.0, r))
    spec = _analyze(g.values, g.grid)
    rho = f.grid.rho
    from .transforms import sobolev_weight, spectral_l2

    weight = sobolev_weight(rho, p.s0)
    floor = np.inf
    N = 1
    while N <= f.grid.rho_max / 2:
        tail = spectral_l2(spec * lp_multiplier(rho, "geq", N), f.grid, weight)
        floor = min(floor, tail)
        if tail <= p.delta0:
            return N
        N *= 2
    raise InfeasibleError(
        f"no dyadic N <= rho_max/2 meets tail <= {p.delta0}; floor {floor:.6g}", floor=float(floor)
    )


@dataclass(frozen=True, eq=False)
class DataSplit:
    """v0 + w0 = f_+ with v0 = (P_{>=N} chi_{>=1} f)_out."""

    v0: RadialField
    w0: RadialField
    N: int
    tail_H_s0: float
    f_plus: RadialField
    w0_hdot1: float


def split_initial_data(
    f: RadialField, p: DecompositionParams, resolution_tol: float | None = SPECTRAL_TAIL_TOL
) -> DataSplit:
    """Split f_+ into the rough outgoing tail v0 and the H^1 part w0.

    v0 = (P_{>=N} chi_{>=1} f)_out,
    w0 = P_{<=1} f / 2 + P_{>=1}(chi_{<=1} f) / 2 + (P_{1<=.<=N} chi_{>=1} f)_out.

    ``p.N = None`` selects N with :func:`choose_N`.
    """
    if p.epsilon0 != 1.0:
        raise PreconditionError("data splitting is stated for epsilon0 = 1 (rescale first)")
    N = p.N if p.N is not None else choose_N(f, p)
    far = f.apply(lambda r: cutoff_geq(1.0, r))
    v0 = _component(lp_project(far, "geq", N), p, "out", None, resolution_tol)
    if N == 1:
        mid = RadialField.zeros(f.grid)
    else:
        mid = _component(lp_project(far, "between", 1.0, N), p, "out", None, resolution_tol)
    low = lp_project(f, "leq", 1.0)
    near = lp_project(f.apply(lambda r: cutoff_leq(1.0, r)), "geq", 1.0)
    w0 = 0.5 * (low + near) + mid
    f_plus = modified_components(f, replace(p, N=N), resolution_tol).out
    return DataSplit(
        v0=v0,
        w0=w0,
        N=int(N),
        tail_H_s0=tail_norm(f, N, p.s0),
        f_plus=f_plus,
        w0_hdot1=sobolev_norm(w0, 1.0, homogeneous=True),
    )
