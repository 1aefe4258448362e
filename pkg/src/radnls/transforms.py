"""Radial Fourier analysis on R^3.

Under the 2*pi convention the Fourier transform of a radial function is

    F(rho) = (2 / rho) * int_0^inf sin(2 pi r rho) r f(r) dr,

a sine transform of ``r f(r)``.  On the conjugate grids ``r_j = j dr`` and
``rho_k = k / (2 r_max)`` the rectangle rule (the trapezoid rule with the zero
endpoints at r = 0 and r = r_max) is a scaled DST-I, which is its own inverse,
so the pair below is an exact discrete involution and satisfies Plancherel to
roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.fft as sfft

from .core import (
    ConfigurationError,
    DomainError,
    PreconditionError,
    RadialField,
    RadialGrid,
    SpectralField,
    cutoff_band,
    cutoff_geq,
    cutoff_leq,
    extrapolate_origin,
)


@dataclass(frozen=True)
class DecompositionParams:
    """Symbols of the incoming/outgoing construction.

    ``N = None`` means "select N from ``delta0``" (see
    :func:`radnls.wavesplit.choose_N`).
    """

    alpha: float = 1.0
    beta: float = 0.0
    epsilon0: float = 1.0
    N: Optional[int] = None
    s0: float = 0.9
    delta0: float = 0.1

    def __post_init__(self):
        if not self.alpha < 3:
            raise DomainError(f"alpha must be < 3, got {self.alpha}")
        if not self.beta > -3:
            raise DomainError(f"beta must be > -3, got {self.beta}")
        if not 5 / 6 < self.s0 < 1:
            raise DomainError(f"s0 must lie in (5/6, 1), got {self.s0}")
        if not self.epsilon0 > 0:
            raise DomainError("epsilon0 must be positive")
        if not self.delta0 > 0:
            raise DomainError("delta0 must be positive")
        if self.N is not None and not _is_dyadic(self.N):
            raise DomainError(f"N must be a positive power of two, got {self.N}")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "epsilon0": self.epsilon0,
            "N": self.N,
            "s0": self.s0,
            "delta0": self.delta0,
        }


def _is_dyadic(N) -> bool:
    try:
        N = int(N)
    except (TypeError, ValueError):
        return False
    return N >= 1 and (N & (N - 1)) == 0


# ---------------------------------------------------------------------------
# sine / cosine transform kernels


def _sine(x: np.ndarray) -> np.ndarray:
    """``sum_{k=1}^{n-1} x_k sin(pi j k / n)`` for j = 0..n-1 (x_0 ignored)."""
    out = np.zeros(x.shape[-1], dtype=np.complex128)
    out[1:] = 0.5 * sfft.dst(x[1:], type=1)
    return out


def _cosine(x: np.ndarray) -> np.ndarray:
    """``sum_{k=1}^{n-1} x_k cos(pi j k / n)`` for j = 0..n-1 (x_0 ignored)."""
    padded = np.zeros(x.shape[-1] + 1, dtype=np.complex128)
    padded[1:-1] = x[1:]
    return 0.5 * sfft.dct(padded, type=1)[:-1]


def radial_fourier(f: RadialField) -> SpectralField:
    """3D Fourier transform of a radial field on the conjugate grid."""
    grid = f.grid
    rho = grid.rho
    rf = grid.r * f.values
    spec = np.empty(grid.n, dtype=np.complex128)
    # rho F(rho_k) = 2 dr sum_j sin(2 pi r_j rho_k) r_j f_j
    spec[1:] = 2.0 * grid.dr * _sine(rf)[1:] / rho[1:]
    spec[0] = 4.0 * np.pi * grid.dr * np.sum(grid.r**2 * f.values)
    return SpectralField(grid.drho, grid.n, spec)


def inverse_radial_fourier(F: SpectralField, grid: RadialGrid | None = None) -> RadialField:
    """Inverse of :func:`radial_fourier`; the r = 0 sample is extrapolated."""
    if grid is None:
        grid = F.grid
    elif grid.n != F.n or not np.isclose(grid.drho, F.drho, rtol=1e-14, atol=0):
        raise ConfigurationError("spectral field is not conjugate to the requested grid")
    return RadialField(grid, _synthesize(F.values, grid))


def _synthesize(spec: np.ndarray, grid: RadialGrid) -> np.ndarray:
    rhoF = grid.rho * spec
    values = np.empty(grid.n, dtype=np.complex128)
    values[1:] = 2.0 * grid.drho * _sine(rhoF)[1:] / grid.r[1:]
    values[0] = extrapolate_origin(values)
    return values


def _analyze(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    rho = grid.rho
    spec = np.empty(grid.n, dtype=np.complex128)
    spec[1:] = 2.0 * grid.dr * _sine(grid.r * values)[1:] / rho[1:]
    spec[0] = 4.0 * np.pi * grid.dr * np.sum(grid.r**2 * values)
    return spec


def spectral_multiply(f: RadialField, multiplier: np.ndarray) -> RadialField:
    """Apply the Fourier multiplier sampled at the conjugate rho grid."""
    return RadialField(f.grid, _synthesize(_analyze(f.values, f.grid) * multiplier, f.grid))


def radial_derivative(f: RadialField) -> np.ndarray:
    """Spectral d/dr of the profile (complex samples, zero at r = 0).

    Differentiates the sine series of r f(r) term by term (a DCT-I) and uses
    f' = ((r f)' - f) / r away from the origin.
    """
    grid = f.grid
    rhoF = grid.rho * _analyze(f.values, grid)
    drf = 2.0 * grid.drho * _cosine(2.0 * np.pi * grid.rho * rhoF)
    out = np.zeros(grid.n, dtype=np.complex128)
    out[1:] = (drf[1:] - f.values[1:]) / grid.r[1:]
    return out


# ---------------------------------------------------------------------------
# deformed transform


def origin_sup(f: RadialField, radius: float = 0.25) -> float:
    """sup |chi_{<=radius} f|, the quantity gating negative beta."""
    return float(np.max(np.abs(cutoff_leq(radius, f.grid.r) * f.values)))


def deformed_fourier(
    f: RadialField, p: DecompositionParams, origin_tol: float = 1e-8
) -> SpectralField:
    """Deformed Fourier transform |xi|^alpha FT(|x|^beta f)(xi) of a radial field.

    Evaluated as ``2 rho^(alpha-1) int sin(2 pi r rho) r^(beta+1) f dr`` by the
    same rectangle/DST quadrature as :func:`radial_fourier`.  For ``beta < 0``
    the field must vanish near the origin: ``sup |chi_{<=1/4} f|`` has to be
    below ``origin_tol * sup |f|``.

    The rho = 0 sample carries zero weight in every downstream integral; it
    holds the finite limit when one exists and 0 otherwise.
    """
    if not p.alpha < 3 or not p.beta > -3:
        raise DomainError("deformed transform needs alpha < 3 and beta > -3")
    grid = f.grid
    r = grid.r
    weighted = np.zeros(grid.n, dtype=np.complex128)
    if p.beta < 0:
        scale = float(np.max(np.abs(f.values))) or 1.0
        if origin_sup(f) > origin_tol * scale:
            raise PreconditionError(
                "negative beta requires the field to vanish on |x| <= 1/4 "
                f"(sup there {origin_sup(f):.3e})"
            )
        weighted[1:] = r[1:] ** p.beta * f.values[1:]
    else:
        weighted[:] = r**p.beta * f.values
    base = _analyze(weighted, grid)
    rho = grid.rho
    out = np.empty(grid.n, dtype=np.complex128)
    out[1:] = rho[1:] ** p.alpha * base[1:]
    if p.alpha == 0:
        out[0] = base[0]
    else:
        out[0] = 0.0
    return SpectralField(grid.drho, grid.n, out)


# ---------------------------------------------------------------------------
# Littlewood-Paley projectors and Sobolev norms

LP_MODES = ("leq", "geq", "band", "between")


def lp_multiplier(grid_or_rho, mode: str, N: float, M: float | None = None) -> np.ndarray:
    rho = grid_or_rho.rho if isinstance(grid_or_rho, RadialGrid) else np.asarray(grid_or_rho)
    if not N > 0:
        raise DomainError("projector threshold must be positive")
    if mode == "leq":
        return cutoff_leq(N, rho)
    if mode == "geq":
        return cutoff_geq(N, rho)
    if mode == "band":
        return cutoff_band(N, rho)
    if mode == "between":
        if M is None or not M >= N:
            raise DomainError("'between' needs an upper threshold M >= N")
        return cutoff_leq(M, rho) - cutoff_leq(N, rho)
    raise DomainError(f"unknown projector mode {mode!r}")


def lp_project(f: RadialField, mode: str, N: float, M: float | None = None) -> RadialField:
    """Littlewood-Paley projection P_{<=N}, P_{>=N}, P_N (``band``) or P_{N<=.<=M}."""
    return spectral_multiply(f, lp_multiplier(f.grid, mode, N, M))


def sobolev_weight(rho: np.ndarray, s: float, homogeneous: bool = False) -> np.ndarray:
    k = 2.0 * np.pi * rho
    if homogeneous:
        with np.errstate(divide="ignore"):
            w = np.where(k > 0, k, 0.0) ** s if s >= 0 else np.where(k > 0, k**s, 0.0)
        return w
    return (1.0 + k * k) ** (s / 2.0)


def spectral_l2(spec: np.ndarray, grid: RadialGrid, weight: np.ndarray | None = None) -> float:
    rho = grid.rho
    amp = np.abs(spec) if weight is None else np.abs(spec) * weight
    return float(np.sqrt(4.0 * np.pi * grid.drho * np.sum(rho**2 * amp**2)))


def sobolev_norm(f: RadialField, s: float, homogeneous: bool = False) -> float:
    """H^s (or homogeneous H^s) norm with weight <2 pi rho>^s (or (2 pi rho)^s)."""
    if not -2 <= s <= 2:
        raise DomainError(f"Sobolev order {s} outside the supported range [-2, 2]")
    spec = _analyze(f.values, f.grid)
    return spectral_l2(spec, f.grid, sobolev_weight(f.grid.rho, s, homogeneous))
