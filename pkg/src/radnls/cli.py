"""Config-driven experiment runner.

Usage::

    radnls <scenario> [--config path.json] [--out dir] [--dt X] [--t-end T] [--workers K]

Scenarios: kernels, decompose, linear-sweep, evolve, scatter, check.  Every
run writes ``report.json`` and ``manifest.json`` (plus scenario-specific
``series.csv``, ``snapshots/`` and ``plots/``) into the output directory.

Exit codes: 0 success, 1 runtime failure (or a failed check), 2 invalid
configuration, 3 infeasible precondition.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .checks import CRITERIA, MONOTONE_RTOL
from .core import (
    ROUGH_SLACK,
    TRANSITION,
    ConfigurationError,
    DomainError,
    InfeasibleError,
    PreconditionError,
    ResolutionError,
    TestFunctionSpec,
    cutoff_geq,
    make_grid,
    sample_field,
)
from .io import loglog_svg, write_csv, write_json, write_manifest, write_snapshot
from .norms import (
    HORIZON_FRACTION,
    MORAWETZ_DENSITIES,
    fit_exponent,
    hdot1_series,
    morawetz_report,
    scattering_profile,
    x_norm,
    y_norm,
)
from .propagator import (
    BoundaryError,
    SolverConfig,
    evolve_linear_series,
    evolve_nls,
    geometric_times,
    perturbation_series,
)
from .transforms import DecompositionParams, lp_project
from .wavesplit import (
    CALIBRATION,
    SPECTRAL_TAIL_TOL,
    component_split,
    kernel_J,
    kernel_K,
    modified_components,
    outgoing_component,
    split_initial_data,
)

SCENARIOS = ("kernels", "decompose", "linear-sweep", "evolve", "scatter", "check")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3


@dataclass(frozen=True)
class SweepConfig:
    N_list: tuple = (4, 8, 16, 32)
    s0_list: tuple = (0.9,)
    delta: float = 0.25
    workers: int = 1
    per_decade: int = 8

    def to_dict(self) -> dict:
        return {
            "N_list": list(self.N_list),
            "s0_list": list(self.s0_list),
            "delta": self.delta,
            "workers": self.workers,
            "per_decade": self.per_decade,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: scenario, grid, data, symbols, solver and sweep blocks."""

    scenario: str
    r_max: float
    n: int
    data: TestFunctionSpec = field(default_factory=TestFunctionSpec)
    params: DecompositionParams = field(default_factory=DecompositionParams)
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: Optional[SweepConfig] = None
    checks: tuple = tuple(sorted(CRITERIA))
    output_dir: str = "radnls-out"

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "grid": {"r_max": self.r_max, "n": self.n},
            "data": self.data.to_dict(),
            "params": self.params.to_dict(),
            "solver": self.solver.to_dict(),
        }
        if self.sweep is not None:
            out["sweep"] = self.sweep.to_dict()
        out["checks"] = list(self.checks)
        out["output_dir"] = self.output_dir
        return out


def _block(raw: dict, name: str, cls, required: bool = False):
    if name not in raw:
        if required:
            raise ConfigurationError(f"missing required block {name!r}")
        return cls()
    block = raw[name]
    if not isinstance(block, dict):
        raise ConfigurationError(f"block {name!r} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(block) - known)
    if unknown:
        raise ConfigurationError(f"unknown field(s) {unknown} in block {name!r}")
    try:
        return cls(**block)
    except (TypeError, DomainError) as exc:
        raise ConfigurationError(f"block {name!r}: {exc}") from exc


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config mapping; raises :class:`ConfigurationError` naming the field."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    scenario = raw.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigurationError(f"field 'scenario' must be one of {list(SCENARIOS)}, got {scenario!r}")
    needs_grid = scenario not in ("kernels", "check")
    grid = raw.get("grid")
    if grid is None:
        if needs_grid:
            raise ConfigurationError("missing required block 'grid'")
        grid = {"r_max": 128.0, "n": 8192}
    for key in ("r_max", "n"):
        if key not in grid:
            raise ConfigurationError(f"missing required field 'grid.{key}'")
    make_grid(float(grid["r_max"]), int(grid["n"]))
    sweep = None
    if "sweep" in raw:
        s = dict(raw["sweep"])
        for key in ("N_list", "s0_list"):
            if key in s:
                s[key] = tuple(s[key])
        sweep = _block({"sweep": s}, "sweep", SweepConfig)
    if scenario == "linear-sweep":
        if sweep is None:
            raise ConfigurationError("linear-sweep requires a 'sweep' block with 'N_list'")
        Ns = sweep.N_list
        if len(Ns) < 3 or any(int(N) != N or N < 1 or (int(N) & (int(N) - 1)) for N in Ns):
            raise ConfigurationError("field 'sweep.N_list' needs at least three dyadic entries")
        if sweep.workers < 1:
            raise ConfigurationError("field 'sweep.workers' must be positive")
    checks = tuple(raw.get("checks", sorted(CRITERIA)))
    bad = [c for c in checks if c not in CRITERIA]
    if bad:
        raise ConfigurationError(f"field 'checks' has unknown criteria {bad}")
    return ExperimentConfig(
        scenario=scenario,
        r_max=float(grid["r_max"]),
        n=int(grid["n"]),
        data=_block(raw, "data", TestFunctionSpec),
        params=_block(raw, "params", DecompositionParams),
        solver=_block(raw, "solver", SolverConfig),
        sweep=sweep,
        checks=checks,
        output_dir=str(raw.get("output_dir", "radnls-out")),
    )


def serialize_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw)


DEFAULT_CONFIG = {
    "scenario": "check",
    "grid": {"r_max": 128.0, "n": 8192},
    "checks": sorted(CRITERIA),
    "output_dir": "radnls-out",
}


def tolerances() -> dict:
    """Every tolerance in force, recorded in each manifest."""
    return {
        "spectral_tail_tol": SPECTRAL_TAIL_TOL,
        "rough_slack": ROUGH_SLACK,
        "transition": TRANSITION,
        "horizon_fraction": HORIZON_FRACTION,
        "monotone_rtol": MONOTONE_RTOL,
        "origin_tol": 1e-8,
    }


# ---------------------------------------------------------------------------
# scenarios


def _kernels(cfg: ExperimentConfig, out: Path) -> tuple[dict, int]:
    r = np.linspace(0.01, 50.0, 500)
    J = kernel_J(r)
    closed = (np.exp(2j * np.pi * r) - 1.0) / (2j * np.pi * r)
    res = np.abs(J - closed)
    write_csv(out / "series.csv", ["r", "re_J", "im_J", "residual"], zip(r, J.real, J.imag, res))
    far = r >= 2.2
    far_res = np.abs(J[far] - kernel_K(r[far]) - np.exp(2j * np.pi * r[far]) / (2j * np.pi * r[far]))
    report = {"max_residual": float(res.max()), "far_field_residual": float(far_res.max())}
    ok = report["max_residual"] <= 1e-10 and report["far_field_residual"] <= 1e-10
    return report, EXIT_OK if ok else EXIT_RUNTIME


def _decompose(cfg: ExperimentConfig, out: Path) -> tuple[dict, int]:
    g = make_grid(cfg.r_max, cfg.n)
    f = sample_field(cfg.data, g)
    split = component_split(f, cfg.params)
    mod = modified_components(f, cfg.params)
    snaps = out / "snapshots"
    for name, field_ in (("f", f), ("f_out", split.out), ("f_in", split.in_), ("f_plus", mod.out), ("f_minus", mod.in_)):
        write_snapshot(snaps / name, field_, 0.0, name)
    report = {
        "reconstruction_error": split.reconstruction_error,
        "modified_reconstruction_error": mod.reconstruction_error,
        "params": cfg.params.to_dict(),
    }
    return report, EXIT_OK


def _sweep_point(f, s0: float, N: int, times, grid_far):
    p = DecompositionParams(s0=s0, N=N)
    v0 = outgoing_component(lp_project(grid_far, "geq", N), p)
    run = evolve_linear_series(v0, times)
    y = y_norm(run, N, s0)
    w0 = split_initial_data(f, p).w0_hdot1
    return {"s0": s0, "N": N, **y.raw, "Y": y.total, "w0_hdot1": w0, "boundary_leak": run.boundary_leak}


def _linear_sweep(cfg: ExperimentConfig, out: Path) -> tuple[dict, int]:
    g = make_grid(cfg.r_max, cfg.n)
    sw = cfg.sweep
    times = geometric_times(1e-6, min(0.5, cfg.solver.t_end), cfg.solver.t_end, sw.per_decade, 1.0 / 8.0)
    jobs = []
    for s0 in sw.s0_list:
        f = sample_field(replace(cfg.data, s0=s0) if cfg.data.family == "rough-spectral" else cfg.data, g)
        far = f.apply(lambda r: cutoff_geq(1.0, r))
        jobs.extend((f, s0, int(N), times, far) for N in sw.N_list)
    with ThreadPoolExecutor(max_workers=sw.workers) as pool:
        rows = list(pool.map(lambda a: _sweep_point(*a), jobs))
    cols = ["s0", "N", "grad_L2L6", "L8L12", "LinfL6", "L2Linf", "Y", "w0_hdot1", "boundary_leak"]
    write_csv(out / "series.csv", cols, ([row[c] for c in cols] for row in rows))
    fits = {}
    for s0 in sw.s0_list:
        mine = [row for row in rows if row["s0"] == s0]
        fits[f"{s0:g}"] = {
            c: fit_exponent([(row["N"], row[c]) for row in mine]).slope
            for c in ("grad_L2L6", "L8L12", "LinfL6", "L2Linf", "w0_hdot1")
        }
        loglog_svg(
            out / "plots" / f"sweep_s0_{s0:g}.svg",
            {c: [(row["N"], row[c]) for row in mine] for c in ("grad_L2L6", "L2Linf", "w0_hdot1")},
            title=f"linear sweep, s0 = {s0:g}",
        )
    return {"slopes": fits, "points": rows}, EXIT_OK


def _evolve(cfg: ExperimentConfig, out: Path) -> tuple[dict, int]:
    g = make_grid(cfg.r_max, cfg.n)
    f = sample_field(cfg.data, g)
    split = split_initial_data(f, cfg.params)
    u = evolve_nls(split.f_plus, cfg.solver, densities=MORAWETZ_DENSITIES)
    v = evolve_linear_series(split.v0, u.times)
    w = perturbation_series(u, v)
    hw = hdot1_series(w)
    M = np.asarray(u.densities["morawetz_M"])
    write_csv(out / "series.csv", ["t", "mass", "energy", "hdot1_w", "morawetz_M"], zip(u.times, u.mass_series, u.energy_series, hw, M))
    snaps = out / "snapshots"
    write_snapshot(snaps / "u0", split.f_plus, 0.0, "u0")
    write_snapshot(snaps / "v0", split.v0, 0.0, "v0")
    write_snapshot(snaps / "w0", split.w0, 0.0, "w0")
    write_snapshot(snaps / "u_final", u.field(len(u) - 1), float(u.times[-1]), "u")
    write_snapshot(snaps / "w_final", w.field(len(w) - 1), float(w.times[-1]), "w")
    mor = morawetz_report(u)
    xn = x_norm(w, split.N, cfg.params.s0)
    report = {
        "N": split.N,
        "tail_H_s0": split.tail_H_s0,
        "w0_hdot1": split.w0_hdot1,
        "mass_drift": u.mass_drift,
        "energy_drift": u.energy_drift,
        "sup_hdot1_w": float(np.max(hw)),
        "X_N": xn.total,
        "X_N_terms": xn.terms,
        "morawetz": {
            "residual": mor.residual,
            "action": mor.action,
            "origin_term": mor.origin_term,
            "identity_defect": mor.identity_defect,
        },
        "aborted": u.aborted,
        "boundary_leak": u.boundary_leak,
    }
    return report, EXIT_RUNTIME if u.aborted else EXIT_OK


def _scatter(cfg: ExperimentConfig, out: Path) -> tuple[dict, int]:
    g = make_grid(cfg.r_max, cfg.n)
    u0 = sample_field(cfg.data, g)
    run = evolve_nls(u0, cfg.solver)
    rep = scattering_profile(run, cfg.solver.mu, u0, cfg.solver.dealias_fraction)
    write_csv(
        out / "series.csv",
        ["t", "mass", "energy", "convergence", "integrand"],
        zip(run.times, run.mass_series, run.energy_series, rep.convergence.values, rep.integrand_norms.values),
    )
    write_snapshot(out / "snapshots" / "u_plus", rep.u_plus, 0.0, "u_plus")
    report = {
        "convergence_T": float(rep.convergence.values[-1]),
        "horizon_warning": rep.horizon_warning,
        "mass_drift": run.mass_drift,
        "energy_drift": run.energy_drift,
        "aborted": run.aborted,
        "boundary_leak": run.boundary_leak,
    }
    return report, EXIT_RUNTIME if run.aborted else EXIT_OK


def _check(cfg: ExperimentConfig, out: Path) -> tuple[dict, int]:
    results = []
    for k in cfg.checks:
        res = CRITERIA[k]()
        print(res.line(), flush=True)
        results.append(res)
    rows = [(r.number, r.title, "pass" if r.passed else "fail", r.threshold, r.note) for r in results]
    write_csv(out / "series.csv", ["criterion", "title", "status", "threshold", "note"], rows)
    ok = all(r.passed for r in results)
    return {"all_passed": ok, "criteria": [r.to_dict() for r in results]}, EXIT_OK if ok else EXIT_RUNTIME


RUNNERS = {
    "kernels": _kernels,
    "decompose": _decompose,
    "linear-sweep": _linear_sweep,
    "evolve": _evolve,
    "scatter": _scatter,
    "check": _check,
}


def run(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> int:
    """Run one scenario; writes report.json and manifest.json; returns the exit code."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    # a previous failed run must not leak into this manifest
    (out / "error.json").unlink(missing_ok=True)
    report, code = RUNNERS[cfg.scenario](cfg, out)
    write_json(out / "report.json", {"scenario": cfg.scenario, "exit_code": code, **report})
    write_manifest(
        out,
        cfg.to_dict(),
        {
            "scenario": cfg.scenario,
            "version": __version__,
            "calibration_c": 1.0 / CALIBRATION,
            "tolerances": tolerances(),
        },
    )
    return code


def _error(kind: str, message: str, code: int, out: Path | None = None) -> int:
    payload = {"error": kind, "message": message, "exit_code": code}
    text = json.dumps(payload)
    print(text)
    if out is not None:
        try:
            write_json(out / "error.json", payload)
        except OSError:
            pass
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radnls", description="Radial quintic NLS wave-decomposition workbench.")
    ap.add_argument("scenario", choices=SCENARIOS)
    ap.add_argument("--config", help="JSON config (defaults to the shipped check config)")
    ap.add_argument("--out", help="output directory (overrides output_dir)")
    ap.add_argument("--dt", type=float, help="override solver.dt")
    ap.add_argument("--t-end", type=float, dest="t_end", help="override solver.t_end")
    ap.add_argument("--workers", type=int, help="override sweep.workers")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out) if args.out else None
    try:
        raw: dict[str, Any]
        if args.config:
            try:
                raw = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        else:
            raw = dict(DEFAULT_CONFIG)
        if not isinstance(raw, dict):
            raise ConfigurationError("config must be a JSON object")
        raw = dict(raw, scenario=args.scenario)
        for key in ("dt", "t_end"):
            val = getattr(args, key)
            if val is not None:
                raw["solver"] = dict(raw.get("solver", {}), **{key: val})
        if args.workers is not None:
            raw["sweep"] = dict(raw.get("sweep", {}), workers=args.workers)
        cfg = parse_config(raw)
        out = out or Path(cfg.output_dir)
    except ConfigurationError as exc:
        return _error("ConfigurationError", str(exc), EXIT_CONFIG, out)
    try:
        return run(cfg, out)
    except ConfigurationError as exc:
        return _error("ConfigurationError", str(exc), EXIT_CONFIG, out)
    except (InfeasibleError, PreconditionError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_INFEASIBLE, out)
    except (ResolutionError, BoundaryError, DomainError, FloatingPointError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_RUNTIME, out)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
