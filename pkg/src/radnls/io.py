"""Snapshot files, deterministic CSV/JSON writers, manifests and SVG plots."""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import ConfigurationError, RadialField, RadialGrid, SpectralField

FLOAT_FORMAT = "%.17g"


def fmt(x) -> str:
    """Pinned 17-significant-digit rendering (``inf``/``nan`` spelled out)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FORMAT % x


def _canon(obj):
    """Convert to JSON-ready values with pinned float formatting."""
    if isinstance(obj, Mapping):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_canon(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _Float(float(obj))
    return obj


class _Float(float):
    def __repr__(self) -> str:
        return fmt(self)


class _Encoder(json.JSONEncoder):
    def iterencode(self, o, _one_shot=False):
        return _iterencode(o, 0)


def _iterencode(o, depth):
    pad = "  " * (depth + 1)
    end = "  " * depth
    if isinstance(o, _Float):
        s = fmt(o)
        if s in ("nan", "inf", "-inf"):
            yield json.dumps(s)
        else:
            yield s
    elif isinstance(o, dict):
        if not o:
            yield "{}"
            return
        yield "{\n"
        items = list(o.items())
        for i, (k, v) in enumerate(items):
            yield pad + json.dumps(k) + ": "
            yield from _iterencode(v, depth + 1)
            yield ",\n" if i < len(items) - 1 else "\n"
        yield end + "}"
    elif isinstance(o, list):
        if not o:
            yield "[]"
            return
        if all(not isinstance(v, (dict, list)) for v in o):
            yield "[" + ", ".join("".join(_iterencode(v, depth + 1)) for v in o) + "]"
            return
        yield "[\n"
        for i, v in enumerate(o):
            yield pad
            yield from _iterencode(v, depth + 1)
            yield ",\n" if i < len(o) - 1 else "\n"
        yield end + "]"
    else:
        yield json.dumps(o)


def dumps(obj) -> str:
    """Deterministic JSON text: insertion-ordered keys, '%.17g' floats."""
    return "".join(_iterencode(_canon(obj), 0)) + "\n"


def write_json(path: Path | str, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, (float, int, np.floating, np.integer)) and not isinstance(v, bool) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# snapshots


def write_snapshot(stem: Path | str, f: RadialField, t: float = 0.0, role: str = "field") -> tuple[Path, Path]:
    """Write ``stem.bin`` (little-endian float64 Re/Im pairs) and ``stem.json``."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    data = np.empty(2 * f.grid.n, dtype="<f8")
    data[0::2] = f.values.real
    data[1::2] = f.values.imag
    bin_path = stem.with_suffix(".bin")
    bin_path.write_bytes(data.tobytes())
    meta = {"n": f.grid.n, "dr": f.grid.dr, "t": float(t), "role": role}
    return bin_path, write_json(stem.with_suffix(".json"), meta)


def write_spectral_snapshot(stem: Path | str, F: SpectralField, role: str = "spectrum") -> tuple[Path, Path]:
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    data = np.empty(2 * F.n, dtype="<f8")
    data[0::2] = F.values.real
    data[1::2] = F.values.imag
    bin_path = stem.with_suffix(".bin")
    bin_path.write_bytes(data.tobytes())
    meta = {"n": F.n, "drho": F.drho, "t": 0.0, "role": role, "domain": "frequency"}
    return bin_path, write_json(stem.with_suffix(".json"), meta)


def _read_pairs(bin_path: Path, n: int) -> np.ndarray:
    raw = np.frombuffer(bin_path.read_bytes(), dtype="<f8")
    if raw.size != 2 * n:
        raise ConfigurationError(f"{bin_path} holds {raw.size // 2} samples, sidecar says {n}")
    return raw[0::2] + 1j * raw[1::2]


def read_snapshot(stem: Path | str):
    """Read a snapshot pair; returns (RadialField or SpectralField, metadata)."""
    stem = Path(stem)
    meta = json.loads(stem.with_suffix(".json").read_text())
    values = _read_pairs(stem.with_suffix(".bin"), int(meta["n"]))
    if meta.get("domain") == "frequency":
        return SpectralField(float(meta["drho"]), int(meta["n"]), values), meta
    dr = float(meta["dr"])
    grid = RadialGrid(dr * int(meta["n"]), int(meta["n"]))
    return RadialField(grid, values), meta


# ---------------------------------------------------------------------------
# manifest


def sha256_file(path: Path | str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(config: Mapping) -> str:
    return hashlib.sha256(dumps(config).encode()).hexdigest()


def write_manifest(out_dir: Path | str, config: Mapping, extra: Mapping) -> Path:
    """manifest.json: config hash, ``extra`` entries and a hash of every file."""
    out_dir = Path(out_dir)
    files = {}
    for root, _, names in os.walk(out_dir):
        for name in sorted(names):
            p = Path(root) / name
            rel = p.relative_to(out_dir).as_posix()
            if rel == "manifest.json":
                continue
            files[rel] = sha256_file(p)
    manifest = {"config_hash": config_hash(config), **extra, "files": dict(sorted(files.items()))}
    return write_json(out_dir / "manifest.json", manifest)


# ---------------------------------------------------------------------------
# SVG


def loglog_svg(
    path: Path | str,
    series: Mapping[str, Sequence[tuple[float, float]]],
    title: str = "",
    xlabel: str = "N",
    ylabel: str = "value",
    width: int = 480,
    height: int = 360,
) -> Path:
    """Self-contained log-log line plot of positive (x, y) series."""
    pts = [(x, y) for s in series.values() for x, y in s if x > 0 and y > 0]
    if not pts:
        raise ConfigurationError("nothing positive to plot")
    lx = [math.log10(x) for x, _ in pts]
    ly = [math.log10(y) for _, y in pts]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    m = 50

    def X(v):
        return m + (math.log10(v) - x0) / (x1 - x0) * (width - 2 * m)

    def Y(v):
        return height - m - (math.log10(v) - y0) / (y1 - y0) * (height - 2 * m)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" stroke="black"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" stroke="black"/>',
        f'<text x="{width / 2}" y="{m / 2}" text-anchor="middle" font-size="14">{_esc(title)}</text>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="12">{_esc(xlabel)} (log)</text>',
        f'<text x="14" y="{height / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {height / 2})">{_esc(ylabel)} (log)</text>',
    ]
    for i, (name, s) in enumerate(series.items()):
        c = colors[i % len(colors)]
        good = [(x, y) for x, y in s if x > 0 and y > 0]
        if not good:
            continue
        poly = " ".join(f"{X(x):.3f},{Y(y):.3f}" for x, y in good)
        out.append(f'<polyline points="{poly}" fill="none" stroke="{c}" stroke-width="2"/>')
        for x, y in good:
            out.append(f'<circle cx="{X(x):.3f}" cy="{Y(y):.3f}" r="3" fill="{c}"/>')
        out.append(f'<text x="{width - m + 4}" y="{m + 16 * i}" font-size="11" fill="{c}">{_esc(name)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n")
    return path


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
