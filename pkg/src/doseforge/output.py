"""Deterministic CSV/JSON/SVG writers with a provenance header."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__


def config_hash(cfg: dict) -> str:
    """SHA-256 of the canonical JSON form of a config."""
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class Provenance:
    config_sha256: str
    seed: int
    version: str = __version__

    def line(self) -> str:
        return f"# doseforge {self.version} config_sha256={self.config_sha256} seed={self.seed}"

    def to_dict(self) -> dict:
        return {"tool": "doseforge", "version": self.version,
                "config_sha256": self.config_sha256, "seed": self.seed}


def fmt(x, digits: int = 10) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, f".{digits}g")


def write_csv(path, header, rows, prov: Provenance | None = None, digits: int = 10) -> Path:
    """Write a CSV; ``digits=17`` makes float columns round-trip exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [prov.line()] if prov is not None else []
    lines.append(",".join(header))
    lines.extend(",".join(fmt(v, digits) for v in r) for r in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if hasattr(o, "to_dict"):
        return o.to_dict()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _clean(o):
    """Replace non-finite floats so the output is strict JSON."""
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, float) and not math.isfinite(o):
        return None
    return o


def write_json(path, obj, prov: Provenance | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    obj = json.loads(json.dumps(obj, default=_json_default))
    if prov is not None:
        obj = {"provenance": prov.to_dict(), **obj}
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")
    return path


def read_csv_table(path) -> tuple[list[str], np.ndarray]:
    """Header and numeric body of a CSV written by :func:`write_csv`."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    body = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=float)
    return header, body.reshape(-1, len(header))


# --- SVG -------------------------------------------------------------------

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def svg_curves(path, series, title: str = "", xlabel: str = "dose", ylabel: str = "",
               prov: Provenance | None = None, width: int = 480, height: int = 320) -> Path:
    """Line plot; each series is ``(label, x, y, lo, hi)`` with optional band."""
    pad = 48
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(v, float) for s in series for v in s[2:] if v is not None])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(np.nanmin(ys)), float(np.nanmax(ys))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x):
        return pad + (np.asarray(x, float) - x0) / (x1 - x0) * (width - 2 * pad)

    def py(y):
        return height - pad - (np.asarray(y, float) - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    if prov is not None:
        out.append(f"<!-- {prov.line()[2:]} -->")
    out.append(f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
               'fill="none" stroke="#444"/>')
    for i, (label, x, y, lo, hi) in enumerate(series):
        col = _COLOURS[i % len(_COLOURS)]
        if lo is not None and hi is not None:
            pts = list(zip(px(x), py(hi))) + list(zip(px(x)[::-1], py(lo)[::-1]))
            out.append(f'<path d="M{_pts(pts)}Z" fill="{col}" fill-opacity="0.2" stroke="none"/>')
        out.append(f'<path d="M{_pts(zip(px(x), py(y)))}" fill="none" stroke="{col}"/>')
        out.append(f'<text x="{width - pad + 4}" y="{pad + 14 * (i + 1)}" font-size="10" '
                   f'fill="{col}">{label}</text>')
    out.append(f'<text x="{width / 2}" y="{height - 12}" font-size="11" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="12" y="{height / 2}" font-size="11">{ylabel}</text>')
    out.append(f'<text x="{width / 2}" y="20" font-size="12" text-anchor="middle">{title}</text>')
    out.append(f'<text x="{pad}" y="{height - pad + 14}" font-size="9">{x0:g}</text>')
    out.append(f'<text x="{width - pad}" y="{height - pad + 14}" font-size="9" text-anchor="end">{x1:g}</text>')
    out.append(f'<text x="{pad - 4}" y="{height - pad}" font-size="9" text-anchor="end">{y0:.3g}</text>')
    out.append(f'<text x="{pad - 4}" y="{pad + 8}" font-size="9" text-anchor="end">{y1:.3g}</text>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n")
    return path


def _pts(pts) -> str:
    return " L".join(f"{x:.2f},{y:.2f}" for x, y in pts)
