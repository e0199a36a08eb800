"""Run manifests, CSV tables and small static SVG plots.

Every writer is deterministic: fixed key order, fixed float formatting and no
timestamps inside the result files. Wall-clock time goes only in the manifest.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__


def _default(obj):
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _clean(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    raw = json.loads(json.dumps(obj, default=_default))
    return json.dumps(_clean(raw), sort_keys=True, indent=2) + "\n"


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def config_hash(params: dict) -> str:
    """Content hash of a parameter set, independent of key order."""
    return digest_bytes(json.dumps(_clean(params), sort_keys=True, default=_default).encode())[:16]


def write_text(path: Path, text: str) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8")
    path.write_bytes(data)
    return digest_bytes(data)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return repr(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (list, tuple)):
        return ";".join(fmt(v) for v in x)
    return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def manifest(subcommand: str, params: dict, field_spec: dict | None, outputs: dict,
             wall_seconds: float) -> dict:
    return {
        "schema": 1,
        "tool": "froglab",
        "version": __version__,
        "subcommand": subcommand,
        "params": params,
        "config_hash": config_hash({"subcommand": subcommand, **params}),
        "field_spec": field_spec,
        "outputs": outputs,
        "wall_seconds": wall_seconds,
    }


# ------------------------------------------------------------------------ SVG

_W, _H, _PAD = 480, 360, 48


def _poly(points, color, width=1.5) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{pts}"/>'


def _axes(xlabel: str, ylabel: str) -> list[str]:
    return [
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD / 2}" y2="{_H - _PAD}" stroke="black"/>',
        f'<line x1="{_PAD}" y1="{_PAD / 2}" x2="{_PAD}" y2="{_H - _PAD}" stroke="black"/>',
        f'<text x="{_W / 2:.0f}" y="{_H - 10}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="14" y="{_H / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {_H / 2:.0f})">{ylabel}</text>',
    ]


def _wrap(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def log_plot_svg(xs: Sequence[float], ys: Sequence[float], lo: Sequence[float], hi: Sequence[float],
                 xlabel: str = "L", ylabel: str = "log p") -> str:
    """log(y) against x with error bars; zero cells are skipped."""
    pts = [(x, math.log(y), math.log(max(a, 1e-300)), math.log(b))
           for x, y, a, b in zip(xs, ys, lo, hi) if y > 0]
    body = _axes(xlabel, ylabel)
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0 = min(p[2] for p in pts)
        y1 = max(p[3] for p in pts)
        y0 = max(y0, min(p[1] for p in pts) - 1.0)
        sx = (_W - 1.5 * _PAD) / ((x1 - x0) or 1)
        sy = (_H - 1.5 * _PAD) / ((y1 - y0) or 1)

        def tx(x):
            return _PAD + (x - x0) * sx

        def ty(y):
            return _H - _PAD - (max(y, y0) - y0) * sy

        for x, y, a, b in pts:
            body.append(f'<line x1="{tx(x):.2f}" y1="{ty(a):.2f}" x2="{tx(x):.2f}" '
                        f'y2="{ty(b):.2f}" stroke="gray"/>')
            body.append(f'<circle cx="{tx(x):.2f}" cy="{ty(y):.2f}" r="3" fill="black"/>')
        body.append(_poly([(tx(x), ty(y)) for x, y, _, _ in pts], "black"))
    return _wrap(body)


def shape_overlay_svg(clouds: Sequence, labels: Sequence[str]) -> str:
    """Scatter of rescaled 2-d point clouds, one color per cloud."""
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    body = []
    side = min(_W, _H) - 2 * _PAD
    cx, cy = _W / 2, _H / 2

    def tx(p):
        return cx + p[0] * side / 2, cy - p[1] * side / 2

    body.append(_poly([tx(p) for p in [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 0)]], "black", 0.8))
    for k, (cloud, lab) in enumerate(zip(reversed(list(clouds)), reversed(list(labels)))):
        col = colors[(len(clouds) - 1 - k) % len(colors)]
        for p in cloud:
            x, y = tx(p)
            body.append(f'<rect x="{x - 0.8:.2f}" y="{y - 0.8:.2f}" width="1.6" height="1.6" fill="{col}"/>')
    for k, lab in enumerate(labels):
        body.append(f'<text x="{_PAD / 2}" y="{20 + 16 * k}" font-size="12" '
                    f'fill="{colors[k % len(colors)]}">{lab}</text>')
    return _wrap(body)
