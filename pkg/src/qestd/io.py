"""Deterministic JSON and CSV writers."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import WaveField

CSV_COLUMNS = ("x", "re", "im", "abs2")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj) -> str:
    # float repr is the shortest round-trip form, so equal inputs give equal bytes
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def _r(v: float) -> str:
    return repr(float(v))


def write_wave_csv(path: str | Path, field: WaveField, params: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    params = params if params is not None else field.meta.get("params", {})
    head = ", ".join([f"t={_r(field.t)}"] + [f"{k}={v!r}" for k, v in params.items()])
    lines = [f"# {head}", ",".join(CSV_COLUMNS)]
    v = field.values
    for x, re_, im_, a2 in zip(field.x, v.real, v.imag, np.abs(v) ** 2):
        lines.append(f"{_r(x)},{_r(re_)},{_r(im_)},{_r(a2)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_wave_csv(path: str | Path) -> WaveField:
    lines = Path(path).read_text().splitlines()
    meta = dict(item.strip().split("=", 1) for item in lines[0][1:].split(","))
    data = np.array([[float(c) for c in ln.split(",")] for ln in lines[2:]])
    return WaveField(data[:, 0], data[:, 1] + 1j * data[:, 2], float(meta["t"]))


def write_rows_csv(path: str | Path, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(columns)] + [",".join(_r(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path
