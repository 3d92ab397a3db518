"""Reading and writing configurations, bitmaps, calibrations and result tables."""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .cade import CalibrationEntry, CalibrationTable
from .genesis import Configuration
from .raster import BinaryImage, as_array

__all__ = [
    "FormatError",
    "format_configuration",
    "save_configuration",
    "load_configuration",
    "save_image",
    "load_image",
    "CALIBRATION_COLUMNS",
    "RESULT_COLUMNS",
    "SUMMARY_COLUMNS",
    "save_calibration",
    "load_calibration",
    "save_results",
    "load_results",
    "save_summary",
    "append_manifest",
    "read_manifest",
]


class FormatError(ValueError):
    """Raised for malformed or truncated input files."""


def _num(value) -> str:
    """Shortest round-trip text for a number; integers stay integral."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if value.is_integer() and abs(value) < 2 ** 53:
        return str(int(value))
    return repr(value)


# ---------------------------------------------------------------- configurations

_HEADER_KEYS = ("L", "rho", "gamma", "p", "seed", "achieved_p")


def format_configuration(config: Configuration) -> str:
    """Centers as ``x,y`` rows in insertion order under a parameter comment."""
    lines = [
        f"# L={config.box_size} rho={_num(config.rho)} gamma={_num(config.gamma_agg)} "
        f"p={_num(config.target_p)} seed={config.seed} achieved_p={_num(config.achieved_p)}",
        "# branch=" + "".join("1" if f else "0" for f in config.connected),
    ]
    lines += [f"{repr(float(x))},{repr(float(y))}" for x, y in config.centers]
    return "\n".join(lines) + "\n"


def save_configuration(path, config: Configuration) -> None:
    Path(path).write_text(format_configuration(config))


def load_configuration(path) -> Configuration:
    params: dict[str, str] = {}
    branch = None
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for key, value in re.findall(r"(\w+)=(\S*)", line):
                    if key == "branch":
                        branch = value
                    else:
                        params[key] = value
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'x,y', got {line!r}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad coordinate in {line!r}") from None
    missing = [k for k in _HEADER_KEYS if k not in params]
    if missing:
        raise FormatError(f"{path}: header lacks {', '.join(missing)}")
    try:
        box = int(params["L"])
        rho = float(params["rho"])
        gamma, p = float(params["gamma"]), float(params["p"])
        seed = int(params["seed"])
        achieved = float(params["achieved_p"])
    except ValueError as exc:
        raise FormatError(f"{path}: malformed header value ({exc})") from None
    centers = np.array(rows, dtype=np.float64).reshape(-1, 2)
    if len(centers) and (centers.min() < 0 or centers.max() > box):
        raise FormatError(f"{path}: coordinate outside [0, {box}]")
    flags = None
    if branch is not None:
        if len(branch) != len(centers) or set(branch) - {"0", "1"}:
            raise FormatError(f"{path}: branch flags do not match the centers")
        flags = np.array([c == "1" for c in branch], dtype=bool)
    return Configuration(centers, rho, box, gamma, p, seed, achieved, flags)


# ---------------------------------------------------------------- bitmaps

def save_image(path, image, plain: bool = False) -> None:
    """Write a portable bitmap; raw (P4) unless ``plain``.  Foreground is bit 1."""
    arr = as_array(image)
    h, w = arr.shape
    if plain:
        digits = (arr.astype(np.uint8) + ord("0")).tobytes()
        # plain PBM lines should stay under 70 characters
        lines = [digits[r * w + i: r * w + min(i + 64, w)] for r in range(h) for i in range(0, w, 64)]
        Path(path).write_bytes(f"P1\n{w} {h}\n".encode("ascii") + b"\n".join(lines) + b"\n")
    else:
        payload = np.packbits(arr, axis=1).tobytes() if w else b""
        Path(path).write_bytes(f"P4\n{w} {h}\n".encode("ascii") + payload)


def _header_tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, pos, n = [], 0, len(data)
    while len(tokens) < count:
        while pos < n and (data[pos:pos + 1].isspace() or data[pos:pos + 1] == b"#"):
            if data[pos:pos + 1] == b"#":
                while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("truncated bitmap header")
        tokens.append(data[start:pos].decode("ascii", "replace"))
    return tokens, pos


def load_image(path) -> BinaryImage:
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise FormatError(f"{path}: not a portable bitmap (magic {magic!r})")
    (_, ws, hs), pos = _header_tokens(data, 3)
    try:
        w, h = int(ws), int(hs)
    except ValueError:
        raise FormatError(f"{path}: bad dimensions {ws!r} x {hs!r}") from None
    if w < 0 or h < 0:
        raise FormatError(f"{path}: negative dimensions")
    if magic == b"P4":
        pos += 1  # exactly one whitespace byte precedes the raster
        stride = (w + 7) // 8
        payload = data[pos:pos + stride * h]
        if len(payload) < stride * h:
            raise FormatError(f"{path}: truncated raster ({len(payload)} of {stride * h} bytes)")
        bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8).reshape(h, stride), axis=1)[:, :w]
    else:
        body = re.sub(rb"#[^\n\r]*", b"", data[pos:])
        digits = np.frombuffer(re.sub(rb"\s+", b"", body), dtype=np.uint8)
        if len(digits) < w * h:
            raise FormatError(f"{path}: truncated raster ({len(digits)} of {w * h} pixels)")
        digits = digits[: w * h]
        if ((digits != ord("0")) & (digits != ord("1"))).any():
            raise FormatError(f"{path}: plain raster may only hold 0 and 1")
        bits = (digits == ord("1")).reshape(h, w)
    return BinaryImage(bits.astype(bool))


# ---------------------------------------------------------------- tables

CALIBRATION_COLUMNS = ("p", "rho", "box_size", "seeds", "e_hat_p", "min", "max", "std", "values")
RESULT_COLUMNS = ("p", "gamma", "seed", "cade", "e_hat_p", "delta", "clark_evans", "n_particles", "achieved_p")
SUMMARY_COLUMNS = ("p", "gamma", "avg", "max", "min")


def _write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_num(v) if not isinstance(v, str) else v for v in row])


def _read_csv(path, columns: Sequence[str]) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != tuple(columns):
            raise FormatError(f"{path}: expected columns {','.join(columns)}, got {reader.fieldnames}")
        return list(reader)


def save_calibration(path, entries: Sequence[CalibrationEntry] | CalibrationTable) -> None:
    if isinstance(entries, CalibrationTable):
        entries = entries.entries
    rows = [(e.p, e.rho, e.box_size, " ".join(str(s) for s in e.seeds), e.mean, e.min, e.max, e.std,
             " ".join(str(v) for v in e.values)) for e in sorted(entries, key=lambda e: e.p)]
    _write_csv(path, CALIBRATION_COLUMNS, rows)


def load_calibration(path) -> CalibrationTable:
    entries = []
    for row in _read_csv(path, CALIBRATION_COLUMNS):
        try:
            entries.append(CalibrationEntry(
                p=float(row["p"]), rho=float(row["rho"]), box_size=int(row["box_size"]),
                seeds=tuple(int(s) for s in row["seeds"].split()),
                mean=float(row["e_hat_p"]), min=float(row["min"]), max=float(row["max"]),
                std=float(row["std"]), values=tuple(int(v) for v in row["values"].split()),
            ))
        except ValueError as exc:
            raise FormatError(f"{path}: malformed calibration row ({exc})") from None
    return CalibrationTable(entries)


def save_results(path, rows: Iterable[dict]) -> None:
    """Per-run rows, ordered by ``(p, gamma, seed)``."""
    rows = sorted(rows, key=lambda r: (r["p"], r["gamma"], r["seed"]))
    _write_csv(path, RESULT_COLUMNS, ([r[c] for c in RESULT_COLUMNS] for r in rows))


_RESULT_TYPES = {"seed": int, "cade": int, "n_particles": int}


def load_results(path) -> list[dict]:
    out = []
    for row in _read_csv(path, RESULT_COLUMNS):
        try:
            out.append({k: _RESULT_TYPES.get(k, float)(v) for k, v in row.items()})
        except ValueError as exc:
            raise FormatError(f"{path}: malformed result row ({exc})") from None
    return out


def save_summary(path, rows: Iterable[dict], key: str) -> None:
    """``avg, max, min`` of column ``key`` for every ``(p, gamma)`` cell."""
    cells: dict[tuple[float, float], list[float]] = {}
    for r in rows:
        cells.setdefault((r["p"], r["gamma"]), []).append(r[key])
    out = []
    for (p, g), vals in sorted(cells.items()):
        out.append((p, g, math.fsum(vals) / len(vals), max(vals), min(vals)))
    _write_csv(path, SUMMARY_COLUMNS, out)


def append_manifest(path, entry: dict) -> None:
    """Append one JSON record; earlier records are never rewritten."""
    with open(path, "a") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")


def read_manifest(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
