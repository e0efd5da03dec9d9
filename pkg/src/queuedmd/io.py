"""Plain-text formats: state/control CSVs, model files and ``key = value`` configs.

All numbers are written with ``repr(float)``, the shortest decimal that
round-trips (at most 17 significant digits), so emit -> ingest -> emit is
byte-identical. Newlines are ``\\n`` and no locale formatting is applied.
"""
from __future__ import annotations

import io as _io
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .simqueue import MOVEMENTS
from .snapshots import ControlSequence, TimeSeries
from .sysid import LinearModel

STATE_HEADER = ["t"] + [f"q_{m}" for m in MOVEMENTS]
CONTROL_HEADER = ["t"] + [f"u_{m}" for m in MOVEMENTS]
MODEL_MAGIC = "# queuedmd linear model v1"


def fmt(x) -> str:
    x = float(x)
    if x == 0.0:
        return "-0.0" if np.signbit(x) else "0"
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _write_matrix_csv(path, header, t0, values, int_values=False):
    buf = _io.StringIO()
    buf.write(",".join(header) + "\n")
    for j in range(values.shape[1]):
        col = values[:, j]
        cells = [str(int(v)) for v in col] if int_values else [fmt(v) for v in col]
        buf.write(f"{t0 + j}," + ",".join(cells) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="ascii", newline="\n")
    return text


def emit_states(path, series: TimeSeries, t0: int = 0) -> str:
    if series.n_states != len(MOVEMENTS):
        raise ValidationError(f"state CSV needs {len(MOVEMENTS)} states, got {series.n_states}")
    return _write_matrix_csv(path, STATE_HEADER, t0, series.values)


def emit_controls(path, controls: ControlSequence, t0: int = 0) -> str:
    if controls.n_inputs != len(MOVEMENTS):
        raise ValidationError(f"control CSV needs {len(MOVEMENTS)} inputs, got {controls.n_inputs}")
    return _write_matrix_csv(path, CONTROL_HEADER, t0, controls.values, int_values=True)


def _parse_table(text, header, kind):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(f"empty {kind} file", line=1)
    got = lines[0].strip().split(",")
    if got != header:
        raise ParseError(f"expected header {','.join(header)!r}, got {lines[0]!r}", line=1)
    ts, rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.strip().split(",")
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(cells)}", line=lineno)
        try:
            t = int(cells[0])
        except ValueError:
            raise ParseError(f"t must be an integer second, got {cells[0]!r}", line=lineno) from None
        if ts and t != ts[-1] + 1:
            raise ParseError(f"t must increase by 1 (got {t} after {ts[-1]})", line=lineno)
        try:
            row = [float(c) for c in cells[1:]]
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line=lineno) from None
        if not all(np.isfinite(row)):
            raise ParseError("non-finite value", line=lineno)
        ts.append(t)
        rows.append(row)
    if not rows:
        raise ParseError(f"{kind} file has a header but no data rows", line=2)
    return ts, np.array(rows).T


def read_states(path) -> tuple[TimeSeries, int]:
    ts, vals = _parse_table(Path(path).read_text(encoding="ascii"), STATE_HEADER, "state")
    return TimeSeries(vals), ts[0]


def read_controls(path) -> tuple[ControlSequence, int]:
    ts, vals = _parse_table(Path(path).read_text(encoding="ascii"), CONTROL_HEADER, "control")
    bad = np.argwhere((vals != 0.0) & (vals != 1.0))
    if bad.size:
        i, j = bad[0]
        raise ValidationError(
            f"control value {fmt(vals[i, j])} at row {j + 2} (t={ts[j]}), column {CONTROL_HEADER[i + 1]}"
            " is not 0 or 1"
        )
    return ControlSequence(vals), ts[0]


def ingest_csv(state_path, control_path) -> tuple[TimeSeries, ControlSequence]:
    """Read a state CSV and a control CSV covering the same seconds."""
    series, ts0 = read_states(state_path)
    controls, tc0 = read_controls(control_path)
    if ts0 != tc0 or series.n_steps != controls.n_steps:
        raise ValidationError(
            f"state file covers t={ts0}..{ts0 + series.n_steps - 1} but control file covers"
            f" t={tc0}..{tc0 + controls.n_steps - 1}"
        )
    return series, controls


# -- models ---------------------------------------------------------------

def dumps_model(model: LinearModel) -> str:
    out = [MODEL_MAGIC]
    for key in ("h", "n", "q", "rank_used", "training_columns"):
        out.append(f"{key} = {int(getattr(model, key))}")
    for name, mat in (("A", model.a), ("B", model.b)):
        out.append(f"{name} {mat.shape[0]} {mat.shape[1]}")
        out.extend(" ".join(format(float(v), ".17g") for v in row) for row in mat)
    return "\n".join(out) + "\n"


def loads_model(text: str) -> LinearModel:
    lines = text.split("\n")
    if not lines or lines[0] != MODEL_MAGIC:
        raise ParseError("missing model header", line=1)
    meta = {}
    i = 1
    while i < len(lines) and "=" in lines[i]:
        k, v = (s.strip() for s in lines[i].split("=", 1))
        try:
            meta[k] = int(v)
        except ValueError:
            raise ParseError(f"bad integer for {k}", line=i + 1) from None
        i += 1
    mats = {}
    for name in ("A", "B"):
        parts = lines[i].split() if i < len(lines) else []
        if len(parts) != 3 or parts[0] != name:
            raise ParseError(f"expected '{name} rows cols'", line=i + 1)
        rows, cols = int(parts[1]), int(parts[2])
        data = []
        for r in range(rows):
            i += 1
            try:
                vals = [float(x) for x in lines[i].split()]
            except (ValueError, IndexError):
                raise ParseError(f"bad row {r} of {name}", line=i + 1) from None
            if len(vals) != cols:
                raise ParseError(f"row {r} of {name} has {len(vals)} values, expected {cols}", line=i + 1)
            data.append(vals)
        mats[name] = np.array(data).reshape(rows, cols)
        i += 1
    missing = {"h", "n", "q", "rank_used", "training_columns"} - meta.keys()
    if missing:
        raise ParseError(f"model file lacks {sorted(missing)}")
    return LinearModel(mats["A"], mats["B"], meta["h"], meta["n"], meta["q"],
                       meta["rank_used"], meta["training_columns"])


def save_model(path, model: LinearModel) -> None:
    Path(path).write_text(dumps_model(model), encoding="ascii", newline="\n")


def load_model(path) -> LinearModel:
    return loads_model(Path(path).read_text(encoding="ascii"))


def write_matrix(path, mat) -> None:
    """Bare comma-separated matrix, e.g. for heatmap rendering elsewhere."""
    mat = np.atleast_2d(mat)
    text = "".join(",".join(fmt(v) for v in row) + "\n" for row in mat)
    Path(path).write_text(text, encoding="ascii", newline="\n")


# -- key = value configs ---------------------------------------------------

def parse_keyvalue(text: str, allowed=None) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Duplicate keys, lines without ``=`` and (when ``allowed`` is given)
    unknown keys are errors.
    """
    out = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("empty key", line=lineno)
        if allowed is not None and key not in allowed:
            raise ParseError(f"unknown key {key!r}", line=lineno)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", line=lineno)
        out[key] = value
    return out
