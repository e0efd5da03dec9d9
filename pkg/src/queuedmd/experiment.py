"""Identification/prediction experiments, parameter sweeps and their on-disk reports.

The protocol: identify on the first ``m`` snapshot pairs (state columns
``0..m``), then predict open loop from the end of the training window
(columns ``m+1 ..``) with the known signal plan as future control.
"""
from __future__ import annotations

import hashlib
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, io, linalg, predict, simqueue, sysid
from .errors import ConfigError, CoverageError, QueueDmdError
from .snapshots import ControlSequence, TimeSeries, build_snapshot_pair

METHODS = ("dmdc", "hdmdc")


def _ints(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).replace(",", " ").split())


@dataclass(frozen=True)
class ExperimentConfig:
    """Experiment settings; defaults follow the 400-snapshot / h=9 protocol."""

    source: str = "simulate"
    states_csv: str = ""
    controls_csv: str = ""
    train_snapshots: int = 400
    predict_steps: tuple = (200, 400, 1200)
    embedding: int = 9
    rank: object = linalg.AUTO
    method: str = "both"
    seed: int = 17
    arrival_model: str = "poisson"
    duration_seconds: int = 3600
    warmup_seconds: int = 900
    sweep_train_snapshots: tuple = (200, 400, 800)
    sweep_embedding: tuple = (1, 5, 9)
    sweep_predict_steps: tuple = (200, 400, 800)
    workers: int = 1

    def __post_init__(self):
        for name in ("predict_steps", "sweep_train_snapshots", "sweep_embedding", "sweep_predict_steps"):
            object.__setattr__(self, name, _ints(getattr(self, name)))
        object.__setattr__(self, "rank", linalg.parse_rank_spec(self.rank))

    def violations(self) -> list[str]:
        out = []
        if self.source not in ("simulate", "csv"):
            out.append(f"source must be simulate or csv, got {self.source!r}")
        if self.source == "csv" and not (self.states_csv and self.controls_csv):
            out.append("source = csv needs states_csv and controls_csv")
        if self.method not in ("dmdc", "hdmdc", "both"):
            out.append(f"method must be dmdc, hdmdc or both, got {self.method!r}")
        if self.embedding < 1:
            out.append(f"embedding must be >= 1, got {self.embedding}")
        if self.train_snapshots < self.embedding + 2:
            out.append(f"train_snapshots={self.train_snapshots} must be >= embedding + 2 = {self.embedding + 2}")
        if not self.predict_steps or min(self.predict_steps) < 1:
            out.append("predict_steps must be a nonempty list of positive integers")
        for name in ("sweep_train_snapshots", "sweep_embedding", "sweep_predict_steps"):
            if not getattr(self, name):
                out.append(f"{name} must be nonempty")
        if self.workers < 1:
            out.append("workers must be >= 1")
        return out

    def validate(self):
        v = self.violations()
        if v:
            raise ConfigError(v)

    @property
    def methods(self) -> tuple[str, ...]:
        return METHODS if self.method == "both" else (self.method,)

    def depth(self, method: str) -> int:
        return 1 if method == "dmdc" else self.embedding

    def canonical_text(self) -> str:
        lines = []
        for f in fields(self):
            if f.name in ("states_csv", "controls_csv", "workers"):
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ", ".join(str(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


CONFIG_KEYS = frozenset(f.name for f in fields(ExperimentConfig))
_INT_KEYS = {"train_snapshots", "embedding", "seed", "duration_seconds", "warmup_seconds", "workers"}


def config_from_mapping(mapping: dict, **overrides) -> ExperimentConfig:
    kw = {}
    for key, value in mapping.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _INT_KEYS:
            try:
                value = int(value)
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {value!r}") from None
        kw[key] = value
    kw.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = ExperimentConfig(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def load_config(path=None, **overrides) -> ExperimentConfig:
    """Read a ``key = value`` config file; keyword overrides win."""
    mapping = {}
    if path is not None:
        mapping = io.parse_keyvalue(Path(path).read_text(encoding="utf-8"), allowed=CONFIG_KEYS)
    return config_from_mapping(mapping, **overrides)


@dataclass(frozen=True)
class Dataset:
    series: TimeSeries
    controls: ControlSequence
    t0: int = 0
    digest: str = ""


def _data_digest(series, controls) -> str:
    h = hashlib.sha256()
    h.update(io.emit_states(None, series).encode() if series.n_states == 8 else series.values.tobytes())
    h.update(io.emit_controls(None, controls).encode() if controls.n_inputs == 8 else controls.values.tobytes())
    return h.hexdigest()


def load_data(config: ExperimentConfig) -> Dataset:
    if config.source == "csv":
        series, controls = io.ingest_csv(config.states_csv, config.controls_csv)
        t0 = io.read_states(config.states_csv)[1]
    else:
        trace = simqueue.simulate(simqueue.default_config(
            seed=config.seed,
            arrival_model=config.arrival_model,
            duration_seconds=config.duration_seconds,
            warmup_seconds=config.warmup_seconds,
        ))
        series, controls, t0 = trace.queues, trace.controls, trace.t0
    return Dataset(series, controls, t0, _data_digest(series, controls))


# -- identification and prediction -----------------------------------------

def identify(series, controls, method: str, m: int, h: int, rank=linalg.AUTO) -> sysid.LinearModel:
    if method == "dmdc":
        pair = build_snapshot_pair(series, 0, m)
        return sysid.dmdc(pair, controls.values[:, :m], rank)
    return sysid.hdmdc(series, controls, h, m, rank)


def required_steps(m: int, horizon: int) -> int:
    """State columns needed to train on ``m`` pairs and check ``horizon`` predictions."""
    return m + 1 + horizon


def check_coverage(n_steps: int, m: int, h: int, horizon: int):
    if m < h + 2:
        raise ConfigError(f"train_snapshots={m} must be >= h + 2 = {h + 2}")
    need = required_steps(m, horizon)
    if need > n_steps:
        raise CoverageError(
            f"m={m}, h={h}, horizon={horizon} need {need} snapshots but the data has {n_steps}"
        )


def forecast(model, series, controls, m: int, steps: int) -> predict.PredictionResult:
    """Predict columns ``m+1 .. m+steps`` from the last ``h`` training states."""
    h = model.h
    hist = series.values[:, m - h + 1:m + 1]
    u = controls.values[:, m - h + 1:m + steps]
    return predict.rollout(model, hist, u, steps, start_index=m + 1)


def _metric_pair(actual, result):
    if result.overflow_columns:
        return math.nan, math.nan
    es = predict.error_series(actual, result)
    return es.aggregate_rmse, es.aggregate_mae


def evaluate_cell(series, controls, m: int, h: int, window: int, rank=linalg.AUTO):
    """Train HDMDc (plain DMDc when ``h == 1``) and score one prediction window."""
    check_coverage(series.n_steps, m, h, window)
    model = identify(series, controls, "dmdc" if h == 1 else "hdmdc", m, h, rank)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", predict.InstabilityWarning)
        res = forecast(model, series, controls, m, window)
    actual = series.values[:, m + 1:m + 1 + window]
    return _metric_pair(actual, res)


# -- report bundle ----------------------------------------------------------

def _prediction_csv(path, t0, actual, predicted):
    names = simqueue.MOVEMENTS if actual.shape[0] == 8 else [str(i) for i in range(actual.shape[0])]
    header = ["t"] + [f"actual_q_{m}" for m in names] + [f"pred_q_{m}" for m in names]
    rows = [",".join(header)]
    for j in range(actual.shape[1]):
        rows.append(",".join([str(t0 + j)] + [io.fmt(v) for v in actual[:, j]] + [io.fmt(v) for v in predicted[:, j]]))
    Path(path).write_text("\n".join(rows) + "\n", encoding="ascii", newline="\n")


def read_prediction_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(actual, predicted)`` matrices from a predicted-vs-actual CSV."""
    lines = Path(path).read_text(encoding="ascii").strip("\n").split("\n")
    header = lines[0].split(",")
    act_idx = [i for i, c in enumerate(header) if c.startswith("actual_")]
    pred_idx = [i for i, c in enumerate(header) if c.startswith("pred_")]
    if not act_idx or len(act_idx) != len(pred_idx):
        raise ConfigError(f"{path}: expected matching actual_* and pred_* columns")
    data = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    return data[:, act_idx].T, data[:, pred_idx].T


@dataclass
class ExperimentReport:
    out_dir: Path
    files: list = field(default_factory=list)
    metrics_rows: list = field(default_factory=list)
    models: dict = field(default_factory=dict)
    predictions: dict = field(default_factory=dict)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_experiment(config: ExperimentConfig, out_dir, data: Dataset | None = None) -> ExperimentReport:
    """Identify, predict every horizon and write the report bundle to ``out_dir``.

    Coverage is checked for every method before anything is written.
    """
    config.validate()
    data = data or load_data(config)
    series, controls = data.series, data.controls
    m = config.train_snapshots
    horizon = max(config.predict_steps)
    for method in config.methods:
        check_coverage(series.n_steps, m, config.depth(method), horizon)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = ExperimentReport(out)

    def written(name):
        rep.files.append(name)
        return out / name

    per_state = []
    for method in config.methods:
        h = config.depth(method)
        model = identify(series, controls, method, m, h, config.rank)
        rep.models[method] = model
        io.save_model(written(f"model_{method}.txt"), model)
        io.write_matrix(written(f"A_{method}.csv"), model.a)
        io.write_matrix(written(f"B_{method}.csv"), model.b)

        stab = predict.spectral_stability(model)
        lines = ["index,real,imag,magnitude"]
        for i, (w, mag) in enumerate(zip(stab.eigenvalues, stab.magnitudes)):
            lines.append(f"{i},{io.fmt(w.real)},{io.fmt(w.imag)},{io.fmt(mag)}")
        written(f"eigenvalues_{method}.csv").write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")

        full = forecast(model, series, controls, m, horizon)
        for steps in config.predict_steps:
            actual = series.values[:, m + 1:m + 1 + steps]
            pred = full.predicted[:, :steps]
            res = predict.PredictionResult(pred, m + 1, h, full.final_state,
                                           tuple(k for k in full.overflow_columns if k < steps))
            rep.predictions[(method, steps)] = res
            _prediction_csv(written(f"prediction_{method}_{steps}.csv"), data.t0 + m + 1, actual, pred)
            rmse, mae = _metric_pair(actual, res)
            rep.metrics_rows.append((method, m, h, steps, rmse, mae))
            if not res.overflow_columns:
                es = predict.error_series(actual, res)
                for i in range(actual.shape[0]):
                    per_state.append((method, steps, i, es.per_state_rmse[i], es.per_state_mae[i]))

    lines = ["method,train_snapshots,embedding,horizon,rmse,mae"]
    lines += [f"{a},{b},{c},{d},{io.fmt(e)},{io.fmt(f)}" for a, b, c, d, e, f in rep.metrics_rows]
    written("metrics.csv").write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")

    names = simqueue.MOVEMENTS if series.n_states == 8 else [str(i) for i in range(series.n_states)]
    lines = ["method,horizon,movement,rmse,mae"]
    lines += [f"{a},{b},{names[i]},{io.fmt(r)},{io.fmt(e)}" for a, b, i, r, e in per_state]
    written("metrics_per_state.csv").write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")

    written("report.txt").write_text(_human_report(config, rep, series, m), encoding="utf-8", newline="\n")

    manifest = [
        f"software = queuedmd {__version__}",
        f"seed = {config.seed}",
        f"config_digest = {config.digest()}",
        f"data_digest = {data.digest}",
    ]
    manifest += [f"file {name} = {_sha256(out / name)}" for name in rep.files]
    written("manifest.txt").write_text("\n".join(manifest) + "\n", encoding="ascii", newline="\n")
    return rep


def _human_report(config, rep, series, m) -> str:
    # negative predictions are clamped here only; CSVs keep raw values
    out = [
        "Queue prediction summary",
        f"training snapshots: {m}, rank: {config.rank}, seed: {config.seed}",
        "",
        f"{'method':<8}{'h':>4}{'horizon':>9}{'RMSE':>10}{'MAE':>10}{'max pred':>10}{'max actual':>12}",
    ]
    for method, _, h, steps, rmse, mae in rep.metrics_rows:
        pred = np.clip(rep.predictions[(method, steps)].predicted, 0.0, None)
        actual = series.values[:, m + 1:m + 1 + steps]
        out.append(f"{method:<8}{h:>4}{steps:>9}{rmse:>10.2f}{mae:>10.2f}{np.nanmax(pred):>10.1f}{actual.max():>12.1f}")
    out.append("")
    for method, model in rep.models.items():
        stab = predict.spectral_stability(model)
        verdict = "stable" if stab.stable else f"unstable ({stab.n_unstable} eigenvalues outside the unit circle)"
        out.append(f"{method}: spectral radius {stab.spectral_radius:.6f}, {verdict}")
    return "\n".join(out) + "\n"


# -- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class SweepGrid:
    train_snapshots: tuple
    embedding: tuple
    window: tuple
    rank: object = linalg.AUTO

    def __post_init__(self):
        for name in ("train_snapshots", "embedding", "window"):
            vals = _ints(getattr(self, name))
            if not vals:
                raise ConfigError(f"sweep {name} list is empty")
            object.__setattr__(self, name, vals)

    def cells(self):
        return sorted({(m, h, w) for m in self.train_snapshots for h in self.embedding for w in self.window})

    @classmethod
    def from_config(cls, config: ExperimentConfig) -> "SweepGrid":
        return cls(config.sweep_train_snapshots, config.sweep_embedding, config.sweep_predict_steps, config.rank)


@dataclass(frozen=True)
class SweepRow:
    m: int
    h: int
    window: int
    status: str
    mae: float = math.nan
    rmse: float = math.nan


def _sweep_cell(series, controls, cell, rank) -> SweepRow:
    m, h, w = cell
    try:
        rmse, mae = evaluate_cell(series, controls, m, h, w, rank)
    except QueueDmdError as exc:
        return SweepRow(m, h, w, exc.code)
    if not (math.isfinite(rmse) and math.isfinite(mae)):
        return SweepRow(m, h, w, "E_UNSTABLE")
    return SweepRow(m, h, w, "ok", mae, rmse)


def run_sweep(grid: SweepGrid, series: TimeSeries, controls: ControlSequence, workers: int = 1) -> list[SweepRow]:
    """One row per ``(m, h, window)`` cell, in lexicographic order.

    Infeasible cells become rows with an error code instead of aborting.
    """
    cells = grid.cells()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda c: _sweep_cell(series, controls, c, grid.rank), cells))
    else:
        rows = [_sweep_cell(series, controls, c, grid.rank) for c in cells]
    return sorted(rows, key=lambda r: (r.m, r.h, r.window))


def sweep_csv(rows) -> str:
    lines = ["train_snapshots,embedding,window,status,mae,rmse"]
    for r in rows:
        mae = io.fmt(r.mae) if r.status == "ok" else ""
        rmse = io.fmt(r.rmse) if r.status == "ok" else ""
        lines.append(f"{r.m},{r.h},{r.window},{r.status},{mae},{rmse}")
    return "\n".join(lines) + "\n"


def write_sweep(path, rows) -> None:
    Path(path).write_text(sweep_csv(rows), encoding="ascii", newline="\n")
