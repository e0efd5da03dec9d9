"""Command-line front end.

Subcommands: ``simulate``, ``identify``, ``predict``, ``sweep``, ``metrics``
and ``experiment``. Failures exit with status 1 after printing one line::

    error code=E_COVERAGE message="..."
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, experiment, io, metrics, predict, simqueue
from .errors import CoverageError, QueueDmdError


def _add_common(p, data=True):
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    if data:
        p.add_argument("--states", help="state CSV (switches the data source to csv)")
        p.add_argument("--controls", help="control CSV")


def _config(args):
    overrides = {"seed": args.seed}
    if getattr(args, "states", None) or getattr(args, "controls", None):
        overrides.update(source="csv", states_csv=args.states, controls_csv=args.controls)
    return experiment.load_config(args.config, **overrides)


def cmd_simulate(args):
    cfg = _config(args)
    trace = simqueue.simulate(simqueue.default_config(
        seed=cfg.seed, arrival_model=cfg.arrival_model,
        duration_seconds=cfg.duration_seconds, warmup_seconds=cfg.warmup_seconds,
    ))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.emit_states(out / "states.csv", trace.queues, trace.t0)
    io.emit_controls(out / "controls.csv", trace.controls, trace.t0)
    (out / "sim_manifest.txt").write_text(
        f"software = queuedmd {__version__}\nseed = {trace.seed_used}\nconfig_digest = {trace.config_digest}\n",
        encoding="ascii", newline="\n",
    )


def cmd_identify(args):
    cfg = _config(args)
    data = experiment.load_data(cfg)
    out = Path(args.out)
    for method in cfg.methods:
        h = cfg.depth(method)
        experiment.check_coverage(data.series.n_steps, cfg.train_snapshots, h, 0)
    out.mkdir(parents=True, exist_ok=True)
    for method in cfg.methods:
        model = experiment.identify(data.series, data.controls, method, cfg.train_snapshots,
                                    cfg.depth(method), cfg.rank)
        io.save_model(out / f"model_{method}.txt", model)
        io.write_matrix(out / f"A_{method}.csv", model.a)
        io.write_matrix(out / f"B_{method}.csv", model.b)
        stab = predict.spectral_stability(model)
        print(f"{method}: h={model.h} rank={model.rank_used} spectral_radius={stab.spectral_radius:.6f}"
              f" stable={stab.stable}")


def cmd_predict(args):
    model = io.load_model(args.model)
    series, controls = io.ingest_csv(args.states, args.controls)
    t0 = io.read_states(args.states)[1]
    start = args.start - t0
    h = model.h
    if start - h < 0:
        raise CoverageError(f"--start needs {h} earlier states in the data")
    u = controls.values[:, start - h:start + args.steps - 1]
    res = predict.rollout(model, series.values[:, start - h:start], u, args.steps, start_index=args.start)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"prediction_{args.steps}.csv"
    stop = start + args.steps
    if stop > series.n_steps:
        raise CoverageError(f"the data ends at t={t0 + series.n_steps - 1}; no truth for t={args.start + args.steps - 1}")
    experiment._prediction_csv(path, args.start, series.values[:, start:stop], res.predicted)
    es = predict.error_series(series.values[:, start:stop], res)
    print(f"rmse={io.fmt(es.aggregate_rmse)} mae={io.fmt(es.aggregate_mae)}")


def cmd_sweep(args):
    cfg = _config(args)
    data = experiment.load_data(cfg)
    rows = experiment.run_sweep(experiment.SweepGrid.from_config(cfg), data.series, data.controls, cfg.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    experiment.write_sweep(out / "sweep.csv", rows)


def cmd_metrics(args):
    lines = ["file,rmse,mae"]
    for path in args.prediction:
        actual, pred = experiment.read_prediction_csv(path)
        rmse, mae = metrics.rmse_mae(actual.ravel(), pred.ravel())
        lines.append(f"{Path(path).name},{io.fmt(rmse)},{io.fmt(mae)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics_recomputed.csv").write_text(text, encoding="ascii", newline="\n")
    sys.stdout.write(text)


def cmd_experiment(args):
    cfg = _config(args)
    rep = experiment.run_experiment(cfg, args.out)
    sys.stdout.write((rep.out_dir / "report.txt").read_text())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="queuedmd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"queuedmd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the intersection simulator and write state/control CSVs")
    _add_common(p, data=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("identify", help="identify DMDc/HDMDc models")
    _add_common(p)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("predict", help="roll a saved model forward")
    p.add_argument("--config", help="unused; accepted for symmetry")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, help="unused; predictions are deterministic")
    p.add_argument("--model", required=True)
    p.add_argument("--states", required=True)
    p.add_argument("--controls", required=True)
    p.add_argument("--start", type=int, required=True, help="t of the first predicted second")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="grid over training size, embedding depth and window")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("metrics", help="recompute RMSE/MAE from predicted-vs-actual CSVs")
    p.add_argument("--config", help="unused; accepted for symmetry")
    p.add_argument("--out", help="directory for metrics_recomputed.csv")
    p.add_argument("--seed", type=int, help="unused")
    p.add_argument("prediction", nargs="+")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("experiment", help="full identify/predict/report run")
    _add_common(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except QueueDmdError as exc:
        print(f"error code={exc.code} message={json.dumps(str(exc))}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error code=E_IO message={json.dumps(str(exc))}", file=sys.stderr)
        return 1
    return 0
