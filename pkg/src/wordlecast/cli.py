"""Command-line entry point.

Every command reads the dataset given by ``--data`` and writes JSON/CSV
artifacts into ``--out`` only. Exit codes: 0 success, 1 computation
failure, 2 input or I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import io
import json
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import neural, pipeline
from .dataset import (Corpus, CleaningReport, DatasetError, date_of, day_index,
                      serialize_corpus, validate_word, weekend_stats)
from .difficulty import DifficultyModel, level_summary_csv
from .report import MissingArtifactError, render
from .timeseries import ArimaOrder, diagnose, residual_whiteness

EXIT_OK, EXIT_COMPUTE, EXIT_INPUT = 0, 1, 2
BUCKETS = ("1", "2", "3", "4", "5", "6", "x")


@dataclass
class RunConfig:
    data: str | None = None
    out: str = "out"
    order: tuple[int, int, int] = tuple(pipeline.DEFAULT_ORDER)
    weekend_factor: float | None = None  # None: measured on the cleaned corpus
    decline_start: str = pipeline.DECLINE_START.isoformat()
    test_start: str = pipeline.TEST_START.isoformat()
    k_min: int = 2
    k_max: int = 8
    seed: int = 0
    plots: bool = True
    nn: dict = field(default_factory=dict)  # TrainingConfig overrides

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**d)
        cfg.order = tuple(int(v) for v in cfg.order)
        return cfg

    def validate(self):
        if not self.data:
            raise ValueError("no dataset given (use --data or the config file)")
        if not Path(self.data).is_file():
            raise FileNotFoundError(f"dataset not found: {self.data}")
        ArimaOrder(*self.order)
        _date(self.decline_start)
        _date(self.test_start)
        self.training_config()

    def training_config(self) -> neural.TrainingConfig:
        return neural.TrainingConfig(**self.nn)


def _date(text) -> dt.date:
    try:
        return dt.date.fromisoformat(str(text))
    except ValueError:
        raise ValueError(f"bad date {text!r}: expected YYYY-MM-DD") from None


def _order(text) -> tuple[int, int, int]:
    parts = text.replace(" ", "").split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("order must be p,d,q")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("order must be three integers p,d,q") from None


def _fmt(x) -> str:
    return repr(float(x))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


class Context:
    """Resolved configuration plus lazily computed shared state."""

    def __init__(self, cfg: RunConfig, echo=print):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.echo = echo
        self._corpus: tuple[Corpus, CleaningReport] | None = None
        self._words = None

    def write(self, name: str, text: str):
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text, encoding="utf-8")

    def write_json(self, name: str, obj):
        self.write(name, json.dumps(obj, indent=2, ensure_ascii=False) + "\n")

    @property
    def corpus(self) -> Corpus:
        if self._corpus is None:
            self._corpus = pipeline.load_clean(self.cfg.data)
        return self._corpus[0]

    @property
    def cleaning(self) -> CleaningReport:
        self.corpus
        return self._corpus[1]

    @property
    def words(self) -> pipeline.WordData:
        if self._words is None:
            self._words = pipeline.word_data(self.corpus)
        return self._words

    @property
    def order(self) -> ArimaOrder:
        return ArimaOrder(*self.cfg.order)

    @property
    def weekend_factor(self) -> float:
        if self.cfg.weekend_factor is None:
            return float(weekend_stats(self.corpus).factor_w)
        return float(self.cfg.weekend_factor)

    @property
    def decline_start(self) -> dt.date:
        return _date(self.cfg.decline_start)


# --- commands --------------------------------------------------------------

def cmd_ingest(ctx: Context, args) -> None:
    corpus, report = ctx.corpus, ctx.cleaning
    ws = weekend_stats(corpus)
    ctx.write("cleaned.csv", serialize_corpus(corpus))
    ctx.write("cleaning_report.json", report.to_json() + "\n")
    ctx.write_json("weekend.json", asdict(ws))
    ctx.write("letter_frequency.csv", ctx.words.table.to_csv())
    ctx.echo(f"{len(corpus)} records {corpus.first_date}..{corpus.last_date}; "
             f"{len(report.word_fixes)} word fixes, {len(report.outlier_fixes)} "
             f"outlier fixes, {len(report.flagged)} flagged; "
             f"weekend factor {ws.factor_w:.5f}")


def cmd_diagnose(ctx: Context, args) -> None:
    series = pipeline.declining_series(ctx.corpus, ctx.decline_start)
    rep = diagnose(series, max_lag=args.max_lag)
    band = _fmt(rep.band_halfwidth)
    ctx.write("acf.csv", _csv(["lag", "acf", "band"],
                              [[k, _fmt(v), band] for k, v in enumerate(rep.acf)]))
    ctx.write("pacf.csv", _csv(["lag", "pacf", "band"],
                               [[k, _fmt(v), band] for k, v in enumerate(rep.pacf, 1)]))
    ctx.write_json("diagnostics.json", {
        "series": [series.first_date.isoformat(), series.last_date.isoformat()],
        **rep.summary()})
    p, d, q = rep.suggested_p, rep.suggested_d, rep.suggested_q
    ctx.echo(f"ADF statistic {rep.adf_statistic:.4f} "
             f"({'rejects' if rep.adf_reject_unit_root else 'does not reject'} a unit root); "
             f"suggested order ({p},{d},{q}), in use {ctx.order}")


def _fit_series(ctx: Context):
    ev = pipeline.evaluate_window(ctx.corpus, ctx.order, ctx.weekend_factor,
                                  ctx.decline_start, _date(ctx.cfg.test_start))
    history = pipeline.declining_series(ctx.corpus, ctx.decline_start,
                                        _date(ctx.cfg.test_start) - dt.timedelta(days=1))
    white = residual_whiteness(ev.arimax, history)
    ctx.write("model.json", ev.arimax.to_json() + "\n")
    ctx.write("arima_model.json", ev.arima.to_json() + "\n")
    ctx.write_json("evaluation.json", {**ev.summary(),
                                       "residuals_white": white.white_noise})
    rows = [[int(d), date_of(int(d)).isoformat(), _fmt(a), _fmt(p0), _fmt(p1), _fmt(p2)]
            for d, a, p0, p1, p2 in zip(ev.test_days, ev.actual, ev.arima_pred,
                                        ev.arimax_pred, ev.decay_pred)]
    ctx.write("december_predictions.csv", _csv(
        ["day_index", "date", "actual", "arima", "arimax", "exponential_decay"], rows))
    s = ev.summary()
    ctx.echo(f"test window {s['test_window'][0]}..{s['test_window'][1]}: mean relative error "
             f"ARIMA {s['arima']['mean_relative_error']:.4f}, "
             f"ARIMAX {s['arimax']['mean_relative_error']:.4f}, "
             f"decay {s['exponential_decay']['mean_relative_error']:.4f}; "
             f"ARIMAX MAE {s['arimax']['mae']:.1f}")


def _fit_words(ctx: Context) -> neural.MlpModel:
    data = ctx.words
    cv = neural.cross_validate(data.matrix(), data.targets, ctx.cfg.training_config(),
                               seed=ctx.cfg.seed)
    k = cv.train_size
    pred = neural.predict_raw(cv.forward_model, data.matrix()[k:])
    actual = data.targets[k:]
    collapse = neural.collapse_check(cv.forward_log, pred, actual)
    ctx.write("nn_model.json", cv.forward_model.to_json() + "\n")
    ctx.write_json("nn_evaluation.json", {
        "train_size": k,
        "forward": {"overall_w": cv.forward.overall_w,
                    "bucket_breakdown": list(cv.forward.bucket_breakdown),
                    "epochs": cv.forward_log.epochs, "best_epoch": cv.forward_log.best_epoch},
        "flipped": {"overall_w": cv.flipped.overall_w,
                    "bucket_breakdown": list(cv.flipped.bucket_breakdown),
                    "epochs": cv.flipped_log.epochs, "best_epoch": cv.flipped_log.best_epoch},
        "collapse": asdict(collapse),
    })
    ctx.write("nn_buckets.csv", _csv(
        ["bucket", "actual_mean", "predicted_mean"],
        [[b, _fmt(a), _fmt(p)] for b, a, p in zip(BUCKETS, actual.mean(axis=0),
                                                   pred.mean(axis=0))]))
    recs = ctx.corpus.records[k:]
    ctx.write("nn_predictions.csv", _csv(
        ["date", "word", *(f"pred_{b}" for b in BUCKETS),
         *(f"actual_{b}" for b in BUCKETS), "error"],
        [[r.date.isoformat(), r.word, *map(_fmt, p), *map(_fmt, a), _fmt(e)]
         for r, p, a, e in zip(recs, pred, actual, cv.forward.per_word_error)]))
    ctx.echo(f"network W: forward {cv.forward.overall_w:.4f}, "
             f"flipped {cv.flipped.overall_w:.4f}")
    return cv.forward_model


def cmd_fit(ctx: Context, args) -> None:
    _fit_series(ctx)
    _fit_words(ctx)


def cmd_forecast(ctx: Context, args) -> None:
    target = _date(args.date)
    fc = pipeline.forecast_date(ctx.corpus, target, ctx.order, ctx.weekend_factor,
                                ctx.decline_start)
    ctx.write_json("forecast.json", fc.summary())
    hist = fc.history
    rows = [[int(d), date_of(int(d)).isoformat(), "history", _fmt(v)]
            for d, v in zip(hist.day_indices, hist.values)]
    rows += [[hist.end_day_index + h, date_of(hist.end_day_index + h).isoformat(),
              "horizon", _fmt(v)] for h, v in enumerate(fc.path, 1)]
    ctx.write("forecast_series.csv", _csv(["day_index", "date", "segment", "value"], rows))
    ctx.echo(f"forecast for {target} (day {day_index(target)}): {fc.point_forecast:.0f}")


def _load_or_train_model(ctx: Context, path) -> neural.MlpModel:
    p = Path(path) if path else ctx.out / "nn_model.json"
    if p.is_file():
        return neural.MlpModel.from_json(p.read_text(encoding="utf-8"))
    if path:
        raise FileNotFoundError(f"model file not found: {path}")
    return _fit_words(ctx)


def _difficulty(ctx: Context):
    model, scores, summaries = pipeline.difficulty_levels(ctx.words, ctx.cfg.k_min,
                                                          ctx.cfg.k_max)
    ctx.write("difficulty_model.json", model.to_json() + "\n")
    ctx.write("silhouette_scores.csv", _csv(["k", "silhouette"],
                                            [[k, _fmt(s)] for k, s in scores.items()]))
    ctx.write("level_summary.csv", level_summary_csv(summaries))
    ctx.write("word_levels.csv", _csv(
        ["date", "word", "avg_tries", "level"],
        [[r.date.isoformat(), r.word, _fmt(a), lvl]
         for r, a, lvl in zip(ctx.corpus, ctx.words.averages, model.assignments)]))
    return model


def cmd_difficulty(ctx: Context, args) -> None:
    model = _difficulty(ctx)
    cents = ", ".join(f"{c:.3f}" for c in model.centroids)
    ctx.echo(f"k = {model.k}, mean silhouette {model.mean_silhouette:.4f}, "
             f"centroids {cents}")


def cmd_predict_word(ctx: Context, args) -> None:
    word = validate_word(args.word)
    target = _date(args.date)
    model = _load_or_train_model(ctx, args.model)
    dpath = ctx.out / "difficulty_model.json"
    if dpath.is_file():
        diff = DifficultyModel.from_dict(json.loads(dpath.read_text(encoding="utf-8")))
    else:
        diff = _difficulty(ctx)
    pred = pipeline.predict_word(model, ctx.words, word, target, diff)
    ctx.write_json("prediction.json", pred.summary())
    ctx.write("prediction.csv", _csv(["bucket", "pct"],
                                     [[b, _fmt(v)] for b, v in
                                      zip(BUCKETS, pred.prediction.pct)]))
    pct = " ".join(f"{v:.1f}" for v in pred.prediction.pct)
    ctx.echo(f"{word} on {target}: [{pct}] avg tries {pred.prediction.avg_tries:.3f}, "
             f"level {pred.level}")


def cmd_sensitivity(ctx: Context, args) -> None:
    spec = pipeline.SCENARIOS[args.scenario]
    rep = pipeline.run_sensitivity(ctx.corpus, spec, _date(args.date), ctx.order,
                                   ctx.weekend_factor, ctx.decline_start)
    ctx.write_json("sensitivity.json", {"scenario": args.scenario, **rep.summary()})
    ctx.write("sensitivity_days.csv", _csv(
        ["date", "reported_results", *(f"pct_{b}" for b in BUCKETS)],
        [[d["date"], _fmt(d["reported_results"]), *map(_fmt, d["tries_pct"])]
         for d in rep.perturbed_days]))
    ctx.echo(f"{args.scenario}: baseline {rep.baseline_forecast:.0f}, perturbed "
             f"{rep.perturbed_forecast:.0f}, relative deviation {rep.relative_deviation:.4f}")


def cmd_report(ctx: Context, args) -> None:
    produced = render(ctx.out, ctx.cfg.plots)
    ctx.echo(("rendered " if ctx.cfg.plots else "checked ") + ", ".join(produced))


def cmd_run(ctx: Context, args) -> None:
    cmd_ingest(ctx, args)
    cmd_diagnose(ctx, args)
    cmd_fit(ctx, args)
    cmd_forecast(ctx, args)
    cmd_difficulty(ctx, args)
    cmd_predict_word(ctx, args)
    cmd_sensitivity(ctx, args)
    cmd_report(ctx, args)


# --- argument handling -----------------------------------------------------

def _global_flags(parser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--data", default=d, help="input CSV")
    g.add_argument("--out", default=d, help="output directory")
    g.add_argument("--seed", type=int, default=d)
    g.add_argument("--config", default=d, help="JSON file with RunConfig fields")
    g.add_argument("--order", type=_order, default=d, help="ARIMA order p,d,q")
    g.add_argument("--weekend-factor", type=float, default=d,
                   help="weekend modifier (default: measured on the data)")
    g.add_argument("--decline-start", default=d, help="first day of the modelled period")
    g.add_argument("--no-plots", action="store_true", default=d,
                   help="write CSVs only, skip SVG charts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wordlecast",
                                     description="Wordle result forecasting and difficulty")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        _global_flags(p, suppress=True)
        p.set_defaults(func=func)
        return p

    add("ingest", cmd_ingest, "parse and clean the dataset")
    p = add("diagnose", cmd_diagnose, "ACF/PACF, ADF test and suggested order")
    p.add_argument("--max-lag", type=int, default=20)
    add("fit", cmd_fit, "fit ARIMA/ARIMAX/decay and the word network, score hold-outs")
    p = add("forecast", cmd_forecast, "forecast the number of reported results")
    p.add_argument("--date", default=pipeline.TARGET_DATE.isoformat())
    p = add("predict-word", cmd_predict_word, "tries distribution for a word")
    p.add_argument("--word", required=True)
    p.add_argument("--date", required=True)
    p.add_argument("--model", help="trained network JSON (default: out/nn_model.json, "
                                   "trained on demand if absent)")
    p = add("difficulty", cmd_difficulty, "cluster words into difficulty levels")
    p.add_argument("--k-min", type=int, default=argparse.SUPPRESS)
    p.add_argument("--k-max", type=int, default=argparse.SUPPRESS)
    p = add("sensitivity", cmd_sensitivity, "refit with injected players")
    p.add_argument("--scenario", choices=sorted(pipeline.SCENARIOS), default="comap-2023")
    p.add_argument("--date", default=pipeline.TARGET_DATE.isoformat())
    add("report", cmd_report, "render SVG charts from the CSV artifacts")
    p = add("run", cmd_run, "every step above, in order")
    p.add_argument("--word", default="eerie")
    p.add_argument("--date", default=pipeline.TARGET_DATE.isoformat())
    p.add_argument("--model", default=None)
    p.add_argument("--scenario", choices=sorted(pipeline.SCENARIOS), default="comap-2023")
    p.add_argument("--max-lag", type=int, default=20)
    return parser


def resolve_config(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {args.config}")
        base = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(base, dict):
            raise ValueError("config file must hold a JSON object")
    cfg = RunConfig.from_dict(base)
    for name in ("data", "out", "seed", "order", "weekend_factor", "decline_start",
                 "k_min", "k_max"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "no_plots", None):
        cfg.plots = False
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    err = lambda msg: print(f"wordlecast: error: {msg}", file=sys.stderr)
    try:
        cfg = resolve_config(args)
        ctx = Context(cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.func(ctx, args)
    except (MissingArtifactError, FileNotFoundError) as exc:
        err(exc)
        return EXIT_INPUT
    except np.linalg.LinAlgError as exc:
        err(f"numerical failure: {exc}")
        return EXIT_COMPUTE
    except (DatasetError, ValueError, OSError, json.JSONDecodeError) as exc:
        err(exc)
        return EXIT_INPUT
    except (RuntimeError, ArithmeticError) as exc:
        err(exc)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
