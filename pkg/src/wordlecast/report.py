"""SVG renderings of the CSV artifacts written by the command line.

Each chart is drawn from exactly one CSV in the output directory, so the
plotted numbers are the numbers in the file.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "wordlecast"
plt.rcParams["svg.fonttype"] = "none"

# chart name -> backing CSV
CHARTS = {
    "forecast.svg": "forecast_series.csv",
    "acf.svg": "acf.csv",
    "pacf.svg": "pacf.csv",
    "december.svg": "december_predictions.csv",
    "distribution.svg": "nn_buckets.csv",
    "letter_frequency.svg": "letter_frequency.csv",
    "levels.svg": "level_summary.csv",
}


class MissingArtifactError(FileNotFoundError):
    pass


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _save(fig, path: Path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_forecast(rows, path):
    fig, ax = plt.subplots(figsize=(8, 4))
    for segment, style in (("history", "-"), ("horizon", "--")):
        part = [r for r in rows if r["segment"] == segment]
        ax.plot([int(r["day_index"]) for r in part], [float(r["value"]) for r in part],
                style, label=segment)
    ax.set_xlabel("day index")
    ax.set_ylabel("reported results")
    ax.legend()
    _save(fig, path)


def plot_correlogram(rows, column, path):
    lags = [int(r["lag"]) for r in rows]
    vals = [float(r[column]) for r in rows]
    band = float(rows[0]["band"])
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.vlines(lags, 0, vals)
    ax.plot(lags, vals, "o", ms=3)
    ax.axhline(band, ls="--", c="grey")
    ax.axhline(-band, ls="--", c="grey")
    ax.axhline(0, c="k", lw=0.5)
    ax.set_xlabel("lag")
    ax.set_ylabel(column.upper())
    _save(fig, path)


def plot_december(rows, path):
    fig, ax = plt.subplots(figsize=(8, 4))
    days = [int(r["day_index"]) for r in rows]
    for col in ("actual", "arima", "arimax", "exponential_decay"):
        ax.plot(days, [float(r[col]) for r in rows], label=col)
    ax.set_xlabel("day index")
    ax.set_ylabel("reported results")
    ax.legend()
    _save(fig, path)


def plot_buckets(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    x = range(len(rows))
    ax.bar([i - 0.2 for i in x], [float(r["actual_mean"]) for r in rows], 0.4, label="actual")
    ax.bar([i + 0.2 for i in x], [float(r["predicted_mean"]) for r in rows], 0.4,
           label="predicted")
    ax.set_xticks(list(x), [r["bucket"] for r in rows])
    ax.set_xlabel("tries")
    ax.set_ylabel("mean percent (test words)")
    ax.legend()
    _save(fig, path)


def plot_pie(labels, values, path):
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.pie(values, labels=labels, startangle=90, counterclock=False)
    ax.set_aspect("equal")
    _save(fig, path)


def render(out_dir, plots: bool = True) -> list[str]:
    """Check every backing CSV exists and, if ``plots``, draw the charts.

    Returns the names of the files produced or checked.

    Raises
    ------
    MissingArtifactError
        Naming every absent CSV.
    """
    out = Path(out_dir)
    missing = sorted({c for c in CHARTS.values() if not (out / c).is_file()})
    if missing:
        raise MissingArtifactError("missing artifacts in " + str(out) + ": "
                                   + ", ".join(missing))
    if not plots:
        return sorted(set(CHARTS.values()))
    data = {c: read_csv(out / c) for c in set(CHARTS.values())}
    plot_forecast(data["forecast_series.csv"], out / "forecast.svg")
    plot_correlogram(data["acf.csv"], "acf", out / "acf.svg")
    plot_correlogram(data["pacf.csv"], "pacf", out / "pacf.svg")
    plot_december(data["december_predictions.csv"], out / "december.svg")
    plot_buckets(data["nn_buckets.csv"], out / "distribution.svg")
    freq = data["letter_frequency.csv"]
    plot_pie([r["letter"] for r in freq], [float(r["frequency"]) for r in freq],
             out / "letter_frequency.svg")
    levels = data["level_summary.csv"]
    plot_pie([f"level {r['level']}" for r in levels], [int(r["count"]) for r in levels],
             out / "levels.svg")
    return sorted(CHARTS)
