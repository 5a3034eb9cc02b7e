"""Difficulty levels: 1-D K-means over average tries, chosen by silhouette."""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .wordfeat import WordFeatures


def avg_tries(dist) -> float:
    """Expected number of tries, counting the failure bucket as 7."""
    p = np.asarray(dist, dtype=float)
    if p.shape != (7,) or np.any(p < 0):
        raise ValueError("need 7 non-negative percentages")
    total = p.sum()
    if total <= 0:
        raise ValueError("distribution is all zero")
    return float(np.arange(1, 8) @ (p / total))


@dataclass(frozen=True)
class DifficultyModel:
    k: int
    centroids: tuple[float, ...]
    assignments: tuple[int, ...]  # level 1..k per input value
    mean_silhouette: float = float("nan")
    wcss: float = float("nan")
    lloyd_trace: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def with_silhouette(self, values) -> "DifficultyModel":
        s = silhouette(values, self.assignments).mean
        return DifficultyModel(self.k, self.centroids, self.assignments, s, self.wcss,
                               self.lloyd_trace)

    def to_dict(self) -> dict:
        return {"k": self.k, "centroids": list(self.centroids),
                "silhouette": self.mean_silhouette}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "DifficultyModel":
        return cls(d["k"], tuple(d["centroids"]), (), d.get("silhouette", float("nan")))


def _wcss(x, labels, centroids) -> float:
    return float(np.sum((x - centroids[labels]) ** 2))


def _nearest(x, centroids):
    # ties go to the lower centroid; centroids are sorted
    return np.argmin(np.abs(x[:, None] - centroids[None, :]), axis=1)


def _lloyd(x, centroids, max_iter=1000):
    trace = []
    labels = _nearest(x, centroids)
    for _ in range(max_iter):
        trace.append(_wcss(x, labels, centroids))
        new = centroids.copy()
        for j in range(centroids.size):
            members = x[labels == j]
            if members.size:
                new[j] = members.mean()
            else:
                # re-seed an empty cluster at the worst-served point
                far = np.argmax((x - centroids[labels]) ** 2)
                new[j] = x[far]
        new = np.sort(new)
        new_labels = _nearest(x, new)
        centroids = new
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    trace.append(_wcss(x, labels, centroids))
    return centroids, labels, trace


def _optimal_partition(x_sorted, k):
    """Minimum-WCSS split of sorted 1-D data into k contiguous groups (DP)."""
    n = x_sorted.size
    s1 = np.r_[0.0, np.cumsum(x_sorted)]
    s2 = np.r_[0.0, np.cumsum(x_sorted ** 2)]

    def costs(j, lo):  # WCSS of points i..j-1 for every i in lo..j-1
        i = np.arange(lo, j)
        m = j - i
        tot = s1[j] - s1[i]
        return np.maximum(0.0, s2[j] - s2[i] - tot * tot / m)

    D = np.full((k + 1, n + 1), np.inf)
    B = np.zeros((k + 1, n + 1), dtype=int)
    D[0, 0] = 0.0
    for c in range(1, k + 1):
        for j in range(c, n - (k - c) + 1):
            v = D[c - 1, c - 1:j] + costs(j, c - 1)
            arg = int(np.argmin(v))
            D[c, j], B[c, j] = v[arg], arg + c - 1
    cuts = [n]
    for c in range(k, 0, -1):
        cuts.append(B[c, cuts[-1]])
    cuts = cuts[::-1]
    return np.array([x_sorted[cuts[c]:cuts[c + 1]].mean() for c in range(k)])


def kmeans_1d(values: Sequence[float], k: int) -> DifficultyModel:
    """Lloyd's algorithm from quantile seeds, checked against the exact optimum.

    Centroid j starts at the (j - 0.5)/k quantile. Because Lloyd's method can
    stop in a local minimum, the exact contiguous-partition optimum is also
    computed; when it has lower WCSS Lloyd is restarted from it (it is a
    fixed point, so the result is that optimum).
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise ValueError("values must be finite and 1-D")
    if k < 1:
        raise ValueError("k must be positive")
    if np.unique(x).size < k:
        raise ValueError(f"k={k} exceeds the number of distinct values")

    seeds = np.quantile(x, (np.arange(1, k + 1) - 0.5) / k)
    centroids, labels, trace = _lloyd(x, np.sort(seeds))
    best = _optimal_partition(np.sort(x), k)
    best_labels = _nearest(x, best)
    if _wcss(x, best_labels, best) < trace[-1] - 1e-12 * max(1.0, trace[-1]):
        centroids, labels, _ = _lloyd(x, best)
    wcss = _wcss(x, labels, centroids)
    return DifficultyModel(k, tuple(float(c) for c in centroids),
                           tuple(int(l) + 1 for l in labels), wcss=wcss,
                           lloyd_trace=tuple(trace))


@dataclass(frozen=True)
class SilhouetteReport:
    per_point: tuple[float, ...]
    mean: float


def silhouette(values, assignments) -> SilhouetteReport:
    """s(i) = (b - a) / max(a, b); points in singleton clusters score 0."""
    x = np.asarray(values, dtype=float)
    lab = np.asarray(assignments)
    clusters = np.unique(lab)
    if clusters.size < 2:
        raise ValueError("silhouette needs at least two clusters")
    dist = np.abs(x[:, None] - x[None, :])
    s = np.zeros(x.size)
    for i in range(x.size):
        own = lab == lab[i]
        n_own = own.sum()
        if n_own == 1:
            continue
        a = dist[i, own].sum() / (n_own - 1)
        b = min(dist[i, lab == c].mean() for c in clusters if c != lab[i])
        denom = max(a, b)
        s[i] = 0.0 if denom == 0 else (b - a) / denom
    return SilhouetteReport(tuple(s.tolist()), float(s.mean()))


def select_k(values, k_min: int = 2, k_max: int = 8) -> tuple[DifficultyModel, dict[int, float]]:
    """K-means for each k in [k_min, k_max]; keep the best mean silhouette.

    Ties go to the smaller k.
    """
    if not 2 <= k_min <= k_max:
        raise ValueError("need 2 <= k_min <= k_max")
    scores, models = {}, {}
    for k in range(k_min, k_max + 1):
        model = kmeans_1d(values, k).with_silhouette(values)
        models[k], scores[k] = model, model.mean_silhouette
    best = max(scores, key=lambda k: (scores[k], -k))
    return models[best], scores


def classify(avg: float, model: DifficultyModel | Sequence[float]) -> int:
    """Level (1-based) of the nearest centroid; exact ties go to the higher level."""
    if not math.isfinite(avg):
        raise ValueError("average tries must be finite")
    centroids = model.centroids if isinstance(model, DifficultyModel) else tuple(model)
    d = [abs(avg - c) for c in centroids]
    best = min(d)
    tol = 1e-12 * max(1.0, abs(avg))
    return max(j for j, dj in enumerate(d) if dj - best <= tol) + 1


SUMMARY_FIELDS = ("frequency_sum", "unique_count", "vowel_count", "consonant_count",
                  "has_double", "has_triple", "avg_tries")


@dataclass(frozen=True)
class LevelSummary:
    level: int
    word_count: int
    means: dict


def level_summary(features: Sequence[WordFeatures], levels: Sequence[int],
                  averages: Sequence[float] | None = None, k: int | None = None
                  ) -> list[LevelSummary]:
    """Per-level means of word attributes; letter frequencies enter as their sum."""
    if len(features) != len(levels):
        raise ValueError("features and levels differ in length")
    k = k or max(levels)
    out = []
    for level in range(1, k + 1):
        idx = [i for i, l in enumerate(levels) if l == level]
        if not idx:
            warnings.warn(f"difficulty level {level} has no words; omitted",
                          RuntimeWarning, stacklevel=2)
            continue
        rows = [features[i] for i in idx]
        means = {
            "frequency_sum": float(np.mean([f.frequency_sum for f in rows])),
            "unique_count": float(np.mean([f.unique_count for f in rows])),
            "vowel_count": float(np.mean([f.vowel_count for f in rows])),
            "consonant_count": float(np.mean([f.consonant_count for f in rows])),
            "has_double": float(np.mean([f.has_double for f in rows])),
            "has_triple": float(np.mean([f.has_triple for f in rows])),
        }
        if averages is not None:
            means["avg_tries"] = float(np.mean([averages[i] for i in idx]))
        out.append(LevelSummary(level, len(idx), means))
    return out


def level_summary_csv(summaries: Sequence[LevelSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = [f for f in SUMMARY_FIELDS if summaries and f in summaries[0].means]
    w.writerow(["level", "count", *keys])
    for s in summaries:
        w.writerow([s.level, s.word_count, *(repr(s.means[f]) for f in keys)])
    return buf.getvalue()


def count_inversions(values: Sequence[float], decreasing: bool = True) -> int:
    """Adjacent steps that go the wrong way for a monotone trend."""
    v = list(values)
    return sum((b > a) if decreasing else (b < a) for a, b in zip(v, v[1:]))
