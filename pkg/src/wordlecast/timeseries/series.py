from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from ..dataset import Corpus, date_of, day_index


@dataclass(frozen=True, eq=False)
class Series:
    """Daily values starting at ``start_day_index``; one value per calendar day."""

    values: np.ndarray
    start_day_index: int = 1

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("series must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_corpus(cls, corpus: Corpus) -> "Series":
        return cls(np.array(corpus.reported_results, dtype=float),
                   corpus.records[0].day_index)

    def __len__(self):
        return self.values.size

    @property
    def end_day_index(self) -> int:
        return self.start_day_index + self.values.size - 1

    @property
    def day_indices(self) -> np.ndarray:
        return np.arange(self.start_day_index, self.end_day_index + 1)

    @property
    def first_date(self) -> dt.date:
        return date_of(self.start_day_index)

    @property
    def last_date(self) -> dt.date:
        return date_of(self.end_day_index)

    def weekend_flags(self, day_indices=None) -> np.ndarray:
        days = self.day_indices if day_indices is None else day_indices
        return weekend_mask(days)

    def slice_dates(self, start: dt.date | None = None, end: dt.date | None = None) -> "Series":
        lo = 0 if start is None else day_index(start) - self.start_day_index
        hi = len(self) if end is None else day_index(end) - self.start_day_index + 1
        if lo < 0 or hi > len(self) or lo >= hi:
            raise ValueError(f"date range {start}..{end} outside series "
                             f"{self.first_date}..{self.last_date}")
        return Series(self.values[lo:hi], self.start_day_index + lo)

    def extend(self, values) -> "Series":
        return Series(np.concatenate([self.values, np.asarray(values, float)]),
                      self.start_day_index)


def weekend_mask(day_indices) -> np.ndarray:
    # DAY_ONE (2022-01-07) is a Friday: ISO weekday 5
    iso = (np.asarray(day_indices) - 1 + 4) % 7 + 1
    return iso >= 6
