"""Daily Wordle results table: parsing, cleaning, calendar indexing, splits.

Day 1 is 2022-01-07, so 2022-12-31 is day 359 and 2023-03-01 is day 419.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable

DAY_ONE = dt.date(2022, 1, 7)

COLUMNS = (
    "date", "contest_number", "word", "reported_results", "hard_mode",
    "pct_1", "pct_2", "pct_3", "pct_4", "pct_5", "pct_6", "pct_x",
)
PCT_COLUMNS = COLUMNS[5:]

# header spellings of the original contest spreadsheet, after normalisation
_HEADER_ALIASES = {
    "contest number": "contest_number",
    "number of reported results": "reported_results",
    "number in hard mode": "hard_mode",
    "1 try": "pct_1",
    "2 tries": "pct_2",
    "3 tries": "pct_3",
    "4 tries": "pct_4",
    "5 tries": "pct_5",
    "6 tries": "pct_6",
    "7 or more tries (x)": "pct_x",
}

WORD_FIXES = {"clen": "clean", "rprobe": "probe", "tash": "trash", "naïve": "naive"}
OUTLIER_CEILING = 10_000

_WORD_RE = re.compile(r"[a-z]{5}")


class DatasetError(ValueError):
    """Raised for malformed or inconsistent input tables."""


def day_index(date: dt.date) -> int:
    return (date - DAY_ONE).days + 1


def date_of(index: int) -> dt.date:
    return DAY_ONE + dt.timedelta(days=index - 1)


def is_weekend(date: dt.date) -> bool:
    return date.isoweekday() >= 6


@dataclass(frozen=True)
class DailyRecord:
    date: dt.date
    day_index: int
    word: str
    reported_results: int
    hard_mode_count: int
    tries_pct: tuple[int, ...]
    contest_number: int = 0

    @property
    def is_weekend(self) -> bool:
        return is_weekend(self.date)

    def tries_fractions(self) -> list[float]:
        total = sum(self.tries_pct)
        return [p / total for p in self.tries_pct]


@dataclass(frozen=True)
class Corpus:
    records: tuple[DailyRecord, ...]

    def __post_init__(self):
        for prev, cur in zip(self.records, self.records[1:]):
            if cur.day_index != prev.day_index + 1:
                raise DatasetError(
                    f"corpus not contiguous between {prev.date} and {cur.date}")

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def first_date(self) -> dt.date:
        return self.records[0].date

    @property
    def last_date(self) -> dt.date:
        return self.records[-1].date

    @property
    def words(self) -> list[str]:
        return [r.word for r in self.records]

    @property
    def reported_results(self) -> list[int]:
        return [r.reported_results for r in self.records]

    def between(self, start: dt.date | None = None, end: dt.date | None = None) -> "Corpus":
        """Records with ``start <= date <= end`` (either bound optional)."""
        return Corpus(tuple(
            r for r in self.records
            if (start is None or r.date >= start) and (end is None or r.date <= end)
        ))


@dataclass(frozen=True)
class CleaningReport:
    word_fixes: list[tuple[dt.date, str, str]] = field(default_factory=list)
    outlier_fixes: list[tuple[dt.date, int, int]] = field(default_factory=list)
    flagged: list[tuple[dt.date, int]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (self.word_fixes or self.outlier_fixes)

    def to_json(self) -> str:
        return json.dumps({
            "word_fixes": [
                {"date": d.isoformat(), "old": old, "new": new}
                for d, old, new in self.word_fixes],
            "outlier_fixes": [
                {"date": d.isoformat(), "old_value": old, "new_value": new}
                for d, old, new in self.outlier_fixes],
            "flagged": [{"date": d.isoformat(), "value": v} for d, v in self.flagged],
        }, indent=2, ensure_ascii=False)


@dataclass(frozen=True)
class WeekendStats:
    mean_weekday: float
    mean_weekend: float
    factor_w: float


def _normalise_header(name: str) -> str:
    key = re.sub(r"\s+", " ", name.strip().lower())
    return _HEADER_ALIASES.get(key, key)


def _parse_date(text: str) -> dt.date:
    text = text.strip()
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        pass
    m = re.fullmatch(r"(\d{1,2})/(\d{1,2})/(\d{4})", text)
    if m is None:
        raise ValueError(f"unrecognised date {text!r}")
    month, day, year = map(int, m.groups())
    return dt.date(year, month, day)


def _parse_count(text: str) -> int:
    text = text.strip().replace(",", "")
    value = float(text)
    if not math.isfinite(value) or value != int(value) or value < 0:
        raise ValueError(f"not a non-negative integer: {text!r}")
    return int(value)


def parse_dataset(raw_table: str) -> Corpus:
    """Parse the delimited results table into a chronologically ordered corpus.

    The header may use either the canonical column names or the ones of the
    original contest spreadsheet; rows may come in any order.
    """
    if raw_table.startswith("﻿"):
        raw_table = raw_table[1:]
    lines = [ln for ln in raw_table.splitlines() if ln.strip()]
    if not lines:
        raise DatasetError("no records")
    dialect = "excel-tab" if "\t" in lines[0] else "excel"
    reader = csv.reader(lines, dialect=dialect)
    header = [_normalise_header(h) for h in next(reader)]
    if tuple(header) != COLUMNS:
        raise DatasetError(
            f"header {header} does not match expected columns {list(COLUMNS)}")

    records = []
    seen: dict[dt.date, int] = {}
    for rowno, row in enumerate(reader, start=2):
        if len(row) != len(COLUMNS):
            raise DatasetError(
                f"row {rowno}: expected {len(COLUMNS)} columns, got {len(row)}")
        values = dict(zip(COLUMNS, row))
        col = "date"
        try:
            date = _parse_date(values["date"])
            col = "contest_number"
            contest = _parse_count(values["contest_number"])
            col = "reported_results"
            reported = _parse_count(values["reported_results"])
            col = "hard_mode"
            hard = _parse_count(values["hard_mode"])
            pct = []
            for col in PCT_COLUMNS:
                pct.append(_parse_count(values[col]))
        except ValueError as exc:
            raise DatasetError(f"row {rowno}, column {col}: {exc}") from None
        if date in seen:
            raise DatasetError(
                f"row {rowno}: duplicate date {date} (first seen on row {seen[date]})")
        seen[date] = rowno
        if hard > reported:
            raise DatasetError(f"row {rowno}, column hard_mode: exceeds reported_results")
        if any(p > 100 for p in pct) or not 95 <= sum(pct) <= 105:
            raise DatasetError(f"row {rowno}: tries percentages {pct} out of range")
        records.append(DailyRecord(
            date=date, day_index=day_index(date), word=values["word"].strip().lower(),
            reported_results=reported, hard_mode_count=hard, tries_pct=tuple(pct),
            contest_number=contest,
        ))

    if not records:
        raise DatasetError("no records")
    records.sort(key=lambda r: r.date)
    for prev, cur in zip(records, records[1:]):
        if (cur.date - prev.date).days != 1:
            raise DatasetError(f"missing date(s) between {prev.date} and {cur.date}")
    return Corpus(tuple(records))


def load_dataset(path) -> Corpus:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_dataset(fh.read())


def serialize_corpus(corpus: Corpus) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in corpus:
        writer.writerow([r.date.isoformat(), r.contest_number, r.word,
                         r.reported_results, r.hard_mode_count, *r.tries_pct])
    return buf.getvalue()


def validate_word(word: str) -> str:
    if not isinstance(word, str) or not _WORD_RE.fullmatch(word):
        raise DatasetError(f"invalid word {word!r}: need 5 lowercase letters a-z")
    return word


def clean_corpus(corpus: Corpus) -> tuple[Corpus, CleaningReport]:
    """Apply the known word corrections and repair isolated low outliers.

    A count below 10,000 whose two neighbours both exceed 10,000 is replaced
    by the rounded mean of the neighbours. A low count at either end of the
    series cannot be repaired and is only flagged.
    """
    report = CleaningReport()
    records = list(corpus.records)
    for i, rec in enumerate(records):
        new = WORD_FIXES.get(rec.word)
        if new is not None:
            report.word_fixes.append((rec.date, rec.word, new))
            records[i] = rec = replace(rec, word=new)
        validate_word(rec.word)

    counts = [r.reported_results for r in records]
    for i, value in enumerate(counts):
        if value >= OUTLIER_CEILING:
            continue
        if 0 < i < len(counts) - 1:
            left, right = counts[i - 1], counts[i + 1]
            if left > OUTLIER_CEILING and right > OUTLIER_CEILING:
                fixed = math.floor((left + right) / 2 + 0.5)
                report.outlier_fixes.append((records[i].date, value, fixed))
                records[i] = replace(records[i], reported_results=fixed)
        elif len(counts) > 1:
            neighbour = counts[1] if i == 0 else counts[-2]
            if neighbour > OUTLIER_CEILING:
                report.flagged.append((records[i].date, value))
    return Corpus(tuple(records)), report


def split_train_test(corpus: Corpus, boundary_date: dt.date) -> tuple[Corpus, Corpus]:
    if not corpus.records:
        raise DatasetError("no records")
    if boundary_date <= corpus.first_date:
        raise DatasetError(f"boundary {boundary_date} leaves an empty training group")
    if boundary_date > corpus.last_date:
        raise DatasetError(
            f"boundary {boundary_date} is past the last record {corpus.last_date}")
    k = (boundary_date - corpus.first_date).days
    return Corpus(corpus.records[:k]), Corpus(corpus.records[k:])


def weekend_stats(corpus: Corpus | Iterable[DailyRecord]) -> WeekendStats:
    weekday, weekend = [], []
    for r in corpus:
        (weekend if r.is_weekend else weekday).append(r.reported_results)
    if not weekday or not weekend:
        raise DatasetError("need at least one weekday and one weekend record")
    mean_weekday = sum(weekday) / len(weekday)
    mean_weekend = sum(weekend) / len(weekend)
    return WeekendStats(mean_weekday, mean_weekend,
                        (mean_weekday - mean_weekend) / mean_weekday)
