"""Numeric features of a five-letter word on a given day."""
from __future__ import annotations

import csv
import io
import string
import warnings
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dataset import Corpus, validate_word

LETTERS = string.ascii_lowercase
VOWELS = frozenset("aeiou")

POS_UNKNOWN, POS_NOUN, POS_VERB, POS_ADJECTIVE, POS_ADVERB, POS_OTHER = range(6)

# column order of the network input
BASIC_COLUMNS = (
    "day_index",
    "ord_1", "ord_2", "ord_3", "ord_4", "ord_5",
    "freq_1", "freq_2", "freq_3", "freq_4", "freq_5",
)
EXTRA_COLUMNS = ("unique_count", "vowel_count", "has_double", "has_triple", "pos_code")
FEATURE_COLUMNS = BASIC_COLUMNS + EXTRA_COLUMNS


@dataclass(frozen=True)
class LetterFrequencyTable:
    freq: tuple[float, ...]

    def __post_init__(self):
        if len(self.freq) != 26 or min(self.freq) < 0:
            raise ValueError("need 26 non-negative frequencies")

    def __getitem__(self, letter: str) -> float:
        return self.freq[ord(letter) - ord("a")]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["letter", "frequency"])
        for letter, f in zip(LETTERS, self.freq):
            w.writerow([letter, repr(f)])
        return buf.getvalue()


def build_letter_frequency(corpus: Corpus | Iterable[str]) -> LetterFrequencyTable:
    words = corpus.words if isinstance(corpus, Corpus) else list(corpus)
    if not words:
        raise ValueError("empty corpus")
    counts = Counter()
    for w in words:
        counts.update(validate_word(w))
    total = 5 * len(words)
    return LetterFrequencyTable(tuple(counts[c] / total for c in LETTERS))


class PosLexicon(dict):
    """word -> part-of-speech code; unknown words map to 0."""

    def code(self, word: str) -> int:
        return self.get(word, POS_UNKNOWN)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "PosLexicon":
        lex = cls()
        for lineno, line in enumerate(lines, start=1):
            line = line.strip()
            if not line:
                continue
            word, _, code = line.partition(",")
            try:
                lex[validate_word(word)] = int(code)
            except ValueError as exc:
                raise ValueError(f"lexicon line {lineno}: {exc}") from None
        return lex


@lru_cache(maxsize=1)
def default_lexicon() -> PosLexicon:
    text = resources.files("wordlecast").joinpath("data/pos_lexicon.csv").read_text("ascii")
    return PosLexicon.from_lines(text.splitlines())


@dataclass(frozen=True)
class WordFeatures:
    word: str
    day_index: int
    letter_ordinals: tuple[int, ...]
    letter_freqs: tuple[float, ...]
    unique_count: int
    vowel_count: int
    consonant_count: int
    has_double: int
    has_triple: int
    pos_code: int

    @property
    def frequency_sum(self) -> float:
        return float(sum(self.letter_freqs))

    def vector(self, columns: Sequence[str] = FEATURE_COLUMNS) -> np.ndarray:
        """Feature values in ``columns`` order.

        The default drops ``consonant_count``, which is always 5 minus the
        vowel count.
        """
        values = {
            "day_index": self.day_index,
            "unique_count": self.unique_count,
            "vowel_count": self.vowel_count,
            "consonant_count": self.consonant_count,
            "has_double": self.has_double,
            "has_triple": self.has_triple,
            "pos_code": self.pos_code,
            "frequency_sum": self.frequency_sum,
        }
        for i in range(5):
            values[f"ord_{i + 1}"] = self.letter_ordinals[i]
            values[f"freq_{i + 1}"] = self.letter_freqs[i]
        return np.array([values[c] for c in columns], dtype=float)


def extract_features(word: str, day_index: int, table: LetterFrequencyTable,
                     lexicon: Mapping[str, int] | None = None) -> WordFeatures:
    validate_word(word)
    if lexicon is None:
        lexicon = default_lexicon()
    counts = Counter(word).values()
    vowels = sum(c in VOWELS for c in word)
    return WordFeatures(
        word=word,
        day_index=int(day_index),
        letter_ordinals=tuple(ord(c) - ord("a") + 1 for c in word),
        letter_freqs=tuple(table[c] for c in word),
        unique_count=len(counts),
        vowel_count=vowels,
        consonant_count=5 - vowels,
        has_double=int(2 in counts),
        has_triple=int(max(counts) >= 3),
        pos_code=int(lexicon.get(word, POS_UNKNOWN)),
    )


@dataclass(frozen=True)
class Scaling:
    """Per-column min-max bounds learned from training rows."""

    mins: np.ndarray
    maxs: np.ndarray

    def transform(self, X, warn: bool = True) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        span = self.maxs - self.mins
        constant = span == 0
        out = np.where(constant, 0.5, (X - self.mins) / np.where(constant, 1.0, span))
        if np.any((out < 0) | (out > 1)):
            if warn:
                warnings.warn("features outside the training range clamped to [0, 1]",
                              RuntimeWarning, stacklevel=2)
            out = np.clip(out, 0.0, 1.0)
        return out

    def inverse_transform(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return self.mins + U * (self.maxs - self.mins)

    def to_dict(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Scaling":
        return cls(np.array(d["mins"], dtype=float), np.array(d["maxs"], dtype=float))


def normalize_features(rows) -> tuple[np.ndarray, Scaling]:
    """Min-max scale each column to [0, 1]; constant columns become 0.5."""
    X = np.array([r.vector() if isinstance(r, WordFeatures) else r for r in rows],
                 dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 rows to normalise")
    scaling = Scaling(X.min(axis=0), X.max(axis=0))
    return scaling.transform(X, warn=False), scaling
