from collections import Counter

import numpy as np
import pytest

from wordlecast.dataset import DatasetError
from wordlecast.wordfeat import (FEATURE_COLUMNS, POS_ADJECTIVE, POS_NOUN, POS_OTHER,
                                 POS_UNKNOWN, PosLexicon, Scaling, build_letter_frequency,
                                 default_lexicon, extract_features, normalize_features)


def test_frequency_single_word():
    t = build_letter_frequency(["eerie"])
    assert t["e"] == pytest.approx(0.6)
    assert t["r"] == pytest.approx(0.2) and t["i"] == pytest.approx(0.2)
    assert sum(t.freq) == pytest.approx(1.0)
    assert sum(v > 0 for v in t.freq) == 3


def test_frequency_count_oracle(synthetic_clean):
    corpus, _ = synthetic_clean
    t = build_letter_frequency(corpus)
    counts = Counter("".join(corpus.words))
    total = sum(counts.values())
    for letter in "abcdefghijklmnopqrstuvwxyz":
        assert t[letter] == pytest.approx(counts[letter] / total, abs=1e-15)
    assert sum(t.freq) == pytest.approx(1.0)
    assert t.to_csv().splitlines()[0] == "letter,frequency"


def test_frequency_rejects_uncleaned():
    with pytest.raises(DatasetError):
        build_letter_frequency(["naïve"])
    with pytest.raises(ValueError):
        build_letter_frequency([])


def test_features_eerie():
    t = build_letter_frequency(["eerie", "aback"])
    f = extract_features("eerie", 419, t)
    assert f.letter_ordinals == (5, 5, 18, 9, 5)
    assert (f.unique_count, f.vowel_count, f.consonant_count) == (3, 4, 1)
    assert f.has_triple == 1 and f.has_double == 0
    assert f.day_index == 419
    assert f.pos_code == POS_ADJECTIVE
    assert f.frequency_sum == pytest.approx(sum(t[c] for c in "eerie"))


def test_features_aback():
    f = extract_features("aback", 1, build_letter_frequency(["aback"]))
    assert f.letter_ordinals == (1, 2, 1, 3, 11)
    assert (f.unique_count, f.has_double, f.has_triple) == (4, 1, 0)


def test_features_reject_uppercase():
    with pytest.raises(DatasetError):
        extract_features("EERIE", 1, build_letter_frequency(["eerie"]))


def test_feature_vector_layout():
    f = extract_features("trash", 10, build_letter_frequency(["trash"]))
    v = f.vector()
    assert v.shape == (len(FEATURE_COLUMNS),) == (16,)
    assert v[0] == 10 and list(v[1:6]) == [20, 18, 1, 19, 8]
    assert f.pos_code == POS_NOUN


def test_lexicon():
    lex = default_lexicon()
    assert lex.code("about") == POS_OTHER
    assert lex.code("zzzzz") == POS_UNKNOWN
    custom = PosLexicon.from_lines(["crane,1", "", "eerie,3"])
    assert custom == {"crane": 1, "eerie": 3}
    with pytest.raises(ValueError, match="line 1"):
        PosLexicon.from_lines(["Crane,1"])
    f = extract_features("crane", 1, build_letter_frequency(["crane"]), {"crane": 2})
    assert f.pos_code == 2


def test_normalize_examples():
    X, sc = normalize_features([[0.0, 7.0], [10.0, 7.0]])
    np.testing.assert_array_equal(X, [[0.0, 0.5], [1.0, 0.5]])
    with pytest.warns(RuntimeWarning, match="clamped"):
        out = sc.transform([[20.0, 7.0]])
    np.testing.assert_array_equal(out, [[1.0, 0.5]])
    with pytest.raises(ValueError):
        normalize_features([[1.0, 2.0]])


def test_scaling_round_trip():
    rng = np.random.default_rng(0)
    raw = rng.normal(size=(20, 4))
    X, sc = normalize_features(raw)
    np.testing.assert_allclose(sc.inverse_transform(X), raw)
    back = Scaling.from_dict(sc.to_dict())
    np.testing.assert_array_equal(back.transform(raw), X)
