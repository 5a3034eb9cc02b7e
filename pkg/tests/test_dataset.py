import datetime as dt

import pytest

from wordlecast.dataset import (COLUMNS, Corpus, DatasetError, clean_corpus, date_of,
                                day_index, parse_dataset, serialize_corpus,
                                split_train_test, validate_word, weekend_stats)

HEADER = ",".join(COLUMNS)


def row(date, word="crane", count=20000, hard=1000, pct=(0, 5, 25, 35, 22, 10, 3)):
    return ",".join(map(str, (date, 1, word, count, hard, *pct)))


def table(*rows):
    return "\n".join((HEADER, *rows)) + "\n"


def days(start, n, **kw):
    d0 = dt.date.fromisoformat(start)
    return [row((d0 + dt.timedelta(days=i)).isoformat(), **kw) for i in range(n)]


def test_day_index_calendar():
    assert day_index(dt.date(2022, 1, 7)) == 1
    assert day_index(dt.date(2022, 12, 31)) == 359
    assert date_of(419) == dt.date(2023, 3, 1)


def test_parse_assigns_day_419():
    corpus = parse_dataset(table(row("2023-03-01")))
    assert corpus[0].day_index == 419


def test_empty_table():
    with pytest.raises(DatasetError, match="no records"):
        parse_dataset("")
    with pytest.raises(DatasetError, match="no records"):
        parse_dataset(HEADER + "\n")


def test_duplicate_dates():
    with pytest.raises(DatasetError, match="duplicate date"):
        parse_dataset(table(row("2022-03-01"), row("2022-03-01")))


def test_missing_date():
    with pytest.raises(DatasetError, match="missing date"):
        parse_dataset(table(row("2022-03-01"), row("2022-03-03")))


def test_bad_count_reports_row_and_column():
    bad = table(row("2022-03-01"), row("2022-03-02", count="lots"))
    with pytest.raises(DatasetError, match=r"row 3, column reported_results"):
        parse_dataset(bad)


def test_hard_mode_above_reported():
    with pytest.raises(DatasetError, match="hard_mode"):
        parse_dataset(table(row("2022-03-01", count=10, hard=11)))


def test_percentages_must_roughly_sum_to_100():
    with pytest.raises(DatasetError, match="percentages"):
        parse_dataset(table(row("2022-03-01", pct=(0, 0, 0, 0, 0, 0, 50))))


def test_rows_sorted_and_spreadsheet_header():
    header = ("Date,Contest number,Word,Number of  reported results,Number in hard mode,"
              "1 try,2 tries,3 tries,4 tries,5 tries,6 tries,7 or more tries (X)")
    text = "\n".join([header, row("12/31/2022"), row("12/30/2022", word="naïve")])
    corpus = parse_dataset(text)
    assert [r.date for r in corpus] == [dt.date(2022, 12, 30), dt.date(2022, 12, 31)]
    assert corpus[0].word == "naïve"


def test_serialize_round_trip(synthetic_clean):
    corpus, _ = synthetic_clean
    assert parse_dataset(serialize_corpus(corpus)) == corpus


def test_clean_word_fixes():
    corpus = parse_dataset(table(*days("2022-03-01", 1, word="tash"),
                                 *days("2022-03-02", 1, word="naïve")))
    cleaned, report = clean_corpus(corpus)
    assert cleaned.words == ["trash", "naive"]
    assert [(old, new) for _, old, new in report.word_fixes] == [("tash", "trash"),
                                                                  ("naïve", "naive")]


def test_clean_outlier_mean_of_neighbours():
    corpus = parse_dataset(table(row("2022-11-29", count=21000),
                                 row("2022-11-30", count=2569),
                                 row("2022-12-01", count=23000, hard=0)))
    cleaned, report = clean_corpus(corpus)
    assert cleaned.reported_results == [21000, 22000, 23000]
    assert report.outlier_fixes == [(dt.date(2022, 11, 30), 2569, 22000)]


def test_clean_boundary_outlier_only_flagged():
    corpus = parse_dataset(table(row("2022-11-29", count=900, hard=0),
                                 row("2022-11-30", count=23000)))
    cleaned, report = clean_corpus(corpus)
    assert cleaned == corpus
    assert report.flagged == [(dt.date(2022, 11, 29), 900)]
    assert report.empty


def test_clean_no_anomalies_is_identity():
    corpus = parse_dataset(table(*days("2022-03-01", 5)))
    cleaned, report = clean_corpus(corpus)
    assert cleaned == corpus and report.empty and not report.flagged


def test_cleaning_synthetic(synthetic_clean):
    corpus, report = synthetic_clean
    assert len(report.word_fixes) == 4
    assert len(report.outlier_fixes) == 1
    fixed_date = report.outlier_fixes[0][0]
    assert all(r.date in {x.date for x in corpus} for r in corpus)
    assert fixed_date == dt.date(2022, 11, 30)


def test_split_december(synthetic_clean):
    corpus, _ = synthetic_clean
    train, test = split_train_test(corpus, dt.date(2022, 12, 1))
    assert len(test) == 31 and test.first_date == dt.date(2022, 12, 1)
    assert len(train) + len(test) == len(corpus)


def test_split_errors(synthetic_clean):
    corpus, _ = synthetic_clean
    with pytest.raises(DatasetError):
        split_train_test(corpus, corpus.first_date)
    with pytest.raises(DatasetError):
        split_train_test(corpus, corpus.last_date + dt.timedelta(days=1))


def test_weekend_factor_examples():
    # 2022-03-07 is a Monday; two full weeks
    rows = []
    d0 = dt.date(2022, 3, 7)
    for i in range(14):
        d = d0 + dt.timedelta(days=i)
        rows.append(row(d.isoformat(), count=90 if d.isoweekday() >= 6 else 100, hard=0))
    assert weekend_stats(parse_dataset(table(*rows))).factor_w == pytest.approx(0.10)
    flat = parse_dataset(table(*days("2022-03-07", 14)))
    assert weekend_stats(flat).factor_w == 0.0


def test_weekend_factor_needs_both_kinds():
    with pytest.raises(DatasetError):
        weekend_stats(parse_dataset(table(*days("2022-03-07", 5))))


def test_validate_word():
    assert validate_word("eerie") == "eerie"
    for bad in ("EERIE", "abcde1", "four", "naïve"):
        with pytest.raises(DatasetError):
            validate_word(bad)


def test_corpus_rejects_gaps(synthetic_clean):
    corpus, _ = synthetic_clean
    with pytest.raises(DatasetError):
        Corpus((corpus[0], corpus[2]))
