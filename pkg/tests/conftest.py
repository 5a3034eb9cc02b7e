import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synthetic import synthetic_csv  # noqa: E402

from wordlecast.dataset import clean_corpus, load_dataset, parse_dataset  # noqa: E402

FIXTURE_DATA = Path(__file__).parent / "fixtures" / "wordle_2022.csv"


def dataset_path():
    """The contest CSV: $WORDLE_DATA, else tests/fixtures/wordle_2022.csv."""
    env = os.environ.get("WORDLE_DATA")
    path = Path(env) if env else FIXTURE_DATA
    return path if path.is_file() else None


@pytest.fixture(scope="session")
def synthetic_text():
    return synthetic_csv()


@pytest.fixture(scope="session")
def synthetic_path(tmp_path_factory, synthetic_text):
    p = tmp_path_factory.mktemp("data") / "synthetic.csv"
    p.write_text(synthetic_text, encoding="utf-8")
    return p


@pytest.fixture(scope="session")
def synthetic_clean(synthetic_text):
    return clean_corpus(parse_dataset(synthetic_text))


@pytest.fixture(scope="session")
def real_clean():
    path = dataset_path()
    if path is None:
        pytest.skip("contest dataset not present: set WORDLE_DATA or add "
                    "tests/fixtures/wordle_2022.csv")
    return clean_corpus(load_dataset(path))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
