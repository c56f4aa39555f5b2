from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def read_term_fixtures():
    rows = []
    for line in (FIXTURES / "term_fixtures.tsv").read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        sentence, _, expected = line.partition("\t")
        rows.append((sentence, expected.split()))
    return rows


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
