import os
from pathlib import Path

import pytest

from lftc.corpus import Corpus, LabeledText, load_csv

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"

# External benchmark datasets (R8, AGNews, ...) are looked up here when the
# paper-scale acceptance checks run; see README for the expected layout.
DATASET_DIR = Path(os.environ.get("LFTC_DATA_DIR", DATA_DIR))


def corpus_from(pairs, name="tiny") -> Corpus:
    return Corpus(name=name, samples=tuple(LabeledText(l, t) for l, t in pairs))


@pytest.fixture(scope="session")
def bundled_train() -> Corpus:
    return load_csv(DATA_DIR / "synthetic_train.csv")


@pytest.fixture(scope="session")
def bundled_test() -> Corpus:
    return load_csv(DATA_DIR / "synthetic_test.csv")


@pytest.fixture(scope="session")
def motif_split():
    """Small, quickly separable split shared by pipeline-level tests."""
    from lftc.synthetic import make_motif_split

    return make_motif_split(7, train_docs=12, test_docs=8, tokens_per_doc=(20, 40),
                            noise_ratio=0.3)
