#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpus under data/.

The bundled split is deliberately larger-document than the unit-test
corpora so that timing comparisons on it are stable: ~1.5-3 KiB per
document, 3 classes x 40 train docs, 3 x 60 test docs.
"""

from pathlib import Path

from lftc.corpus import save_csv
from lftc.synthetic import MotifGenerator

SEED = 1234
OUT = Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    gen = MotifGenerator(SEED, classes=3, tokens_per_doc=(200, 400), noise_ratio=0.3)
    train = gen.corpus("synthetic-train", docs_per_class=40, stream="train")
    test = gen.corpus("synthetic-test", docs_per_class=60, stream="test")
    OUT.mkdir(exist_ok=True)
    save_csv(train, OUT / "synthetic_train.csv")
    save_csv(test, OUT / "synthetic_test.csv")
    print(f"wrote {len(train)} train and {len(test)} test docs to {OUT}")


if __name__ == "__main__":
    main()
