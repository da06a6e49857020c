"""Regenerate the bundled benchmark datasets in data/.

Run from the repository root:  python3 scripts/make_datasets.py

Provenance (see also data/README.md):

- iris0.csv       Fisher iris via scikit-learn's bundled copy, binarized as
                  setosa ("positive") vs the rest ("negative").
- wisconsin.csv   Wisconsin diagnostic breast cancer (WDBC) via
                  scikit-learn's bundled copy; labels M/B.
- pima_synth.csv  Synthetic stand-in for the Pima diabetes task: 768 rows,
                  8 features, 268 positives, generated from a logistic
                  model with feature interactions (seed below). The real
                  Pima file is not redistributable from this environment.
- housing_synth.csv  Synthetic stand-in for the Boston housing task: 506
                  rows, 13 features, Friedman-style nonlinear target with
                  Gaussian noise (sigma=2.5), shifted to a medv-like scale.
- twonorm.csv     Breiman's twonorm, generated from its definition: 20
                  dims, 7400 rows, classes N(+a, I) and N(-a, I) with
                  a = 2/sqrt(20) in every coordinate.

scikit-learn is required only by this script, not by the package.
"""

import csv
import hashlib
from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def write_csv(name, feature_names, X, labels):
    path = DATA_DIR / name
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(feature_names) + ["label"])
        for row, lab in zip(X, labels):
            w.writerow([repr(float(v)) for v in row] + [lab])
    return path


def make_iris0():
    from sklearn.datasets import load_iris

    d = load_iris()
    labels = ["positive" if t == 0 else "negative" for t in d.target]
    names = [n.replace(" (cm)", "").replace(" ", "_") for n in d.feature_names]
    return write_csv("iris0.csv", names, d.data, labels)


def make_wisconsin():
    from sklearn.datasets import load_breast_cancer

    d = load_breast_cancer()
    # target 0 = malignant in sklearn's encoding
    labels = ["M" if t == 0 else "B" for t in d.target]
    names = [n.replace(" ", "_") for n in d.feature_names]
    return write_csv("wisconsin.csv", names, d.data, labels)


def make_pima_synth(seed=20240801):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    m, n = 768, 8
    X = rng.normal(size=(m, n))
    # Mildly nonlinear score with three informative features, two weak
    # ones and an interaction; calibrated so boosting reaches AUC ~ 0.8.
    z = (
        0.9 * X[:, 0]
        + 0.7 * X[:, 1]
        - 0.6 * X[:, 2]
        + 0.5 * X[:, 0] * X[:, 3]
        + 0.3 * X[:, 4] ** 2
        - 0.3
    )
    p = 1.0 / (1.0 + np.exp(-1.1 * z))
    y = rng.random(m) < p
    # Force the 500/268 negative/positive split of the original task.
    want_pos = 268
    pos_idx = np.flatnonzero(y)
    neg_idx = np.flatnonzero(~y)
    scores = z + rng.normal(scale=0.5, size=m)
    if len(pos_idx) > want_pos:
        drop = pos_idx[np.argsort(scores[pos_idx])[: len(pos_idx) - want_pos]]
        y[drop] = False
    elif len(pos_idx) < want_pos:
        add = neg_idx[np.argsort(-scores[neg_idx])[: want_pos - len(pos_idx)]]
        y[add] = True
    labels = ["tested_positive" if v else "tested_negative" for v in y]
    names = [f"f{i}" for i in range(n)]
    return write_csv("pima_synth.csv", names, X, labels)


def make_housing_synth(seed=20240802):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    m, n = 506, 13
    X = rng.random(size=(m, n))
    signal = (
        10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
        + 20.0 * (X[:, 2] - 0.5) ** 2
        + 10.0 * X[:, 3]
        + 5.0 * X[:, 4]
    )
    y = signal + rng.normal(scale=2.5, size=m) + 8.0  # medv-like location
    path = DATA_DIR / "housing_synth.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"f{i}" for i in range(n)] + ["medv"])
        for row, t in zip(X, y):
            w.writerow([repr(float(v)) for v in row] + [repr(float(t))])
    return path


def make_twonorm(seed=20240803, m=7400, n=20):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    a = 2.0 / np.sqrt(n)
    y = rng.integers(0, 2, size=m)
    means = np.where(y[:, None] == 1, a, -a)
    X = rng.normal(size=(m, n)) + means
    labels = ["plus" if v == 1 else "minus" for v in y]
    return write_csv("twonorm.csv", [f"f{i}" for i in range(n)], X, labels)


def main():
    DATA_DIR.mkdir(exist_ok=True)
    paths = [
        make_iris0(),
        make_wisconsin(),
        make_pima_synth(),
        make_housing_synth(),
        make_twonorm(),
    ]
    sums = []
    for p in sorted(paths):
        digest = hashlib.sha256(p.read_bytes()).hexdigest()
        sums.append(f"{digest}  {p.name}")
        print(sums[-1])
    (DATA_DIR / "SHA256SUMS").write_text("\n".join(sums) + "\n")


if __name__ == "__main__":
    main()
