import numpy as np
import pytest

from metacash.datasets import BINARY, CATEGORICAL, NUMERIC, Column, Dataset


def numeric_dataset(X, y, dataset_id="synthetic", class_names=None):
    """Build an in-memory Dataset from a float matrix and integer labels."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    features = []
    for j in range(X.shape[1]):
        col = X[:, j].copy()
        features.append(Column(name="x%d" % j, kind=NUMERIC, data=col,
                               mask=np.isnan(col)))
    c = int(y.max()) + 1 if len(y) else 0
    classes = tuple(class_names) if class_names else tuple(
        "c%d" % k for k in range(c))
    return Dataset(id=dataset_id, name=dataset_id, features=features,
                   labels=y, classes=classes)


def add_categorical(ds, name, codes, categories):
    """Append a categorical column (codes use -1 for missing)."""
    codes = np.asarray(codes, dtype=np.int64)
    kind = BINARY if len(categories) == 2 else CATEGORICAL
    ds.features.append(Column(name=name, kind=kind, data=codes,
                              mask=codes < 0, categories=tuple(categories)))
    return ds


def blob_problem(n=120, p=4, c=3, seed=0, spread=2.5):
    """Well-separated gaussian blobs; easy for every learner."""
    rng = np.random.default_rng(seed)
    y = rng.integers(0, c, size=n).astype(np.int64)
    centers = rng.normal(scale=spread, size=(c, p))
    X = rng.normal(size=(n, p)) + centers[y]
    return X, y


@pytest.fixture
def blob_ds():
    X, y = blob_problem(seed=5)
    return numeric_dataset(X, y, dataset_id="blob-fixture")


def write_csv(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")
    return str(path)
