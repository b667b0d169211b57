"""Design-matrix assembly for the learners.

Numeric columns pass through (NaN where missing).  Binary and categorical
columns expand to one-hot indicator blocks over the dataset-level category
set, so train and test encode identically.  An optional imputer (mean,
median or mode), fitted on training rows only, fills missing values;
without one, any missing cell raises so callers cannot silently train on
NaNs.
"""

import numpy as np

from ..datasets import NUMERIC


class SchemaError(ValueError):
    pass


class MissingValueError(ValueError):
    pass


class FeatureEncoder:
    """Maps Dataset rows to a float64 matrix with a fixed column layout."""

    def __init__(self, imputation=None):
        if imputation not in (None, "mean", "median", "mode"):
            raise ValueError("unknown imputation %r" % imputation)
        self.imputation = imputation
        self.schema = None          # tuple of (name, kind, categories)
        self.fill_values = None     # per source column, or None
        self.n_out = 0

    def fit(self, ds):
        self.schema = tuple((c.name, c.kind, c.categories) for c in ds.features)
        self.n_out = sum(1 if c.kind == NUMERIC else len(c.categories)
                         for c in ds.features)
        if self.imputation is None:
            self.fill_values = None
            return self
        fills = []
        for col in ds.features:
            present = ~col.mask
            if col.kind == NUMERIC:
                vals = col.data[present]
                if len(vals) == 0:
                    fills.append(0.0)
                elif self.imputation == "mean":
                    fills.append(float(np.mean(vals)))
                elif self.imputation == "median":
                    fills.append(float(np.median(vals)))
                else:  # mode: most frequent value, smallest on ties
                    uniq, counts = np.unique(vals, return_counts=True)
                    fills.append(float(uniq[np.argmax(counts)]))
            else:
                codes = col.data[present]
                if len(codes) == 0:
                    fills.append(0)
                else:
                    # categorical columns always impute by most frequent
                    counts = np.bincount(codes, minlength=len(col.categories))
                    fills.append(int(np.argmax(counts)))
        self.fill_values = fills
        return self

    def _check_schema(self, ds):
        if self.schema is None:
            raise SchemaError("encoder not fitted")
        actual = tuple((c.name, c.kind, c.categories) for c in ds.features)
        if actual != self.schema:
            raise SchemaError("dataset schema does not match training schema")

    def transform(self, ds, rows=None):
        self._check_schema(ds)
        idx = np.arange(ds.n) if rows is None else np.asarray(rows)
        out = np.empty((len(idx), self.n_out))
        j = 0
        for src, col in enumerate(ds.features):
            mask = col.mask[idx]
            if col.kind == NUMERIC:
                v = col.data[idx].copy()
                if mask.any():
                    if self.fill_values is None:
                        raise MissingValueError(
                            "column %r has missing values and no imputation "
                            "is configured" % col.name)
                    v[mask] = self.fill_values[src]
                out[:, j] = v
                j += 1
            else:
                codes = col.data[idx].copy()
                if mask.any():
                    if self.fill_values is None:
                        raise MissingValueError(
                            "column %r has missing values and no imputation "
                            "is configured" % col.name)
                    codes[mask] = self.fill_values[src]
                width = len(col.categories)
                block = np.zeros((len(idx), width))
                block[np.arange(len(idx)), codes] = 1.0
                out[:, j:j + width] = block
                j += width
        return out

    def state(self):
        return {
            "imputation": self.imputation,
            "schema": [[n, k, list(cats)] for n, k, cats in (self.schema or ())],
            "fill_values": self.fill_values,
            "n_out": self.n_out,
        }

    @classmethod
    def from_state(cls, d):
        enc = cls(imputation=d["imputation"])
        enc.schema = tuple((n, k, tuple(cats)) for n, k, cats in d["schema"])
        enc.fill_values = d["fill_values"]
        enc.n_out = int(d["n_out"])
        return enc


class Standardizer:
    """Per-column z-scoring fitted on training rows (zero-variance columns
    pass through unscaled)."""

    def __init__(self):
        self.mean = None
        self.scale = None

    def fit(self, X):
        self.mean = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0.0] = 1.0
        self.scale = sd
        return self

    def transform(self, X):
        return (X - self.mean) / self.scale

    def state(self):
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_state(cls, d):
        s = cls()
        s.mean = np.asarray(d["mean"], dtype=np.float64)
        s.scale = np.asarray(d["scale"], dtype=np.float64)
        return s
