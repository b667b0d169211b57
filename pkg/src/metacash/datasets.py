"""Loading and representing tabular classification datasets.

A dataset is parsed from a delimited text file with a header row.  Column
types are inferred per column: numeric when every non-missing cell parses
as a number, binary when there are exactly two distinct values, otherwise
categorical.  Missing cells are kept in a mask and never imputed here;
imputation is a pipeline decision.  Rows with a missing target are dropped
(counted, reported).  Class labels are remapped to dense integers 0..c-1
in sorted order of the original label strings.
"""

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

MISSING_TOKENS = frozenset({"", "?", "NA", "NaN", "nan"})
DELIMITERS = (",", ";", "\t")

NUMERIC = "numeric"
BINARY = "binary"
CATEGORICAL = "categorical"


class DatasetError(ValueError):
    """Base class for ingestion failures."""


class ParseError(DatasetError):
    def __init__(self, message, row=None, col=None):
        self.row = row
        self.col = col
        where = ""
        if row is not None:
            where = " at row %d" % row
            if col is not None:
                where += ", column %d" % col
        super().__init__(message + where)


class TargetMissingError(DatasetError):
    pass


class SingleClassTargetError(DatasetError):
    pass


@dataclass
class Column:
    """One feature column: typed values plus a missing mask.

    ``data`` is float64 for numeric columns (NaN where missing) and int64
    codes for binary/categorical ones (-1 where missing, otherwise an
    index into ``categories``).
    """

    name: str
    kind: str
    data: np.ndarray
    mask: np.ndarray
    categories: tuple = ()

    @property
    def n_missing(self):
        return int(np.count_nonzero(self.mask))

    def original_value(self, i):
        """Cell as it would appear in the source file ('' when missing)."""
        if self.mask[i]:
            return ""
        if self.kind == NUMERIC:
            return repr(float(self.data[i]))
        return self.categories[int(self.data[i])]


@dataclass
class Dataset:
    """Immutable tabular classification task."""

    id: str
    name: str
    features: list
    labels: np.ndarray
    classes: tuple
    dropped_rows: int = 0
    source: str = ""

    @property
    def n(self):
        return int(len(self.labels))

    @property
    def p(self):
        return int(len(self.features))

    @property
    def c(self):
        return int(len(self.classes))

    @property
    def n_missing_cells(self):
        return int(sum(col.n_missing for col in self.features))

    @property
    def class_counts(self):
        return np.bincount(self.labels, minlength=self.c)

    def columns_of_kind(self, kind):
        return [col for col in self.features if col.kind == kind]

    def numeric_matrix(self):
        """Numeric columns only, as (matrix with NaN for missing, names)."""
        cols = self.columns_of_kind(NUMERIC)
        if not cols:
            return np.empty((self.n, 0)), []
        return np.column_stack([c.data for c in cols]), [c.name for c in cols]

    def ordinal_matrix(self):
        """All columns as float64: numeric as-is, the rest as category
        codes; missing entries are NaN."""
        out = np.empty((self.n, self.p))
        for j, col in enumerate(self.features):
            if col.kind == NUMERIC:
                out[:, j] = col.data
            else:
                v = col.data.astype(np.float64)
                v[col.mask] = np.nan
                out[:, j] = v
        return out

    def subset(self, indices):
        """Row subset as a new Dataset (categories and classes preserved)."""
        indices = np.asarray(indices)
        cols = [Column(c.name, c.kind, c.data[indices].copy(),
                       c.mask[indices].copy(), c.categories)
                for c in self.features]
        return Dataset(id=self.id, name=self.name, features=cols,
                       labels=self.labels[indices].copy(), classes=self.classes,
                       dropped_rows=0, source=self.source)


@dataclass
class ManifestEntry:
    id: str
    path: str
    target: str


def _sniff_delimiter(header_line):
    counts = {d: header_line.count(d) for d in DELIMITERS}
    best = max(DELIMITERS, key=lambda d: counts[d])
    if counts[best] == 0:
        return ","
    return best


def _try_float(cell):
    try:
        return float(cell)
    except ValueError:
        return None


def _infer_column(name, cells, missing):
    present = [cells[i] for i in range(len(cells)) if not missing[i]]
    as_numbers = [_try_float(v) for v in present]
    if present and all(v is not None for v in as_numbers):
        data = np.full(len(cells), np.nan)
        pos = 0
        for i in range(len(cells)):
            if not missing[i]:
                data[i] = as_numbers[pos]
                pos += 1
        return Column(name, NUMERIC, data, missing.copy())
    distinct = sorted(set(present))
    kind = BINARY if len(distinct) == 2 else CATEGORICAL
    lookup = {v: i for i, v in enumerate(distinct)}
    codes = np.full(len(cells), -1, dtype=np.int64)
    for i in range(len(cells)):
        if not missing[i]:
            codes[i] = lookup[cells[i]]
    return Column(name, kind, codes, missing.copy(), tuple(distinct))


def _read_table(path):
    if not os.path.exists(path):
        raise FileNotFoundError("dataset file not found: %s" % path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if not first.strip():
            raise ParseError("empty file: %s" % path)
        delim = _sniff_delimiter(first.rstrip("\r\n"))
        fh.seek(0)
        reader = csv.reader(fh, delimiter=delim)
        rows = []
        header = None
        for lineno, row in enumerate(reader, start=1):
            if header is None:
                header = [h.strip() for h in row]
                continue
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue
            if len(row) != len(header):
                raise ParseError(
                    "expected %d fields, found %d" % (len(header), len(row)),
                    row=lineno, col=len(row))
            rows.append([cell.strip() for cell in row])
    if header is None or not rows:
        raise ParseError("no data rows in %s" % path)
    return header, rows


def load_dataset(path, target_name, dataset_id=None, name=None):
    """Parse a delimited file into a Dataset.

    Raises FileNotFoundError, ParseError, TargetMissingError or
    SingleClassTargetError.
    """
    header, rows = _read_table(path)
    if target_name not in header:
        raise TargetMissingError(
            "target column %r not in header %r" % (target_name, header))
    t_idx = header.index(target_name)

    kept, dropped = [], 0
    for row in rows:
        if row[t_idx] in MISSING_TOKENS:
            dropped += 1
        else:
            kept.append(row)
    if not kept:
        raise SingleClassTargetError("all rows have a missing target")

    raw_labels = [row[t_idx] for row in kept]
    classes = tuple(sorted(set(raw_labels)))
    if len(classes) < 2:
        raise SingleClassTargetError(
            "target %r has a single class %r" % (target_name, classes))
    lookup = {v: i for i, v in enumerate(classes)}
    labels = np.array([lookup[v] for v in raw_labels], dtype=np.int64)

    features = []
    for j, col_name in enumerate(header):
        if j == t_idx:
            continue
        cells = [row[j] for row in kept]
        missing = np.array([cell in MISSING_TOKENS for cell in cells])
        features.append(_infer_column(col_name, cells, missing))
    if not features:
        raise ParseError("dataset has no feature columns")

    stem = os.path.splitext(os.path.basename(path))[0]
    return Dataset(id=dataset_id or stem, name=name or stem,
                   features=features, labels=labels, classes=classes,
                   dropped_rows=dropped, source=os.path.abspath(path))


def save_dataset(ds, path, target_name="target", delimiter=","):
    """Write a Dataset back out as delimited text (round-trips types)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow([c.name for c in ds.features] + [target_name])
        for i in range(ds.n):
            row = [c.original_value(i) for c in ds.features]
            row.append(ds.classes[ds.labels[i]])
            writer.writerow(row)


def parse_manifest(path):
    """Read a dataset manifest: one 'id,path,target' line per dataset.

    Relative paths resolve against the manifest's directory.  Blank lines
    and lines starting with '#' are skipped.
    """
    if not os.path.exists(path):
        raise FileNotFoundError("manifest not found: %s" % path)
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = next(csv.reader(io.StringIO(line)))
            if len(parts) != 3:
                raise ParseError("manifest line needs id,path,target",
                                 row=lineno)
            ds_id, rel, target = (p.strip() for p in parts)
            if ds_id.lower() == "id" and target.lower() == "target" and lineno == 1:
                continue
            full = rel if os.path.isabs(rel) else os.path.join(base, rel)
            entries.append(ManifestEntry(ds_id, full, target))
    if not entries:
        raise ParseError("manifest %s lists no datasets" % path)
    seen = set()
    for e in entries:
        if e.id in seen:
            raise ParseError("duplicate dataset id %r in manifest" % e.id)
        seen.add(e.id)
    return entries
