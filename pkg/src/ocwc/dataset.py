"""Binary classification datasets: loading, validation, padding, decoding.

A dataset is n rows of k binary features plus one binary class column. The
oblivious machinery needs a power-of-two row count, so datasets are padded
with dummy rows (all-zero features, class 0) marked invalid by a validity
column; every consistency decision downstream guards on validity so dummies
can never influence the result.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError

FeatureMask = tuple[int, ...]


@dataclass(frozen=True)
class Dataset:
    """Immutable binary dataset with named features.

    feature_names has length k; features is an (n, k) 0/1 array; classes is a
    length-n 0/1 array. n >= 1 and k >= 1 always hold.
    """

    feature_names: tuple[str, ...]
    class_name: str
    features: np.ndarray
    classes: np.ndarray

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.uint8)
        classes = np.asarray(self.classes, dtype=np.uint8)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "classes", classes)
        if features.ndim != 2:
            raise DataError("features must be a 2-d array")
        n, k = features.shape
        if n < 1 or k < 1:
            raise DataError(f"dataset needs n >= 1 rows and k >= 1 features, got {n}x{k}")
        if len(self.feature_names) != k:
            raise DataError(f"{len(self.feature_names)} names for {k} feature columns")
        if classes.shape != (n,):
            raise DataError(f"class column length {classes.shape} does not match n={n}")
        for arr in (features, classes):
            if arr.size and not np.isin(arr, (0, 1)).all():
                raise DataError("all feature and class values must be 0 or 1")

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def k(self) -> int:
        return int(self.features.shape[1])

    def row(self, i: int) -> tuple[tuple[int, ...], int]:
        return tuple(int(v) for v in self.features[i]), int(self.classes[i])


@dataclass(frozen=True)
class PaddedDataset:
    """A dataset padded to a power-of-two row count with invalid dummy rows."""

    base: Dataset
    n_pad: int
    features: np.ndarray
    classes: np.ndarray
    validity: np.ndarray

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def suffix_width(self) -> int:
        """Bits needed to index a padded row; also the label width downstream."""
        return max(self.n_pad - 1, 0).bit_length()


def _next_power_of_two(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def pad(ds: Dataset) -> PaddedDataset:
    """Pad to the next power of two with all-zero, class-0, invalid rows."""
    n_pad = _next_power_of_two(ds.n)
    features = np.zeros((n_pad, ds.k), dtype=np.uint8)
    features[: ds.n] = ds.features
    classes = np.zeros(n_pad, dtype=np.uint8)
    classes[: ds.n] = ds.classes
    validity = np.zeros(n_pad, dtype=np.uint8)
    validity[: ds.n] = 1
    return PaddedDataset(
        base=ds, n_pad=n_pad, features=features, classes=classes, validity=validity
    )


def load_csv(path_or_text, *, name: str = "dataset") -> Dataset:
    """Load a dataset from CSV: header row of k feature names plus the class
    name, then rows whose cells are exactly "0" or "1". LF and CRLF both work.
    """
    if hasattr(path_or_text, "read"):
        text = path_or_text.read()
    else:
        try:
            with open(path_or_text, "r", encoding="utf-8-sig", newline="") as fh:
                text = fh.read()
        except OSError as exc:
            raise DataError(f"cannot read {path_or_text}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader]
    if not rows:
        raise DataError(f"{name}: empty file")
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 2:
        raise DataError(f"{name}: header needs at least one feature and a class column")
    body = rows[1:]
    if not body:
        raise DataError(f"{name}: no data rows")
    k = len(header) - 1
    features = np.zeros((len(body), k), dtype=np.uint8)
    classes = np.zeros(len(body), dtype=np.uint8)
    for r, row in enumerate(body):
        if len(row) != len(header):
            raise DataError(
                f"{name}: row {r + 2} has {len(row)} cells, expected {len(header)}"
            )
        for c, cell in enumerate(row):
            if cell not in ("0", "1"):
                raise DataError(
                    f"{name}: row {r + 2}, column {header[c]!r}: "
                    f"cell must be '0' or '1', got {cell!r}"
                )
            if c < k:
                features[r, c] = int(cell)
            else:
                classes[r] = int(cell)
    return Dataset(
        feature_names=tuple(header[:k]),
        class_name=header[k],
        features=features,
        classes=classes,
    )


def save_csv(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(ds.feature_names) + [ds.class_name])
        for i in range(ds.n):
            writer.writerow([str(int(v)) for v in ds.features[i]] + [str(int(ds.classes[i]))])


def decode_selection(mask: FeatureMask, ds: Dataset) -> list[str]:
    """Names of the features flagged 1 in the mask, in column order."""
    if len(mask) != ds.k:
        raise DataError(f"mask length {len(mask)} does not match k={ds.k}")
    if any(b not in (0, 1) for b in mask):
        raise DataError("mask entries must be 0 or 1")
    return [name for name, bit in zip(ds.feature_names, mask) if bit]


def gen_dataset(n: int, k: int, seed: int, planted: int | None = None) -> Dataset:
    """Random n x k binary dataset, reproducible from the seed.

    With `planted` set, the class column is the XOR of that many randomly
    chosen features, which makes the planted subset consistent by
    construction; otherwise the class column is uniform random.
    """
    if n < 1 or k < 1:
        raise UsageError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    features = rng.integers(0, 2, size=(n, k), dtype=np.uint8)
    if planted is not None:
        if not 1 <= planted <= k:
            raise UsageError(f"planted size must be in 1..{k}, got {planted}")
        chosen = rng.choice(k, size=planted, replace=False)
        classes = np.bitwise_xor.reduce(features[:, sorted(chosen)], axis=1)
    else:
        classes = rng.integers(0, 2, size=n, dtype=np.uint8)
    names = tuple(f"f{i + 1}" for i in range(k))
    return Dataset(
        feature_names=names, class_name="C", features=features, classes=classes
    )
