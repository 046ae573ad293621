"""Plaintext reference algorithms: the ground truth the circuits must match.

Consistency of a feature subset means no two rows agree on every selected
feature while disagreeing in class. The selection algorithm sweeps features in
a caller-given order and drops each one whose removal keeps the data
consistent; consistency is monotone under adding features, so the sweep ends
at a minimal consistent subset whenever the full set started consistent.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dataset import Dataset, FeatureMask
from .errors import UsageError


def is_consistent(ds: Dataset, mask: FeatureMask) -> bool:
    """True iff rows that agree on every masked-in feature share a class."""
    if len(mask) != ds.k:
        raise UsageError(f"mask length {len(mask)} does not match k={ds.k}")
    cols = [j for j, bit in enumerate(mask) if bit]
    seen: dict[tuple[int, ...], int] = {}
    for i in range(ds.n):
        key = tuple(int(v) for v in ds.features[i, cols])
        cls = int(ds.classes[i])
        prev = seen.setdefault(key, cls)
        if prev != cls:
            return False
    return True


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of a selection sweep.

    mask flags the kept features. input_consistent records whether the full
    feature set was consistent to begin with; when it was not, no subset can
    be, and the sweep necessarily returns the full mask.
    """

    mask: FeatureMask
    input_consistent: bool

    @property
    def selected_indices(self) -> tuple[int, ...]:
        return tuple(j for j, bit in enumerate(self.mask) if bit)


def cwc_select(ds: Dataset, order: tuple[int, ...] | None = None) -> SelectionResult:
    """Greedy backward elimination in the given order (1-based feature ids).

    Default order is k..1, matching the oblivious implementations. Each
    feature is dropped iff the remaining set stays consistent.
    """
    if order is None:
        order = tuple(range(ds.k, 0, -1))
    if sorted(order) != list(range(1, ds.k + 1)):
        raise UsageError(f"order must be a permutation of 1..{ds.k}, got {order}")
    mask = [1] * ds.k
    input_consistent = is_consistent(ds, tuple(mask))
    for fid in order:
        j = fid - 1
        mask[j] = 0
        if not is_consistent(ds, tuple(mask)):
            mask[j] = 1
    return SelectionResult(mask=tuple(mask), input_consistent=input_consistent)


def mutual_information(ds: Dataset, feature: int) -> float:
    """Empirical mutual information, in bits, between one feature and the class.

    feature is 1-based. Zero-probability terms contribute zero.
    """
    if not 1 <= feature <= ds.k:
        raise UsageError(f"feature must be in 1..{ds.k}, got {feature}")
    x = ds.features[:, feature - 1].astype(np.int64)
    y = ds.classes.astype(np.int64)
    n = ds.n
    total = 0.0
    for xv in (0, 1):
        for yv in (0, 1):
            joint = np.count_nonzero((x == xv) & (y == yv)) / n
            if joint == 0.0:
                continue
            px = np.count_nonzero(x == xv) / n
            py = np.count_nonzero(y == yv) / n
            total += joint * np.log2(joint / (px * py))
    return float(total)


def minimal_consistent_bruteforce(ds: Dataset) -> list[FeatureMask]:
    """All minimal consistent subsets, by exhaustive enumeration.

    Consistency is monotone, so a consistent subset is minimal iff removing
    any single member breaks consistency. Exponential in k; intended for
    cross-checking at small sizes (k <= 15 or so).
    """
    if ds.k > 20:
        raise UsageError(f"brute force over 2^{ds.k} subsets is not reasonable")
    minimal: list[FeatureMask] = []
    for size in range(ds.k + 1):
        for combo in combinations(range(ds.k), size):
            mask = tuple(1 if j in combo else 0 for j in range(ds.k))
            if not is_consistent(ds, mask):
                continue
            is_minimal = True
            for j in combo:
                reduced = tuple(0 if i == j else b for i, b in enumerate(mask))
                if is_consistent(ds, reduced):
                    is_minimal = False
                    break
            if is_minimal:
                minimal.append(mask)
    return minimal
