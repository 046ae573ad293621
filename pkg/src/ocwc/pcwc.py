"""Private consistency-based feature selection as fixed gate circuits.

Both selection variants run the plaintext backward-elimination sweep without
ever branching on data. Removal of a feature is simulated by zeroing its
column (a constant column never splits a group), and the per-feature decision
is a keep-bit: an OR over adjacent-pair violation witnesses after an oblivious
sort that makes equal groups adjacent. A violation witness fires when two
adjacent rows are both real, agree on every feature that matters, and differ
in class; the keep-bit is therefore 1 exactly when dropping the feature would
break consistency.

The straightforward variant re-sorts the whole table by the remaining k-1
columns for every feature. The improved variant sorts the full table once,
precomputes group labels for every feature prefix, and then maintains a
second, narrower ordering for the already-decided suffix columns; per feature
it needs only constant-width sorts (suffix re-sort, permutation inversion,
prefix alignment, check sort), which is where its gate advantage comes from.

Dummy padding rows carry validity 0. Sort keys place the complemented
validity bit above the stability suffix so dummies always sink below the real
rows of their group; without that, a dummy landing between two equal-group
real rows of different classes would hide the violation from the
adjacent-pair scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import FeatureMask, PaddedDataset
from .errors import UsageError
from .obool import (
    Backend,
    ObliviousBit,
    ObliviousWord,
    add_bit,
    const_word,
    eq,
    or_bit,
)
from .sortnet import (
    KeyedRecord,
    KeyedRecordSet,
    generate_network,
    inverse_permutation,
    oblivious_sort,
    with_stability_suffix,
)


@dataclass
class EncryptedDatasetState:
    """Column-major encrypted dataset: k feature columns, class, validity.

    All columns have n_pad (power of two) entries; n real rows come first.
    The row count and column count are public; only cell values are hidden.
    """

    backend: Backend
    n: int
    feature_cols: list[list[ObliviousBit]]
    classes: list[ObliviousBit]
    validity: list[ObliviousBit]

    @property
    def n_pad(self) -> int:
        return len(self.classes)

    @property
    def k(self) -> int:
        return len(self.feature_cols)

    @property
    def label_width(self) -> int:
        """Bits per group label / row position; log2 of the padded row count."""
        return max(self.n_pad - 1, 0).bit_length()


@dataclass
class LabelState:
    """Bookkeeping arrays for the improved selection sweep.

    prefix_labels[t][i] numbers the group of row i (in the initially sorted
    order) under the first t feature columns; level 0 is all zeros. The suffix
    arrays exist only mid-sweep: suffix_labels groups rows by the
    already-decided columns in the suffix-side order, initial_positions maps a
    suffix-side slot to the row's initial-sort position, and current_positions
    is its inverse.
    """

    prefix_labels: list[list[ObliviousWord]]
    suffix_labels: list[ObliviousWord] | None = None
    initial_positions: list[ObliviousWord] | None = None
    current_positions: list[ObliviousWord] | None = None


@dataclass
class SelectionMaskCipher:
    """Encrypted selection mask, one bit per feature in column order."""

    bits: list[ObliviousBit]

    def decrypt(self) -> FeatureMask:
        if not self.bits:
            return ()
        be = self.bits[0].backend
        return tuple(be.decrypt_bit(b) for b in self.bits)


def encrypt_dataset(backend: Backend, padded: PaddedDataset) -> EncryptedDatasetState:
    """Encrypt column-major: feature columns first, then class, then validity.

    The bit order here is the canonical input order for recorded circuits.
    """
    m, k = padded.n_pad, padded.k
    cols = [
        [backend.encrypt_bit(int(padded.features[i, j])) for i in range(m)]
        for j in range(k)
    ]
    classes = [backend.encrypt_bit(int(v)) for v in padded.classes]
    validity = [backend.encrypt_bit(int(v)) for v in padded.validity]
    return EncryptedDatasetState(
        backend=backend, n=padded.n, feature_cols=cols, classes=classes, validity=validity
    )


def plaintext_input_vector(padded: PaddedDataset) -> np.ndarray:
    """The dataset's bits in exactly the order encrypt_dataset consumes them."""
    parts = [padded.features[:, j] for j in range(padded.k)]
    parts.append(padded.classes)
    parts.append(padded.validity)
    return np.concatenate(parts).astype(np.uint8)


def _bit_word(be: Backend, bit: ObliviousBit) -> ObliviousWord:
    return ObliviousWord((bit,), be)


# ---------------------------------------------------------------------------
# Shared circuit pieces


def sort_by_feature_vector(
    state: EncryptedDatasetState, extra_payload: tuple = ()
) -> tuple[EncryptedDatasetState, tuple]:
    """Sort all rows by their whole feature vector (first column most
    significant), real rows before dummies, stable in the original order.

    extra_payload is a tuple of word lists (one word per row) co-sorted with
    the rows; the sorted versions are returned alongside the new state.
    """
    be, m, k = state.backend, state.n_pad, state.k
    net = generate_network(m)
    records = []
    for i in range(m):
        not_valid = be.gate_not(state.validity[i])
        key_bits = tuple(state.feature_cols[j][i] for j in reversed(range(k)))
        key = ObliviousWord(key_bits + (not_valid,), be)
        payload = [_bit_word(be, state.classes[i]), _bit_word(be, state.validity[i])]
        payload.extend(extra[i] for extra in extra_payload)
        records.append(KeyedRecord(key=key, payload=tuple(payload)))
    srt = oblivious_sort(with_stability_suffix(KeyedRecordSet(tuple(records))), net)
    s = state.label_width
    new_cols: list[list[ObliviousBit]] = [[] for _ in range(k)]
    classes: list[ObliviousBit] = []
    validity: list[ObliviousBit] = []
    extras: list[list[ObliviousWord]] = [[] for _ in extra_payload]
    for rec in srt.records:
        for idx in range(k):
            new_cols[k - 1 - idx].append(rec.key.bits[s + idx])
        classes.append(rec.payload[0].bits[0])
        validity.append(rec.payload[1].bits[0])
        for e, column in enumerate(extras):
            column.append(rec.payload[2 + e])
    sorted_state = EncryptedDatasetState(
        backend=be, n=state.n, feature_cols=new_cols, classes=classes, validity=validity
    )
    return sorted_state, tuple(extras)


def _label_ladder(
    be: Backend, m: int, width: int, columns: list[list[ObliviousBit]]
) -> list[list[ObliviousWord]]:
    """Group labels for every prefix of `columns` over an already-sorted order.

    Level 0 is all zeros; level t labels increment wherever adjacent rows
    differ somewhere in the first t columns. The pairwise equality chain is
    shared across levels, so the whole ladder costs one equality bit and one
    conditional increment per (level, adjacent pair).
    """
    levels = [[const_word(be, 0, width) for _ in range(m)]]
    chain: list[ObliviousBit] | None = None
    for col in columns:
        col_eq = [be.gate_not(be.gate_xor(col[i - 1], col[i])) for i in range(1, m)]
        if chain is None:
            chain = col_eq
        else:
            chain = [be.gate_and(c, e) for c, e in zip(chain, col_eq)]
        labels = [const_word(be, 0, width)]
        for i in range(1, m):
            labels.append(add_bit(labels[i - 1], be.gate_not(chain[i - 1])))
        levels.append(labels)
    return levels


def compute_prefix_labels(state: EncryptedDatasetState) -> LabelState:
    """Prefix group labels for a state already sorted by its feature vector."""
    ladder = _label_ladder(
        state.backend, state.n_pad, state.label_width, list(state.feature_cols)
    )
    return LabelState(prefix_labels=ladder)


def consistency_bit(
    backend: Backend,
    group_a: list[ObliviousWord],
    group_b: list[ObliviousWord] | None,
    classes: list[ObliviousBit],
    validity: list[ObliviousBit],
) -> ObliviousBit:
    """Keep-bit over rows sorted so that equal groups are adjacent.

    A row's group is the pair (group_a[i], group_b[i]); group_b may be None
    when a single label array already identifies the group. The result is 1
    iff some adjacent pair shares a group, is real on both sides, and differs
    in class, i.e. iff the candidate feature cannot be dropped.
    """
    m = len(classes)
    keep = backend.const_bit(0)
    for i in range(1, m):
        witness = eq(group_a[i - 1], group_a[i])
        if group_b is not None:
            witness = backend.gate_and(witness, eq(group_b[i - 1], group_b[i]))
        both_real = backend.gate_and(validity[i - 1], validity[i])
        witness = backend.gate_and(witness, both_real)
        witness = backend.gate_and(
            witness, backend.gate_xor(classes[i - 1], classes[i])
        )
        keep = or_bit(keep, witness)
    return keep


# ---------------------------------------------------------------------------
# Straightforward variant: one wide sort per feature


def naive_select(state: EncryptedDatasetState) -> SelectionMaskCipher:
    """Backward elimination with a fresh full-width sort per feature.

    Features are decided in order k..1. Per feature the table is re-sorted by
    all other columns (decided columns ride along zeroed), the label ladder is
    recomputed, and the keep-bit zeroes the column when the feature drops.
    """
    be, m, k, w = state.backend, state.n_pad, state.k, state.label_width
    net = generate_network(m)
    cols = [list(col) for col in state.feature_cols]
    classes = list(state.classes)
    validity = list(state.validity)
    keep_bits: list[ObliviousBit | None] = [None] * k
    for t in range(k, 0, -1):
        cand = t - 1
        others = [j for j in range(k) if j != cand]
        records = []
        for i in range(m):
            not_valid = be.gate_not(validity[i])
            key_bits = tuple(cols[j][i] for j in reversed(others)) + (not_valid,)
            payload = (
                _bit_word(be, cols[cand][i]),
                _bit_word(be, classes[i]),
                _bit_word(be, validity[i]),
            )
            records.append(KeyedRecord(key=ObliviousWord(key_bits, be), payload=payload))
        srt = oblivious_sort(with_stability_suffix(KeyedRecordSet(tuple(records))), net)
        sorted_others: dict[int, list[ObliviousBit]] = {j: [] for j in others}
        cand_col: list[ObliviousBit] = []
        classes, validity = [], []
        for rec in srt.records:
            for idx, j in enumerate(reversed(others)):
                sorted_others[j].append(rec.key.bits[w + idx])
            cand_col.append(rec.payload[0].bits[0])
            classes.append(rec.payload[1].bits[0])
            validity.append(rec.payload[2].bits[0])
        ladder = _label_ladder(be, m, w, [sorted_others[j] for j in others])
        keep = consistency_bit(be, ladder[-1], None, classes, validity)
        for j in others:
            cols[j] = sorted_others[j]
        cols[cand] = [be.gate_and(bit, keep) for bit in cand_col]
        keep_bits[cand] = keep
    return SelectionMaskCipher(bits=list(keep_bits))  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Improved variant: one wide sort up front, narrow sorts per feature


def improved_select(
    state: EncryptedDatasetState, *, alignment_probe=None
) -> SelectionMaskCipher:
    """Backward elimination with constant-width per-feature work.

    After the initial full sort and the prefix-label ladder, the sweep keeps
    two orderings: the initial one (holding undecided columns and all prefix
    labels) and a suffix-side one (re-sorted per feature by the just-decided
    column over the previous suffix groups). A permutation map between them is
    carried as payload, inverted by sorting, and used to pull each feature's
    column and prefix labels into suffix order before the consistency check.

    alignment_probe, when given, is called once per feature with
    (feature_id, prefix_side_slots, suffix_side_slots) decrypted; both lists
    must agree if the two sides are aligned. Simulation-only instrumentation.
    """
    be, m, k, w = state.backend, state.n_pad, state.k, state.label_width
    net = generate_network(m)

    sorted_state, _ = sort_by_feature_vector(state)
    labels = compute_prefix_labels(sorted_state)
    prefix_cols = sorted_state.feature_cols

    # Suffix side starts as a copy of the initially sorted order.
    sfx_classes = list(sorted_state.classes)
    sfx_validity = list(sorted_state.validity)
    sfx_initial_pos = [const_word(be, i, w) for i in range(m)]
    sfx_labels = [const_word(be, 0, w) for _ in range(m)]
    decided_col: list[ObliviousBit] | None = None

    keep_bits: list[ObliviousBit | None] = [None] * k
    for t in range(k, 0, -1):
        cand = t - 1
        if decided_col is not None:
            # Re-sort the suffix side by the just-decided column over the old
            # suffix groups; the composite key keeps the refinement stable.
            records = []
            for i in range(m):
                key = ObliviousWord(sfx_labels[i].bits + (decided_col[i],), be)
                payload = (
                    _bit_word(be, sfx_classes[i]),
                    _bit_word(be, sfx_validity[i]),
                    sfx_initial_pos[i],
                )
                records.append(KeyedRecord(key=key, payload=payload))
            srt = oblivious_sort(
                with_stability_suffix(KeyedRecordSet(tuple(records))), net
            )
            group_keys = [ObliviousWord(rec.key.bits[w:], be) for rec in srt.records]
            sfx_classes = [rec.payload[0].bits[0] for rec in srt.records]
            sfx_validity = [rec.payload[1].bits[0] for rec in srt.records]
            sfx_initial_pos = [rec.payload[2] for rec in srt.records]
            sfx_labels = [const_word(be, 0, w)]
            for i in range(1, m):
                same = eq(group_keys[i - 1], group_keys[i])
                sfx_labels.append(add_bit(sfx_labels[i - 1], be.gate_not(same)))

        # Pull this feature's column and its prefix labels into suffix order.
        current_pos = inverse_permutation(sfx_initial_pos)
        records = []
        for c in range(m):
            payload = [
                _bit_word(be, prefix_cols[cand][c]),
                labels.prefix_labels[cand][c],
            ]
            if alignment_probe is not None:
                payload.append(const_word(be, c, w))
            records.append(KeyedRecord(key=current_pos[c], payload=tuple(payload)))
        srt = oblivious_sort(KeyedRecordSet(tuple(records)), net)
        aligned_col = [rec.payload[0].bits[0] for rec in srt.records]
        aligned_prev_labels = [rec.payload[1] for rec in srt.records]
        if alignment_probe is not None:
            from .obool import decrypt_word

            alignment_probe(
                t,
                [decrypt_word(be, rec.payload[2]) for rec in srt.records],
                [decrypt_word(be, word) for word in sfx_initial_pos],
            )

        # Check sort: group pair (prefix label, suffix label), dummies last.
        records = []
        for i in range(m):
            not_valid = be.gate_not(sfx_validity[i])
            key = ObliviousWord(
                sfx_labels[i].bits + aligned_prev_labels[i].bits + (not_valid,), be
            )
            payload = (_bit_word(be, sfx_classes[i]), _bit_word(be, sfx_validity[i]))
            records.append(KeyedRecord(key=key, payload=payload))
        srt = oblivious_sort(with_stability_suffix(KeyedRecordSet(tuple(records))), net)
        chk_suffix_labels = [
            ObliviousWord(rec.key.bits[w : 2 * w], be) for rec in srt.records
        ]
        chk_prefix_labels = [
            ObliviousWord(rec.key.bits[2 * w : 3 * w], be) for rec in srt.records
        ]
        chk_classes = [rec.payload[0].bits[0] for rec in srt.records]
        chk_validity = [rec.payload[1].bits[0] for rec in srt.records]
        keep = consistency_bit(
            be, chk_prefix_labels, chk_suffix_labels, chk_classes, chk_validity
        )

        decided_col = [be.gate_and(bit, keep) for bit in aligned_col]
        keep_bits[cand] = keep
    return SelectionMaskCipher(bits=list(keep_bits))  # type: ignore[arg-type]


def select(
    state: EncryptedDatasetState, algorithm: str = "improved"
) -> SelectionMaskCipher:
    """Run one of the two selection circuits by name."""
    if algorithm == "naive":
        return naive_select(state)
    if algorithm == "improved":
        return improved_select(state)
    raise UsageError(f"unknown algorithm {algorithm!r}; expected naive or improved")
