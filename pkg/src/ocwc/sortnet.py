"""Data-oblivious sorting: merge-exchange networks over keyed records.

The comparator sequence of a sorting network is fixed by the input size alone,
so sorting encrypted records leaks nothing about their order. Networks here
are the classic recursive odd-even merge construction for power-of-two sizes;
the comparator count obeys C(2) = 1, C(m) = 2*C(m/2) + M(m) with M(2) = 1,
M(m) = 2*M(m/2) + m/2 - 1, giving 1, 5, 19, 63, ... for m = 2, 4, 8, 16.

Stability is not a property of the network itself. It is obtained by widening
the key with low-order position bits (`with_stability_suffix`), which also
makes every sort a deterministic permutation even under duplicate keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UsageError
from .obool import ObliviousWord, cmp_gt, const_word, mux


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class SortingNetwork:
    """Comparator list for a fixed input size, with a parallel-layer grouping.

    Comparators execute in list order; `layers` groups indices of mutually
    independent comparators and is recorded for future parallel execution.
    """

    size: int
    comparators: tuple[tuple[int, int], ...]
    layers: tuple[tuple[int, ...], ...]


def _merge(lo: int, n: int, r: int, out: list[tuple[int, int]]) -> None:
    step = r * 2
    if step < n:
        _merge(lo, n, step, out)
        _merge(lo + r, n, step, out)
        i = lo + r
        while i + r < lo + n:
            out.append((i, i + r))
            i += step
    else:
        out.append((lo, lo + r))


def _sort_range(lo: int, n: int, out: list[tuple[int, int]]) -> None:
    if n > 1:
        half = n // 2
        _sort_range(lo, half, out)
        _sort_range(lo + half, half, out)
        _merge(lo, n, 1, out)


def generate_network(size: int) -> SortingNetwork:
    """Odd-even merge sorting network for a power-of-two input size."""
    if not _is_power_of_two(size):
        raise UsageError(f"network size must be a power of two, got {size}")
    comparators: list[tuple[int, int]] = []
    _sort_range(0, size, comparators)
    # Greedy ASAP scheduling: a comparator sits one layer after the last
    # comparator that touched either of its wires.
    wire_layer = [-1] * size
    layers: list[list[int]] = []
    for idx, (i, j) in enumerate(comparators):
        layer = max(wire_layer[i], wire_layer[j]) + 1
        if layer == len(layers):
            layers.append([])
        layers[layer].append(idx)
        wire_layer[i] = wire_layer[j] = layer
    return SortingNetwork(
        size=size,
        comparators=tuple(comparators),
        layers=tuple(tuple(layer) for layer in layers),
    )


def expected_comparator_count(size: int) -> int:
    """Closed recurrence for the comparator count of `generate_network`."""
    if not _is_power_of_two(size):
        raise UsageError(f"size must be a power of two, got {size}")

    def m_count(m: int) -> int:
        return 1 if m == 2 else 2 * m_count(m // 2) + m // 2 - 1

    def c_count(m: int) -> int:
        if m <= 1:
            return 0
        if m == 2:
            return 1
        return 2 * c_count(m // 2) + m_count(m)

    return c_count(size)


@dataclass(frozen=True)
class KeyedRecord:
    """One sortable unit: a key word plus any number of payload words."""

    key: ObliviousWord
    payload: tuple[ObliviousWord, ...] = ()


@dataclass(frozen=True)
class KeyedRecordSet:
    """Records of identical layout, sortable as one unit.

    Synchronized multi-array sorting is expressed by concatenating the
    co-sorted arrays into each record's payload.
    """

    records: tuple[KeyedRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.records:
            return
        first = self.records[0]
        key_width = first.key.width
        payload_widths = tuple(w.width for w in first.payload)
        for rec in self.records:
            if rec.key.width != key_width:
                raise UsageError("records have mismatched key widths")
            if tuple(w.width for w in rec.payload) != payload_widths:
                raise UsageError("records have mismatched payload layouts")

    def __len__(self) -> int:
        return len(self.records)


def with_stability_suffix(rs: KeyedRecordSet) -> KeyedRecordSet:
    """Widen every key with low-order bits holding the record's position.

    The suffix makes duplicate keys distinct, so the subsequent sort is stable
    with respect to the current order and fully deterministic.
    """
    m = len(rs.records)
    if m == 0:
        return rs
    suffix_width = max(m - 1, 0).bit_length()
    be = rs.records[0].key.backend
    out = []
    for pos, rec in enumerate(rs.records):
        suffix = const_word(be, pos, suffix_width)
        widened = ObliviousWord(suffix.bits + rec.key.bits, be)
        out.append(KeyedRecord(key=widened, payload=rec.payload))
    return KeyedRecordSet(tuple(out))


def _swap_if(gt, a: KeyedRecord, b: KeyedRecord) -> tuple[KeyedRecord, KeyedRecord]:
    lo = KeyedRecord(
        key=mux(gt, b.key, a.key),
        payload=tuple(mux(gt, pb, pa) for pa, pb in zip(a.payload, b.payload)),
    )
    hi = KeyedRecord(
        key=mux(gt, a.key, b.key),
        payload=tuple(mux(gt, pa, pb) for pa, pb in zip(a.payload, b.payload)),
    )
    return lo, hi


def oblivious_sort(rs: KeyedRecordSet, net: SortingNetwork) -> KeyedRecordSet:
    """Sort records ascending by key through the network's comparators.

    Every comparator costs the same fixed number of gates for a given key and
    payload layout: one key comparison plus a mux-swap of key and payload.
    """
    if len(rs.records) != net.size:
        raise UsageError(f"record count {len(rs.records)} != network size {net.size}")
    recs = list(rs.records)
    for i, j in net.comparators:
        gt = cmp_gt(recs[i].key, recs[j].key)
        recs[i], recs[j] = _swap_if(gt, recs[i], recs[j])
    return KeyedRecordSet(tuple(recs))


def inverse_permutation(mapping: list[ObliviousWord]) -> list[ObliviousWord]:
    """Invert an encrypted permutation of 0..m-1.

    Sorting the identity sequence with the permutation as key lands identity
    value i at position mapping[i]; the sorted payloads are therefore the
    inverse permutation. Keys are distinct, so no stability suffix is needed.
    """
    m = len(mapping)
    if m == 0:
        return []
    be = mapping[0].backend
    width = mapping[0].width
    records = [
        KeyedRecord(key=word, payload=(const_word(be, i, width),))
        for i, word in enumerate(mapping)
    ]
    net = generate_network(m)
    sorted_rs = oblivious_sort(KeyedRecordSet(tuple(records)), net)
    return [rec.payload[0] for rec in sorted_rs.records]
