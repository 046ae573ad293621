"""Gate layer: primitives, word circuits, transcripts, batch replay."""

import itertools
import random

import numpy as np
import pytest

from ocwc import (
    GateBudgetExceeded,
    RecordedCircuit,
    SimBackend,
    UsageError,
    add,
    add_bit,
    cmp_gt,
    const_word,
    decrypt_word,
    encrypt_word,
    eq,
    mux,
    or_bit,
    parse_cost_table,
)
from ocwc.errors import BackendError
from ocwc.obool import DEFAULT_GATE_COSTS, GATE_AND, GATE_CONST, GATE_NOT, GATE_XOR


def test_gate_truth_tables():
    be = SimBackend()
    for a in (0, 1):
        for b in (0, 1):
            x, y = be.encrypt_bit(a), be.encrypt_bit(b)
            assert be.decrypt_bit(be.gate_xor(x, y)) == a ^ b
            assert be.decrypt_bit(be.gate_and(x, y)) == a & b
        x = be.encrypt_bit(a)
        assert be.decrypt_bit(be.gate_not(x)) == 1 - a
        assert be.decrypt_bit(be.const_bit(a)) == a


def test_encrypt_decrypt_roundtrip_and_counters():
    be = SimBackend()
    bits = [be.encrypt_bit(v) for v in (0, 1, 1, 0)]
    assert be.encrypt_count == 4
    assert be.decrypt_count == 0
    assert [be.decrypt_bit(b) for b in bits] == [0, 1, 1, 0]
    assert be.decrypt_count == 4
    # encrypting and decrypting never records gates
    assert be.transcript.total_gates == 0


def test_bad_bit_values_rejected():
    be = SimBackend()
    with pytest.raises(UsageError):
        be.encrypt_bit(2)
    with pytest.raises(UsageError):
        be.const_bit(-1)


def test_mixing_backends_rejected():
    be1, be2 = SimBackend(), SimBackend()
    a, b = be1.encrypt_bit(1), be2.encrypt_bit(1)
    with pytest.raises(UsageError):
        be1.gate_and(a, b)
    with pytest.raises(UsageError):
        be2.decrypt_bit(a)


# ---------------------------------------------------------------------------
# Word circuits


def test_word_value_range_checked():
    be = SimBackend()
    with pytest.raises(UsageError):
        const_word(be, 8, 3)
    with pytest.raises(UsageError):
        encrypt_word(be, -1, 3)


def test_add_exhaustive_width3():
    be = SimBackend()
    for x in range(8):
        for y in range(8):
            w = add(encrypt_word(be, x, 3), encrypt_word(be, y, 3))
            assert decrypt_word(be, w) == (x + y) % 8


def test_add_bit_exhaustive_width3():
    be = SimBackend()
    for x in range(8):
        for b in (0, 1):
            w = add_bit(encrypt_word(be, x, 3), be.encrypt_bit(b))
            assert decrypt_word(be, w) == (x + b) % 8


def test_cmp_gt_exhaustive_width3():
    be = SimBackend()
    for x in range(8):
        for y in range(8):
            got = be.decrypt_bit(cmp_gt(encrypt_word(be, x, 3), encrypt_word(be, y, 3)))
            assert got == int(x > y), (x, y)


def test_eq_exhaustive_width3():
    be = SimBackend()
    for x in range(8):
        for y in range(8):
            got = be.decrypt_bit(eq(encrypt_word(be, x, 3), encrypt_word(be, y, 3)))
            assert got == int(x == y)


def test_eq_empty_words_equal():
    be = SimBackend()
    empty = const_word(be, 0, 0)
    assert be.decrypt_bit(eq(empty, empty)) == 1


def test_mux_exhaustive_width3():
    be = SimBackend()
    for s in (0, 1):
        for x in range(8):
            for y in range(8):
                w = mux(be.encrypt_bit(s), encrypt_word(be, x, 3), encrypt_word(be, y, 3))
                assert decrypt_word(be, w) == (x if s else y)


def test_or_bit_truth_table():
    be = SimBackend()
    for a in (0, 1):
        for b in (0, 1):
            assert be.decrypt_bit(or_bit(be.encrypt_bit(a), be.encrypt_bit(b))) == (a | b)


def test_word_ops_random_width8():
    be = SimBackend()
    rng = random.Random(2024)
    for _ in range(50):
        x, y = rng.randrange(256), rng.randrange(256)
        assert decrypt_word(be, add(encrypt_word(be, x, 8), encrypt_word(be, y, 8))) == (x + y) % 256
        assert be.decrypt_bit(cmp_gt(encrypt_word(be, x, 8), encrypt_word(be, y, 8))) == int(x > y)
        assert be.decrypt_bit(eq(encrypt_word(be, x, 8), encrypt_word(be, y, 8))) == int(x == y)


def test_width_mismatch_rejected():
    be = SimBackend()
    with pytest.raises(UsageError):
        add(encrypt_word(be, 0, 3), encrypt_word(be, 0, 4))


# ---------------------------------------------------------------------------
# Gate-count structure. These identities feed the cost accounting, so they
# are asserted exactly, not approximately.


def _counts(op):
    be = SimBackend()
    op(be)
    return dict(be.transcript.counts)


@pytest.mark.parametrize("width", [1, 3, 8])
def test_add_gate_counts(width):
    counts = _counts(lambda be: add(encrypt_word(be, 0, width), encrypt_word(be, 0, width)))
    assert counts == {GATE_XOR: 4 * width, GATE_AND: width, GATE_NOT: 0, GATE_CONST: 1}


@pytest.mark.parametrize("width", [1, 3, 8])
def test_add_bit_gate_counts(width):
    counts = _counts(lambda be: add_bit(encrypt_word(be, 0, width), be.encrypt_bit(0)))
    assert counts == {GATE_XOR: width, GATE_AND: width, GATE_NOT: 0, GATE_CONST: 0}


@pytest.mark.parametrize("width", [1, 4])
def test_cmp_gt_gate_counts(width):
    counts = _counts(lambda be: cmp_gt(encrypt_word(be, 0, width), encrypt_word(be, 0, width)))
    assert counts == {
        GATE_XOR: 4 * (width + 1),
        GATE_AND: width + 1,
        GATE_NOT: width + 1,
        GATE_CONST: 3,
    }


@pytest.mark.parametrize("width", [1, 4])
def test_mux_gate_counts(width):
    counts = _counts(
        lambda be: mux(be.encrypt_bit(0), encrypt_word(be, 0, width), encrypt_word(be, 0, width))
    )
    assert counts == {GATE_XOR: width, GATE_AND: 2 * width, GATE_NOT: 1, GATE_CONST: 0}


def test_eq_gate_counts():
    counts = _counts(lambda be: eq(encrypt_word(be, 0, 5), encrypt_word(be, 0, 5)))
    assert counts == {GATE_XOR: 5, GATE_AND: 4, GATE_NOT: 5, GATE_CONST: 0}


# ---------------------------------------------------------------------------
# Transcripts


def _run_adder(be, x, y):
    return add(encrypt_word(be, x, 4), encrypt_word(be, y, 4))


def test_digest_ignores_plaintext_values():
    be1, be2 = SimBackend(), SimBackend()
    _run_adder(be1, 3, 9)
    _run_adder(be2, 15, 0)
    assert be1.transcript.digest() == be2.transcript.digest()


def test_digest_tracks_wiring():
    be1, be2 = SimBackend(), SimBackend()
    _run_adder(be1, 3, 9)
    _run_adder(be2, 3, 9)
    be2.gate_not(be2.encrypt_bit(0))
    assert be1.transcript.digest() != be2.transcript.digest()


def test_digest_tracks_const_values():
    be1, be2 = SimBackend(), SimBackend()
    be1.const_bit(0)
    be2.const_bit(1)
    assert be1.transcript.digest() != be2.transcript.digest()


def test_digest_is_readable_mid_run():
    be = SimBackend()
    be.const_bit(1)
    first = be.transcript.digest()
    assert first == be.transcript.digest()
    be.const_bit(1)
    assert be.transcript.digest() != first


def test_weighted_cost_and_tables():
    be = SimBackend()
    _run_adder(be, 1, 2)
    assert be.transcript.weighted_cost() == be.transcript.total_gates
    table = dict(DEFAULT_GATE_COSTS)
    table[GATE_AND] = 10.0
    assert be.transcript.weighted_cost(table) == (
        be.transcript.counts[GATE_AND] * 10.0
        + be.transcript.counts[GATE_XOR]
        + be.transcript.counts[GATE_NOT]
        + be.transcript.counts[GATE_CONST]
    )


def test_parse_cost_table():
    table = parse_cost_table("AND = 2.5\n# comment\nxor=0.0\n")
    assert table[GATE_AND] == 2.5
    assert table[GATE_XOR] == 0.0
    assert table[GATE_NOT] == 1.0
    with pytest.raises(UsageError):
        parse_cost_table("FOO=1")
    with pytest.raises(UsageError):
        parse_cost_table("AND two")


def test_gate_limit_enforced():
    be = SimBackend(gate_limit=20)
    x = encrypt_word(be, 5, 4)
    y = encrypt_word(be, 6, 4)
    with pytest.raises(GateBudgetExceeded):
        for _ in range(10):
            x = add(x, y)


def test_export_import_roundtrip():
    be = SimBackend()
    blob = be.export_bit(be.encrypt_bit(1))
    assert be.decrypt_bit(be.import_bit(blob)) == 1
    with pytest.raises(BackendError):
        be.import_bit(b"\x07")
    with pytest.raises(BackendError):
        be.import_bit(b"")


# ---------------------------------------------------------------------------
# Recorded circuits


def test_recorded_adder_replays_all_inputs():
    be = SimBackend(keep_ops=True)
    out = _run_adder(be, 0, 0)
    circuit = RecordedCircuit.capture(be, list(out.bits))

    combos = list(itertools.product(range(16), range(16)))
    inputs = np.zeros((8, len(combos)), dtype=np.uint8)
    for col, (x, y) in enumerate(combos):
        for i in range(4):
            inputs[i, col] = (x >> i) & 1
            inputs[4 + i, col] = (y >> i) & 1
    outputs = circuit.evaluate_batch(inputs, chunk=100)
    for col, (x, y) in enumerate(combos):
        got = sum(int(outputs[i, col]) << i for i in range(4))
        assert got == (x + y) % 16


def test_recorded_circuit_requires_kept_ops():
    be = SimBackend()
    out = _run_adder(be, 0, 0)
    with pytest.raises(UsageError):
        RecordedCircuit.capture(be, list(out.bits))


def test_recorded_circuit_checks_input_shape():
    be = SimBackend(keep_ops=True)
    out = _run_adder(be, 0, 0)
    circuit = RecordedCircuit.capture(be, list(out.bits))
    with pytest.raises(UsageError):
        circuit.evaluate_batch(np.zeros((3, 2), dtype=np.uint8))
