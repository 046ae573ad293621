"""Key files, wire messages, and the two-message exchange."""

import json
import struct

import numpy as np
import pytest

from ocwc import (
    BackendError,
    DataError,
    Dataset,
    SimBackend,
    UsageError,
    cwc_select,
    decode_dataset_message,
    decode_mask_message,
    encode_dataset_message,
    encode_mask_message,
    encrypt_dataset,
    gen_dataset,
    improved_select,
    keygen,
    load_key,
    pad,
    run_protocol,
)
from ocwc.bench import validate_report_record

_HEADER = struct.Struct("<4sHBBIIIBBH")


def _tiny():
    return Dataset(
        ("f1",),
        "C",
        np.array([[0], [1]], dtype=np.uint8),
        np.array([0, 1], dtype=np.uint8),
    )


# ---------------------------------------------------------------------------
# Key files


def test_keygen_writes_both_key_files(tmp_path):
    paths = keygen(tmp_path / "keys", backend="sim", seed=7)
    assert [p.name for p in paths] == ["secret.key", "eval.key"]
    secret = load_key(paths[0])
    evalk = load_key(paths[1])
    assert secret["role"] == "secret"
    assert evalk["role"] == "eval"
    assert secret["token"] == evalk["token"]
    assert secret["backend"] == "sim"


def test_keygen_is_deterministic_with_seed(tmp_path):
    first = keygen(tmp_path / "a", seed=99)
    second = keygen(tmp_path / "b", seed=99)
    third = keygen(tmp_path / "c", seed=100)
    assert first[0].read_bytes() == second[0].read_bytes()
    assert first[0].read_bytes() != third[0].read_bytes()


def test_keygen_fresh_without_seed(tmp_path):
    a = keygen(tmp_path / "a")
    b = keygen(tmp_path / "b")
    assert load_key(a[0])["token"] != load_key(b[0])["token"]


def test_keygen_missing_parent_leaves_nothing(tmp_path):
    target = tmp_path / "missing" / "keys"
    with pytest.raises(DataError):
        keygen(target)
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []


def test_keygen_rejects_unknown_backend(tmp_path):
    with pytest.raises(UsageError):
        keygen(tmp_path, backend="paper")


def test_keygen_fhe_needs_adapter(tmp_path, monkeypatch):
    monkeypatch.delenv("OCWC_FHE_ADAPTER", raising=False)
    with pytest.raises(BackendError, match="backend unavailable"):
        keygen(tmp_path, backend="fhe")
    assert list(tmp_path.iterdir()) == []


def test_load_key_errors(tmp_path):
    with pytest.raises(DataError):
        load_key(tmp_path / "absent.key")
    bad = tmp_path / "bad.key"
    bad.write_text("{not json")
    with pytest.raises(DataError):
        load_key(bad)
    wrong = tmp_path / "wrong.key"
    wrong.write_text(json.dumps({"format": "something-else"}))
    with pytest.raises(DataError, match="not a key file"):
        load_key(wrong)


# ---------------------------------------------------------------------------
# Dataset message wire format


def test_dataset_message_golden_bytes():
    # 2 rows, 1 feature, sim backend: header, then column blobs for
    # f1=(0,1), class=(0,1), validity=(1,1), each bit one length-prefixed byte.
    be = SimBackend()
    message = encode_dataset_message(encrypt_dataset(be, pad(_tiny())))
    golden = bytes.fromhex(
        "4f4357430100000002000000020000000100000001010000"
        "0a0000000100000000" "0100000001"
        "0a0000000100000000" "0100000001"
        "0a0000000100000001" "0100000001"
    )
    assert message == golden


def test_dataset_message_roundtrip(table2):
    padded = pad(table2)
    client = SimBackend()
    message = encode_dataset_message(encrypt_dataset(client, padded))

    server = SimBackend()
    state = decode_dataset_message(server, message)
    assert (state.n, state.n_pad, state.k) == (padded.n, padded.n_pad, padded.k)
    for j in range(padded.k):
        col = [server.decrypt_bit(b) for b in state.feature_cols[j]]
        assert col == [int(v) for v in padded.features[:, j]]
    assert [server.decrypt_bit(b) for b in state.classes] == list(padded.classes)
    assert [server.decrypt_bit(b) for b in state.validity] == list(padded.validity)


def _tampered_header(**overrides):
    fields = {
        "magic": b"OCWC", "version": 1, "code": 0, "flags": 0,
        "n": 2, "n_pad": 2, "k": 1, "lw": 1, "sw": 1, "reserved": 0,
    }
    fields.update(overrides)
    return _HEADER.pack(*fields.values())


def test_decode_dataset_rejects_tampering():
    be = SimBackend()
    message = encode_dataset_message(encrypt_dataset(be, pad(_tiny())))
    body = message[_HEADER.size :]

    cases = {
        "bad magic": _tampered_header(magic=b"XXXX"),
        "bad version": _tampered_header(version=2),
        "wrong backend": _tampered_header(code=1),
        "n_pad below n": _tampered_header(n=3),
        "n_pad not a power of two": _tampered_header(n=3, n_pad=3),
        "zero features": _tampered_header(k=0),
        "label width off": _tampered_header(lw=2),
    }
    for name, header in cases.items():
        with pytest.raises(DataError):
            decode_dataset_message(SimBackend(), header + body)
        # the original still decodes, so the tamper is what broke it
    decode_dataset_message(SimBackend(), message)

    with pytest.raises(DataError, match="trailing"):
        decode_dataset_message(SimBackend(), message + b"\x00")
    with pytest.raises(DataError):
        decode_dataset_message(SimBackend(), message[:-1])
    with pytest.raises(DataError):
        decode_dataset_message(SimBackend(), b"")


def test_decode_dataset_rejects_mask_message(table2):
    be = SimBackend()
    state = encrypt_dataset(be, pad(table2))
    mask = improved_select(state)
    wire = encode_mask_message(be, mask)
    with pytest.raises(DataError, match="magic"):
        decode_dataset_message(SimBackend(), wire)


# ---------------------------------------------------------------------------
# Mask message wire format


def test_mask_message_roundtrip(table2):
    be = SimBackend()
    state = encrypt_dataset(be, pad(table2))
    mask = improved_select(state)
    wire = encode_mask_message(be, mask)

    client = SimBackend()
    decoded = decode_mask_message(client, wire, expected_k=5)
    assert decoded.decrypt() == (1, 1, 0, 1, 0)

    with pytest.raises(DataError, match="expected 4"):
        decode_mask_message(SimBackend(), wire, expected_k=4)
    with pytest.raises(DataError, match="magic"):
        decode_mask_message(SimBackend(), b"OCWC" + wire[4:])
    with pytest.raises(DataError):
        decode_mask_message(SimBackend(), wire + b"\x01")


# ---------------------------------------------------------------------------
# End-to-end exchange


def test_run_protocol_table2(table2):
    result = run_protocol(table2, algorithm="improved")
    assert result.mask == (1, 1, 0, 1, 0)
    assert result.selected_names == ["f1", "f2", "f4"]
    assert result.messages_exchanged == 2
    assert result.decrypts_during_select == 0
    assert result.request_bytes > result.response_bytes > 0
    assert len(result.transcript_digest) == 64
    validate_report_record(result.report)
    assert result.report["kind"] == "protocol"
    assert result.report["total_gates"] == sum(result.report["gate_counts"].values())


@pytest.mark.parametrize("algorithm", ["naive", "improved"])
def test_run_protocol_matches_oracle(algorithm):
    for seed in range(4):
        ds = gen_dataset(n=6, k=3, seed=seed + 70)
        result = run_protocol(ds, algorithm=algorithm)
        assert result.mask == cwc_select(ds).mask
        assert result.decrypts_during_select == 0


def test_run_protocol_rejects_unknown_backend(table2):
    with pytest.raises(UsageError):
        run_protocol(table2, backend="tfhe")


def test_run_protocol_parties_are_separate(table2):
    # the server instance never learns the client's plaintext: its only
    # decryptable values are what arrived in the request message
    client = SimBackend()
    server = SimBackend()
    result = run_protocol(table2, client_backend=client, server_backend=server)
    assert result.mask == (1, 1, 0, 1, 0)
    assert client.decrypt_count == 5
    assert server.decrypt_count == 0
    assert server.encrypt_count == (table2.k + 2) * 8
