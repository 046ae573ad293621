"""Two-message selection protocol and its wire formats.

The exchange is deliberately minimal: the data owner sends one encrypted
dataset message, the evaluator runs a selection circuit on it without any
decryption, and sends back one encrypted mask message. Row count, padded row
count and feature count are public header fields; everything else stays
encrypted end to end.

Dataset message layout (all integers little-endian):

    magic "OCWC" | version u16 | backend u8 | flags u8
    n u32 | n_pad u32 | k u32 | label_width u8 | suffix_width u8 | reserved u16
    then k + 2 column blobs: features in column order, class, validity

A column blob is a u32 byte length followed by n_pad serialized bits, each a
u32 length plus the backend's exported ciphertext. Mask messages use magic
"OCWM", carry k instead of the row fields, and hold a single k-bit blob.
"""

from __future__ import annotations

import json
import secrets
import struct
import time
from dataclasses import dataclass
from pathlib import Path

from .dataset import Dataset, FeatureMask, decode_selection, pad
from .errors import BackendError, DataError, UsageError
from .obool import Backend, ObliviousBit, SimBackend
from .pcwc import EncryptedDatasetState, SelectionMaskCipher, encrypt_dataset, select

DATASET_MAGIC = b"OCWC"
MASK_MAGIC = b"OCWM"
WIRE_VERSION = 1
BACKEND_CODES = {"sim": 0, "fhe": 1}
_CODE_BACKENDS = {code: name for name, code in BACKEND_CODES.items()}

_DS_HEADER = struct.Struct("<4sHBBIIIBBH")
_MASK_HEADER = struct.Struct("<4sHBBI")
_U32 = struct.Struct("<I")

SECRET_KEY_FILENAME = "secret.key"
EVAL_KEY_FILENAME = "eval.key"


# ---------------------------------------------------------------------------
# Key handling

def keygen(out_dir, backend: str = "sim", seed: int | None = None) -> list[Path]:
    """Create secret.key and eval.key under out_dir and return their paths.

    The directory is created if missing (its parent must exist). Both files
    are staged to temporary names and renamed at the end, so a failure never
    leaves a partial key pair behind. The simulation backend has no real key
    material; its files carry a shared identity token so encrypt and decrypt
    invocations can be checked against each other. The FHE backend delegates
    to the adapter process for real key material.
    """
    if backend not in BACKEND_CODES:
        raise UsageError(f"unknown backend {backend!r}; expected sim or fhe")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create key directory {out_dir}: {exc}") from exc

    if backend == "sim":
        if seed is None:
            token = secrets.token_hex(16)
        else:
            token = f"{seed & (2**128 - 1):032x}"
        contents = {
            SECRET_KEY_FILENAME: _key_json("secret", token),
            EVAL_KEY_FILENAME: _key_json("eval", token),
        }
    else:
        from .fhe import export_key_material

        contents = export_key_material()

    staged: list[tuple[Path, Path]] = []
    try:
        for name, blob in contents.items():
            tmp = out_dir / (name + ".tmp")
            tmp.write_bytes(blob)
            staged.append((tmp, out_dir / name))
        for tmp, final in staged:
            tmp.replace(final)
    except OSError as exc:
        for tmp, _final in staged:
            tmp.unlink(missing_ok=True)
        raise DataError(f"cannot write key files in {out_dir}: {exc}") from exc
    return [final for _tmp, final in staged]


def _key_json(role: str, token: str) -> bytes:
    material = {
        "format": "ocwc-key",
        "version": WIRE_VERSION,
        "backend": "sim",
        "role": role,
        "token": token,
    }
    return (json.dumps(material, indent=2) + "\n").encode("utf-8")


def load_key(path) -> dict:
    """Read a simulation-backend key file and return its fields."""
    path = Path(path)
    try:
        material = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read key file {path}: {exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DataError(f"key file {path} is not readable: {exc}") from exc
    if not isinstance(material, dict) or material.get("format") != "ocwc-key":
        raise DataError(f"{path} is not a key file")
    if material.get("backend") not in BACKEND_CODES:
        raise DataError(f"key file {path} names an unknown backend")
    return material


# ---------------------------------------------------------------------------
# Wire encoding

class _Reader:
    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, size: int) -> bytes:
        end = self.pos + size
        if size < 0 or end > len(self.data):
            raise DataError("truncated message")
        chunk = self.data[self.pos : end]
        self.pos = end
        return chunk

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]

    def done(self) -> None:
        if self.pos != len(self.data):
            raise DataError("trailing bytes after message payload")


def _encode_bits(backend: Backend, bits: list[ObliviousBit]) -> bytes:
    parts = []
    for bit in bits:
        blob = backend.export_bit(bit)
        parts.append(_U32.pack(len(blob)))
        parts.append(blob)
    payload = b"".join(parts)
    return _U32.pack(len(payload)) + payload


def _decode_bits(backend: Backend, reader: _Reader, count: int) -> list[ObliviousBit]:
    payload = _Reader(reader.take(reader.u32()))
    bits = []
    for _ in range(count):
        bits.append(backend.import_bit(bytes(payload.take(payload.u32()))))
    payload.done()
    return bits


def encode_dataset_message(state: EncryptedDatasetState) -> bytes:
    be = state.backend
    if be.kind not in BACKEND_CODES:
        raise BackendError(f"backend kind {be.kind!r} has no wire code")
    header = _DS_HEADER.pack(
        DATASET_MAGIC,
        WIRE_VERSION,
        BACKEND_CODES[be.kind],
        0,
        state.n,
        state.n_pad,
        state.k,
        state.label_width,
        state.label_width,
        0,
    )
    blobs = [_encode_bits(be, col) for col in state.feature_cols]
    blobs.append(_encode_bits(be, state.classes))
    blobs.append(_encode_bits(be, state.validity))
    return header + b"".join(blobs)


def decode_dataset_message(backend: Backend, data: bytes) -> EncryptedDatasetState:
    reader = _Reader(data)
    try:
        magic, version, code, _flags, n, n_pad, k, lw, sw, _res = _DS_HEADER.unpack(
            reader.take(_DS_HEADER.size)
        )
    except struct.error as exc:
        raise DataError(f"malformed dataset message header: {exc}") from exc
    if magic != DATASET_MAGIC:
        raise DataError("not an encrypted dataset message (bad magic)")
    if version != WIRE_VERSION:
        raise DataError(f"unsupported message version {version}")
    if _CODE_BACKENDS.get(code) != backend.kind:
        raise DataError(
            f"message was produced for backend {_CODE_BACKENDS.get(code, code)!r}, "
            f"not {backend.kind!r}"
        )
    if k < 1 or n < 1 or n_pad < n:
        raise DataError("dataset message header has impossible dimensions")
    if n_pad & (n_pad - 1):
        raise DataError("padded row count in header is not a power of two")
    expect_width = max(n_pad - 1, 0).bit_length()
    if lw != expect_width or sw != expect_width:
        raise DataError("label width in header does not match padded row count")
    cols = [_decode_bits(backend, reader, n_pad) for _ in range(k)]
    classes = _decode_bits(backend, reader, n_pad)
    validity = _decode_bits(backend, reader, n_pad)
    reader.done()
    return EncryptedDatasetState(
        backend=backend, n=n, feature_cols=cols, classes=classes, validity=validity
    )


def encode_mask_message(backend: Backend, mask: SelectionMaskCipher) -> bytes:
    header = _MASK_HEADER.pack(
        MASK_MAGIC, WIRE_VERSION, BACKEND_CODES[backend.kind], 0, len(mask.bits)
    )
    return header + _encode_bits(backend, mask.bits)


def decode_mask_message(
    backend: Backend, data: bytes, expected_k: int | None = None
) -> SelectionMaskCipher:
    reader = _Reader(data)
    try:
        magic, version, code, _flags, k = _MASK_HEADER.unpack(
            reader.take(_MASK_HEADER.size)
        )
    except struct.error as exc:
        raise DataError(f"malformed mask message header: {exc}") from exc
    if magic != MASK_MAGIC:
        raise DataError("not a selection mask message (bad magic)")
    if version != WIRE_VERSION:
        raise DataError(f"unsupported message version {version}")
    if _CODE_BACKENDS.get(code) != backend.kind:
        raise DataError("mask message backend does not match")
    if expected_k is not None and k != expected_k:
        raise DataError(f"mask message carries {k} bits, expected {expected_k}")
    bits = _decode_bits(backend, reader, k)
    reader.done()
    return SelectionMaskCipher(bits=bits)


# ---------------------------------------------------------------------------
# End-to-end exchange

@dataclass
class ProtocolResult:
    mask: FeatureMask
    selected_names: list[str]
    messages_exchanged: int
    decrypts_during_select: int
    request_bytes: int
    response_bytes: int
    transcript_digest: str
    report: dict


def run_protocol(
    ds: Dataset,
    algorithm: str = "improved",
    backend: str = "sim",
    client_backend: Backend | None = None,
    server_backend: Backend | None = None,
) -> ProtocolResult:
    """Run the full two-message exchange over an in-memory channel.

    `backend` picks the backend kind by name; explicit instances override it.
    With the simulation backend the two parties get independent instances, so
    the evaluator really does see only the two messages. The FHE backend
    holds key material in one adapter session, so both roles share it and the
    separation stays logical; the decrypt counter still proves the selection
    itself never decrypts.
    """
    if client_backend is not None:
        client = client_backend
    elif backend == "sim":
        client = SimBackend()
    elif backend == "fhe":
        from .fhe import FheBackend

        client = FheBackend()
    else:
        raise UsageError(f"unknown backend {backend!r}; expected sim or fhe")
    if server_backend is not None:
        server = server_backend
    elif client.kind == "sim":
        server = SimBackend()
    else:
        server = client

    start = time.perf_counter()
    state = encrypt_dataset(client, pad(ds))
    request = encode_dataset_message(state)

    server_state = decode_dataset_message(server, request)
    decrypts_before = server.decrypt_count
    gates_before = dict(server.transcript.counts)
    mask_cipher = select(server_state, algorithm)
    decrypts_during = server.decrypt_count - decrypts_before
    response = encode_mask_message(server, mask_cipher)

    client_mask = decode_mask_message(client, response, expected_k=ds.k)
    mask = client_mask.decrypt()
    elapsed = time.perf_counter() - start

    gate_counts = {
        kind: count - gates_before.get(kind, 0)
        for kind, count in server.transcript.counts.items()
    }
    report = {
        "schema": "ocwc-bench/1",
        "kind": "protocol",
        "algorithm": algorithm,
        "backend": server.kind,
        "k": ds.k,
        "n": ds.n,
        "n_pad": state.n_pad,
        "gate_counts": gate_counts,
        "total_gates": sum(gate_counts.values()),
        "wall_seconds": elapsed,
        "messages_exchanged": 2,
        "decrypts_during_select": decrypts_during,
        "request_bytes": len(request),
        "response_bytes": len(response),
        "transcript_digest": server.transcript.digest(),
    }
    return ProtocolResult(
        mask=mask,
        selected_names=decode_selection(mask, ds),
        messages_exchanged=2,
        decrypts_during_select=decrypts_during,
        request_bytes=len(request),
        response_bytes=len(response),
        transcript_digest=server.transcript.digest(),
        report=report,
    )
