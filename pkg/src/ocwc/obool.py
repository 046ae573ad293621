"""Encrypted bits, boolean gates, word circuits, and gate transcripts.

Everything downstream (sorting networks, private feature selection) is wired
from four primitive gates: XOR, AND, NOT, and CONST. A backend evaluates the
gates; the simulation backend does so on plaintext bits while recording a
transcript whose digest depends only on circuit structure. That digest is how
data-obliviousness is checked: two runs with the same problem shape must
produce identical digests no matter what the inputs decrypt to.

Words are little-endian sequences of bits with a fixed width. There is no
implicit widening; arithmetic helpers state their width behaviour explicitly.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import BackendError, GateBudgetExceeded, UsageError

GATE_XOR = "XOR"
GATE_AND = "AND"
GATE_NOT = "NOT"
GATE_CONST = "CONST"

GATE_KINDS = (GATE_XOR, GATE_AND, GATE_NOT, GATE_CONST)

#: Default per-gate weights for cost accounting. A gate-bootstrapping backend
#: pays roughly the same for every binary gate, so the default is uniform.
DEFAULT_GATE_COSTS = {GATE_XOR: 1.0, GATE_AND: 1.0, GATE_NOT: 1.0, GATE_CONST: 1.0}

# Internal op codes used by the transcript byte stream and by keep_ops records.
_OP_XOR = b"X"
_OP_AND = b"A"
_OP_NOT = b"N"
_OP_CONST = b"C"

_NO_OPERAND = 0xFFFFFFFF
_PACK = struct.Struct("<cIII").pack
_FLUSH_THRESHOLD = 1 << 20


class Transcript:
    """Append-only record of every gate issued on one backend.

    The digest is a deterministic function of the op sequence (gate kinds,
    wiring, and constant values). Input ciphertexts contribute only through
    handle numbering, never through their plaintext values, so equal-shape
    computations on different data digest identically.
    """

    __slots__ = ("counts", "ops", "_hash", "_buf")

    def __init__(self, keep_ops: bool = False):
        self.counts = {kind: 0 for kind in GATE_KINDS}
        self.ops: list[tuple] | None = [] if keep_ops else None
        self._hash = hashlib.sha256()
        self._buf = bytearray()

    def _record(self, code: bytes, a: int, b: int, out: int) -> None:
        self._buf += _PACK(code, a, b, out)
        if len(self._buf) >= _FLUSH_THRESHOLD:
            self._hash.update(self._buf)
            self._buf.clear()

    @property
    def total_gates(self) -> int:
        return sum(self.counts.values())

    def digest(self) -> str:
        """Hex digest of the ops recorded so far."""
        if self._buf:
            self._hash.update(self._buf)
            self._buf.clear()
        return self._hash.copy().hexdigest()

    def weighted_cost(self, cost_table: dict[str, float] | None = None) -> float:
        table = DEFAULT_GATE_COSTS if cost_table is None else cost_table
        return sum(self.counts[kind] * table.get(kind, 0.0) for kind in GATE_KINDS)


class ObliviousBit:
    """Opaque handle to one encrypted bit living on a specific backend."""

    __slots__ = ("handle", "backend")

    def __init__(self, handle: int, backend: "Backend"):
        self.handle = handle
        self.backend = backend

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"ObliviousBit(handle={self.handle}, backend={self.backend.kind})"


class ObliviousWord:
    """Fixed-width little-endian sequence of oblivious bits.

    bits[0] is the least significant bit. Width 0 is legal and denotes the
    unique empty word (it compares equal to itself and sorts before nothing).
    """

    __slots__ = ("bits", "backend")

    def __init__(self, bits: tuple[ObliviousBit, ...], backend: "Backend"):
        self.bits = tuple(bits)
        self.backend = backend

    @property
    def width(self) -> int:
        return len(self.bits)

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"ObliviousWord(width={self.width})"


class Backend:
    """Contract every encrypted-bit backend satisfies.

    One backend instance owns one key context and one transcript. Handles
    from different instances must never be mixed; gate methods enforce this.
    """

    kind: str = "abstract"

    def encrypt_bit(self, value: int) -> ObliviousBit:
        raise NotImplementedError

    def decrypt_bit(self, bit: ObliviousBit) -> int:
        raise NotImplementedError

    def const_bit(self, value: int) -> ObliviousBit:
        raise NotImplementedError

    def gate_xor(self, a: ObliviousBit, b: ObliviousBit) -> ObliviousBit:
        raise NotImplementedError

    def gate_and(self, a: ObliviousBit, b: ObliviousBit) -> ObliviousBit:
        raise NotImplementedError

    def gate_not(self, a: ObliviousBit) -> ObliviousBit:
        raise NotImplementedError

    def _check_own(self, *bits: ObliviousBit) -> None:
        for bit in bits:
            if bit.backend is not self:
                raise UsageError("bit belongs to a different backend instance")


class SimBackend(Backend):
    """Plaintext simulation backend.

    Evaluates gates on ordinary ints while keeping the exact bookkeeping a
    ciphertext backend would: sequential handle allocation, a transcript,
    and an explicit decrypt counter (the selection protocol asserts it never
    moves while the analyst computes). Keys are notional; this backend offers
    no secrecy and exists to run and audit the circuits.
    """

    kind = "sim"

    def __init__(self, keep_ops: bool = False, gate_limit: int | None = None):
        self._bits: list[int] = []
        self.transcript = Transcript(keep_ops=keep_ops)
        self.input_handles: list[int] = []
        self.encrypt_count = 0
        self.decrypt_count = 0
        self.gate_limit = gate_limit

    # -- ciphertext I/O ----------------------------------------------------

    def encrypt_bit(self, value: int) -> ObliviousBit:
        if value not in (0, 1):
            raise UsageError(f"bit value must be 0 or 1, got {value!r}")
        h = len(self._bits)
        self._bits.append(value)
        self.input_handles.append(h)
        self.encrypt_count += 1
        return ObliviousBit(h, self)

    def decrypt_bit(self, bit: ObliviousBit) -> int:
        self._check_own(bit)
        self.decrypt_count += 1
        return self._bits[bit.handle]

    def export_bit(self, bit: ObliviousBit) -> bytes:
        """Serialized ciphertext for file storage. Simulation stores the bit."""
        self._check_own(bit)
        return bytes([self._bits[bit.handle]])

    def import_bit(self, blob: bytes) -> ObliviousBit:
        if len(blob) != 1 or blob[0] not in (0, 1):
            raise BackendError("malformed simulation ciphertext blob")
        return self.encrypt_bit(blob[0])

    # -- gates ---------------------------------------------------------------

    def _new(self, value: int, code: bytes, a: int, b: int) -> ObliviousBit:
        bits = self._bits
        h = len(bits)
        bits.append(value)
        t = self.transcript
        t._record(code, a, b, h)
        if t.ops is not None:
            t.ops.append((code, a, b, h))
        if self.gate_limit is not None and len(bits) > self.gate_limit:
            raise GateBudgetExceeded(f"gate limit {self.gate_limit} exceeded")
        return ObliviousBit(h, self)

    def const_bit(self, value: int) -> ObliviousBit:
        if value not in (0, 1):
            raise UsageError(f"constant must be 0 or 1, got {value!r}")
        self.transcript.counts[GATE_CONST] += 1
        return self._new(value, _OP_CONST, value, _NO_OPERAND)

    def gate_xor(self, a: ObliviousBit, b: ObliviousBit) -> ObliviousBit:
        if a.backend is not self or b.backend is not self:
            raise UsageError("bit belongs to a different backend instance")
        self.transcript.counts[GATE_XOR] += 1
        bits = self._bits
        return self._new(bits[a.handle] ^ bits[b.handle], _OP_XOR, a.handle, b.handle)

    def gate_and(self, a: ObliviousBit, b: ObliviousBit) -> ObliviousBit:
        if a.backend is not self or b.backend is not self:
            raise UsageError("bit belongs to a different backend instance")
        self.transcript.counts[GATE_AND] += 1
        bits = self._bits
        return self._new(bits[a.handle] & bits[b.handle], _OP_AND, a.handle, b.handle)

    def gate_not(self, a: ObliviousBit) -> ObliviousBit:
        if a.backend is not self:
            raise UsageError("bit belongs to a different backend instance")
        self.transcript.counts[GATE_NOT] += 1
        return self._new(1 - self._bits[a.handle], _OP_NOT, a.handle, _NO_OPERAND)

    @property
    def num_handles(self) -> int:
        return len(self._bits)


# ---------------------------------------------------------------------------
# Word construction and decryption


def const_word(backend: Backend, value: int, width: int) -> ObliviousWord:
    """Encode a public integer as a width-bit word of CONST gates."""
    if value < 0 or (width < 64 and value >= (1 << width)):
        raise UsageError(f"value {value} does not fit in {width} bits")
    return ObliviousWord(
        tuple(backend.const_bit((value >> i) & 1) for i in range(width)), backend
    )


def encrypt_word(backend: Backend, value: int, width: int) -> ObliviousWord:
    if value < 0 or (width < 64 and value >= (1 << width)):
        raise UsageError(f"value {value} does not fit in {width} bits")
    return ObliviousWord(
        tuple(backend.encrypt_bit((value >> i) & 1) for i in range(width)), backend
    )


def decrypt_word(backend: Backend, word: ObliviousWord) -> int:
    return sum(backend.decrypt_bit(bit) << i for i, bit in enumerate(word.bits))


def _check_pair(x: ObliviousWord, y: ObliviousWord) -> Backend:
    if x.backend is not y.backend:
        raise UsageError("words belong to different backend instances")
    if x.width != y.width:
        raise UsageError(f"width mismatch: {x.width} vs {y.width}")
    return x.backend


# ---------------------------------------------------------------------------
# Word circuits


def _ripple_add(
    be: Backend,
    xs: tuple[ObliviousBit, ...],
    ys: tuple[ObliviousBit, ...],
    carry: ObliviousBit,
) -> tuple[ObliviousBit, ...]:
    # Full adder chain: sum_i = x_i ^ y_i ^ c_i and
    # c_{i+1} = ((x_i ^ c_i) & (y_i ^ c_i)) ^ c_i, sharing the x_i ^ c_i term.
    out = []
    c = carry
    for xi, yi in zip(xs, ys):
        a = be.gate_xor(xi, c)
        b = be.gate_xor(yi, c)
        out.append(be.gate_xor(a, yi))
        c = be.gate_xor(be.gate_and(a, b), c)
    return tuple(out)


def add(x: ObliviousWord, y: ObliviousWord) -> ObliviousWord:
    """Sum modulo 2**width. Gate count is exactly width*(4 XOR + 1 AND) + 1 CONST."""
    be = _check_pair(x, y)
    return ObliviousWord(_ripple_add(be, x.bits, y.bits, be.const_bit(0)), be)


def add_bit(x: ObliviousWord, b: ObliviousBit) -> ObliviousWord:
    """x plus a single bit, modulo 2**width. Half-adder chain, width*(XOR+AND) gates."""
    be = x.backend
    if b.backend is not be:
        raise UsageError("bit belongs to a different backend instance")
    out = []
    c = b
    for xi in x.bits:
        out.append(be.gate_xor(xi, c))
        c = be.gate_and(xi, c)
    return ObliviousWord(tuple(out), be)


def cmp_gt(x: ObliviousWord, y: ObliviousWord) -> ObliviousBit:
    """1 iff x > y as unsigned integers.

    Both operands are zero-extended by one bit and y - x is formed by
    complement-and-add (y + ~x + 1) over width+1 bits; the sign bit of that
    difference is the answer. The widening makes the subtraction exact, so
    equal operands correctly compare as not-greater.
    """
    be = _check_pair(x, y)
    xe = x.bits + (be.const_bit(0),)
    ye = y.bits + (be.const_bit(0),)
    nx = tuple(be.gate_not(bit) for bit in xe)
    diff = _ripple_add(be, ye, nx, be.const_bit(1))
    return diff[-1]


def eq(x: ObliviousWord, y: ObliviousWord) -> ObliviousBit:
    """1 iff the words decrypt equal. Empty words are equal by definition."""
    be = _check_pair(x, y)
    if x.width == 0:
        return be.const_bit(1)
    same = [be.gate_not(be.gate_xor(a, b)) for a, b in zip(x.bits, y.bits)]
    acc = same[0]
    for bit in same[1:]:
        acc = be.gate_and(acc, bit)
    return acc


def mux(s: ObliviousBit, a: ObliviousWord, b: ObliviousWord) -> ObliviousWord:
    """Word that decrypts to a if s = 1, else b. Per bit: s*a_i ^ (!s)*b_i."""
    be = _check_pair(a, b)
    if s.backend is not be:
        raise UsageError("selector belongs to a different backend instance")
    if a.width == 0:
        return ObliviousWord((), be)
    ns = be.gate_not(s)
    out = tuple(
        be.gate_xor(be.gate_and(s, ai), be.gate_and(ns, bi))
        for ai, bi in zip(a.bits, b.bits)
    )
    return ObliviousWord(out, be)


def or_bit(a: ObliviousBit, b: ObliviousBit) -> ObliviousBit:
    """Derived OR: a ^ b ^ (a & b). Costs 2 XOR + 1 AND."""
    be = a.backend
    if b.backend is not be:
        raise UsageError("bits belong to different backend instances")
    return be.gate_xor(be.gate_xor(a, b), be.gate_and(a, b))


def transcript_digest(transcript: Transcript) -> str:
    """Hex digest over gate kinds and wiring; independent of input plaintexts."""
    return transcript.digest()


# ---------------------------------------------------------------------------
# Cost tables


def parse_cost_table(text: str) -> dict[str, float]:
    """Parse a key=value gate-cost table (one entry per line, # comments)."""
    table = dict(DEFAULT_GATE_COSTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"cost table line {lineno}: expected KIND=weight")
        kind, _, weight = line.partition("=")
        kind = kind.strip().upper()
        if kind not in GATE_KINDS:
            raise UsageError(f"cost table line {lineno}: unknown gate kind {kind!r}")
        try:
            table[kind] = float(weight.strip())
        except ValueError as exc:
            raise UsageError(f"cost table line {lineno}: bad weight {weight!r}") from exc
    return table


# ---------------------------------------------------------------------------
# Recorded-circuit batch evaluation
#
# Because every circuit in this package is data-independent, a circuit recorded
# once (SimBackend(keep_ops=True)) can be re-evaluated on any number of inputs
# of the same shape. The test suite leans on this to sweep tens of thousands of
# datasets through the selection circuits in seconds.


@dataclass(frozen=True)
class RecordedCircuit:
    """A replayable gate program captured from one simulation run."""

    ops: tuple[tuple, ...]
    num_handles: int
    input_handles: tuple[int, ...]
    output_handles: tuple[int, ...]

    @classmethod
    def capture(cls, backend: SimBackend, outputs: list[ObliviousBit]) -> "RecordedCircuit":
        if backend.transcript.ops is None:
            raise UsageError("backend was not created with keep_ops=True")
        return cls(
            ops=tuple(backend.transcript.ops),
            num_handles=backend.num_handles,
            input_handles=tuple(backend.input_handles),
            output_handles=tuple(b.handle for b in outputs),
        )

    def evaluate_batch(self, inputs: np.ndarray, chunk: int = 4096) -> np.ndarray:
        """Evaluate on many input vectors at once.

        inputs has shape (num_inputs, batch) with 0/1 entries; the result has
        shape (num_outputs, batch). Work proceeds in batch chunks to bound the
        (num_handles x batch) scratch array.
        """
        inputs = np.asarray(inputs, dtype=np.uint8)
        if inputs.shape[0] != len(self.input_handles):
            raise UsageError(
                f"expected {len(self.input_handles)} input rows, got {inputs.shape[0]}"
            )
        batch = inputs.shape[1]
        out = np.empty((len(self.output_handles), batch), dtype=np.uint8)
        in_idx = np.asarray(self.input_handles, dtype=np.intp)
        out_idx = np.asarray(self.output_handles, dtype=np.intp)
        for lo in range(0, batch, chunk):
            hi = min(lo + chunk, batch)
            env = np.zeros((self.num_handles, hi - lo), dtype=np.uint8)
            env[in_idx] = inputs[:, lo:hi]
            for code, a, b, h in self.ops:
                if code == _OP_XOR:
                    np.bitwise_xor(env[a], env[b], out=env[h])
                elif code == _OP_AND:
                    np.bitwise_and(env[a], env[b], out=env[h])
                elif code == _OP_NOT:
                    np.subtract(1, env[a], out=env[h])
                else:  # CONST: the value rides in the a slot
                    env[h] = a
            out[:, lo:hi] = env[out_idx]
        return out
