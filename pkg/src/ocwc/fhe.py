"""Backend that forwards gate evaluation to an external FHE adapter process.

The adapter is any executable speaking newline-delimited JSON on stdio:
one request object in, one response object out, in order. The command is
taken from the OCWC_FHE_ADAPTER environment variable (or passed explicitly),
typically a node invocation of the bundled frontend. Requests:

    {"id": 1, "op": "hello"}
    {"id": 2, "op": "keygen"}
    {"id": 3, "op": "encrypt", "value": 1}        -> {"handle": 7}
    {"id": 4, "op": "const", "value": 0}          -> {"handle": 8}
    {"id": 5, "op": "gate", "kind": "AND", "a": 7, "b": 8}
    {"id": 6, "op": "decrypt", "handle": 9}       -> {"value": 0}
    {"id": 7, "op": "export", "handle": 9}        -> {"data": "<base64>"}
    {"id": 8, "op": "import", "data": "<base64>"} -> {"handle": 10}
    {"id": 9, "op": "export_keys"}                -> {"secret": "...", "eval": "..."}
    {"id": 10, "op": "import_keys", "secret": "...", "eval": "..."}
    {"id": 11, "op": "shutdown"}

Responses carry the request id and either "ok": true plus the result fields
or "ok": false plus "error". Handles are adapter-local; this client keeps its
own sequential numbering for the transcript so that digests are comparable
with the simulation backend gate for gate.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess

from .errors import BackendError, GateBudgetExceeded, UsageError
from .obool import (
    _NO_OPERAND,
    _OP_AND,
    _OP_CONST,
    _OP_NOT,
    _OP_XOR,
    GATE_AND,
    GATE_CONST,
    GATE_NOT,
    GATE_XOR,
    Backend,
    ObliviousBit,
    Transcript,
)

ADAPTER_ENV_VAR = "OCWC_FHE_ADAPTER"

_CODES = {GATE_XOR: _OP_XOR, GATE_AND: _OP_AND, GATE_NOT: _OP_NOT, GATE_CONST: _OP_CONST}


def resolve_adapter_command(command: str | None = None) -> list[str]:
    """Split the adapter launch command, or fail with a setup hint."""
    if command is None:
        command = os.environ.get(ADAPTER_ENV_VAR)
    if not command:
        raise BackendError(
            "fhe backend unavailable: set "
            f"{ADAPTER_ENV_VAR} to the adapter command "
            "(for the bundled frontend: 'node frontend/dist/adapter.js')"
        )
    parts = shlex.split(command)
    if not parts:
        raise BackendError("fhe backend unavailable: adapter command is empty")
    return parts


class _AdapterClient:
    """One adapter subprocess plus the request/response bookkeeping."""

    def __init__(self, command: str | None = None):
        argv = resolve_adapter_command(command)
        try:
            self.proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BackendError(f"fhe backend unavailable: cannot launch {argv[0]}: {exc}") from exc
        self._next_id = 1
        hello = self.call("hello")
        self.info = {key: hello[key] for key in ("name", "scheme") if key in hello}

    def call(self, op: str, **params) -> dict:
        request = {"id": self._next_id, "op": op, **params}
        self._next_id += 1
        try:
            assert self.proc.stdin is not None and self.proc.stdout is not None
            self.proc.stdin.write(json.dumps(request) + "\n")
            self.proc.stdin.flush()
            line = self.proc.stdout.readline()
        except (OSError, ValueError) as exc:
            raise BackendError(f"fhe adapter pipe failure during {op!r}: {exc}") from exc
        if not line:
            raise BackendError(
                f"fhe adapter exited during {op!r}: {self._stderr_tail()}"
            )
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BackendError(f"fhe adapter sent malformed response: {line[:200]!r}") from exc
        if response.get("id") != request["id"]:
            raise BackendError("fhe adapter response id does not match request")
        if not response.get("ok"):
            raise BackendError(f"fhe adapter error during {op!r}: {response.get('error')}")
        return response

    def _stderr_tail(self) -> str:
        if self.proc.stderr is None:
            return "no stderr"
        try:
            tail = self.proc.stderr.read() or ""
        except (OSError, ValueError):
            return "stderr unreadable"
        return tail.strip()[-500:] or f"exit code {self.proc.poll()}"

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                if self.proc.stdin is not None:
                    self.proc.stdin.write(json.dumps({"id": self._next_id, "op": "shutdown"}) + "\n")
                    self.proc.stdin.flush()
            except (OSError, ValueError):
                pass
            try:
                self.proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self.proc.kill()


class FheBackend(Backend):
    """Gate evaluation over real ciphertexts via the adapter process.

    The transcript mirrors the one the simulation backend would produce for
    the same call sequence; digest equality across backends is structural.
    """

    kind = "fhe"

    def __init__(self, command: str | None = None, gate_limit: int | None = None,
                 keep_ops: bool = False, secret_key: bytes | None = None,
                 eval_key: bytes | None = None):
        import base64

        self._client = _AdapterClient(command)
        if secret_key is None and eval_key is None:
            self._client.call("keygen")
        else:
            # resume an existing key pair; either half alone is enough for
            # the operations that half enables (encrypt/decrypt vs gates)
            params = {}
            if secret_key is not None:
                params["secret"] = base64.b64encode(secret_key).decode("ascii")
            if eval_key is not None:
                params["eval"] = base64.b64encode(eval_key).decode("ascii")
            self._client.call("import_keys", **params)
        self.transcript = Transcript(keep_ops=keep_ops)
        self.gate_limit = gate_limit
        self.input_handles: list[int] = []
        self.encrypt_count = 0
        self.decrypt_count = 0
        self._remote: list[int] = []

    # -- handle bookkeeping

    def _fresh_input(self, remote_handle: int) -> ObliviousBit:
        local = len(self._remote)
        self._remote.append(remote_handle)
        self.input_handles.append(local)
        return ObliviousBit(local, self)

    def _fresh_gate(self, kind: str, remote_handle: int, a: int, b: int) -> ObliviousBit:
        # mirrors the simulation backend's bookkeeping bit for bit so the
        # transcripts of the two backends digest identically
        local = len(self._remote)
        self._remote.append(remote_handle)
        t = self.transcript
        t.counts[kind] += 1
        t._record(_CODES[kind], a, b, local)
        if t.ops is not None:
            t.ops.append((_CODES[kind], a, b, local))
        if self.gate_limit is not None and len(self._remote) > self.gate_limit:
            raise GateBudgetExceeded(f"gate limit {self.gate_limit} exceeded")
        return ObliviousBit(local, self)

    def _remote_of(self, bit: ObliviousBit) -> int:
        self._check_own(bit)
        return self._remote[bit.handle]

    # -- Backend interface

    def encrypt_bit(self, value: int) -> ObliviousBit:
        if value not in (0, 1):
            raise UsageError(f"bit value must be 0 or 1, got {value!r}")
        response = self._client.call("encrypt", value=value)
        self.encrypt_count += 1
        return self._fresh_input(response["handle"])

    def decrypt_bit(self, bit: ObliviousBit) -> int:
        remote = self._remote_of(bit)
        response = self._client.call("decrypt", handle=remote)
        self.decrypt_count += 1
        value = response.get("value")
        if value not in (0, 1):
            raise BackendError(f"fhe adapter decrypted to non-bit {value!r}")
        return value

    def const_bit(self, value: int) -> ObliviousBit:
        if value not in (0, 1):
            raise UsageError(f"constant must be 0 or 1, got {value!r}")
        response = self._client.call("const", value=value)
        return self._fresh_gate(GATE_CONST, response["handle"], value, _NO_OPERAND)

    def gate_xor(self, a: ObliviousBit, b: ObliviousBit) -> ObliviousBit:
        ra, rb = self._remote_of(a), self._remote_of(b)
        response = self._client.call("gate", kind=GATE_XOR, a=ra, b=rb)
        return self._fresh_gate(GATE_XOR, response["handle"], a.handle, b.handle)

    def gate_and(self, a: ObliviousBit, b: ObliviousBit) -> ObliviousBit:
        ra, rb = self._remote_of(a), self._remote_of(b)
        response = self._client.call("gate", kind=GATE_AND, a=ra, b=rb)
        return self._fresh_gate(GATE_AND, response["handle"], a.handle, b.handle)

    def gate_not(self, a: ObliviousBit) -> ObliviousBit:
        ra = self._remote_of(a)
        response = self._client.call("gate", kind=GATE_NOT, a=ra)
        return self._fresh_gate(GATE_NOT, response["handle"], a.handle, _NO_OPERAND)

    # -- serialization

    def export_bit(self, bit: ObliviousBit) -> bytes:
        import base64

        remote = self._remote_of(bit)
        response = self._client.call("export", handle=remote)
        return base64.b64decode(response["data"])

    def import_bit(self, blob: bytes) -> ObliviousBit:
        import base64

        response = self._client.call("import", data=base64.b64encode(blob).decode("ascii"))
        return self._fresh_input(response["handle"])

    # -- lifecycle

    def close(self) -> None:
        if getattr(self, "_client", None) is not None:
            self._client.close()
            self._client = None  # type: ignore[assignment]

    def __enter__(self) -> "FheBackend":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def export_key_material(command: str | None = None) -> dict[str, bytes]:
    """Ask the adapter for serialized keys, for keygen's secret/eval files."""
    import base64

    client = _AdapterClient(command)
    try:
        client.call("keygen")
        response = client.call("export_keys")
        return {
            "secret.key": base64.b64decode(response["secret"]),
            "eval.key": base64.b64decode(response["eval"]),
        }
    finally:
        client.close()
