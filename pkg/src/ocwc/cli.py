"""Command-line entry point for the selection workflow.

Subcommands mirror the outsourcing roles: keygen, encrypt, select, decrypt,
plus gen-dataset and bench for experiments. Exit codes: 0 success, 1 usage
error, 2 data error, 3 backend error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import run_grid
from .dataset import gen_dataset, load_csv, pad, save_csv
from .errors import BackendError, DataError, OcwcError, UsageError
from .obool import SimBackend, parse_cost_table
from .pcwc import encrypt_dataset, select
from .protocol import (
    decode_dataset_message,
    decode_mask_message,
    encode_dataset_message,
    encode_mask_message,
    keygen,
    load_key,
    run_protocol,
)

ALGORITHMS = ("naive", "improved")
BACKENDS = ("sim", "fhe")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad arguments by default; route through the usage
    # error class so the documented exit codes hold
    def error(self, message):
        raise UsageError(message)


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _write_bytes(path, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def _make_backend(kind: str, secret_key=None, eval_key=None, gate_limit=None):
    if kind == "sim":
        return SimBackend(gate_limit=gate_limit)
    if kind == "fhe":
        from .fhe import FheBackend

        secret = _read_bytes(secret_key) if secret_key else None
        evalk = _read_bytes(eval_key) if eval_key else None
        return FheBackend(secret_key=secret, eval_key=evalk, gate_limit=gate_limit)
    raise UsageError(f"unknown backend {kind!r}; expected sim or fhe")


def _check_sim_key(path) -> None:
    if path is None:
        return
    material = load_key(path)
    if material["backend"] != "sim":
        raise DataError(f"key file {path} is not a simulation-backend key")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.replace(";", ",").split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_keygen(args) -> int:
    paths = keygen(args.out, backend=args.backend, seed=args.seed)
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_encrypt(args) -> int:
    ds = load_csv(args.data)
    if args.backend == "sim":
        _check_sim_key(args.key)
        backend = SimBackend()
    else:
        backend = _make_backend("fhe", secret_key=args.key)
    state = encrypt_dataset(backend, pad(ds))
    message = encode_dataset_message(state)
    _write_bytes(args.out, message)
    print(
        f"encrypted {ds.n} rows x {ds.k} features "
        f"(padded to {state.n_pad}) -> {args.out} ({len(message)} bytes)"
    )
    return 0


def _cmd_select(args) -> int:
    if (args.input is None) == (args.dataset is None):
        raise UsageError("select needs exactly one of --input (encrypted) or --dataset (csv)")

    if args.dataset is not None:
        # end-to-end convenience mode: run the whole exchange in-process
        ds = load_csv(args.dataset)
        result = run_protocol(ds, algorithm=args.algorithm, backend=args.backend)
        print(f"mask: {''.join(str(b) for b in result.mask)}")
        print(f"selected features: {' '.join(result.selected_names) or '(none)'}")
        print(
            f"messages: {result.messages_exchanged}, "
            f"decrypts during select: {result.decrypts_during_select}, "
            f"gates: {result.report['total_gates']}"
        )
        if args.report is not None:
            with Path(args.report).open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(result.report, sort_keys=True) + "\n")
        return 0

    if args.out is None:
        raise UsageError("select --input requires --out for the mask message")
    if args.backend == "sim":
        backend = SimBackend(gate_limit=args.gate_limit)
    else:
        backend = _make_backend("fhe", eval_key=args.key, gate_limit=args.gate_limit)
    state = decode_dataset_message(backend, _read_bytes(args.input))
    decrypts_before = backend.decrypt_count
    mask_cipher = select(state, args.algorithm)
    assert backend.decrypt_count == decrypts_before
    message = encode_mask_message(backend, mask_cipher)
    _write_bytes(args.out, message)
    print(
        f"selection mask for k={state.k} written to {args.out} "
        f"({backend.transcript.total_gates} gates, digest {backend.transcript.digest()[:16]})"
    )
    return 0


def _cmd_decrypt(args) -> int:
    if args.backend == "sim":
        _check_sim_key(args.key)
        backend = SimBackend()
    else:
        backend = _make_backend("fhe", secret_key=args.key)
    mask_cipher = decode_mask_message(backend, _read_bytes(args.input))
    mask = mask_cipher.decrypt()
    print(f"mask: {''.join(str(b) for b in mask)}")
    if args.dataset is not None:
        ds = load_csv(args.dataset)
        if ds.k != len(mask):
            raise DataError(
                f"mask has {len(mask)} bits but dataset has {ds.k} features"
            )
        names = [name for name, bit in zip(ds.feature_names, mask) if bit]
        print(f"selected features: {' '.join(names) or '(none)'}")
    return 0


def _cmd_gen_dataset(args) -> int:
    ds = gen_dataset(n=args.n, k=args.k, seed=args.seed, planted=args.planted)
    save_csv(ds, args.out)
    print(f"wrote {args.n} rows x {args.k} features to {args.out}")
    return 0


def _cmd_bench(args) -> int:
    cost_table = None
    if args.cost_table is not None:
        cost_table = parse_cost_table(
            _read_bytes(args.cost_table).decode("utf-8", errors="replace")
        )
    progress = (lambda msg: print(f"  {msg}", file=sys.stderr)) if not args.quiet else None
    records = run_grid(
        _int_list(args.ks),
        _int_list(args.ns),
        algorithms=[a.strip() for a in args.algorithms.split(",") if a.strip()],
        backend=args.backend,
        seed=args.seed,
        out_path=args.out,
        summary_path=args.summary,
        gate_limit=args.gate_limit,
        cost_table=cost_table,
        include_baseline=not args.no_baseline,
        progress=progress,
    )
    cells = [r for r in records if r.get("kind") == "cell"]
    skipped = sum(1 for r in cells if r["skipped"])
    summary = args.summary or Path(args.out).with_suffix(".csv")
    print(f"report: {args.out} ({len(cells)} cells, {skipped} skipped), table: {summary}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ocwc",
        description="Consistency-based feature selection over encrypted bits.",
    )
    from . import __version__

    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("keygen", help="create key files for a backend")
    p.add_argument("--backend", choices=BACKENDS, default="sim")
    p.add_argument("--out", required=True, help="directory for secret.key and eval.key")
    p.add_argument("--seed", type=int, default=None, help="deterministic sim token")
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a CSV dataset into a message file")
    p.add_argument("data", help="CSV with binary feature columns, class column last")
    p.add_argument("--backend", choices=BACKENDS, default="sim")
    p.add_argument("--key", default=None, help="secret.key (required for fhe)")
    p.add_argument("--out", required=True, help="output encrypted dataset file")
    p.set_defaults(func=_cmd_encrypt)

    p = sub.add_parser("select", help="run feature selection over ciphertexts")
    p.add_argument("--input", default=None, help="encrypted dataset file")
    p.add_argument("--dataset", default=None, help="plaintext CSV for end-to-end mode")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="improved")
    p.add_argument("--backend", choices=BACKENDS, default="sim")
    p.add_argument("--key", default=None, help="eval.key (fhe file mode)")
    p.add_argument("--out", default=None, help="output mask message file")
    p.add_argument("--report", default=None, help="append a protocol report record here")
    p.add_argument("--gate-limit", type=int, default=None)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("decrypt", help="decrypt a selection mask message")
    p.add_argument("--input", required=True, help="mask message file")
    p.add_argument("--backend", choices=BACKENDS, default="sim")
    p.add_argument("--key", default=None, help="secret.key (required for fhe)")
    p.add_argument("--dataset", default=None, help="CSV whose header names the features")
    p.set_defaults(func=_cmd_decrypt)

    p = sub.add_parser("gen-dataset", help="write a reproducible random binary dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--planted",
        type=int,
        default=None,
        help="make the class the XOR of this many random features",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_dataset)

    p = sub.add_parser("bench", help="measure gate counts over a (k, n) grid")
    p.add_argument("--ks", default="4,8,16,32", help="comma-separated feature counts")
    p.add_argument("--ns", default="8,16,32", help="comma-separated row counts")
    p.add_argument("--algorithms", default="naive,improved")
    p.add_argument("--backend", choices=BACKENDS, default="sim")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="JSONL report path")
    p.add_argument("--summary", default=None, help="CSV table path (default: report.csv)")
    p.add_argument("--gate-limit", type=int, default=None, help="skip cells beyond this")
    p.add_argument("--cost-table", default=None, help="KIND=weight file for weighted cost")
    p.add_argument("--no-baseline", action="store_true", help="omit analytic baseline rows")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 3
    except OcwcError as exc:  # pragma: no cover - future error classes
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
