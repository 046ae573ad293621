"""Gate-count benchmark harness.

Wall-clock numbers for encrypted circuits are hardware- and library-bound, so
the primary cost signal here is the gate count by kind, which is exact,
deterministic under a fixed seed, and identical for every backend evaluating
the same circuit. Reports are JSON lines (one record per grid cell, plus one
diagnostics record) validated against the schema shipped in
docs/bench_report.schema.json, with a flat CSV next to them for plotting.

Besides the two measured selection variants, each cell gets an analytic row
for the classical alternative: per-feature secure classification through a
decision-tree-style structure, which needs on the order of k * n^2 * log2(n)
secure unit operations. The unit is priced by measuring one compare-and-swap
of log2(n)-bit words on the live backend, so the model and the measured rows
share a currency.
"""

from __future__ import annotations

import json
import math
import time
from datetime import datetime, timezone
from pathlib import Path

import jsonschema

from .dataset import gen_dataset, pad
from .errors import GateBudgetExceeded, UsageError
from .obool import DEFAULT_GATE_COSTS, SimBackend, cmp_gt, encrypt_word, mux
from .pcwc import encrypt_dataset, select

REPORT_SCHEMA_VERSION = "ocwc-bench/1"

REPORT_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Selection benchmark report record",
    "description": (
        "One JSON object per report line. Cell records carry measured or "
        "modeled gate counts for one (algorithm, k, n) grid point; a single "
        "diagnostics record summarizes the scaling fits; protocol records "
        "capture one end-to-end exchange."
    ),
    "type": "object",
    "oneOf": [
        {"$ref": "#/$defs/cell"},
        {"$ref": "#/$defs/diagnostics"},
        {"$ref": "#/$defs/protocol"},
    ],
    "$defs": {
        "gateCounts": {
            "type": "object",
            "patternProperties": {
                "^(XOR|AND|NOT|CONST)$": {"type": "integer", "minimum": 0}
            },
            "additionalProperties": False,
        },
        "cell": {
            "type": "object",
            "required": [
                "schema",
                "kind",
                "algorithm",
                "backend",
                "k",
                "n",
                "n_pad",
                "seed",
                "gate_counts",
                "total_gates",
                "weighted_cost",
                "wall_seconds",
                "timestamp",
                "skipped",
            ],
            "properties": {
                "schema": {"const": REPORT_SCHEMA_VERSION},
                "kind": {"const": "cell"},
                "algorithm": {"enum": ["naive", "improved", "tree-baseline"]},
                "backend": {"enum": ["sim", "fhe"]},
                "k": {"type": "integer", "minimum": 1},
                "n": {"type": "integer", "minimum": 1},
                "n_pad": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "gate_counts": {
                    "oneOf": [{"$ref": "#/$defs/gateCounts"}, {"type": "null"}]
                },
                "total_gates": {"type": ["integer", "null"], "minimum": 0},
                "weighted_cost": {"type": ["number", "null"], "minimum": 0},
                "wall_seconds": {"type": ["number", "null"], "minimum": 0},
                "timestamp": {"type": "string"},
                "skipped": {"type": "boolean"},
                "reason": {"type": ["string", "null"]},
            },
            "additionalProperties": False,
        },
        "diagnostics": {
            "type": "object",
            "required": ["schema", "kind"],
            "properties": {
                "schema": {"const": REPORT_SCHEMA_VERSION},
                "kind": {"const": "diagnostics"},
                "k_doubling": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["n", "k_from", "k_to", "ratio"],
                        "properties": {
                            "n": {"type": "integer"},
                            "k_from": {"type": "integer"},
                            "k_to": {"type": "integer"},
                            "ratio": {"type": "number"},
                        },
                    },
                },
                "baseline_ratio": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["k", "n", "ratio"],
                        "properties": {
                            "k": {"type": "integer"},
                            "n": {"type": "integer"},
                            "ratio": {"type": "number"},
                        },
                    },
                },
                "scaling_fit": {
                    "type": "object",
                    "required": ["constant", "max_over_min"],
                    "properties": {
                        "constant": {"type": "number"},
                        "max_over_min": {"type": "number"},
                    },
                    "additionalProperties": True,
                },
            },
            "additionalProperties": True,
        },
        "protocol": {
            "type": "object",
            "required": [
                "schema",
                "kind",
                "algorithm",
                "backend",
                "k",
                "n",
                "n_pad",
                "gate_counts",
                "total_gates",
                "wall_seconds",
                "messages_exchanged",
                "decrypts_during_select",
            ],
            "properties": {
                "schema": {"const": REPORT_SCHEMA_VERSION},
                "kind": {"const": "protocol"},
                "algorithm": {"enum": ["naive", "improved"]},
                "backend": {"enum": ["sim", "fhe"]},
                "messages_exchanged": {"const": 2},
                "decrypts_during_select": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": True,
        },
    },
}

_validator = jsonschema.Draft202012Validator(REPORT_SCHEMA)


def validate_report_record(record: dict) -> None:
    """Raise jsonschema.ValidationError if the record violates the schema."""
    _validator.validate(record)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _cell_seed(seed: int, k: int, n: int) -> int:
    # same dataset for every algorithm at a grid point
    return (seed * 1_000_003 + k * 131 + n) & 0x7FFFFFFF


_probe_cache: dict[int, dict[str, int]] = {}


def compare_swap_probe_counts(width: int) -> dict[str, int]:
    """Gate counts of one compare-and-swap of two width-bit words."""
    if width not in _probe_cache:
        be = SimBackend()
        a = encrypt_word(be, 0, width)
        b = encrypt_word(be, 0, width)
        swap = cmp_gt(a, b)
        mux(swap, b, a)
        mux(swap, a, b)
        _probe_cache[width] = dict(be.transcript.counts)
    return dict(_probe_cache[width])


def tree_baseline_counts(k: int, n: int) -> dict[str, int]:
    """Analytic gate counts for per-feature secure decision-tree labeling.

    The structure performs on the order of k * n^2 * ceil(log2 n) secure unit
    operations; each unit is priced as one compare-and-swap of ceil(log2 n)-
    bit words measured on the simulation backend.
    """
    width = max((n - 1).bit_length(), 1)
    multiplier = k * n * n * width
    return {
        kind: count * multiplier
        for kind, count in compare_swap_probe_counts(width).items()
    }


def _weighted(counts: dict[str, int], cost_table: dict[str, float] | None) -> float:
    table = dict(DEFAULT_GATE_COSTS)
    if cost_table:
        table.update(cost_table)
    return float(sum(count * table.get(kind, 1.0) for kind, count in counts.items()))


def _make_backend(kind: str, gate_limit: int | None):
    if kind == "sim":
        return SimBackend(gate_limit=gate_limit)
    if kind == "fhe":
        from .fhe import FheBackend

        return FheBackend(gate_limit=gate_limit)
    raise UsageError(f"unknown backend {kind!r}; expected sim or fhe")


def measure_cell(
    algorithm: str,
    k: int,
    n: int,
    seed: int = 0,
    backend: str = "sim",
    gate_limit: int | None = None,
    cost_table: dict[str, float] | None = None,
) -> dict:
    """Run one selection circuit and return its report record."""
    ds = gen_dataset(n=n, k=k, seed=_cell_seed(seed, k, n))
    padded = pad(ds)
    row = {
        "schema": REPORT_SCHEMA_VERSION,
        "kind": "cell",
        "algorithm": algorithm,
        "backend": backend,
        "k": k,
        "n": n,
        "n_pad": padded.n_pad,
        "seed": seed,
        "timestamp": _timestamp(),
        "skipped": False,
    }
    be = _make_backend(backend, gate_limit)
    start = time.perf_counter()
    try:
        state = encrypt_dataset(be, padded)
        select(state, algorithm)
    except GateBudgetExceeded as exc:
        row.update(
            gate_counts=None,
            total_gates=None,
            weighted_cost=None,
            wall_seconds=None,
            skipped=True,
            reason=str(exc),
        )
        return row
    counts = dict(be.transcript.counts)
    row.update(
        gate_counts=counts,
        total_gates=sum(counts.values()),
        weighted_cost=_weighted(counts, cost_table),
        wall_seconds=time.perf_counter() - start,
    )
    return row


def baseline_cell(
    k: int,
    n: int,
    seed: int = 0,
    backend: str = "sim",
    cost_table: dict[str, float] | None = None,
) -> dict:
    """Report record for the analytic decision-tree baseline at one cell."""
    start = time.perf_counter()
    counts = tree_baseline_counts(k, n)
    return {
        "schema": REPORT_SCHEMA_VERSION,
        "kind": "cell",
        "algorithm": "tree-baseline",
        "backend": backend,
        "k": k,
        "n": n,
        "n_pad": 1 << max((n - 1).bit_length(), 0),
        "seed": seed,
        "gate_counts": counts,
        "total_gates": sum(counts.values()),
        "weighted_cost": _weighted(counts, cost_table),
        "wall_seconds": time.perf_counter() - start,
        "timestamp": _timestamp(),
        "skipped": False,
    }


def compute_diagnostics(rows: list[dict]) -> dict:
    """Scaling summaries over the measured rows: doubling ratios in k,
    baseline-over-improved ratios, and the k*n*log2(n)^3 fit spread."""
    improved = {
        (r["k"], r["n"]): r["total_gates"]
        for r in rows
        if r["algorithm"] == "improved" and not r["skipped"]
    }
    baseline = {
        (r["k"], r["n"]): r["total_gates"]
        for r in rows
        if r["algorithm"] == "tree-baseline" and not r["skipped"]
    }
    record: dict = {"schema": REPORT_SCHEMA_VERSION, "kind": "diagnostics"}

    doubling = []
    for (k, n), gates in sorted(improved.items()):
        if (2 * k, n) in improved:
            doubling.append(
                {"n": n, "k_from": k, "k_to": 2 * k, "ratio": improved[(2 * k, n)] / gates}
            )
    if doubling:
        record["k_doubling"] = doubling

    ratios = []
    for (k, n), gates in sorted(baseline.items()):
        if (k, n) in improved:
            ratios.append({"k": k, "n": n, "ratio": gates / improved[(k, n)]})
    if ratios:
        record["baseline_ratio"] = ratios

    fits = {
        (k, n): gates / (k * n * math.log2(n) ** 3)
        for (k, n), gates in improved.items()
        if n >= 2
    }
    if fits:
        values = sorted(fits.values())
        constant = math.exp(sum(math.log(v) for v in values) / len(values))
        record["scaling_fit"] = {
            "constant": constant,
            "max_over_min": values[-1] / values[0],
            "per_cell": [
                {"k": k, "n": n, "value": v} for (k, n), v in sorted(fits.items())
            ],
        }
    return record


def run_grid(
    ks,
    ns,
    algorithms=("naive", "improved"),
    *,
    backend: str = "sim",
    seed: int = 0,
    out_path=None,
    summary_path=None,
    gate_limit: int | None = None,
    cost_table: dict[str, float] | None = None,
    include_baseline: bool = True,
    progress=None,
) -> list[dict]:
    """Measure every (algorithm, k, n) cell; write the JSONL report and a
    plot-ready CSV. Returns all records including the diagnostics row."""
    ks = sorted(set(int(k) for k in ks))
    ns = sorted(set(int(n) for n in ns))
    algorithms = list(dict.fromkeys(algorithms))
    if not ks or not ns or not algorithms:
        raise UsageError("benchmark grid must name at least one k, n and algorithm")
    for algorithm in algorithms:
        if algorithm not in ("naive", "improved"):
            raise UsageError(f"unknown algorithm {algorithm!r}; expected naive or improved")

    rows: list[dict] = []
    for k in ks:
        for n in ns:
            for algorithm in algorithms:
                if progress is not None:
                    progress(f"{algorithm} k={k} n={n}")
                rows.append(
                    measure_cell(
                        algorithm,
                        k,
                        n,
                        seed=seed,
                        backend=backend,
                        gate_limit=gate_limit,
                        cost_table=cost_table,
                    )
                )
            if include_baseline:
                rows.append(
                    baseline_cell(k, n, seed=seed, backend=backend, cost_table=cost_table)
                )
    records = rows + [compute_diagnostics(rows)]
    for record in records:
        validate_report_record(record)

    if out_path is not None:
        out_path = Path(out_path)
        with out_path.open("w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        if summary_path is None:
            summary_path = out_path.with_suffix(".csv")
    if summary_path is not None:
        _write_summary_csv(Path(summary_path), rows)
    return records


def _write_summary_csv(path: Path, rows: list[dict]) -> None:
    import csv

    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "k", "n", "total_gates", "weighted_cost", "wall_seconds", "skipped"]
        )
        for r in rows:
            writer.writerow(
                [
                    r["algorithm"],
                    r["k"],
                    r["n"],
                    r["total_gates"],
                    r["weighted_cost"],
                    r["wall_seconds"],
                    r["skipped"],
                ]
            )


def load_report(path) -> list[dict]:
    """Read a JSONL report back as a list of validated records."""
    records = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            validate_report_record(record)
            records.append(record)
    return records
