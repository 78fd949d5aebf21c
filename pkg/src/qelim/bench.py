"""Benchmark harness: run elimination algorithms over instance suites.

Instances come from files or from the deterministic generator; every
(instance, algorithm) pair yields one record.  Timeouts are enforced
cooperatively through deadlines, and the optional memory budget is an
estimate based on the interpreter's allocation tracing, reported as
``out-of-memory-est`` without attempting byte-exact fidelity.  Instances run
sequentially in configuration order, so suites are reproducible.
"""

from __future__ import annotations

import csv
import io
import os
import time
import tracemalloc
from dataclasses import dataclass
from fractions import Fraction

from .engine import ElimStats, eliminate_all
from .formula import Formula, atoms
from .generator import GenParams, gen_random
from .limits import Deadline, TimeoutExceeded
from .lw import lw_eliminate_all
from .parser import parse_file
from .smt import check_sat
from .formula import conj, neg, nnf

ALGORITHMS = ("main", "mod1", "mod2", "lw")

CSV_FIELDS = ("instance", "algorithm", "outcome", "wall_ms", "iterations", "smt_calls", "output_atoms")


@dataclass
class BenchRecord:
    instance: str
    algorithm: str
    outcome: str  # solved | timeout | out-of-memory-est
    wall_ms: int
    iterations: int
    smt_calls: int
    output_atoms: int


@dataclass
class BenchConfig:
    algorithms: list[str]
    instances: list[tuple[str, Formula]]
    timeout_ms: int = 300_000
    mem_mb: int | None = None


def equiv_check(f: Formula, g: Formula, deadline: Deadline | None = None) -> bool:
    """Whether two quantifier-free formulas have the same models."""
    return (
        check_sat(conj([f, nnf(neg(g))]), deadline) is None
        and check_sat(conj([g, nnf(neg(f))]), deadline) is None
    )


def parse_config(text: str, base_dir: str = ".") -> BenchConfig:
    """Parse the ``key=value`` suite description (one pair per line)."""
    values: dict[str, str] = {}
    instance_files: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "instance":
            instance_files.append(value)
        else:
            values[key] = value

    algorithms = [a.strip() for a in values.get("algorithms", "main").split(",") if a.strip()]
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")

    instances: list[tuple[str, Formula]] = []
    for path in instance_files:
        full = path if os.path.isabs(path) else os.path.join(base_dir, path)
        instances.append((os.path.basename(path), parse_file(full)))
    if "gen_count" in values:
        params_base = dict(
            num_vars=int(values.get("gen_vars", "7")),
            depth=int(values.get("gen_depth", "12")),
            coeff_min=int(values.get("gen_coeff_min", "-10")),
            coeff_max=int(values.get("gen_coeff_max", "10")),
            quantifier_prob=Fraction(values.get("gen_quant_prob", "1/4")),
        )
        seed0 = int(values.get("gen_seed0", "0"))
        for i in range(int(values["gen_count"])):
            seed = seed0 + i
            instances.append((f"gen-{seed}", gen_random(GenParams(seed=seed, **params_base))))

    return BenchConfig(
        algorithms=algorithms,
        instances=instances,
        timeout_ms=int(values.get("timeout_ms", "300000")),
        mem_mb=int(values["mem_mb"]) if "mem_mb" in values else None,
    )


def run_instance(
    name: str,
    formula: Formula,
    algorithm: str,
    timeout_ms: int,
    mem_mb: int | None = None,
) -> tuple[BenchRecord, Formula | None]:
    """One elimination under limits; also returns the result formula."""
    deadline = Deadline.from_ms(timeout_ms)
    stats = ElimStats()
    result: Formula | None = None
    outcome = "solved"
    if mem_mb is not None:
        tracemalloc.start()
    started = time.perf_counter()
    try:
        if algorithm == "lw":
            result = lw_eliminate_all(formula, deadline)
        else:
            result = eliminate_all(formula, algorithm=algorithm, deadline=deadline, stats=stats)
    except TimeoutExceeded:
        outcome = "timeout"
    wall_ms = int((time.perf_counter() - started) * 1000)
    if mem_mb is not None:
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        if peak > mem_mb * 1024 * 1024:
            outcome = "out-of-memory-est"
    record = BenchRecord(
        instance=name,
        algorithm=algorithm,
        outcome=outcome,
        wall_ms=wall_ms,
        iterations=stats.iterations,
        smt_calls=stats.smt_calls,
        output_atoms=len(atoms(result)) if result is not None else 0,
    )
    return record, result


def bench_run(config: BenchConfig) -> list[BenchRecord]:
    records = []
    for name, formula in config.instances:
        for algorithm in config.algorithms:
            record, _ = run_instance(name, formula, algorithm, config.timeout_ms, config.mem_mb)
            records.append(record)
    return records


def records_to_csv(records: list[BenchRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow(
            [r.instance, r.algorithm, r.outcome, r.wall_ms, r.iterations, r.smt_calls, r.output_atoms]
        )
    return out.getvalue()


def summarize(records: list[BenchRecord]) -> str:
    """Per-algorithm table: solved count, average time over solved, limit hits."""
    lines = [f"{'algorithm':<10} {'Solved':>6} {'Avg':>8} {'O-o-m':>6}"]
    seen: list[str] = []
    for r in records:
        if r.algorithm not in seen:
            seen.append(r.algorithm)
    for algorithm in seen:
        mine = [r for r in records if r.algorithm == algorithm]
        solved = [r for r in mine if r.outcome == "solved"]
        oom = sum(1 for r in mine if r.outcome == "out-of-memory-est")
        avg = sum(r.wall_ms for r in solved) / (1000 * len(solved)) if solved else 0.0
        lines.append(f"{algorithm:<10} {len(solved):>6} {avg:>8.2f} {oom:>6}")
    return "\n".join(lines)
