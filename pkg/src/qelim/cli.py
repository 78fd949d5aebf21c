"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from fractions import Fraction

from .bench import bench_run, equiv_check, parse_config, records_to_csv, summarize
from .engine import ElimStats, eliminate_all, exist_elim_modulo
from .formula import Exists, Formula, atoms, is_quantifier_free, normalize
from .generator import GenParams, gen_random
from .limits import Deadline, TimeoutExceeded
from .lw import lw_eliminate_all
from .parser import ParseError, format_formula, parse_file
from .smt import check_sat

_RATIONAL = re.compile(r"-?[0-9]+(/[1-9][0-9]*)?\Z")


def _rational(text: str) -> Fraction:
    if not _RATIONAL.match(text):
        raise argparse.ArgumentTypeError(f"not a rational literal: {text!r}")
    return Fraction(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qelim")
    sub = parser.add_subparsers(dest="command", required=True)

    elim = sub.add_parser("eliminate", help="eliminate all quantifiers from a formula file")
    elim.add_argument("file")
    elim.add_argument("--algorithm", choices=["main", "mod1", "mod2", "lw"], default="main")
    elim.add_argument(
        "--no-block-projected-model",
        action="store_true",
        help="block the generalized model instead of its projection (alias for --algorithm mod1)",
    )
    elim.add_argument(
        "--add-blocking-to-g",
        action="store_true",
        help="also conjoin blocked projections onto the shrink target (alias for --algorithm mod2)",
    )
    elim.add_argument("--assume", metavar="FILE", help="background assumption formula")
    elim.add_argument("--reverse-conjunct-order", action="store_true")
    elim.add_argument("--verify-invariants", action="store_true")
    elim.add_argument("--stats", action="store_true")
    elim.add_argument("--timeout-ms", type=int)

    check = sub.add_parser("check-sat", help="satisfiability of a quantifier-free formula")
    check.add_argument("file")
    check.add_argument("--timeout-ms", type=int)

    equiv = sub.add_parser("equiv", help="equivalence of two quantifier-free formulas")
    equiv.add_argument("file1")
    equiv.add_argument("file2")
    equiv.add_argument("--timeout-ms", type=int)

    gen = sub.add_parser("gen", help="print a deterministic random formula")
    gen.add_argument("--vars", type=int, required=True)
    gen.add_argument("--depth", type=int, required=True)
    gen.add_argument("--coeff-min", type=int, default=-10)
    gen.add_argument("--coeff-max", type=int, default=10)
    gen.add_argument("--quant-prob", type=_rational, default=Fraction(0))
    gen.add_argument("--seed", type=int, default=0)

    bench = sub.add_parser("bench", help="run a benchmark suite from a config file")
    bench.add_argument("config")
    bench.add_argument("--out", help="write the CSV here (otherwise CSV goes to stdout)")

    return parser


def _deadline(args) -> Deadline | None:
    timeout = getattr(args, "timeout_ms", None)
    return Deadline.from_ms(timeout) if timeout else None


def _cmd_eliminate(args) -> int:
    algorithm = args.algorithm
    if args.no_block_projected_model and args.add_blocking_to_g:
        print("error: the two blocking-mode flags are mutually exclusive", file=sys.stderr)
        return 1
    if args.no_block_projected_model:
        algorithm = "mod1"
    elif args.add_blocking_to_g:
        algorithm = "mod2"

    formula = parse_file(args.file)
    deadline = _deadline(args)
    stats = ElimStats()
    started = time.perf_counter()
    if args.assume:
        assumption = parse_file(args.assume)
        if algorithm != "main":
            print("error: --assume is only supported with the main algorithm", file=sys.stderr)
            return 1
        result = _eliminate_modulo(formula, assumption, deadline)
        if result is None:
            return 1
    elif algorithm == "lw":
        result = lw_eliminate_all(formula, deadline)
    else:
        result = eliminate_all(
            formula,
            algorithm=algorithm,
            reverse_conjunct_order=args.reverse_conjunct_order,
            verify=args.verify_invariants,
            deadline=deadline,
            stats=stats,
        )
    wall_ms = int((time.perf_counter() - started) * 1000)
    print(format_formula(result))
    if args.stats:
        for key, value in (
            ("algorithm", algorithm),
            ("wall_ms", wall_ms),
            ("iterations", stats.iterations),
            ("smt_calls", stats.smt_calls),
            ("generalize2_relaxations", stats.generalize2_relaxations),
            ("projection_count", stats.projection_count),
            ("time_smt_ms", int(stats.time_smt * 1000)),
            ("time_generalize_ms", int(stats.time_generalize * 1000)),
            ("time_project_ms", int(stats.time_project * 1000)),
            ("output_atoms", len(atoms(result))),
        ):
            print(f"{key}={value}", file=sys.stderr)
    return 0


def _eliminate_modulo(formula: Formula, assumption: Formula, deadline) -> Formula | None:
    """Elimination relative to an assumption; the input must be one
    existential block over a quantifier-free body (or quantifier-free)."""
    formula = normalize(formula)
    if isinstance(formula, Exists) and is_quantifier_free(formula.child):
        return exist_elim_modulo(formula.child, formula.bound, assumption, deadline=deadline).to_formula()
    if is_quantifier_free(formula):
        return exist_elim_modulo(formula, (), assumption, deadline=deadline).to_formula()
    print(
        "error: --assume needs a quantifier-free formula or a single outermost "
        "existential block",
        file=sys.stderr,
    )
    return None


def _cmd_check_sat(args) -> int:
    formula = parse_file(args.file)
    model = check_sat(formula, _deadline(args))
    if model is None:
        print("unsat")
    else:
        print("sat")
        for v in sorted(model):
            q = model[v]
            print(f"{v} = {q.numerator}" + (f"/{q.denominator}" if q.denominator != 1 else ""))
    return 0


def _cmd_equiv(args) -> int:
    f = parse_file(args.file1)
    g = parse_file(args.file2)
    deadline = _deadline(args)
    for name, h in ((args.file1, f), (args.file2, g)):
        if not is_quantifier_free(normalize(h)):
            print(f"error: {name} is not quantifier-free", file=sys.stderr)
            return 1
    print("equivalent" if equiv_check(f, g, deadline) else "not equivalent")
    return 0


def _cmd_gen(args) -> int:
    params = GenParams(
        num_vars=args.vars,
        depth=args.depth,
        coeff_min=args.coeff_min,
        coeff_max=args.coeff_max,
        quantifier_prob=args.quant_prob,
        seed=args.seed,
    )
    print(format_formula(gen_random(params)))
    return 0


def _cmd_bench(args) -> int:
    import os

    with open(args.config, "r", encoding="utf-8") as handle:
        config = parse_config(handle.read(), base_dir=os.path.dirname(os.path.abspath(args.config)))
    records = bench_run(config)
    csv_text = records_to_csv(records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(csv_text)
        print(summarize(records))
    else:
        print(summarize(records), file=sys.stderr)
        print(csv_text, end="")
    return 0


_COMMANDS = {
    "eliminate": _cmd_eliminate,
    "check-sat": _cmd_check_sat,
    "equiv": _cmd_equiv,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except TimeoutExceeded:
        print("error: time limit exceeded", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
