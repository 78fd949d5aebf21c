"""Quantifier elimination for linear rational arithmetic.

Exact end to end: terms and models are built on arbitrary-precision
rationals, satisfiability runs on a lazy SAT-plus-simplex core, and
projection is Fourier-Motzkin with LP-based redundancy pruning.  A
virtual-substitution baseline provides an independent cross-check.
"""

from .bench import BenchConfig, BenchRecord, bench_run, equiv_check, parse_config
from .engine import (
    Conjunction,
    DnfFormula,
    ElimStats,
    InvariantViolation,
    eliminate_all,
    exist_elim,
    exist_elim_mod1,
    exist_elim_mod2,
    exist_elim_modulo,
    generalize1,
    generalize2,
)
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    BoolConst,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Relation,
    atom,
    atoms,
    conj,
    disj,
    evaluate,
    exists,
    forall,
    free_vars,
    implies,
    is_quantifier_free,
    neg,
    nnf,
    normalize,
)
from .generator import GenParams, SplitMix64, gen_random
from .limits import Deadline, TimeoutExceeded
from .lw import TestPoint, TestPointKind, lw_eliminate_all, lw_eliminate_var
from .parser import ParseError, UnboundSymbolError, format_formula, parse, parse_file
from .polyhedra import (
    ConstraintSystem,
    Feasible,
    Infeasible,
    feasible,
    fm_eliminate,
    is_redundant,
    project,
    remove_redundant,
)
from .smt import SmtSolver, TheoryConflict, check_sat, minimize_conflict, theory_check
from .terms import LinearTerm, Rational, Var

__all__ = [
    "And", "Atom", "BenchConfig", "BenchRecord", "BoolConst", "Conjunction",
    "ConstraintSystem", "Deadline", "DnfFormula", "ElimStats", "Exists",
    "FALSE", "Feasible", "Forall", "Formula", "GenParams", "Infeasible",
    "InvariantViolation", "LinearTerm", "Not", "Or", "ParseError", "Rational",
    "Relation", "SmtSolver", "SplitMix64", "TRUE", "TestPoint",
    "TestPointKind", "TheoryConflict", "TimeoutExceeded", "UnboundSymbolError",
    "Var", "atom", "atoms", "bench_run", "check_sat", "conj", "disj",
    "eliminate_all", "equiv_check", "evaluate", "exist_elim",
    "exist_elim_mod1", "exist_elim_mod2", "exist_elim_modulo", "exists",
    "feasible", "fm_eliminate", "forall", "format_formula", "free_vars",
    "gen_random", "generalize1", "generalize2", "implies",
    "is_quantifier_free", "is_redundant", "lw_eliminate_all",
    "lw_eliminate_var", "minimize_conflict", "neg", "nnf", "normalize",
    "parse", "parse_config", "parse_file", "project", "remove_redundant",
    "theory_check",
]
