"""Quantifier elimination by generalizing and projecting models.

The main loop keeps two formulas: the disjunction of projections produced so
far, and the remaining search space (the input with every produced
projection blocked).  Each satisfying assignment of the remainder widens to
the conjunction of atom literals it satisfies, shrinks to an
inclusion-minimal conjunction still inconsistent with the complement of the
input, is projected exactly, and the projection is blocked.  Because blocked
projections cover at least the truth-assignment class of the current model,
the loop takes at most one iteration per class.

Variants: ``mod1`` blocks the generalized conjunction itself instead of its
projection (all-models enumeration followed by projection); ``mod2`` also
conjoins every blocked projection onto the complement used for shrinking,
which can merge regions the main variant keeps separate.  Elimination
relative to a background assumption conjoins it to both sides and makes the
result equivalent only over the assumption's models.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .formula import (
    And,
    Atom,
    BoolConst,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Relation,
    TRUE,
    atoms,
    conj,
    disj,
    evaluate,
    free_vars,
    is_quantifier_free,
    neg,
    nnf,
    normalize,
)
from .limits import Deadline
from .polyhedra import ConstraintSystem, Feasible, feasible, project
from .smt import SmtSolver, check_sat
from .terms import LinearTerm, Var

Model = "Mapping[Var, Fraction]"

Conjunction = tuple[Atom, ...]


class InvariantViolation(AssertionError):
    """Raised in verification mode when a loop invariant fails."""


@dataclass
class ElimStats:
    iterations: int = 0
    smt_calls: int = 0
    generalize2_relaxations: int = 0
    projection_count: int = 0
    time_smt: float = 0.0
    time_generalize: float = 0.0
    time_project: float = 0.0
    time_total: float = 0.0

    def merge(self, other: "ElimStats") -> None:
        self.iterations += other.iterations
        self.smt_calls += other.smt_calls
        self.generalize2_relaxations += other.generalize2_relaxations
        self.projection_count += other.projection_count
        self.time_smt += other.time_smt
        self.time_generalize += other.time_generalize
        self.time_project += other.time_project
        self.time_total += other.time_total


@dataclass(frozen=True, slots=True)
class DnfFormula:
    """Disjunction of feasible constraint systems over the free variables."""

    disjuncts: tuple[ConstraintSystem, ...]

    def to_formula(self) -> Formula:
        return disj(d.to_formula() for d in self.disjuncts)

    def is_false(self) -> bool:
        return not self.disjuncts

    def is_true(self) -> bool:
        return any(d.is_true() for d in self.disjuncts)


def generalize1(f: Formula, model: "Mapping[Var, Fraction]") -> Conjunction:
    """Widen a satisfying assignment to the conjunction of atom literals it
    satisfies, in the formula's canonical atom order.

    Literals are kept atomic: a falsified weak inequality contributes the
    strict complement, a falsified strict one the weak complement, and a
    falsified equation the strict inequality of the side the model lies on.
    The result implies ``f`` and still holds on ``model``.
    """
    if not evaluate(f, model):
        raise ValueError("assignment does not satisfy the formula")
    out: list[Atom] = []
    seen: set[Atom] = set()
    for p in atoms(f):
        value = p.term.evaluate(model)
        if p.rel.holds(value):
            lit = p
        elif p.rel is Relation.GE:
            lit = Atom(-p.term, Relation.GT)
        elif p.rel is Relation.GT:
            lit = Atom(-p.term, Relation.GE)
        else:
            lit = Atom(p.term, Relation.GT) if value > 0 else Atom(-p.term, Relation.GT)
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return tuple(out)


def _shrink(
    solver: SmtSolver,
    conjunction: Conjunction,
    stats: ElimStats | None = None,
    deadline: Deadline | None = None,
) -> Conjunction:
    """Deletion scan against the formula asserted in ``solver``."""

    def consistent(lits: Sequence[Atom]) -> bool:
        start = time.perf_counter()
        model = solver.check([(a, True) for a in lits], deadline)
        if stats is not None:
            stats.smt_calls += 1
            stats.time_smt += time.perf_counter() - start
        return model is not None

    if consistent(conjunction):
        raise ValueError("conjunction must be inconsistent with the target formula")
    kept = list(conjunction)
    i = 0
    while i < len(kept):
        trial = kept[:i] + kept[i + 1 :]
        if consistent(trial):
            i += 1
        else:
            kept.pop(i)
            if stats is not None:
                stats.generalize2_relaxations += 1
    return tuple(kept)


def generalize2(
    g: Formula,
    conjunction: Conjunction,
    deadline: Deadline | None = None,
) -> Conjunction:
    """Remove conjuncts whose deletion keeps ``g and conjunction`` unsatisfiable.

    Scans in list order; the result is a subsequence that is inclusion-minimal
    (restoring any dropped conjunct is unnecessary, dropping any kept one
    makes the combination satisfiable).
    """
    solver = SmtSolver()
    solver.add_formula(nnf(normalize(g)))
    return _shrink(solver, conjunction, None, deadline)


def _grid_values() -> list[Fraction]:
    return [Fraction(n, 2) for n in range(-5, 6)]


def _fix_variables(
    system: ConstraintSystem, point: "Mapping[Var, Fraction]"
) -> ConstraintSystem:
    """The system with the given variables pinned to concrete values."""
    pinned = []
    for a in system.atoms:
        t = a.term
        for v, q in point.items():
            t = t.substitute(v, LinearTerm.const(q))
        pinned.append(Atom(t, a.rel))
    return ConstraintSystem(pinned)


def _sample_projection(
    source: ConstraintSystem,
    eliminated: Sequence[Var],
    projection: ConstraintSystem,
) -> None:
    """Spot-check ``projection == exists eliminated . source`` by sampling."""
    elim_set = set(eliminated)

    # Soundness on the witness point of the source.
    witness = feasible(source)
    if not isinstance(witness, Feasible):
        raise InvariantViolation("generalized conjunction must be satisfiable")
    restricted = dict(witness.witness)
    for v in projection.variables():
        restricted.setdefault(v, Fraction(0))
    if not projection.holds_on(restricted):
        raise InvariantViolation("projection rejects the image of a source model")

    # Soundness on grid models of the source.
    source_vars = sorted(source.variables())[:3]
    for p in _grid_points(source_vars):
        full = dict(p)
        for v in source.variables() | projection.variables():
            full.setdefault(v, Fraction(0))
        if source.holds_on(full) and not projection.holds_on(full):
            raise InvariantViolation("projection rejects the image of a source model")

    # Completeness: grid points of the projection extend to the source.
    retained = sorted(projection.variables())[:3]
    for p in _grid_points(retained):
        full = dict(p)
        for v in projection.variables():
            full.setdefault(v, Fraction(0))
        if not projection.holds_on(full):
            continue
        fixed = {v: q for v, q in full.items() if v not in elim_set}
        if not isinstance(feasible(_fix_variables(source, fixed)), Feasible):
            raise InvariantViolation(
                "projection admits a point with no preimage in the source"
            )


def _grid_points(variables: Sequence[Var]) -> list[dict[Var, Fraction]]:
    points: list[dict[Var, Fraction]] = [{}]
    for v in variables:
        points = [dict(p, **{v: q}) for p in points for q in _grid_values()]
    return points


def _check_iteration_invariants(
    f: Formula,
    shrink_target: Formula,
    model: "Mapping[Var, Fraction]",
    m1: Conjunction,
    m2: Conjunction,
    produced: Sequence[ConstraintSystem],
    blocked: Sequence[ConstraintSystem],
    variables: Sequence[Var],
    pi: ConstraintSystem,
    deadline: Deadline | None,
    check_disjoint: bool = True,
) -> None:
    o_formula = disj(d.to_formula() for d in produced)
    h_formula = conj([f] + [nnf(neg(b.to_formula())) for b in blocked])

    # Blocking only the generalized conjunction leaves projected points in
    # the remainder, so disjointness is an invariant of projection blocking.
    if check_disjoint and check_sat(conj([h_formula, o_formula]), deadline) is not None:
        raise InvariantViolation("remainder and output must be disjoint")
    if check_sat(conj([f, nnf(neg(disj([o_formula, h_formula])))]), deadline) is not None:
        raise InvariantViolation("input escapes the output/remainder cover")
    if (
        check_sat(
            conj([disj([o_formula, h_formula]), nnf(neg(disj([o_formula, f])))]),
            deadline,
        )
        is not None
    ):
        raise InvariantViolation("output/remainder cover exceeds input plus output")

    elim = set(variables)
    for d in produced:
        if d.variables() & elim:
            raise InvariantViolation("output mentions an eliminated variable")

    for a in m1:
        if not a.holds_on(model):
            raise InvariantViolation("generalization lost the model")
    if check_sat(conj([conj(list(m1)), nnf(neg(f))]), deadline) is not None:
        raise InvariantViolation("generalized conjunction does not imply the input")

    if check_sat(conj([conj(list(m2)), shrink_target]), deadline) is not None:
        raise InvariantViolation("shrunk conjunction is consistent with the complement")
    kept = list(m2)
    for i in range(len(kept)):
        trial = kept[:i] + kept[i + 1 :]
        if check_sat(conj([conj(trial), shrink_target]), deadline) is None:
            raise InvariantViolation("shrunk conjunction is not inclusion-minimal")

    _sample_projection(ConstraintSystem(m2), variables, pi)


def _exist_elim_loop(
    f: Formula,
    variables: Sequence[Var],
    *,
    block_projection: bool = True,
    extend_shrink_target: bool = False,
    assumption: Formula = TRUE,
    reverse_conjunct_order: bool = False,
    verify: bool = False,
    deadline: Deadline | None = None,
) -> tuple[DnfFormula, ElimStats]:
    started = time.perf_counter()
    stats = ElimStats()
    f = nnf(normalize(f))
    if not is_quantifier_free(f):
        raise ValueError("formula must be quantifier-free")
    assumption = nnf(normalize(assumption))
    if not is_quantifier_free(assumption):
        raise ValueError("assumption must be quantifier-free")
    vs = tuple(variables)

    complement = nnf(neg(f))

    remainder = SmtSolver()
    remainder.add_formula(f)
    shrinker = SmtSolver()
    shrinker.add_formula(complement)
    if assumption != TRUE:
        remainder.add_formula(assumption)
        shrinker.add_formula(assumption)

    n_atoms = len(atoms(f))
    n_eq = sum(1 for a in atoms(f) if a.rel is Relation.EQ)
    iteration_limit = 2 ** (n_atoms + n_eq) if n_atoms + n_eq <= 40 else None

    produced: list[ConstraintSystem] = []
    blocked: list[ConstraintSystem] = []
    shrink_target_parts: list[Formula] = [complement]
    if assumption != TRUE:
        shrink_target_parts.append(assumption)

    while True:
        t0 = time.perf_counter()
        model = remainder.check(deadline=deadline)
        stats.smt_calls += 1
        stats.time_smt += time.perf_counter() - t0
        if model is None:
            break

        t0 = time.perf_counter()
        m1 = generalize1(f, model)
        ordered = tuple(reversed(m1)) if reverse_conjunct_order else m1
        target_snapshot = conj(shrink_target_parts) if verify else TRUE
        m2 = _shrink(shrinker, ordered, stats, deadline)
        stats.time_generalize += time.perf_counter() - t0

        system = ConstraintSystem(m2)
        t0 = time.perf_counter()
        pi = project(system, vs, deadline)
        stats.projection_count += 1
        stats.time_project += time.perf_counter() - t0

        stats.iterations += 1
        if iteration_limit is not None and stats.iterations > iteration_limit:
            raise AssertionError("iteration count exceeded the class-count bound")

        if pi.is_true():
            produced = [pi]
            blocked.append(pi if block_projection else system)
            if verify:
                _check_iteration_invariants(
                    f, target_snapshot, model, m1, m2,
                    produced, blocked, vs, pi, deadline,
                    check_disjoint=block_projection,
                )
            break

        produced.append(pi)
        block = pi if block_projection else system
        blocked.append(block)
        remainder.add_clause([(a, False) for a in block.atoms])
        if extend_shrink_target:
            shrinker.add_clause([(a, False) for a in pi.atoms])
            shrink_target_parts.append(nnf(neg(pi.to_formula())))

        if verify:
            _check_iteration_invariants(
                f, target_snapshot, model, m1, m2,
                produced, blocked, vs, pi, deadline,
                check_disjoint=block_projection,
            )

    stats.time_total = time.perf_counter() - started
    return DnfFormula(tuple(produced)), stats


def exist_elim(
    f: Formula,
    variables: Sequence[Var],
    *,
    reverse_conjunct_order: bool = False,
    verify: bool = False,
    deadline: Deadline | None = None,
) -> tuple[DnfFormula, ElimStats]:
    """Quantifier-free DNF equivalent to existentially quantifying
    ``variables`` out of a quantifier-free formula."""
    return _exist_elim_loop(
        f,
        variables,
        reverse_conjunct_order=reverse_conjunct_order,
        verify=verify,
        deadline=deadline,
    )


def exist_elim_mod1(
    f: Formula,
    variables: Sequence[Var],
    *,
    reverse_conjunct_order: bool = False,
    verify: bool = False,
    deadline: Deadline | None = None,
) -> tuple[DnfFormula, ElimStats]:
    """Variant that blocks the generalized model instead of its projection
    (enumerate all generalized models, then project each)."""
    return _exist_elim_loop(
        f,
        variables,
        block_projection=False,
        reverse_conjunct_order=reverse_conjunct_order,
        verify=verify,
        deadline=deadline,
    )


def exist_elim_mod2(
    f: Formula,
    variables: Sequence[Var],
    *,
    reverse_conjunct_order: bool = False,
    verify: bool = False,
    deadline: Deadline | None = None,
) -> tuple[DnfFormula, ElimStats]:
    """Variant that also conjoins each blocked projection onto the shrink
    target, allowing later conjunctions to cover already-output regions."""
    return _exist_elim_loop(
        f,
        variables,
        extend_shrink_target=True,
        reverse_conjunct_order=reverse_conjunct_order,
        verify=verify,
        deadline=deadline,
    )


def exist_elim_modulo(
    f: Formula,
    variables: Sequence[Var],
    assumption: Formula,
    *,
    deadline: Deadline | None = None,
) -> DnfFormula:
    """Elimination relative to a background assumption on the free variables.

    The result agrees with eliminating ``variables`` from ``f`` on every
    model of the assumption; valuations outside it are unconstrained.  An
    unsatisfiable assumption yields the empty disjunction.
    """
    result, _ = _exist_elim_loop(
        f, variables, assumption=assumption, deadline=deadline
    )
    return result


def eliminate_all(
    f: Formula,
    *,
    algorithm: str = "main",
    reverse_conjunct_order: bool = False,
    verify: bool = False,
    deadline: Deadline | None = None,
    stats: ElimStats | None = None,
) -> Formula:
    """Quantifier-free equivalent of an arbitrarily quantified formula.

    Quantifiers are processed innermost-first; a universal block is
    eliminated as the negated existential elimination of the negated body.
    Ground results fold to ``true``/``false``.
    """
    runner = {
        "main": exist_elim,
        "mod1": exist_elim_mod1,
        "mod2": exist_elim_mod2,
    }.get(algorithm)
    if runner is None:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    def eliminate(body: Formula, bound: Sequence[Var]) -> Formula:
        dnf, run_stats = runner(
            nnf(body),
            bound,
            reverse_conjunct_order=reverse_conjunct_order,
            verify=verify,
            deadline=deadline,
        )
        if stats is not None:
            stats.merge(run_stats)
        return dnf.to_formula()

    def rec(g: Formula) -> Formula:
        if isinstance(g, (BoolConst, Atom)):
            return g
        if isinstance(g, Not):
            return neg(rec(g.child))
        if isinstance(g, And):
            return conj(rec(c) for c in g.children)
        if isinstance(g, Or):
            return disj(rec(c) for c in g.children)
        if isinstance(g, Exists):
            return eliminate(rec(g.child), g.bound)
        if isinstance(g, Forall):
            return nnf(neg(eliminate(nnf(neg(rec(g.child))), g.bound)))
        raise TypeError(f"not a formula: {g!r}")

    return rec(normalize(f))
