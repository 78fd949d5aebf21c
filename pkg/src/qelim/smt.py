"""Lazy satisfiability of quantifier-free formulas over linear atoms.

The boolean structure is abstracted into SAT (Tseitin-style definitional
encoding, equations become definitions of a pair of weak inequalities).
Full SAT assignments are checked on the exact simplex; an infeasible one
comes back as a deletion-minimized literal subset whose negation joins the
clause set, and the search restarts.  Every returned model is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .formula import (
    And,
    Atom,
    BoolConst,
    Formula,
    Not,
    Or,
    Relation,
    free_vars,
    is_quantifier_free,
    normalize,
)
from .limits import Deadline
from .polyhedra import Feasible, Infeasible, _solve
from .sat import CdclSolver, Lit
from .terms import Var

TheoryLiteral = "tuple[Atom, bool]"


@dataclass(frozen=True, slots=True)
class TheoryConflict:
    """A jointly infeasible set of atom literals."""

    literals: tuple[tuple[Atom, bool], ...]


def _fold_literal(a: Atom, positive: bool) -> Atom:
    if positive:
        return a
    negated = a.negated()
    if isinstance(negated, Atom):
        return negated
    raise ValueError("cannot fold the negation of an equation into one constraint")


def theory_check(
    literals: Sequence[tuple[Atom, bool]], deadline: Deadline | None = None
) -> "Feasible | TheoryConflict":
    """Check a conjunction of atom literals on the exact simplex."""
    folded: dict[Atom, tuple[Atom, bool]] = {}
    for a, positive in literals:
        folded.setdefault(_fold_literal(a, positive), (a, positive))
    atoms = list(folded)
    result = _solve(atoms, deadline)
    if isinstance(result, Feasible):
        return result
    return TheoryConflict(tuple(folded[atoms[i]] for i in result.core))


def minimize_conflict(
    conflict: TheoryConflict, deadline: Deadline | None = None
) -> TheoryConflict:
    """Deletion filter: drop literals whose removal keeps the set infeasible."""
    kept = list(conflict.literals)
    i = 0
    while i < len(kept):
        trial = kept[:i] + kept[i + 1 :]
        folded = [_fold_literal(a, pos) for a, pos in trial]
        if isinstance(_solve(folded, deadline), Infeasible):
            kept.pop(i)
        else:
            i += 1
    return TheoryConflict(tuple(kept))


class PropAbstraction:
    """Atom <-> SAT-variable bijection plus definitional clauses.

    Weak and strict inequalities map directly to variables.  An equation
    gets a defined variable equivalent to the conjunction of its two weak
    halves, and internal connectives get Tseitin definition variables that
    are never reported to the theory.
    """

    def __init__(self, sat: CdclSolver):
        self._sat = sat
        self._atom_var: dict[Atom, int] = {}
        self._var_atom: dict[int, Atom] = {}
        self._defs: dict[object, Lit] = {}
        self._true_lit: Lit | None = None

    def atom_literal(self, a: Atom, positive: bool = True) -> Lit:
        """SAT literal for an atom (equations get their defined variable)."""
        if a.rel is Relation.EQ:
            lit = self._eq_definition(a)
        else:
            var = self._atom_var.get(a)
            if var is None:
                var = self._sat.new_var()
                self._atom_var[a] = var
                self._var_atom[var] = a
            lit = var
        return lit if positive else -lit

    def _constant_literal(self, value: bool) -> Lit:
        if self._true_lit is None:
            self._true_lit = self._sat.new_var()
            self._sat.add_clause([self._true_lit])
        return self._true_lit if value else -self._true_lit

    def _eq_definition(self, a: Atom) -> Lit:
        key = ("eq", a)
        lit = self._defs.get(key)
        if lit is None:
            low = self.atom_literal(Atom(a.term, Relation.GE))
            high = self.atom_literal(Atom(-a.term, Relation.GE))
            lit = self._define_and((low, high))
            self._defs[key] = lit
        return lit

    def _define_and(self, lits: tuple[Lit, ...]) -> Lit:
        key = ("and", lits)
        cached = self._defs.get(key)
        if cached is not None:
            return cached
        d = self._sat.new_var()
        for lit in lits:
            self._sat.add_clause([-d, lit])
        self._sat.add_clause([d] + [-lit for lit in lits])
        self._defs[key] = d
        return d

    def _define_or(self, lits: tuple[Lit, ...]) -> Lit:
        key = ("or", lits)
        cached = self._defs.get(key)
        if cached is not None:
            return cached
        d = self._sat.new_var()
        for lit in lits:
            self._sat.add_clause([d, -lit])
        self._sat.add_clause([-d] + list(lits))
        self._defs[key] = d
        return d

    def encode(self, f: Formula) -> Lit:
        if isinstance(f, BoolConst):
            return self._constant_literal(f.value)
        if isinstance(f, Atom):
            return self.atom_literal(f)
        if isinstance(f, Not):
            return -self.encode(f.child)
        if isinstance(f, And):
            return self._define_and(tuple(self.encode(c) for c in f.children))
        if isinstance(f, Or):
            return self._define_or(tuple(self.encode(c) for c in f.children))
        raise ValueError("cannot encode a quantified formula")

    def assigned_literals(self) -> list[tuple[Atom, bool]]:
        """Atom literals of the current full SAT assignment, by variable index."""
        return [
            (atom, self._sat.model_value(var))
            for var, atom in sorted(self._var_atom.items())
        ]


class SmtSolver:
    """Stateful incremental solver; clauses and theory lemmas only accumulate."""

    def __init__(self) -> None:
        self._sat = CdclSolver()
        self._abstr = PropAbstraction(self._sat)
        self.check_count = 0
        self.theory_check_count = 0

    def add_formula(self, f: Formula) -> None:
        f = normalize(f)
        if not is_quantifier_free(f):
            raise ValueError("formula must be quantifier-free")
        self._sat.add_clause([self._abstr.encode(f)])

    def add_clause(self, literals: Iterable[tuple[Atom, bool]]) -> None:
        self._sat.add_clause(
            [self._abstr.atom_literal(a, pos) for a, pos in literals]
        )

    def assumption_literals(
        self, assumptions: Iterable[tuple[Atom, bool]]
    ) -> tuple[Lit, ...]:
        return tuple(self._abstr.atom_literal(a, pos) for a, pos in assumptions)

    def check(
        self,
        assumptions: Iterable[tuple[Atom, bool]] = (),
        deadline: Deadline | None = None,
    ) -> dict[Var, Fraction] | None:
        """A model of the asserted formulas (under assumptions), or None."""
        self.check_count += 1
        lits = self.assumption_literals(assumptions)
        num_theory_vars = len(self._abstr._var_atom)
        checks_this_call = 0
        while True:
            if not self._sat.solve(lits, deadline):
                return None
            assignment = self._abstr.assigned_literals()
            self.theory_check_count += 1
            checks_this_call += 1
            if num_theory_vars <= 24:
                assert checks_this_call <= 2 ** num_theory_vars, (
                    "theory checks exceeded the assignment-count bound"
                )
            result = theory_check(assignment, deadline)
            if isinstance(result, Feasible):
                return dict(result.witness)
            conflict = minimize_conflict(result, deadline)
            clause = [self._abstr.atom_literal(a, not pos) for a, pos in conflict.literals]
            assert all(self._sat.value_of(lit) < 0 for lit in clause), (
                "blocking clause must be violated by the refuted assignment"
            )
            self._sat.add_clause(clause)


def check_sat(
    f: Formula, deadline: Deadline | None = None
) -> dict[Var, Fraction] | None:
    """Satisfiability of a quantifier-free formula.

    Returns an exact rational model (total on the free variables, absent
    variables completed with 0), or None when unsatisfiable.
    """
    solver = SmtSolver()
    solver.add_formula(f)
    model = solver.check(deadline=deadline)
    if model is None:
        return None
    for v in free_vars(f):
        model.setdefault(v, Fraction(0))
    return model


def implies(f: Formula, g: Formula, deadline: Deadline | None = None) -> bool:
    """Whether every model of ``f`` satisfies ``g``."""
    from .formula import conj, neg, nnf

    return check_sat(conj([f, nnf(neg(g))]), deadline) is None


def equivalent(f: Formula, g: Formula, deadline: Deadline | None = None) -> bool:
    return implies(f, g, deadline) and implies(g, f, deadline)
