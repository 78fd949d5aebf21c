"""Exact reasoning about conjunctions of linear constraints.

A :class:`ConstraintSystem` is a conjunction of atoms denoting a convex
polyhedron in rational space (faces may be strict).  Feasibility is decided
by an exact rational simplex in which strict inequalities carry a symbolic
infinitesimal slack, so satisfiable strict systems always get a genuine
rational interior witness.  Variable elimination pairs lower and upper
bounds (equations are substituted out first), and redundancy removal is
LP-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import limits
from .formula import Atom, Formula, Relation, conj
from .limits import Deadline
from .terms import LinearTerm, Var

_FALSE_ATOM = Atom(LinearTerm.const(-1), Relation.GE)


@dataclass(frozen=True, slots=True)
class ConstraintSystem:
    """Canonical conjunction of linear constraints.

    Ground constraints are folded away on construction: true ones are
    dropped and a false one collapses the whole system to the canonical
    infeasible marker.  Duplicates are removed, first occurrence wins.
    """

    atoms: tuple[Atom, ...]

    def __init__(self, atoms: Iterable[Atom] = ()):
        kept: list[Atom] = []
        seen: set[Atom] = set()
        for a in atoms:
            if a.is_ground():
                if a.ground_value():
                    continue
                kept = [_FALSE_ATOM]
                break
            if a not in seen:
                seen.add(a)
                kept.append(a)
        object.__setattr__(self, "atoms", tuple(kept))

    def __len__(self) -> int:
        return len(self.atoms)

    def is_true(self) -> bool:
        return not self.atoms

    def is_false(self) -> bool:
        return self.atoms == (_FALSE_ATOM,)

    def variables(self) -> frozenset[Var]:
        out: set[Var] = set()
        for a in self.atoms:
            out.update(a.term.variables())
        return frozenset(out)

    def holds_on(self, assignment: Mapping[Var, Fraction]) -> bool:
        return all(a.holds_on(assignment) for a in self.atoms)

    def to_formula(self) -> Formula:
        return conj(list(self.atoms))


@dataclass(frozen=True, slots=True)
class Feasible:
    witness: dict[Var, Fraction]


@dataclass(frozen=True, slots=True)
class Infeasible:
    core: tuple[int, ...]


FeasibilityResult = "Feasible | Infeasible"


@dataclass(frozen=True, slots=True)
class EpsValue:
    """Value in the ordered extension Q + Q*eps, compared lexicographically."""

    real: Fraction
    eps: Fraction

    def __add__(self, other: "EpsValue") -> "EpsValue":
        return EpsValue(self.real + other.real, self.eps + other.eps)

    def __sub__(self, other: "EpsValue") -> "EpsValue":
        return EpsValue(self.real - other.real, self.eps - other.eps)

    def scale(self, k: Fraction) -> "EpsValue":
        return EpsValue(self.real * k, self.eps * k)

    def __lt__(self, other: "EpsValue") -> bool:
        return (self.real, self.eps) < (other.real, other.eps)

    def __le__(self, other: "EpsValue") -> bool:
        return (self.real, self.eps) <= (other.real, other.eps)


_ZERO = Fraction(0)
_EPS_ZERO = EpsValue(_ZERO, _ZERO)


class _Simplex:
    """Bound-satisfaction simplex with Bland's rule.

    Problem variables are unbounded; every constraint ``c + sum(a*x) rel 0``
    contributes a slack variable equal to its linear part with bounds
    ``>= -c`` (weak), ``>= -c + eps`` (strict) or ``= -c`` (equation).
    Termination follows from always picking the smallest-index violated
    basic variable and the smallest-index admissible pivot column.
    """

    def __init__(self, constraints: Sequence[Atom], deadline: Deadline | None = None):
        self._deadline = deadline
        names = sorted({v for a in constraints for v in a.term.variables()})
        self._names = names
        self._num_problem = len(names)
        index = {v: i for i, v in enumerate(names)}
        total = len(names) + len(constraints)

        self._lower: list[EpsValue | None] = [None] * total
        self._upper: list[EpsValue | None] = [None] * total
        self._value: list[EpsValue] = [_EPS_ZERO] * total
        self._rows: dict[int, dict[int, Fraction]] = {}
        self._cols: dict[int, set[int]] = {i: set() for i in range(total)}
        self._slack_constraint: dict[int, int] = {}
        self._bound_reason: list[int | None] = [None] * total

        for ci, a in enumerate(constraints):
            slack = len(names) + ci
            self._slack_constraint[slack] = ci
            self._bound_reason[slack] = ci
            row = {index[v]: c for v, c in a.term.coeffs}
            self._rows[slack] = row
            for j in row:
                self._cols[j].add(slack)
            bound = EpsValue(-a.term.constant, _ZERO)
            if a.rel is Relation.GE:
                self._lower[slack] = bound
            elif a.rel is Relation.GT:
                self._lower[slack] = EpsValue(-a.term.constant, Fraction(1))
            else:
                self._lower[slack] = bound
                self._upper[slack] = bound

    def check(self) -> "Feasible | Infeasible":
        pivots = 0
        while True:
            pivots += 1
            if pivots % 64 == 0:
                limits.check(self._deadline)
            violated = None
            too_low = False
            for b in sorted(self._rows):
                lo, hi = self._lower[b], self._upper[b]
                if lo is not None and self._value[b] < lo:
                    violated, too_low = b, True
                    break
                if hi is not None and hi < self._value[b]:
                    violated, too_low = b, False
                    break
            if violated is None:
                return Feasible(self._witness())
            row = self._rows[violated]
            entering = None
            for j in sorted(row):
                a = row[j]
                if too_low:
                    ok = (a > 0 and self._can_increase(j)) or (a < 0 and self._can_decrease(j))
                else:
                    ok = (a > 0 and self._can_decrease(j)) or (a < 0 and self._can_increase(j))
                if ok:
                    entering = j
                    break
            if entering is None:
                core = {self._slack_constraint[violated]}
                for j in row:
                    reason = self._bound_reason[j]
                    if reason is not None:
                        core.add(reason)
                return Infeasible(tuple(sorted(core)))
            target = self._lower[violated] if too_low else self._upper[violated]
            self._pivot(violated, entering, target)

    def _can_increase(self, j: int) -> bool:
        hi = self._upper[j]
        return hi is None or self._value[j] < hi

    def _can_decrease(self, j: int) -> bool:
        lo = self._lower[j]
        return lo is None or lo < self._value[j]

    def _pivot(self, leaving: int, entering: int, target: EpsValue) -> None:
        row = self._rows.pop(leaving)
        coeff = row[entering]
        theta = (target - self._value[leaving]).scale(Fraction(1) / coeff)
        self._value[leaving] = target
        self._value[entering] = self._value[entering] + theta
        for b, other in self._rows.items():
            a = other.get(entering)
            if a is not None:
                self._value[b] = self._value[b] + theta.scale(a)

        # Express the entering variable in terms of the leaving one.
        inv = Fraction(1) / coeff
        new_row = {leaving: inv}
        for j, a in row.items():
            if j != entering:
                new_row[j] = -a * inv
        for j in row:
            self._cols[j].discard(leaving)
        for j in new_row:
            self._cols[j].add(entering)

        # Substitute into every other row that mentions the entering variable.
        for b in list(self._cols[entering]):
            if b == entering:
                continue
            other = self._rows[b]
            factor = other.pop(entering)
            self._cols[entering].discard(b)
            for j, a in new_row.items():
                merged = other.get(j, _ZERO) + factor * a
                if merged == 0:
                    if j in other:
                        del other[j]
                        self._cols[j].discard(b)
                else:
                    if j not in other:
                        self._cols[j].add(b)
                    other[j] = merged
        self._rows[entering] = new_row

    def _witness(self) -> dict[Var, Fraction]:
        # Pick a concrete value for eps small enough for every slack bound.
        delta = Fraction(1)
        for s in self._slack_constraint:
            gaps = []
            if self._lower[s] is not None:
                gaps.append(self._value[s] - self._lower[s])
            if self._upper[s] is not None:
                gaps.append(self._upper[s] - self._value[s])
            for gap in gaps:
                if gap.real > 0 and gap.eps < 0:
                    delta = min(delta, gap.real / (-2 * gap.eps))
        return {
            v: self._value[i].real + self._value[i].eps * delta
            for i, v in enumerate(self._names)
        }


def _solve(constraints: Sequence[Atom], deadline: Deadline | None = None) -> "Feasible | Infeasible":
    ground_ok: list[Atom] = []
    for i, a in enumerate(constraints):
        if a.is_ground() and not a.ground_value():
            return Infeasible((i,))
        ground_ok.append(a)
    simplex = _Simplex(ground_ok, deadline)
    result = simplex.check()
    if isinstance(result, Feasible):
        witness = result.witness
        for a in constraints:
            assert a.holds_on(witness), "simplex produced an invalid witness"
    return result


def feasible(s: ConstraintSystem, deadline: Deadline | None = None) -> "Feasible | Infeasible":
    """Exact rational witness for ``s``, or an infeasible subset of indices."""
    return _solve(s.atoms, deadline)


def _negation_split(a: Atom) -> tuple[Atom, ...]:
    n = a.negated()
    return (n,) if isinstance(n, Atom) else n


def _implied(others: Sequence[Atom], a: Atom, deadline: Deadline | None = None) -> bool:
    """Whether every solution of ``others`` satisfies ``a``."""
    return all(
        isinstance(_solve(list(others) + [piece], deadline), Infeasible)
        for piece in _negation_split(a)
    )


def is_redundant(s: ConstraintSystem, i: int, deadline: Deadline | None = None) -> bool:
    if not 0 <= i < len(s.atoms):
        raise IndexError(f"constraint index {i} out of range")
    others = s.atoms[:i] + s.atoms[i + 1 :]
    return _implied(others, s.atoms[i], deadline)


def remove_redundant(s: ConstraintSystem, deadline: Deadline | None = None) -> ConstraintSystem:
    """Greedy in-order removal; the result is irredundant and deterministic."""
    kept = list(s.atoms)
    i = 0
    while i < len(kept):
        limits.check(deadline)
        candidate = kept[:i] + kept[i + 1 :]
        if _implied(candidate, kept[i], deadline):
            kept.pop(i)
        else:
            i += 1
    return ConstraintSystem(kept)


def _bits(q: Fraction) -> int:
    return max(abs(q.numerator).bit_length(), q.denominator.bit_length())


def _term_bits(t: LinearTerm) -> int:
    size = _bits(t.constant)
    for _, c in t.coeffs:
        size = max(size, _bits(c))
    return size


def fm_eliminate(s: ConstraintSystem, v: Var, deadline: Deadline | None = None) -> ConstraintSystem:
    """Eliminate one variable by pairwise cancellation of bounds.

    An equation mentioning ``v`` is used for Gaussian substitution instead,
    which avoids splitting it into two inequalities.  Combining a strict
    constraint with anything yields a strict constraint.
    """
    if s.is_false():
        return s

    for eq in s.atoms:
        if eq.rel is Relation.EQ:
            a = eq.term.coeff(v)
            if a != 0:
                solution = eq.term.drop(v).scale(Fraction(-1) / a)
                return ConstraintSystem(
                    Atom(c.term.substitute(v, solution), c.rel)
                    for c in s.atoms
                    if c is not eq
                )

    untouched: list[Atom] = []
    lower: list[Atom] = []  # coefficient of v positive
    upper: list[Atom] = []  # coefficient of v negative
    for c in s.atoms:
        a = c.term.coeff(v)
        if a == 0:
            untouched.append(c)
        elif a > 0:
            lower.append(c)
        else:
            upper.append(c)

    combined: list[Atom] = []
    for lo in lower:
        limits.check(deadline)
        a_lo = lo.term.coeff(v)
        for hi in upper:
            a_hi = hi.term.coeff(v)
            term = lo.term.scale(-a_hi) + hi.term.scale(a_lo)
            in_bits = max(_term_bits(lo.term), _term_bits(hi.term))
            assert _term_bits(term) <= 2 * in_bits + 1, "cancellation exceeded the coefficient growth bound"
            rel = Relation.GT if Relation.GT in (lo.rel, hi.rel) else Relation.GE
            combined.append(Atom(term, rel))
    return ConstraintSystem(untouched + combined)


def project(s: ConstraintSystem, variables: Sequence[Var], deadline: Deadline | None = None) -> ConstraintSystem:
    """Constraints equivalent to existentially quantifying ``variables`` out.

    Eliminates the variables in the given order, pruning redundant
    constraints after every step to contain the quadratic growth.
    """
    if not variables:
        return remove_redundant(s, deadline)
    out = s
    for v in variables:
        out = remove_redundant(fm_eliminate(out, v, deadline), deadline)
    return out
