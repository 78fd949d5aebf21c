"""Formula trees over linear-rational atoms.

Atoms compare ``term >= 0``, ``term > 0`` or ``term = 0`` and are kept in a
canonical scaled form so that syntactically equal constraints compare equal.
Connective constructors (:func:`conj`, :func:`disj`, :func:`neg`, ...) fold
constants, flatten nested chains and drop duplicate children; building a
formula exclusively through them yields the normal form that
:func:`normalize` produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .terms import LinearTerm, Var


class Relation(Enum):
    GE = ">="
    GT = ">"
    EQ = "="

    def holds(self, value: Fraction) -> bool:
        if self is Relation.GE:
            return value >= 0
        if self is Relation.GT:
            return value > 0
        return value == 0


class Formula:
    """Base class for formula tree nodes."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class BoolConst(Formula):
    value: bool


TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    """A single linear constraint ``term rel 0``.

    Construction normalizes the term: it is divided by the absolute value of
    the leading coefficient (the coefficient of the first variable in name
    order, or the constant if the term is ground).  Equations additionally
    flip sign so the leading coefficient is positive, since ``t = 0`` and
    ``-t = 0`` denote the same constraint.
    """

    term: LinearTerm
    rel: Relation

    def __post_init__(self) -> None:
        t = self.term
        lead = t.coeffs[0][1] if t.coeffs else t.constant
        if lead != 0:
            scaled = t.scale(Fraction(1) / abs(lead))
            if self.rel is Relation.EQ and lead < 0:
                scaled = -scaled
            if scaled != t:
                object.__setattr__(self, "term", scaled)

    def is_ground(self) -> bool:
        return self.term.is_ground()

    def ground_value(self) -> bool:
        if not self.is_ground():
            raise ValueError("atom is not ground")
        return self.rel.holds(self.term.constant)

    def holds_on(self, assignment: Mapping[Var, Fraction]) -> bool:
        return self.rel.holds(self.term.evaluate(assignment))

    def negated(self) -> "Atom | tuple[Atom, Atom]":
        """The complement constraint; an equation yields a disjunctive pair."""
        if self.rel is Relation.GE:
            return Atom(-self.term, Relation.GT)
        if self.rel is Relation.GT:
            return Atom(-self.term, Relation.GE)
        return (Atom(self.term, Relation.GT), Atom(-self.term, Relation.GT))


@dataclass(frozen=True, slots=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Or(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    bound: tuple[Var, ...]
    child: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    bound: tuple[Var, ...]
    child: Formula


def atom(term: LinearTerm, rel: Relation) -> Formula:
    """Atom as a formula; ground constraints fold to a boolean constant."""
    a = Atom(term, rel)
    if a.is_ground():
        return TRUE if a.ground_value() else FALSE
    return a


def conj(children: Iterable[Formula]) -> Formula:
    out: list[Formula] = []
    seen: set[Formula] = set()
    for c in children:
        if c == TRUE:
            continue
        if c == FALSE:
            return FALSE
        flat = c.children if isinstance(c, And) else (c,)
        for g in flat:
            if g not in seen:
                seen.add(g)
                out.append(g)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(children: Iterable[Formula]) -> Formula:
    out: list[Formula] = []
    seen: set[Formula] = set()
    for c in children:
        if c == FALSE:
            continue
        if c == TRUE:
            return TRUE
        flat = c.children if isinstance(c, Or) else (c,)
        for g in flat:
            if g not in seen:
                seen.add(g)
                out.append(g)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def neg(f: Formula) -> Formula:
    if isinstance(f, BoolConst):
        return FALSE if f.value else TRUE
    if isinstance(f, Not):
        return f.child
    return Not(f)


def _binder_vars(bound: Iterable[Var]) -> tuple[Var, ...]:
    out: list[Var] = []
    for v in bound:
        if v not in out:
            out.append(v)
    if not out:
        raise ValueError("quantifier must bind at least one variable")
    return tuple(out)


def exists(bound: Iterable[Var], child: Formula) -> Formula:
    if isinstance(child, BoolConst):
        return child
    return Exists(_binder_vars(bound), child)


def forall(bound: Iterable[Var], child: Formula) -> Formula:
    if isinstance(child, BoolConst):
        return child
    return Forall(_binder_vars(bound), child)


def implies(antecedent: Formula, consequent: Formula) -> Formula:
    return disj([neg(antecedent), consequent])


def normalize(f: Formula) -> Formula:
    """Rebuild ``f`` bottom-up through the folding constructors."""
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, Atom):
        return atom(f.term, f.rel)
    if isinstance(f, Not):
        return neg(normalize(f.child))
    if isinstance(f, And):
        return conj(normalize(c) for c in f.children)
    if isinstance(f, Or):
        return disj(normalize(c) for c in f.children)
    if isinstance(f, Exists):
        return exists(f.bound, normalize(f.child))
    if isinstance(f, Forall):
        return forall(f.bound, normalize(f.child))
    raise TypeError(f"not a formula: {f!r}")


def nnf(f: Formula) -> Formula:
    """Negation normal form.

    Negations are folded into atoms (``not t >= 0`` becomes ``-t > 0``, the
    negation of an equation becomes a disjunction of two strict atoms) and
    universal quantifiers are rewritten as negated existentials.  On
    quantifier-free input the result contains no negation nodes at all.
    """
    if isinstance(f, (BoolConst, Atom)):
        return f
    if isinstance(f, Not):
        return _nnf_neg(f.child)
    if isinstance(f, And):
        return conj(nnf(c) for c in f.children)
    if isinstance(f, Or):
        return disj(nnf(c) for c in f.children)
    if isinstance(f, Exists):
        return exists(f.bound, nnf(f.child))
    if isinstance(f, Forall):
        return neg(exists(f.bound, _nnf_neg(f.child)))
    raise TypeError(f"not a formula: {f!r}")


def _nnf_neg(f: Formula) -> Formula:
    if isinstance(f, BoolConst):
        return FALSE if f.value else TRUE
    if isinstance(f, Atom):
        n = f.negated()
        if isinstance(n, Atom):
            return atom(n.term, n.rel)
        return disj(atom(a.term, a.rel) for a in n)
    if isinstance(f, Not):
        return nnf(f.child)
    if isinstance(f, And):
        return disj(_nnf_neg(c) for c in f.children)
    if isinstance(f, Or):
        return conj(_nnf_neg(c) for c in f.children)
    if isinstance(f, Exists):
        return neg(exists(f.bound, nnf(f.child)))
    if isinstance(f, Forall):
        return exists(f.bound, _nnf_neg(f.child))
    raise TypeError(f"not a formula: {f!r}")


def evaluate(f: Formula, assignment: Mapping[Var, Fraction]) -> bool:
    """Truth value of a quantifier-free formula under an exact assignment."""
    if isinstance(f, BoolConst):
        return f.value
    if isinstance(f, Atom):
        return f.holds_on(assignment)
    if isinstance(f, Not):
        return not evaluate(f.child, assignment)
    if isinstance(f, And):
        return all(evaluate(c, assignment) for c in f.children)
    if isinstance(f, Or):
        return any(evaluate(c, assignment) for c in f.children)
    if isinstance(f, (Exists, Forall)):
        raise ValueError("cannot evaluate a quantified formula")
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> list[Atom]:
    """Distinct atoms of ``f`` in first-occurrence (depth-first) order.

    The order is the canonical atom order used when generalizing models, so
    it is part of the module contract, not an implementation detail.
    """
    seen: dict[Atom, None] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            seen.setdefault(g)
        elif isinstance(g, Not):
            walk(g.child)
        elif isinstance(g, (And, Or)):
            for c in g.children:
                walk(c)
        elif isinstance(g, (Exists, Forall)):
            walk(g.child)

    walk(f)
    return list(seen)


def free_vars(f: Formula) -> frozenset[Var]:
    out: set[Var] = set()

    def walk(g: Formula, bound: frozenset[Var]) -> None:
        if isinstance(g, Atom):
            out.update(v for v in g.term.variables() if v not in bound)
        elif isinstance(g, Not):
            walk(g.child, bound)
        elif isinstance(g, (And, Or)):
            for c in g.children:
                walk(c, bound)
        elif isinstance(g, (Exists, Forall)):
            walk(g.child, bound | frozenset(g.bound))

    walk(f, frozenset())
    return frozenset(out)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (BoolConst, Atom)):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.child)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(c) for c in f.children)
    return False


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.child)
    elif isinstance(f, (And, Or)):
        for c in f.children:
            yield from subformulas(c)
    elif isinstance(f, (Exists, Forall)):
        yield from subformulas(f.child)
