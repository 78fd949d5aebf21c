"""Virtual-substitution quantifier elimination (Loos-Weispfenning style).

Serves as the independent correctness oracle for the model-generalization
engine: a completely different algorithm whose outputs must be equivalent.
An existential variable is replaced by a disjunction of the formula
evaluated at symbolic test points: minus infinity, the solved bound of every
weak constraint on the variable, and the solved bound plus an infinitesimal
for every strict one.  The test set is linear in the number of atoms.

Substitution tables (``c`` is the variable's coefficient in the atom,
``u`` the atom's term with the test-point bound substituted):

=================  ======================  =====================
test point          atom kind              result
=================  ======================  =====================
bound ``e``         any                    literal substitution
``-inf``            ``>= / >``             true iff ``c < 0``
``-inf``            ``=``                  false
``e + eps``         ``>= / >``             ``u >= 0`` if ``c > 0`` else ``u > 0``
``e + eps``         ``=``                  false
=================  ======================  =====================

No simplification is performed beyond constant folding and dropping
ground-false disjuncts; result sizes are intentionally left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from . import limits
from .formula import (
    And,
    Atom,
    BoolConst,
    Exists,
    FALSE,
    Forall,
    Formula,
    Not,
    Or,
    Relation,
    TRUE,
    atom,
    atoms,
    conj,
    disj,
    neg,
    nnf,
    normalize,
)
from .limits import Deadline
from .terms import LinearTerm, Var


class TestPointKind(Enum):
    MINUS_INFINITY = "minus-infinity"
    EXACT = "exact"
    EXACT_PLUS_EPSILON = "exact-plus-epsilon"


@dataclass(frozen=True, slots=True)
class TestPoint:
    """A symbolic candidate value for the eliminated variable.

    ``term`` is the solved bound of an atom (the atom rewritten as
    ``x = term``) and never mentions the eliminated variable itself.
    """

    kind: TestPointKind
    term: LinearTerm | None = None


MINUS_INFINITY = TestPoint(TestPointKind.MINUS_INFINITY)


def test_points(f: Formula, x: Var) -> list[TestPoint]:
    """The substitution candidates for ``exists x . f`` (``f`` in NNF)."""
    points: list[TestPoint] = [MINUS_INFINITY]
    seen: set[TestPoint] = {MINUS_INFINITY}
    for a in atoms(f):
        c = a.term.coeff(x)
        if c == 0:
            continue
        bound = a.term.drop(x).scale(Fraction(-1) / c)
        kind = (
            TestPointKind.EXACT_PLUS_EPSILON
            if a.rel is Relation.GT
            else TestPointKind.EXACT
        )
        point = TestPoint(kind, bound)
        if point not in seen:
            seen.add(point)
            points.append(point)
    return points


def _substitute_atom(a: Atom, x: Var, point: TestPoint) -> Formula:
    c = a.term.coeff(x)
    if c == 0:
        return a
    if point.kind is TestPointKind.MINUS_INFINITY:
        if a.rel is Relation.EQ:
            return FALSE
        return TRUE if c < 0 else FALSE
    substituted = a.term.substitute(x, point.term)
    if point.kind is TestPointKind.EXACT:
        return atom(substituted, a.rel)
    if a.rel is Relation.EQ:
        return FALSE
    return atom(substituted, Relation.GE if c > 0 else Relation.GT)


def substitute(f: Formula, x: Var, point: TestPoint) -> Formula:
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, Atom):
        return _substitute_atom(f, x, point)
    if isinstance(f, Not):
        return neg(substitute(f.child, x, point))
    if isinstance(f, And):
        return conj(substitute(c, x, point) for c in f.children)
    if isinstance(f, Or):
        return disj(substitute(c, x, point) for c in f.children)
    raise ValueError("cannot substitute into a quantified formula")


def lw_eliminate_var(f: Formula, x: Var, deadline: Deadline | None = None) -> Formula:
    """A formula equivalent to ``exists x . f``, free of ``x``."""
    f = nnf(normalize(f))
    limits.check(deadline)
    return disj(substitute(f, x, point) for point in test_points(f, x))


def lw_eliminate_block(
    f: Formula, variables: Sequence[Var], deadline: Deadline | None = None
) -> Formula:
    out = f
    for v in reversed(variables):
        out = lw_eliminate_var(out, v, deadline)
    return out


def lw_eliminate_all(f: Formula, deadline: Deadline | None = None) -> Formula:
    """Quantifier-free equivalent of an arbitrarily quantified formula,
    processing quantifiers innermost-first (universals via double negation)."""

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
            return lw_eliminate_block(rec(g.child), g.bound, deadline)
        if isinstance(g, Forall):
            inner = lw_eliminate_block(nnf(neg(rec(g.child))), g.bound, deadline)
            return nnf(neg(inner))
        raise TypeError(f"not a formula: {g!r}")

    return rec(normalize(f))
