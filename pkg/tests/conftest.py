"""Shared helpers and hypothesis strategies for the test suite."""

from __future__ import annotations

import itertools
from fractions import Fraction

import hypothesis.strategies as st

from qelim import Atom, ConstraintSystem, LinearTerm, Relation, atom, conj, disj, neg

VARS = ("x", "y", "z")

GRID = [Fraction(n, 2) for n in range(-6, 7)]


def grid_models(names, values=None):
    """All assignments of grid values to the given variables."""
    values = values if values is not None else GRID
    names = list(names)
    for combo in itertools.product(values, repeat=len(names)):
        yield dict(zip(names, combo))


def grid_equivalent(system_a: ConstraintSystem, system_b: ConstraintSystem, names, values=None) -> bool:
    return all(
        system_a.holds_on(m) == system_b.holds_on(m) for m in grid_models(names, values)
    )


def make_atom(constant, coeffs, rel=Relation.GE) -> Atom:
    return Atom(LinearTerm.make(constant, coeffs), rel)


@st.composite
def linear_terms(draw, names=VARS, lo=-3, hi=3):
    coeffs = {v: draw(st.integers(lo, hi)) for v in names}
    constant = draw(st.integers(lo, hi))
    return LinearTerm.make(constant, coeffs)


@st.composite
def nonground_atoms(draw, names=VARS, rels=(Relation.GE, Relation.GT, Relation.EQ)):
    term = draw(linear_terms(names))
    if term.is_ground():
        v = draw(st.sampled_from(list(names)))
        term = term + LinearTerm.variable(v)
    return Atom(term, draw(st.sampled_from(list(rels))))


def atom_formulas(names=VARS, rels=(Relation.GE, Relation.GT, Relation.EQ)):
    return st.builds(lambda a: atom(a.term, a.rel), nonground_atoms(names, rels))


def qf_formulas(names=VARS, rels=(Relation.GE, Relation.GT, Relation.EQ)):
    return st.recursive(
        atom_formulas(names, rels),
        lambda children: st.one_of(
            st.builds(lambda a, b: conj([a, b]), children, children),
            st.builds(lambda a, b: disj([a, b]), children, children),
            st.builds(neg, children),
        ),
        max_leaves=8,
    )


def models(names=VARS):
    return st.fixed_dictionaries(
        {v: st.sampled_from(GRID) for v in names}
    )
