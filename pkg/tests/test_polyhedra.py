from fractions import Fraction

import pytest

from qelim import (
    Atom,
    ConstraintSystem,
    Feasible,
    Infeasible,
    LinearTerm,
    Relation,
    SplitMix64,
    feasible,
    fm_eliminate,
    is_redundant,
    project,
    remove_redundant,
)
from qelim.polyhedra import _solve, _term_bits

from conftest import grid_equivalent, grid_models, make_atom

GE, GT, EQ = Relation.GE, Relation.GT, Relation.EQ


def random_system(rng, names, count, rels=(GE, GE, GT, EQ), lo=-3, hi=3):
    out = []
    for _ in range(count):
        coeffs = {v: rng.int_in(lo, hi) for v in names}
        if all(c == 0 for c in coeffs.values()):
            coeffs[names[0]] = 1
        out.append(make_atom(rng.int_in(lo, hi), coeffs, rels[rng.below(len(rels))]))
    return out


def fm_decide(atoms_list) -> bool:
    """Independent feasibility decision: eliminate every variable in turn."""
    s = ConstraintSystem(atoms_list)
    for v in sorted(s.variables()):
        s = fm_eliminate(s, v)
    return not s.is_false()


class TestConstraintSystem:
    def test_ground_true_dropped(self):
        s = ConstraintSystem([make_atom(1, {}), make_atom(0, {"x": 1})])
        assert s.atoms == (make_atom(0, {"x": 1}),)

    def test_ground_false_collapses(self):
        s = ConstraintSystem([make_atom(0, {"x": 1}), make_atom(-1, {})])
        assert s.is_false()

    def test_duplicates_removed_first_wins(self):
        a, b = make_atom(0, {"x": 1}), make_atom(0, {"y": 1})
        s = ConstraintSystem([a, b, make_atom(0, {"x": 2})])
        assert s.atoms == (a, b)


class TestFeasible:
    def test_contradictory_bounds(self):
        r = feasible(ConstraintSystem([make_atom(0, {"x": 1}), make_atom(-1, {"x": -1})]))
        assert isinstance(r, Infeasible)

    def test_forced_point(self):
        r = feasible(ConstraintSystem([make_atom(-1, {"x": 1}), make_atom(1, {"x": -1})]))
        assert isinstance(r, Feasible)
        assert r.witness == {"x": Fraction(1)}

    def test_open_interval_gets_interior_witness(self):
        s = ConstraintSystem([make_atom(0, {"x": 1}, GT), make_atom(1, {"x": -1}, GT)])
        r = feasible(s)
        assert isinstance(r, Feasible)
        assert Fraction(0) < r.witness["x"] < Fraction(1)

    def test_empty_system(self):
        r = feasible(ConstraintSystem())
        assert isinstance(r, Feasible)
        assert r.witness == {}

    def test_equation_infeasible(self):
        # x = 2y and x >= 3 force y >= 3/2, contradicting y <= 1
        s = ConstraintSystem(
            [make_atom(0, {"x": 1, "y": -2}, EQ), make_atom(-3, {"x": 1}), make_atom(1, {"y": -1})]
        )
        assert isinstance(feasible(s), Infeasible)

    def test_equation_witness_exact(self):
        s = ConstraintSystem(
            [make_atom(0, {"x": 1, "y": -2}, EQ), make_atom(-3, {"x": 1}), make_atom(2, {"y": -1})]
        )
        r = feasible(s)
        assert isinstance(r, Feasible)
        assert r.witness["x"] == 2 * r.witness["y"]

    def test_strict_witnesses_are_strict(self):
        s = ConstraintSystem([make_atom(0, {"x": 1, "y": 1}, GT), make_atom(0, {"x": -1}, GT)])
        r = feasible(s)
        assert isinstance(r, Feasible)
        assert s.holds_on(r.witness)

    def test_infeasible_core_is_infeasible(self):
        atoms = [
            make_atom(0, {"x": 1}),
            make_atom(0, {"y": 1}),
            make_atom(0, {"x": -1, "y": -1}, GT),
        ]
        r = _solve(atoms)
        assert isinstance(r, Infeasible)
        assert isinstance(_solve([atoms[i] for i in r.core]), Infeasible)

    def test_matches_fm_decision_on_random_systems(self):
        rng = SplitMix64(99)
        for _ in range(300):
            atoms = random_system(rng, ["x", "y", "z"], 1 + rng.below(5))
            got = isinstance(_solve(atoms), Feasible)
            assert got == fm_decide(atoms)

    def test_witnesses_satisfy_on_random_systems(self):
        rng = SplitMix64(7)
        for _ in range(200):
            atoms = random_system(rng, ["x", "y"], 1 + rng.below(4))
            r = _solve(atoms)
            if isinstance(r, Feasible):
                assert all(a.holds_on(r.witness) for a in atoms)


class TestRedundancy:
    def test_implied_bound(self):
        s = ConstraintSystem([make_atom(0, {"x": 1}), make_atom(-1, {"x": 1})])
        assert is_redundant(s, 0) is True

    def test_independent_axes(self):
        s = ConstraintSystem([make_atom(0, {"x": 1}), make_atom(0, {"y": 1})])
        assert is_redundant(s, 0) is False

    def test_equation_redundancy_via_complement_split(self):
        s = ConstraintSystem(
            [make_atom(0, {"x": 1}), make_atom(0, {"x": -1}), make_atom(0, {"x": 1}, EQ)]
        )
        assert is_redundant(s, 2) is True

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            is_redundant(ConstraintSystem([make_atom(0, {"x": 1})]), 3)

    def test_chain_of_bounds(self):
        s = ConstraintSystem(
            [make_atom(0, {"x": 1}), make_atom(-1, {"x": 1}), make_atom(-2, {"x": 1})]
        )
        assert remove_redundant(s).atoms == (make_atom(-2, {"x": 1}),)

    def test_empty(self):
        assert remove_redundant(ConstraintSystem()).atoms == ()

    def test_twenty_random_halfplanes_grid_oracle(self):
        rng = SplitMix64(21)
        atoms = random_system(rng, ["x", "y"], 20, rels=(GE,), lo=-5, hi=5)
        s = ConstraintSystem(atoms)
        trimmed = remove_redundant(s)
        assert len(trimmed.atoms) <= len(s.atoms)
        # 21x21 rational grid oracle
        grid = [Fraction(n, 2) for n in range(-10, 11)]
        assert grid_equivalent(s, trimmed, ["x", "y"], grid)

    def test_result_is_irredundant(self):
        rng = SplitMix64(31)
        for _ in range(25):
            atoms = random_system(rng, ["x", "y"], 2 + rng.below(6))
            trimmed = remove_redundant(ConstraintSystem(atoms))
            for i in range(len(trimmed.atoms)):
                assert not is_redundant(trimmed, i)


class TestFmEliminate:
    def test_single_pair(self):
        s = ConstraintSystem([make_atom(0, {"x": 1, "y": -1}), make_atom(0, {"z": 1, "x": -1})])
        assert fm_eliminate(s, "x").atoms == (make_atom(0, {"y": -1, "z": 1}),)

    def test_figure_atoms(self):
        s = ConstraintSystem(
            [make_atom(2, {"y": 1}), make_atom(1, {"x": 1}), make_atom(1, {"x": -1})]
        )
        # the ground-true combination folds away, leaving the y bound
        assert fm_eliminate(s, "x").atoms == (make_atom(2, {"y": 1}),)

    def test_absent_variable_is_identity(self):
        s = ConstraintSystem([make_atom(0, {"y": 1})])
        assert fm_eliminate(s, "x") == s

    def test_strictness_propagates(self):
        s = ConstraintSystem([make_atom(0, {"x": 1, "y": -1}, GT), make_atom(0, {"z": 1, "x": -1})])
        assert fm_eliminate(s, "x").atoms == (make_atom(0, {"y": -1, "z": 1}, GT),)

    def test_equation_substitutes(self):
        s = ConstraintSystem([make_atom(0, {"x": 1, "y": -1}, EQ), make_atom(-3, {"x": 1})])
        assert fm_eliminate(s, "x").atoms == (make_atom(-3, {"y": 1}),)

    def test_output_size_bound(self):
        rng = SplitMix64(17)
        for _ in range(50):
            atoms = random_system(rng, ["x", "y", "z"], 2 + rng.below(8), rels=(GE, GT))
            s = ConstraintSystem(atoms)
            lower = sum(1 for a in s.atoms if a.term.coeff("x") > 0)
            upper = sum(1 for a in s.atoms if a.term.coeff("x") < 0)
            untouched = len(s.atoms) - lower - upper
            out = fm_eliminate(s, "x")
            assert len(out.atoms) <= untouched + lower * upper

    def test_projection_preserves_solutions(self):
        rng = SplitMix64(55)
        for _ in range(40):
            atoms = random_system(rng, ["x", "y"], 1 + rng.below(5))
            s = ConstraintSystem(atoms)
            out = fm_eliminate(s, "x")
            assert "x" not in out.variables()
            for m in grid_models(["x", "y"], [Fraction(n) for n in range(-3, 4)]):
                if s.holds_on(m):
                    assert out.holds_on(m)

    def test_combination_bit_growth(self):
        # the 2s+1 bound on one cancellation, checked directly
        rng = SplitMix64(42)
        for _ in range(200):
            lo = make_atom(rng.int_in(-7, 7), {"x": 1 + rng.below(7), "y": rng.int_in(-7, 7)})
            hi = make_atom(rng.int_in(-7, 7), {"x": -1 - rng.below(7), "y": rng.int_in(-7, 7)})
            a_lo, a_hi = lo.term.coeff("x"), hi.term.coeff("x")
            combined = lo.term.scale(-a_hi) + hi.term.scale(a_lo)
            bound = 2 * max(_term_bits(lo.term), _term_bits(hi.term)) + 1
            assert _term_bits(combined) <= bound


class TestProject:
    def test_three_constraints(self):
        s = ConstraintSystem(
            [
                make_atom(0, {"x": 1, "y": -1}),
                make_atom(0, {"z": 1, "x": -1}),
                make_atom(0, {"x": 1}),
            ]
        )
        out = project(s, ["x"])
        expected = ConstraintSystem([make_atom(0, {"z": 1, "y": -1}), make_atom(0, {"z": 1})])
        assert set(out.atoms) == set(expected.atoms)

    def test_empty_variable_list_removes_redundancy(self):
        s = ConstraintSystem([make_atom(0, {"x": 1}), make_atom(-1, {"x": 1})])
        assert project(s, []) == remove_redundant(s)

    def test_unbounded_projection_is_true(self):
        assert project(ConstraintSystem([make_atom(0, {"x": 1})]), ["x"]).is_true()

    def test_soundness_and_completeness_sampling(self):
        rng = SplitMix64(300)
        grid = [Fraction(n) for n in range(-3, 4)]
        for _ in range(25):
            atoms = random_system(rng, ["x", "y", "z"], 2 + rng.below(6))
            s = ConstraintSystem(atoms)
            out = project(s, ["z"])
            assert "z" not in out.variables()
            for m in grid_models(["x", "y"], grid):
                extended_feasible = isinstance(
                    _solve([Atom(
                        a.term.substitute("x", LinearTerm.const(m["x"])).substitute(
                            "y", LinearTerm.const(m["y"])
                        ),
                        a.rel,
                    ) for a in s.atoms]),
                    Feasible,
                )
                assert out.holds_on(m) == extended_feasible

    def test_elimination_order_independent_meaning(self):
        rng = SplitMix64(404)
        grid = [Fraction(n) for n in range(-3, 4)]
        for _ in range(20):
            atoms = random_system(rng, ["x", "y", "z"], 2 + rng.below(6))
            s = ConstraintSystem(atoms)
            a = project(s, ["x", "y"])
            b = project(s, ["y", "x"])
            assert grid_equivalent(a, b, ["z"], grid)

    def test_false_projects_to_false(self):
        s = ConstraintSystem([make_atom(-1, {})])
        assert project(s, ["x"]).is_false()
