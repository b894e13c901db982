"""Parameter elimination: pivoting, recipes, rescaling, functional equivalence."""

from fractions import Fraction

import pytest

from lieinv import (
    check_invariant,
    coord,
    eliminate,
    functionally_equivalent,
    lie_algebra,
    lifted_invariants,
    rescale_to_polynomial,
    rotation_pair,
    sum_of_squares,
)
from lieinv.expr import expr_str, rational, theta_atom
from lieinv.families import make_g6_38, make_jordan, make_s1, make_s4


def heisenberg():
    return lie_algebra(3, {(1, 2): {3: 1}}, name="heisenberg")


class TestBasicElimination:
    def test_heisenberg_single_invariant(self):
        res = eliminate(lifted_invariants(heisenberg()))
        assert res.complete
        assert [expr_str(f) for f in res.invariants] == ["x3"]
        assert res.residual == [] and res.applied_recipes == []

    def test_heisenberg_pivot_records(self):
        res = eliminate(lifted_invariants(heisenberg()))
        assert [p.kind for p in res.pivots] == ["linear", "linear"]
        assert {p.theta for p in res.pivots} == {theta_atom(1), theta_atom(2)}
        # both pivots divided by +-x3, recorded as genericity assumptions
        assert {expr_str(a) for a in res.assumptions} <= {"x3", "-1*x3"}
        solved = {p.theta: p.solution for p in res.pivots}
        assert solved[theta_atom(2)].equals(coord(1) / coord(3))
        assert solved[theta_atom(1)].equals(-coord(2) / coord(3))

    def test_abelian_everything_survives(self):
        g = lie_algebra(3, {})
        res = eliminate(lifted_invariants(g))
        assert res.complete
        assert [expr_str(f) for f in res.invariants] == ["x1", "x2", "x3"]
        assert res.pivots == []

    def test_outputs_are_verified_invariants(self):
        for inst in (
            make_jordan([("jordan", 0, 4)]),
            make_s1(5, 1, 0),
            make_s4(6),
        ):
            res = eliminate(inst.lifted(), recipes=inst.recipes)
            assert res.complete
            for f in res.invariants:
                assert check_invariant(inst.algebra, f).ok


class TestChainFamilyOracles:
    def test_zero_block_exact_output(self):
        inst = make_jordan([("jordan", 0, 3)])
        res = eliminate(inst.lifted())
        assert [expr_str(f) for f in res.invariants] == [
            "x1",
            "(x1*x3 - 1/2*x2^2)/x1",
        ]
        assert {expr_str(a) for a in res.assumptions} == {"x1"}

    def test_zero_block_rescales_to_polynomial_basis(self):
        inst = make_jordan([("jordan", 0, 5)])
        res = eliminate(inst.lifted())
        out, notes = rescale_to_polynomial(res.invariants)
        assert notes == []
        assert len(out) == len(inst.expected_invariants) == 4
        for got, want in zip(out, inst.expected_invariants):
            assert got.equals(want)

    def test_nonzero_eigenvalue_no_polynomial_rescale(self):
        inst = make_jordan([("jordan", 1, 3)])
        res = eliminate(inst.lifted(), recipes=inst.recipes)
        assert res.complete and len(res.invariants) == 2
        assert functionally_equivalent(
            res.invariants, inst.expected_invariants, inst.algebra, seed=5
        )
        _, notes = rescale_to_polynomial(res.invariants)
        assert notes  # exp factors admit no polynomial form

    def test_real_block_recipe_reproduces_expected_exactly(self):
        inst = make_jordan([("real", 1, 1, 2)])
        res = eliminate(inst.lifted(), recipes=inst.recipes)
        assert res.complete
        assert res.applied_recipes == ["block(1..4)"]
        assert len(res.invariants) == 3
        for got, want in zip(res.invariants, inst.expected_invariants):
            assert got.equals(want)


class TestRecipes:
    def test_stall_without_recipe(self):
        inst = make_g6_38()
        res = eliminate(inst.lifted())
        assert not res.complete
        assert res.invariants == []
        assert len(res.residual) == 3

    def test_rotation_pair_completes(self):
        inst = make_g6_38()
        res = eliminate(inst.lifted(), recipes=inst.recipes)
        assert res.complete
        assert res.applied_recipes == ["rotation-pair(2,3)"]
        got = [expr_str(f) for f in res.invariants]
        assert got == ["(x2^2 + x3^2)/x1", "x1*exp(-2*a*atan(x3/x2))"]

    def test_sum_of_squares_on_unrotated_case(self):
        inst = make_g6_38(0)
        res = eliminate(inst.lifted(), recipes=inst.recipes)
        assert res.complete
        assert functionally_equivalent(
            res.invariants, inst.expected_invariants, inst.algebra, seed=1
        )

    def test_recipe_constructors(self):
        r = sum_of_squares(2, 3)
        assert r.inputs == (2, 3)
        rp = rotation_pair(2, 3, rational(Fraction(-2)))
        assert rp.inputs == (2, 3)


class TestSingularMembers:
    def test_singular_series_uses_log_pivots(self):
        inst = make_s1(5, 1, -3)
        res = eliminate(inst.lifted(), recipes=inst.recipes)
        assert res.complete
        assert "exp" in [p.kind for p in res.pivots]
        assert functionally_equivalent(
            res.invariants,
            inst.expected_invariants,
            inst.algebra,
            seed=2,
            param_point=inst.param_point,
        )

    def test_quotient_powers_series(self):
        inst = make_s4(6)
        res = eliminate(inst.lifted(), recipes=inst.recipes)
        assert res.complete and len(res.invariants) == 2
        assert functionally_equivalent(
            res.invariants, inst.expected_invariants, inst.algebra, seed=3
        )


class TestFunctionalEquivalence:
    def test_positive_cases(self):
        inst = make_jordan([("jordan", 0, 3)])
        g = inst.algebra
        a, b = inst.expected_invariants
        # generated sets: {a, b} vs {a + b^2, b} are equivalent
        assert functionally_equivalent([a, b], [a + b * b, b], g, seed=7)
        assert functionally_equivalent([a, b], [b, a], g, seed=7)

    def test_negative_cases(self):
        inst = make_jordan([("jordan", 0, 3)])
        g = inst.algebra
        a, b = inst.expected_invariants
        assert not functionally_equivalent([a], [a, b], g, seed=7)
        assert not functionally_equivalent([a, b], [a, coord(2)], g, seed=7)

    def test_respects_parameter_point(self):
        inst = make_s1(5, 1, -3)
        assert functionally_equivalent(
            inst.expected_invariants,
            inst.expected_invariants,
            inst.algebra,
            seed=9,
            param_point=inst.param_point,
        )


class TestRescale:
    def test_explicit_scaler(self):
        f = (coord(1) * coord(3) - coord(2) ** 2) / coord(1) ** 2
        out, notes = rescale_to_polynomial([coord(1), f], scaler=coord(1))
        assert notes == []
        assert out[1].equals(coord(1) * coord(3) - coord(2) ** 2)

    def test_already_polynomial_passthrough(self):
        fs = [coord(1), coord(1) * coord(2)]
        out, notes = rescale_to_polynomial(fs)
        assert notes == [] and [expr_str(f) for f in out] == ["x1", "x1*x2"]

    def test_unclearable_reports_note(self):
        f = coord(2) / coord(1)
        out, notes = rescale_to_polynomial([f])
        assert out[0].equals(f)
        assert len(notes) == 1
