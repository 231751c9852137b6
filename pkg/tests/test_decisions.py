"""Acts, hulls, max-min choice, objective payoffs, accommodation, regret."""

import numpy as np
import pytest
from scipy.optimize import linprog

from robustupdate import (
    Act,
    BoxFamily,
    DecisionProblem,
    EmptyFamilyError,
    ExplicitSet,
    HorizonTooLargeError,
    InvalidDistributionError,
    OutcomeSpace,
    PointCloud,
    RectHull,
    UnionFamily,
    accommodates,
    act,
    act_from_json,
    act_to_json,
    basic_problem,
    binary_iid,
    binary_space,
    box_simplex_vertices,
    certainty_equivalent,
    constant_act,
    future_hull,
    iid_dgp,
    in_convex_hull,
    meu_choice,
    meu_values,
    min_expected_utility,
    minimax_regret_choice,
    objective_payoff,
    periodic_dgp,
    refines,
    regret_values,
)

SP = binary_space()
SP3 = OutcomeSpace(("a", "b", "c"))


class TestActs:
    def test_payoff_bounds_enforced(self):
        with pytest.raises(InvalidDistributionError):
            act(SP, [1.5, 0.0])
        with pytest.raises(InvalidDistributionError):
            act(SP, [-0.1, 0.5])

    def test_horizon_from_shape(self):
        assert act(SP, [1.0, 0.0]).horizon == 1
        assert act(SP, [[1.0, 0.0], [0.0, 0.0]]).horizon == 2
        assert constant_act(SP3, 2, 0.5).horizon == 2

    def test_act_equality(self):
        assert act(SP, [1.0, 0.0]) == act(SP, [1.0, 0.0])
        assert act(SP, [1.0, 0.0]) != act(SP, [1.0, 0.1])

    def test_act_json_round_trip(self):
        a = act(SP, [[0.2, 1.0], [0.0, 0.6]])
        assert act_from_json(SP, act_to_json(a)) == a

    def test_basic_problem_layout(self):
        prob = basic_problem(SP, act(SP, [1.0, 0.0]), 0.4)
        assert len(prob.acts) == 2
        assert prob.acts[1] == constant_act(SP, 1, 0.4)


class TestBoxSimplexVertices:
    def test_binary_box(self):
        v = box_simplex_vertices(np.array([[0.3, 0.7], [0.3, 0.7]]))
        got = sorted(map(tuple, np.round(v, 12)))
        assert got == [(0.3, 0.7), (0.7, 0.3)]

    def test_free_cube_gives_unit_vectors(self):
        v = box_simplex_vertices(np.array([[0.0, 1.0]] * 3))
        got = sorted(map(tuple, np.round(v, 12)))
        assert got == [(0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)]

    def test_vertices_feasible_and_support_lp_optima(self):
        box = np.array([[0.2, 0.5], [0.1, 0.6], [0.2, 0.4]])
        verts = box_simplex_vertices(box)
        assert np.all(verts >= box[:, 0][None, :] - 1e-9)
        assert np.all(verts <= box[:, 1][None, :] + 1e-9)
        np.testing.assert_allclose(verts.sum(axis=1), 1.0, atol=1e-9)
        # every LP optimum over the polytope is attained at a listed vertex
        rng = np.random.default_rng(7)
        for _ in range(40):
            c = rng.standard_normal(3)
            res = linprog(c, A_eq=np.ones((1, 3)), b_eq=[1.0],
                          bounds=list(map(tuple, box)), method="highs")
            best = verts @ c
            assert res.fun == pytest.approx(best.min(), abs=1e-9)

    def test_infeasible_box_raises(self):
        with pytest.raises(InvalidDistributionError):
            box_simplex_vertices(np.array([[0.6, 0.9], [0.6, 0.9]]))


class TestHulls:
    def test_rect_hull_min_over_two_experiments(self):
        fam = BoxFamily(SP, (np.array([[0.4, 0.6], [0.4, 0.6]]),))
        hull = future_hull(fam, 0, 2)
        assert isinstance(hull, RectHull)
        both_success = act(SP, [[1.0, 0.0], [0.0, 0.0]])
        assert min_expected_utility(both_success, hull) == pytest.approx(
            0.16, abs=1e-12)

    def test_interval_hull_min_of_bet(self):
        fam = BoxFamily(SP, (np.array([[0.3, 0.7], [0.3, 0.7]]),))
        hull = future_hull(fam, 0, 1)
        assert min_expected_utility(act(SP, [1.0, 0.0]), hull) == pytest.approx(
            0.3, abs=1e-12)

    def test_point_cloud_from_explicit_family(self):
        fam = ExplicitSet(SP, (binary_iid(SP, 0.2), binary_iid(SP, 0.8)))
        hull = future_hull(fam, 0, 1)
        assert isinstance(hull, PointCloud)
        assert min_expected_utility(act(SP, [1.0, 0.0]), hull) == pytest.approx(
            0.2, abs=1e-12)

    def test_hull_respects_sample_offset(self):
        # after n=1 the periodic family's next marginal is the second one
        fam = ExplicitSet(SP, (periodic_dgp(SP, [[0.2, 0.8], [0.9, 0.1]]),))
        h0 = future_hull(fam, 0, 1)
        h1 = future_hull(fam, 1, 1)
        bet = act(SP, [1.0, 0.0])
        assert min_expected_utility(bet, h0) == pytest.approx(0.2, abs=1e-12)
        assert min_expected_utility(bet, h1) == pytest.approx(0.9, abs=1e-12)

    def test_empty_family_raises(self):
        with pytest.raises(EmptyFamilyError):
            future_hull(UnionFamily(SP, ()), 0, 1)

    def test_size_cap_guard(self):
        fam = BoxFamily(SP, (np.array([[0.4, 0.6], [0.4, 0.6]]),))
        with pytest.raises(HorizonTooLargeError):
            future_hull(fam, 0, 17)

    def test_union_hull_merges_branches(self):
        fam = UnionFamily(SP, (
            BoxFamily(SP, (np.array([[0.6, 1.0], [0.0, 0.4]]),)),
            ExplicitSet(SP, (binary_iid(SP, 1 / 3),)),
        ))
        hull = future_hull(fam, 0, 1)
        assert min_expected_utility(act(SP, [1.0, 0.0]), hull) == pytest.approx(
            1 / 3, abs=1e-12)


class TestMeuChoice:
    def test_values_and_lowest_index_tie(self):
        prob = DecisionProblem(SP, (constant_act(SP, 1, 0.5),
                                    constant_act(SP, 1, 0.5),
                                    constant_act(SP, 1, 0.4)))
        hull = future_hull(BoxFamily(SP, (np.array([[0.0, 1.0], [0.0, 1.0]]),)),
                           0, 1)
        vals = meu_values(prob, hull)
        np.testing.assert_allclose(vals, [0.5, 0.5, 0.4], atol=1e-12)
        assert meu_choice(prob, hull) == prob.acts[0]

    def test_incumbent_keeps_ties(self):
        bet = act(SP, [1.0, 0.0])
        const = constant_act(SP, 1, 0.3)
        prob = DecisionProblem(SP, (bet, const))
        hull = future_hull(BoxFamily(SP, (np.array([[0.3, 0.9], [0.1, 0.7]]),)),
                           0, 1)
        # both acts have min EU 0.3: without an incumbent the first wins,
        # with the constant as incumbent the constant keeps the tie
        assert meu_choice(prob, hull) == bet
        assert meu_choice(prob, hull, incumbent=const) == const

    def test_incumbent_loses_strictly_better_alternative(self):
        bet = act(SP, [1.0, 0.0])
        const = constant_act(SP, 1, 0.3)
        prob = DecisionProblem(SP, (bet, const))
        hull = future_hull(BoxFamily(SP, (np.array([[0.6, 1.0], [0.0, 0.4]]),)),
                           0, 1)
        assert meu_choice(prob, hull, incumbent=const) == bet

    def test_movie_problem_data_free_choice(self):
        # union hull min for the bet is 1/3 < 0.5, so the constant wins
        fam = UnionFamily(SP, (
            BoxFamily(SP, (np.array([[0.6, 1.0], [0.0, 0.4]]),)),
            ExplicitSet(SP, (binary_iid(SP, 1 / 3),)),
        ))
        prob = DecisionProblem(SP, (act(SP, [1.0, 0.0]), constant_act(SP, 1, 0.5)))
        assert meu_choice(prob, future_hull(fam, 0, 1)) == prob.acts[1]


class TestObjectivePayoff:
    def test_product_over_horizon(self):
        dgp = periodic_dgp(SP, [[0.5, 0.5], [0.8, 0.2]])
        both = act(SP, [[1.0, 0.0], [0.0, 0.0]])
        assert objective_payoff(both, dgp, 0) == pytest.approx(0.4, abs=1e-12)

    def test_offset_shifts_marginals(self):
        dgp = periodic_dgp(SP, [[0.5, 0.5], [0.8, 0.2]])
        bet = act(SP, [1.0, 0.0])
        assert objective_payoff(bet, dgp, 0) == pytest.approx(0.5, abs=1e-12)
        assert objective_payoff(bet, dgp, 1) == pytest.approx(0.8, abs=1e-12)

    def test_matches_joint_enumeration(self):
        rng = np.random.default_rng(13)
        dgp = periodic_dgp(SP3, rng.dirichlet(np.ones(3), 2).tolist())
        table = rng.random((3, 3))
        a = act(SP3, table)
        joint = np.einsum("i,j->ij", dgp.marginal_at(1).probs,
                          dgp.marginal_at(2).probs)
        brute = float((joint * table).sum())
        assert objective_payoff(a, dgp, 0) == pytest.approx(brute, abs=1e-12)

    def test_certainty_equivalent_is_chosen_acts_initial_min(self):
        fam = BoxFamily(SP, (np.array([[0.3, 0.7], [0.3, 0.7]]),))
        prob = basic_problem(SP, act(SP, [1.0, 0.0]), 0.25)
        # bet has min 0.3 >= 0.25 so the bet is chosen; CE = 0.3
        assert certainty_equivalent(prob, fam, 0) == pytest.approx(0.3, abs=1e-12)


class TestConvexHullMembership:
    def test_square_membership(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        assert in_convex_hull(pts, np.array([0.5, 0.5]))
        assert in_convex_hull(pts, np.array([1.0, 1.0]))
        assert not in_convex_hull(pts, np.array([1.1, 0.5]))

    def test_segment_membership(self):
        pts = np.array([[0.2, 0.8], [0.6, 0.4]])
        assert in_convex_hull(pts, np.array([0.4, 0.6]))
        assert not in_convex_hull(pts, np.array([0.1, 0.9]))


class TestAccommodation:
    def test_point_cloud_midpoint(self):
        fam = ExplicitSet(SP, (binary_iid(SP, 0.2), binary_iid(SP, 0.6)))
        assert accommodates(fam, binary_iid(SP, 0.4), 0, 1) is True
        assert accommodates(fam, binary_iid(SP, 0.1), 0, 1) is False

    def test_rect_hull_product_membership(self):
        fam = BoxFamily(SP, (np.array([[0.4, 0.6], [0.4, 0.6]]),))
        assert accommodates(fam, binary_iid(SP, 0.5), 0, 2) is True
        assert accommodates(fam, binary_iid(SP, 0.7), 0, 2) is False

    def test_periodic_truth_against_box(self):
        fam = BoxFamily(SP, (np.array([[0.3, 0.7], [0.3, 0.7]]),))
        inside = periodic_dgp(SP, [[0.3, 0.7], [0.7, 0.3]])
        assert accommodates(fam, inside, 0, 2) is True

    def test_refines_strict_inclusion(self):
        tight = BoxFamily(SP, (np.array([[0.45, 0.55], [0.45, 0.55]]),))
        wide = BoxFamily(SP, (np.array([[0.4, 0.6], [0.4, 0.6]]),))
        assert refines(tight, wide, 0, 1) is True
        assert refines(wide, tight, 0, 1) is False
        assert refines(wide, wide, 0, 1) is False  # not strict


class TestRegret:
    def test_ex_post_regret_on_points(self):
        bet = act(SP, [1.0, 0.0])
        const = constant_act(SP, 1, 2 / 3)
        prob = DecisionProblem(SP, (bet, const))
        hull = PointCloud(SP, 1, np.array([[0.0, 1.0], [1.0, 0.0]]))
        vals = regret_values(prob, hull)
        # at p=0: best act pays 2/3, bet pays 0 -> regret 2/3; const loses 1/3 at p=1
        assert vals[0] == pytest.approx(2 / 3, abs=1e-12)
        assert vals[1] == pytest.approx(1 / 3, abs=1e-12)
        assert minimax_regret_choice(prob, hull) == const

    def test_regret_reversal_after_refinement(self):
        bet = act(SP, [1.0, 0.0])
        const = constant_act(SP, 1, 2 / 3)
        prob = DecisionProblem(SP, (bet, const))
        wide = future_hull(BoxFamily(SP, (np.array([[0.0, 1.0], [0.0, 1.0]]),)),
                           0, 1)
        tight = future_hull(BoxFamily(SP, (np.array([[0.6, 1.0], [0.0, 0.4]]),)),
                            0, 1)
        assert minimax_regret_choice(prob, wide) == const
        assert minimax_regret_choice(prob, tight) == bet
