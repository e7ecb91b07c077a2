"""Search: triviality ladder, falsification, strategies, golden traces."""

import math
import random
from fractions import Fraction

import pytest

from ineqprover.expr import Const, parse, render, sub_, sym
from ineqprover.ineq import AssumptionSet, Inequality, parse_inequality
from ineqprover.prover import (Goal, MctsConfig, SearchLimits,
                               best_first_search, bfs_search, falsify,
                               generate_subgoals, is_trivially_true,
                               mcts_search, render_proof, replay, ucb_score)

ASM3 = AssumptionSet.for_symbols(["a", "b", "c"])
ASM4 = AssumptionSet.for_symbols(["a", "b", "c", "d"])


def tds(goal: Goal) -> float:
    d = goal.tree_depth
    return d / (d + 1)


def imo1995_goal() -> Inequality:
    cond = parse_inequality("a*b*c = 1")
    asm = AssumptionSet.for_symbols(["a", "b", "c"], conditions=[cond])
    return parse_inequality(
        "1/(c^3*(a+b)) + 1/(b^3*(a+c)) + 1/(a^3*(b+c)) >= 3/2", asm)


def usamo1997_goal() -> Inequality:
    return parse_inequality(
        "1/(a^3+b^3+a*b*c) + 1/(b^3+c^3+a*b*c) + 1/(c^3+a^3+a*b*c)"
        " <= 1/(a*b*c)", ASM3)


def imo2001_goal() -> Inequality:
    return parse_inequality(
        "a/sqrt(a^2+8*b*c) + b/sqrt(8*a*c+b^2) + c/sqrt(8*a*b+c^2) >= 1",
        ASM3)


class TestTrivialLadder:
    def test_identical_sides(self):
        g = Goal(parse_inequality("7/18 <= 7/18"))
        cert = is_trivially_true(g)
        assert cert is not None and cert.name == "check_eq"

    def test_nonneg_difference(self):
        g = Goal(parse_inequality("a*b <= a*b + a^2", ASM3))
        assert is_trivially_true(g) is not None

    def test_pairwise_amgm_case(self):
        g = Goal(parse_inequality(
            "0 <= 2*a^2 - 2*a*b - 2*a*d + 2*b^2 - 2*b*c + 2*c^2 - 2*c*d"
            " + 2*d^2", ASM4))
        cert = is_trivially_true(g)
        assert cert is not None and cert.name == "check_AM_GM_Mul2"

    def test_schur_case(self):
        g = Goal(parse_inequality(
            "0 <= a^3 - a^2*b - a^2*c - a*b^2 + 3*a*b*c - a*c^2 + b^3"
            " - b^2*c - b*c^2 + c^3", ASM3))
        cert = is_trivially_true(g)
        assert cert is not None and cert.name == "check_schur"

    def test_together_zero(self):
        g = Goal(parse_inequality(
            "1/(a*b*c+b^2*c+b*c^2) + 1/(a^2*c+a*b*c+a*c^2)"
            " + 1/(a^2*b+a*b^2+a*b*c) <= 1/(a*b*c)", ASM3))
        cert = is_trivially_true(g)
        assert cert is not None and cert.name == "try_together_l"

    def test_univariate_case(self):
        asm = AssumptionSet.for_symbols(["x"])
        g = Goal(parse_inequality("4*x/(1+x)^2 <= 1", asm))
        cert = is_trivially_true(g)
        assert cert is not None

    def test_open_goal_not_closed(self):
        assert is_trivially_true(Goal(usamo1997_goal())) is None

    def test_strict_equality_rejected(self):
        g = Goal(parse_inequality("a < a", ASM3))
        assert is_trivially_true(g) is None


class TestFalsify:
    def test_false_ordering_claim(self):
        g = Goal(parse_inequality("b <= a", AssumptionSet.for_symbols(["a", "b"])))
        assert falsify(g) is not None

    def test_true_amgm_not_falsified(self):
        g = Goal(parse_inequality("2*sqrt(a*b) <= a + b",
                                  AssumptionSet.for_symbols(["a", "b"])))
        assert falsify(g) is None

    def test_flawed_inversion_step_falsified(self):
        # the flawed "invert both sides" step from the LLM proof review:
        # from A/3 >= 3/L one cannot conclude L >= 3/2 * ... ; encoded as
        # the (false) claim 9/A >= 3/2 for A the expanded symmetric sum
        # under abc = 1
        cond = parse_inequality("a*b*c = 1")
        asm = AssumptionSet.for_symbols(["a", "b", "c"], conditions=[cond])
        flawed = parse_inequality(
            "3/2 <= 9/(a^2*b + a*b^2 + a^2*c + a*c^2 + b^2*c + b*c^2)", asm)
        assert falsify(Goal(flawed), n=400) is not None

    def test_true_conditioned_goal_survives(self):
        assert falsify(Goal(imo1995_goal()), n=400) is None

    def test_condition_projection(self):
        # sampling respects the abc = 1 condition via rescaling
        cond = parse_inequality("a*b*c = 1")
        asm = AssumptionSet.for_symbols(["a", "b", "c"], conditions=[cond])
        g = Goal(parse_inequality("a*b*c <= 1", asm))
        assert falsify(g) is None
        g2 = Goal(parse_inequality("2 <= a*b*c", asm))
        assert falsify(g2) is not None


class TestGenerateSubgoals:
    def test_usamo97_muirhead_subgoal(self):
        subs = generate_subgoals(Goal(usamo1997_goal()))
        wanted = parse_inequality(
            "1/(a*b*c+b^2*c+b*c^2) + 1/(a^2*c+a*b*c+a*c^2)"
            " + 1/(a^2*b+a*b^2+a*b*c) <= 1/(a*b*c)", ASM3).normalized()
        assert any(g.target.lhs == wanted.lhs and g.target.rhs == wanted.rhs
                   and g.derivation == "check_SimpMuirhead" for g in subs)

    def test_imo2001_holder_subgoal(self):
        subs = generate_subgoals(Goal(imo2001_goal()))
        wanted_rhs = parse("(a+b+c)^(3/2)/sqrt(a^3+24*a*b*c+b^3+c^3)")
        assert any(g.target.rhs == wanted_rhs and g.derivation == "holder"
                   for g in subs)

    def test_dedup_by_canonical_hash(self):
        subs = generate_subgoals(Goal(usamo1997_goal()))
        keys = [g.key() for g in subs]
        assert len(keys) == len(set(keys))


class TestGoldenTraces:
    def test_usamo1997_step_for_step(self):
        res = best_first_search(usamo1997_goal(), tds,
                                SearchLimits(time_limit=600,
                                             max_expansions=200))
        assert res.stats.solved
        assert res.proof.derivations() == ["check_SimpMuirhead",
                                           "try_together_l"]
        # step-for-step: the intermediate goal matches the published trace
        mid = res.proof.goals[1].target
        assert mid.lhs == parse("1/(a*b*c+b^2*c+b*c^2) + 1/(a^2*c+a*b*c+a*c^2)"
                                " + 1/(a^2*b+a*b^2+a*b*c)")
        assert mid.rhs == parse("1/(a*b*c)")
        assert replay(res.proof)

    def test_imo1995_step_for_step(self):
        res = best_first_search(imo1995_goal(), tds,
                                SearchLimits(time_limit=600,
                                             max_expansions=200))
        assert res.stats.solved
        assert res.proof.derivations() == ["try_homo", "holder",
                                           "check_AM_GM"]
        homog = res.proof.goals[1].target
        assert homog.lhs == parse("3*(a*b*c)^(2/3)/2")
        assert homog.rhs == parse("a^2*b^2/(c*(a+b)) + b^2*c^2/(a*(b+c))"
                                  " + a^2*c^2/(b*(a+c))")
        final = res.proof.goals[2].target
        assert final.rhs == parse("(a*b + a*c + b*c)/2")
        assert replay(res.proof)

    def test_imo2001_holder_then_polynomial_close(self):
        res = best_first_search(imo2001_goal(), tds,
                                SearchLimits(time_limit=600,
                                             max_expansions=400))
        assert res.stats.solved
        derivs = res.proof.derivations()
        assert derivs[0] == "holder"
        assert derivs[-1].startswith("check_AM_GM")
        # the chain passes through the polynomial goal of the trace
        poly_goal = parse_inequality(
            "a^3 + 24*a*b*c + b^3 + c^3 <= (a+b+c)^3", ASM3)
        assert any(g.target.lhs == poly_goal.lhs and
                   g.target.rhs == poly_goal.rhs for g in res.proof.goals)
        assert replay(res.proof)

    def test_rendered_proof_format(self):
        res = best_first_search(usamo1997_goal(), tds,
                                SearchLimits(time_limit=600,
                                             max_expansions=200))
        text = render_proof(res.proof)
        assert text.startswith("To prove")
        assert "by <function check_SimpMuirhead>, it remains to prove" in text
        assert text.endswith("by <function try_together_l>, this is true!")


class TestStrategies:
    def test_bfs_solves_trivial(self):
        g = parse_inequality("2*sqrt(a*b) <= a+b",
                             AssumptionSet.for_symbols(["a", "b"]))
        res = bfs_search(g, SearchLimits(max_expansions=5))
        assert res.stats.solved and res.stats.expansions <= 1

    def test_bfs_solves_usamo97(self):
        res = bfs_search(usamo1997_goal(),
                         SearchLimits(time_limit=300, max_expansions=50))
        assert res.stats.solved

    def test_ucb_arithmetic(self):
        v = ucb_score(0.5, 2, 10, 0.3 * math.sqrt(2))
        assert abs(v - 0.9552) <= 1e-4

    def test_ucb_unvisited_selected_first(self):
        assert ucb_score(0.1, 0, 5, 0.42) == float("inf")

    def test_mcts_solves_trivial(self):
        g = parse_inequality("2*sqrt(a*b) <= a+b",
                             AssumptionSet.for_symbols(["a", "b"]))
        res = mcts_search(g, tds, MctsConfig(), SearchLimits(max_expansions=5))
        assert res.stats.solved

    def test_mcts_solves_usamo97(self):
        res = mcts_search(usamo1997_goal(), tds, MctsConfig(),
                          SearchLimits(time_limit=300, max_expansions=50))
        assert res.stats.solved

    def test_determinism(self):
        lim = SearchLimits(time_limit=300, max_expansions=30)
        r1 = best_first_search(imo2001_goal(), tds, lim, seed=5)
        r2 = best_first_search(imo2001_goal(), tds, lim, seed=5)
        assert r1.stats.expansions == r2.stats.expansions
        assert (r1.proof is None) == (r2.proof is None)
        if r1.proof:
            assert [g.target.render() for g in r1.proof.goals] == \
                [g.target.render() for g in r2.proof.goals]

    def test_closed_list_discipline(self):
        # no key is expanded twice
        res = best_first_search(imo2001_goal(), tds,
                                SearchLimits(time_limit=300,
                                             max_expansions=40))
        assert len(res.expanded_keys) == res.stats.expansions


class TestTangentFlow:
    def test_usamo2003_solves_via_tangent(self):
        g = parse_inequality(
            "(a+b+2*c)^2/(2*c^2+(a+b)^2) + (a+2*b+c)^2/(2*b^2+(a+c)^2)"
            " + (2*a+b+c)^2/(2*a^2+(b+c)^2) <= 8", ASM3)
        res = best_first_search(g, tds, SearchLimits(time_limit=600,
                                                     max_expansions=100))
        assert res.stats.solved
        assert "check_linear_ctr" in res.proof.derivations()

    def test_korea_solves(self):
        cond = parse_inequality("a+b+c = 1")
        asm = AssumptionSet.for_symbols(["a", "b", "c"], "nonnegative",
                                        conditions=[cond])
        g = parse_inequality(
            "1/(a^2-4*a+9) + 1/(b^2-4*b+9) + 1/(c^2-4*c+9) <= 7/18", asm)
        res = best_first_search(g, tds, SearchLimits(time_limit=600,
                                                     max_expansions=100))
        assert res.stats.solved
