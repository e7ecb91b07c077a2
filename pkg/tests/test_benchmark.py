"""Embedded benchmark data fidelity."""

import pytest

from ineqprover.benchmark import get_problem, load_benchmark
from ineqprover.expr import evaluate, parse
from ineqprover.ineq import parse_inequality

# frozen renderings, reviewed once against the published statements
GOLDEN_STATEMENTS = {
    "MO-INT-20/03":
        "3/2 <= 1/(a^3*(b + c)) + 1/(b^3*(a + c)) + 1/(c^3*(a + b))",
    "MO-INT-20/05":
        "1/(a*b*c + a^3 + b^3) + 1/(a*b*c + a^3 + c^3)"
        " + 1/(a*b*c + b^3 + c^3) <= 1/(a*b*c)",
    "MO-INT-20/08":
        "1 <= a/sqrt(8*b*c + a^2) + b/sqrt(8*a*c + b^2) + c/sqrt(8*a*b + c^2)",
    "MO-INT-20/16":
        "1/(9 - 4*a + a^2) + 1/(9 - 4*b + b^2) + 1/(9 - 4*c + c^2) <= 7/18",
}


class TestLoad:
    def test_exactly_twenty(self):
        problems = load_benchmark()
        assert len(problems) == 20
        assert [p.id for p in problems] == \
            [f"MO-INT-20/{i:02d}" for i in range(1, 21)]

    def test_problem3_statement(self):
        p = get_problem("MO-INT-20/03")
        assert p.source == "IMO 1995 P2"
        conds = p.goal.assumptions.conditions
        assert len(conds) == 1 and conds[0].render() == "a*b*c = 1"
        g = p.goal.normalized()
        assert g.render() == GOLDEN_STATEMENTS[p.id]

    def test_unsupported_flags(self):
        assert not get_problem("MO-INT-20/12").supported
        assert not get_problem("MO-INT-20/20").supported
        assert sum(1 for p in load_benchmark() if p.supported) == 18

    def test_golden_renderings(self):
        for pid, want in GOLDEN_STATEMENTS.items():
            assert get_problem(pid).goal.normalized().render() == want

    def test_equality_cases_hold_numerically(self):
        # problems with equality at a=b=c(=d) evaluate to a tight bound
        p3 = get_problem("MO-INT-20/03").goal
        pt = {"a": 1, "b": 1, "c": 1}
        assert float(evaluate(p3.lhs, pt)) == float(evaluate(p3.rhs, pt)) \
            or abs(float(evaluate(p3.lhs, pt)) -
                   float(evaluate(p3.rhs, pt))) < 1e-12

    def test_problem20_ordering_facts(self):
        p = get_problem("MO-INT-20/20")
        assert len(p.goal.assumptions.ordering) == 3
        assert p.goal.relation == "<"

    def test_lookup_by_number(self):
        assert get_problem("5").id == "MO-INT-20/05"
        with pytest.raises(KeyError):
            get_problem("MO-INT-20/99")
