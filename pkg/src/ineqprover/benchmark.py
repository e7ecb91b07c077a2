"""The embedded 20-problem olympiad inequality benchmark."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .expr import parse
from .ineq import (AssumptionSet, Inequality, NONNEGATIVE, POSITIVE, REAL,
                   parse_inequality)


@dataclass(frozen=True)
class Problem:
    id: str
    source: str
    variables: Tuple[str, ...]
    goal: Inequality
    supported: bool = True
    note: str = ""

    def render(self) -> str:
        conds = "; ".join(c.render() for c in self.goal.assumptions.conditions)
        head = f"{self.id} ({self.source})"
        if conds:
            head += f" given {conds}"
        return f"{head}: {self.goal.render()}"


def _p(num: int, source: str, vars: str, goal: str, domain: str = POSITIVE,
       condition: Optional[str] = None, ordering: Tuple[str, ...] = (),
       supported: bool = True, note: str = "") -> Problem:
    names = tuple(vars.split(","))
    conds = ()
    if condition:
        conds = (parse_inequality(condition),)
    order_facts = tuple(parse(o) for o in ordering)
    asm = AssumptionSet.for_symbols(names, domain, conditions=conds,
                                    ordering=order_facts)
    return Problem(f"MO-INT-20/{num:02d}", source, names,
                   parse_inequality(goal, asm), supported, note)


_PROBLEMS: List[Problem] = [
    _p(1, "IMO 1990 Shortlist", "a,b,c,d",
       "a^3/(b+c+d) + b^3/(c+d+a) + c^3/(d+a+b) + d^3/(a+b+c) >= 1/3",
       condition="a*b + b*c + c*d + d*a = 1"),
    _p(2, "IMO 1993 Shortlist", "a,b,c,d",
       "a/(b+2*c+3*d) + b/(3*a+c+2*d) + c/(2*a+3*b+d) + d/(a+2*b+3*c) >= 2/3"),
    _p(3, "IMO 1995 P2", "a,b,c",
       "1/(c^3*(a+b)) + 1/(b^3*(a+c)) + 1/(a^3*(b+c)) >= 3/2",
       condition="a*b*c = 1"),
    _p(4, "IMO 1996 Shortlist", "a,b,c",
       "a*b/(a^5+a*b+b^5) + a*c/(a^5+a*c+c^5) + b*c/(b^5+b*c+c^5) <= 1",
       condition="a*b*c = 1"),
    _p(5, "USAMO 1997 P5", "a,b,c",
       "1/(a^3+b^3+a*b*c) + 1/(b^3+c^3+a*b*c) + 1/(c^3+a^3+a*b*c)"
       " <= 1/(a*b*c)"),
    _p(6, "IMO 1998 Shortlist A3", "a,b,c",
       "a^3/((1+b)*(1+c)) + b^3/((1+c)*(1+a)) + c^3/((1+a)*(1+b)) >= 3/4",
       condition="a*b*c = 1"),
    _p(7, "IMO 2000 P2", "a,b,c",
       "(a - 1 + 1/b)*(b - 1 + 1/c)*(c - 1 + 1/a) <= 1",
       condition="a*b*c = 1"),
    _p(8, "IMO 2001 P2", "a,b,c",
       "a/sqrt(a^2 + 8*b*c) + b/sqrt(8*a*c + b^2) + c/sqrt(8*a*b + c^2)"
       " >= 1"),
    _p(9, "USAMO 2003 P5", "a,b,c",
       "(a+b+2*c)^2/(2*c^2+(a+b)^2) + (a+2*b+c)^2/(2*b^2+(a+c)^2)"
       " + (2*a+b+c)^2/(2*a^2+(b+c)^2) <= 8"),
    _p(10, "Poland 2004", "a,b,c,d",
       "a/(a^3+63*b*c*d)^(1/3) + b/(63*a*c*d+b^3)^(1/3)"
       " + c/(63*a*b*d+c^3)^(1/3) + d/(63*a*b*c+d^3)^(1/3) >= 1"),
    _p(11, "IMO 2004 Shortlist A5", "a,b,c",
       "(1/a+6*b)^(1/3) + (1/b+6*c)^(1/3) + (1/c+6*a)^(1/3) <= 1/(a*b*c)",
       condition="a*b + b*c + c*a = 1"),
    _p(12, "IMO 2006 P3", "a,b,c",
       "sqrt((a*b*(a^2-b^2) + b*c*(b^2-c^2) + c*a*(c^2-a^2))^2)"
       " <= 9/(16*sqrt(2))*(a^2+b^2+c^2)^2",
       domain=REAL, supported=False,
       note="absolute value encoded as sqrt(x^2); |.| is not an engine "
            "rewrite target"),
    _p(13, "IMO 2009 Shortlist", "a,b,c",
       "(2*a+b+c)^(-2) + (a+2*b+c)^(-2) + (a+b+2*c)^(-2) <= 3/16",
       condition="1/a + 1/b + 1/c = a + b + c"),
    _p(14, "USA TST 2010 P2", "a,b,c",
       "1/(c^5*(a+2*b)^2) + 1/(b^5*(2*a+c)^2) + 1/(a^5*(b+2*c)^2) >= 1/3",
       condition="a*b*c = 1"),
    _p(15, "USAMO 2011 P1", "a,b,c",
       "(a*b+1)/(a+b)^2 + (b*c+1)/(b+c)^2 + (c*a+1)/(c+a)^2 >= 3",
       ordering=("4 - a^2 - b^2 - c^2 - (a+b+c)^2",)),
    _p(16, "Korea 2011 P4", "a,b,c",
       "1/(a^2-4*a+9) + 1/(b^2-4*b+9) + 1/(c^2-4*c+9) <= 7/18",
       domain=NONNEGATIVE, condition="a + b + c = 1"),
    _p(17, "USAMO 2012", "a,b,c",
       "(b^3+3*c^3)/(5*b+c) + (a^3+3*b^3)/(5*a+b) + (3*a^3+c^3)/(a+5*c)"
       " >= 2/3*(a^2+b^2+c^2)"),
    _p(18, "Japan 2014 P5", "a,b,c",
       "a/(9*b*c+4*(b-c)^2+1) + b/(9*a*c+4*(-a+c)^2+1)"
       " + c/(9*a*b+4*(a-b)^2+1) >= 1/2",
       domain=NONNEGATIVE, condition="a + b + c = 1"),
    _p(19, "USAMO 2017 P6", "a,b,c,d",
       "a/(b^3+4) + b/(c^3+4) + c/(d^3+4) + d/(a^3+4) >= 2/3",
       domain=NONNEGATIVE, condition="a + b + c + d = 4"),
    _p(20, "IMO 2020 P2", "a,b,c,d",
       "(a+2*b+3*c+4*d)*a^a*b^b*c^c*d^d < 1",
       condition="a + b + c + d = 1",
       ordering=("a - b", "b - c", "c - d"),
       supported=False,
       note="variable exponents (a^a) have no matching procedure"),
]


def load_benchmark() -> List[Problem]:
    """All 20 problems, ids 01..20."""
    return list(_PROBLEMS)


def get_problem(ref: str) -> Problem:
    ref = ref.strip()
    for p in _PROBLEMS:
        if p.id == ref or p.id.split("/")[1] == ref.zfill(2):
            return p
    raise KeyError(f"unknown problem {ref!r}")
