"""Inequality statements and assumption sets."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Tuple

from .expr import (Expr, ZERO, addn, canonical_hash, evaluate, free_symbols,
                   muln, neg, parse, render, string_length, sub_, tree_depth)

POSITIVE = "positive"
NONNEGATIVE = "nonnegative"
REAL = "real"

_RELATIONS = ("<=", "<", ">=", ">", "=")


@dataclass(frozen=True)
class AssumptionSet:
    """Sign domains, equational conditions and ordering facts.

    ``signs`` maps symbol -> positive | nonnegative | real.  ``conditions``
    are equalities (relation "=").  ``ordering`` lists expressions asserted
    >= 0 (e.g. a - b for a >= b).  ``cycle`` fixes the cyclic variable
    order; defaults to sorted symbol names.
    """

    signs: Tuple[Tuple[str, str], ...] = ()
    conditions: Tuple["Inequality", ...] = ()
    ordering: Tuple[Expr, ...] = ()
    cycle: Optional[Tuple[str, ...]] = None

    @staticmethod
    def for_symbols(names: Sequence[str], domain: str = POSITIVE,
                    conditions: Sequence["Inequality"] = (),
                    ordering: Sequence[Expr] = (),
                    cycle: Optional[Sequence[str]] = None) -> "AssumptionSet":
        return AssumptionSet(
            signs=tuple((n, domain) for n in sorted(names)),
            conditions=tuple(conditions),
            ordering=tuple(ordering),
            cycle=tuple(cycle) if cycle is not None else None)

    def sign_of(self, name: str) -> str:
        for n, d in self.signs:
            if n == name:
                return d
        return REAL

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.signs)

    @property
    def cyclic_order(self) -> Tuple[str, ...]:
        return self.cycle if self.cycle is not None else tuple(sorted(self.variables))

    def with_conditions(self, conditions: Sequence["Inequality"]) -> "AssumptionSet":
        return replace(self, conditions=tuple(conditions))


EMPTY_ASSUMPTIONS = AssumptionSet()


@dataclass(frozen=True)
class Inequality:
    """relation in {<=, <, >=, >, =} between two canonical expressions."""

    relation: str
    lhs: Expr
    rhs: Expr
    assumptions: AssumptionSet = EMPTY_ASSUMPTIONS
    equality_witness: Optional[Mapping[str, Fraction]] = None

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise ValueError(f"bad relation {self.relation!r}")

    def oriented(self) -> Tuple[Expr, Expr, bool]:
        """(small, large, strict) with the relation read as small <= large."""
        if self.relation in ("<=", "<", "="):
            return self.lhs, self.rhs, self.relation == "<"
        return self.rhs, self.lhs, self.relation == ">"

    @property
    def strict(self) -> bool:
        return self.relation in ("<", ">")

    def flipped(self) -> "Inequality":
        m = {"<=": ">=", "<": ">", ">=": "<=", ">": "<", "=": "="}
        return replace(self, relation=m[self.relation], lhs=self.rhs, rhs=self.lhs)

    def normalized(self) -> "Inequality":
        """Oriented so the relation is <=, < or =."""
        if self.relation in (">=", ">"):
            return self.flipped()
        return self

    def difference(self) -> Expr:
        """large - small; the goal asserts this is >= 0 (or > 0)."""
        small, large, _ = self.oriented()
        return sub_(large, small)

    def free_symbols(self) -> frozenset:
        return free_symbols(self.lhs) | free_symbols(self.rhs)

    def key(self) -> int:
        return ineq_key(self)

    def metrics(self) -> Tuple[int, int]:
        """(tree depth, length of the plain rendering)."""
        d = max(tree_depth(self.lhs), tree_depth(self.rhs))
        return d, len(self.render())

    def render(self, style: str = "plain") -> str:
        if style == "latex":
            rel = {"<=": r"\leq", ">=": r"\geq", "<": "<", ">": ">", "=": "="}
        else:
            rel = {r: r for r in _RELATIONS}
        return f"{render(self.lhs, style)} {rel[self.relation]} {render(self.rhs, style)}"

    def __repr__(self):
        return f"<ineq {self.render()}>"


def ineq_key(ineq: Inequality) -> int:
    """Stable 64-bit key of the <=-oriented statement."""
    small, large, strict = ineq.oriented()
    import hashlib
    from .expr import HASH_SEED
    tag = b"<" if strict else b"<="
    h = hashlib.blake2b(digest_size=8, key=HASH_SEED)
    h.update(small.skey.encode())
    h.update(b"|" + tag + b"|")
    h.update(large.skey.encode())
    return int.from_bytes(h.digest(), "big")


def parse_inequality(text: str, assumptions: AssumptionSet = EMPTY_ASSUMPTIONS) -> Inequality:
    """Parse "lhs REL rhs" under the problem grammar."""
    for rel in ("<=", ">=", "<", ">", "="):
        if rel in text:
            l, r = text.split(rel, 1)
            return Inequality(rel, parse(l), parse(r), assumptions)
    raise ValueError(f"no relation found in {text!r}")


def check_witness(ineq: Inequality, point: Mapping[str, Fraction],
                  tol: float = 1e-9) -> bool:
    """|lhs - rhs| <= tol * max(1, |lhs|) at the point."""
    lv = evaluate(ineq.lhs, point)
    rv = evaluate(ineq.rhs, point)
    return abs(float(lv) - float(rv)) <= tol * max(1.0, abs(float(lv)))
