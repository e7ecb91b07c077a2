"""Sign inference under an assumption set and monotonicity labeling.

The labeling walks the expression tree and records, per node, whether the
root value is nondecreasing (+1), nonincreasing (-1) or undetermined
(None) in that node's value.  Theorem matching only fires on nodes with a
determined label; everything below a None node is None.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .expr import Add, Const, Expr, Mul, Pow, Sym, children, sub_, addn
from .ineq import AssumptionSet, POSITIVE, NONNEGATIVE, REAL


class Sign(Enum):
    POSITIVE = "positive"
    NONNEG = "nonneg"
    ZERO = "zero"
    NONPOS = "nonpos"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"

    def nonneg(self) -> bool:
        return self in (Sign.POSITIVE, Sign.NONNEG, Sign.ZERO)

    def nonpos(self) -> bool:
        return self in (Sign.NEGATIVE, Sign.NONPOS, Sign.ZERO)


def _sign_of_value(v: Fraction) -> Sign:
    if v > 0:
        return Sign.POSITIVE
    if v < 0:
        return Sign.NEGATIVE
    return Sign.ZERO


def _add_signs(a: Sign, b: Sign) -> Sign:
    if a is Sign.ZERO:
        return b
    if b is Sign.ZERO:
        return a
    if a.nonneg() and b.nonneg():
        return Sign.POSITIVE if Sign.POSITIVE in (a, b) else Sign.NONNEG
    if a.nonpos() and b.nonpos():
        return Sign.NEGATIVE if Sign.NEGATIVE in (a, b) else Sign.NONPOS
    return Sign.UNKNOWN


def _mul_signs(a: Sign, b: Sign) -> Sign:
    if Sign.ZERO in (a, b):
        return Sign.ZERO
    if Sign.UNKNOWN in (a, b):
        return Sign.UNKNOWN
    strict = a in (Sign.POSITIVE, Sign.NEGATIVE) and b in (Sign.POSITIVE, Sign.NEGATIVE)
    negative = (a.nonpos()) != (b.nonpos())
    if negative:
        return Sign.NEGATIVE if strict else Sign.NONPOS
    return Sign.POSITIVE if strict else Sign.NONNEG


def _pow_sign(base: Sign, exp: Expr) -> Sign:
    if isinstance(exp, Const):
        ev = exp.value
        if ev < 0 and base is Sign.NONNEG:
            # a base under a negative exponent is nonzero wherever the
            # expression is defined
            base = Sign.POSITIVE
        if ev.denominator == 1:
            n = int(ev)
            if n % 2 == 0:
                if base in (Sign.POSITIVE, Sign.NEGATIVE):
                    return Sign.POSITIVE
                if base is Sign.ZERO:
                    return Sign.ZERO if n > 0 else Sign.UNKNOWN
                if n > 0:
                    return Sign.NONNEG
                return Sign.UNKNOWN
            if n > 0:
                return base
            # negative odd power: sign preserved away from zero
            if base is Sign.POSITIVE:
                return Sign.POSITIVE
            if base is Sign.NEGATIVE:
                return Sign.NEGATIVE
            return Sign.UNKNOWN
        # fractional exponent: real only for base >= 0
        if ev > 0:
            if base is Sign.POSITIVE:
                return Sign.POSITIVE
            if base is Sign.ZERO:
                return Sign.ZERO
            if base is Sign.NONNEG:
                return Sign.NONNEG
            return Sign.UNKNOWN
        return Sign.POSITIVE if base is Sign.POSITIVE else Sign.UNKNOWN
    # symbolic exponent: positive base gives a positive value
    return Sign.POSITIVE if base is Sign.POSITIVE else Sign.UNKNOWN


def _infer(e: Expr, asm: AssumptionSet) -> Sign:
    if isinstance(e, Const):
        return _sign_of_value(e.value)
    if isinstance(e, Sym):
        dom = asm.sign_of(e.name)
        if dom == POSITIVE:
            return Sign.POSITIVE
        if dom == NONNEGATIVE:
            return Sign.NONNEG
        return Sign.UNKNOWN
    if isinstance(e, Add):
        acc = Sign.ZERO
        for op in e.ops:
            acc = _add_signs(acc, _infer(op, asm))
            if acc is Sign.UNKNOWN:
                return Sign.UNKNOWN
        return acc
    if isinstance(e, Mul):
        acc = Sign.POSITIVE
        for op in e.ops:
            acc = _mul_signs(acc, _infer(op, asm))
            if acc is Sign.UNKNOWN:
                return Sign.UNKNOWN
        return acc
    if isinstance(e, Pow):
        return _pow_sign(_infer(e.base, asm), e.exp)
    return Sign.UNKNOWN


def infer_sign(e: Expr, asm: AssumptionSet, use_facts: bool = True) -> Sign:
    """Syntactic sign inference; sound but incomplete (may say UNKNOWN).

    Ordering facts (each an expression >= 0) are consulted last, through
    linear combinations of at most two facts.
    """
    s = _infer(e, asm)
    if s is not Sign.UNKNOWN or not use_facts or not asm.ordering:
        return s
    facts = list(asm.ordering[:8])
    combos = [(f,) for f in facts]
    combos += [(f, g) for i, f in enumerate(facts) for g in facts[i:]]
    for combo in combos:
        rest = sub_(e, addn(combo))
        rs = _infer(rest, asm)
        if rs.nonneg():
            return Sign.POSITIVE if rs is Sign.POSITIVE else Sign.NONNEG
    return Sign.UNKNOWN


Label = Optional[int]
PathLabels = Dict[Tuple[int, ...], Label]


class MonotoneLabeling:
    """Per-path labels in {+1, -1, None}; root is +1 by definition."""

    __slots__ = ("labels", "root")

    def __init__(self, labels: PathLabels, root: Expr):
        self.labels = labels
        self.root = root

    def label(self, path: Tuple[int, ...]) -> Label:
        return self.labels.get(path)

    def sites(self):
        """(path, node, label) for nodes with a determined label."""
        from .expr import subexpr_at
        for path, lab in self.labels.items():
            if lab is not None:
                yield path, subexpr_at(self.root, path), lab


def label_monotonicity(root: Expr, asm: AssumptionSet) -> MonotoneLabeling:
    labels: PathLabels = {}

    def visit(node: Expr, path: Tuple[int, ...], lab: Label):
        labels[path] = lab
        if isinstance(node, Add):
            for i, op in enumerate(node.ops):
                visit(op, path + (i,), lab)
            return
        if isinstance(node, Mul):
            for i, op in enumerate(node.ops):
                child = None
                if lab is not None:
                    cof = Sign.POSITIVE
                    for j, other in enumerate(node.ops):
                        if j != i:
                            cof = _mul_signs(cof, infer_sign(other, asm))
                    if cof.nonneg() and cof is not Sign.ZERO:
                        child = lab
                    elif cof.nonpos() and cof is not Sign.ZERO:
                        child = -lab
                visit(op, path + (i,), child)
            return
        if isinstance(node, Pow):
            blab = None
            if lab is not None and isinstance(node.exp, Const):
                q = node.exp.value
                bsign = infer_sign(node.base, asm)
                if q < 0 and bsign is Sign.NONNEG:
                    bsign = Sign.POSITIVE  # nonzero on the domain
                if bsign is Sign.POSITIVE:
                    blab = lab if q > 0 else -lab
            visit(node.base, path + (0,), blab)
            visit(node.exp, path + (1,), None)
            return
        # leaves keep the incoming label

    visit(root, (), 1)
    return MonotoneLabeling(labels, root)
