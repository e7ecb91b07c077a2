"""Self-equivalence transformations of inequalities plus homogenization.

Each rule maps an inequality to a finite list of sound successors.  Rules
never chain internally; chaining is the searcher's job.  A rule returns []
when its structural precondition does not hold or when it would return
its input unchanged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .expr import (Add, Const, Expr, Mul, ONE, Pow, Sym, ZERO, addn,
                   children, free_symbols, is_cyclic_symmetric, muln, neg,
                   pow_, rotate, sub_, sym)
from .ineq import AssumptionSet, Inequality
from .poly import (SizeLimitError, expand, factor_terms, split_fraction,
                   together, total_degree)
from .signs import Sign, infer_sign

log = logging.getLogger(__name__)

EQUIVALENCE = "equivalence"
IMPLIES_GOAL = "implies_goal"

RULE_CLASSES: Dict[str, str] = {
    "nodiv_expr": EQUIVALENCE,
    "nomul_expr": EQUIVALENCE,
    "no_sep_denom": EQUIVALENCE,
    "sep_neg": EQUIVALENCE,
    "zero_side": EQUIVALENCE,
    "no_pow": EQUIVALENCE,
    "try_together_l": EQUIVALENCE,
    "try_together_r": EQUIVALENCE,
    "try_expand_l": EQUIVALENCE,
    "try_expand_r": EQUIVALENCE,
    "all_cyc_mul_expr": IMPLIES_GOAL,
    "try_factor_both": EQUIVALENCE,
    "try_homo": EQUIVALENCE,
    "try_simp_r": EQUIVALENCE,
}

DEFAULT_RULE_ORDER: Tuple[str, ...] = tuple(RULE_CLASSES)


@dataclass(frozen=True)
class RuleRegistry:
    tags: Tuple[str, ...] = DEFAULT_RULE_ORDER
    size_cap: int = 5000
    max_successors: int = 8

    def __post_init__(self):
        if len(set(self.tags)) != len(self.tags):
            raise ValueError("duplicate rule tags")
        for t in self.tags:
            if t not in RULE_CLASSES:
                raise ValueError(f"unknown rule tag {t!r}")


def _succ(g: Inequality, lhs: Expr, rhs: Expr) -> Optional[Inequality]:
    if lhs == g.lhs and rhs == g.rhs:
        return None
    return replace(g, lhs=lhs, rhs=rhs, equality_witness=None)


def _den_bags(g: Inequality):
    ln, ld = split_fraction(g.lhs)
    rn, rd = split_fraction(g.rhs)
    return (ln, ld), (rn, rd)


def _positive(e: Expr, asm: AssumptionSet) -> bool:
    return infer_sign(e, asm) is Sign.POSITIVE


def rule_nodiv_expr(g: Inequality, cap: int) -> List[Inequality]:
    """Multiply both sides by the denominators (all of decided sign)."""
    (_, ld), (_, rd) = _den_bags(g)
    union: list = []
    for b, x in ld + rd:
        for i, (bb, xx) in enumerate(union):
            if bb == b:
                union[i] = (bb, max(xx, x))
                break
        else:
            union.append((b, x))
    union = [(b, x) for b, x in union
             if not (isinstance(b, Const) and b.value > 0)]
    if not union:
        return []
    if not all(_positive(b, g.assumptions) for b, _ in union):
        return []
    mult = muln([pow_(b, Const(x)) for b, x in union])
    try:
        lhs = together(muln([g.lhs, mult]), cap)
        rhs = together(muln([g.rhs, mult]), cap)
    except SizeLimitError:
        return []
    s = _succ(g, lhs, rhs)
    return [s] if s else []


def rule_nomul_expr(g: Inequality, cap: int) -> List[Inequality]:
    """Divide both sides by shared positive factors (and rational content)."""
    fl = factor_terms(g.lhs)
    fr = factor_terms(g.rhs)
    common: list = []
    fr_map = list(fr.factors)
    for b, x in fl.factors:
        for bb, xx in fr_map:
            if bb == b:
                m = min(x, xx)
                if m > 0 and _positive(b, g.assumptions):
                    common.append((b, m))
                break
    cl, cr = fl.content, fr.content
    gcd_c = Fraction(math.gcd(cl.numerator, cr.numerator),
                     math.lcm(cl.denominator, cr.denominator)) \
        if cl > 0 and cr > 0 else Fraction(1)
    if not common and gcd_c == 1:
        return []
    inv = [pow_(b, Const(-x)) for b, x in common]
    scale = Const(1 / gcd_c)
    lhs = muln([g.lhs, scale] + inv)
    rhs = muln([g.rhs, scale] + inv)
    try:
        lhs, rhs = together(lhs, cap), together(rhs, cap)
    except SizeLimitError:
        return []
    s = _succ(g, lhs, rhs)
    return [s] if s else []


def rule_no_sep_denom(g: Inequality, cap: int) -> List[Inequality]:
    try:
        s = _succ(g, together(g.lhs, cap), together(g.rhs, cap))
    except SizeLimitError:
        return []
    return [s] if s else []


def _negative_part(e: Expr) -> Expr:
    """Sum of the negative-coefficient terms of a (scaled) sum."""
    coeff = Fraction(1)
    node = e
    if isinstance(node, Mul) and isinstance(node.ops[0], Const):
        rest = node.ops[1:]
        if len(rest) == 1 and isinstance(rest[0], Add):
            coeff = node.ops[0].value
            node = rest[0]
    if not isinstance(node, Add):
        return ZERO
    negs = []
    for op in node.ops:
        c, _ = _split_leading(op)
        if c < 0:
            negs.append(op)
    if not negs:
        return ZERO
    return muln([Const(coeff), addn(negs)])


def _split_leading(e: Expr):
    if isinstance(e, Const):
        return e.value, None
    if isinstance(e, Mul) and isinstance(e.ops[0], Const):
        return e.ops[0].value, e
    return Fraction(1), e


def rule_sep_neg(g: Inequality, cap: int) -> List[Inequality]:
    """Move negative-coefficient terms across the relation."""
    out = []
    for side in ("rhs", "lhs"):
        n = _negative_part(getattr(g, side))
        if n == ZERO:
            continue
        lhs = sub_(g.lhs, n)
        rhs = sub_(g.rhs, n)
        s = _succ(g, lhs, rhs)
        if s:
            out.append(s)
    return out


def rule_zero_side(g: Inequality, cap: int) -> List[Inequality]:
    small, large, strict = g.oriented()
    if small == ZERO:
        return []
    rel = "<" if strict else "<="
    s = Inequality(rel, ZERO, sub_(large, small), g.assumptions)
    if s.lhs == g.lhs and s.rhs == g.rhs:
        return []
    return [s]


def _top_power_lcm(e: Expr) -> int:
    """LCM of exponent denominators at the top multiplicative level."""
    k = 1
    factors = e.ops if isinstance(e, Mul) else (e,)
    for f in factors:
        if isinstance(f, Pow) and isinstance(f.exp, Const):
            k = math.lcm(k, f.exp.value.denominator)
    return k


def rule_no_pow(g: Inequality, cap: int) -> List[Inequality]:
    """Raise both sides to the lcm of top-level root denominators."""
    k = math.lcm(_top_power_lcm(g.lhs), _top_power_lcm(g.rhs))
    if k == 1:
        return []
    if not infer_sign(g.lhs, g.assumptions).nonneg():
        return []
    if not infer_sign(g.rhs, g.assumptions).nonneg():
        return []
    s = _succ(g, pow_(g.lhs, Const(k)), pow_(g.rhs, Const(k)))
    return [s] if s else []


def rule_try_together_l(g: Inequality, cap: int) -> List[Inequality]:
    try:
        s = _succ(g, together(g.lhs, cap), g.rhs)
    except SizeLimitError:
        return []
    return [s] if s else []


def rule_try_together_r(g: Inequality, cap: int) -> List[Inequality]:
    try:
        s = _succ(g, g.lhs, together(g.rhs, cap))
    except SizeLimitError:
        return []
    return [s] if s else []


def rule_try_expand_l(g: Inequality, cap: int) -> List[Inequality]:
    try:
        s = _succ(g, expand(g.lhs, cap), g.rhs)
    except SizeLimitError:
        return []
    return [s] if s else []


def rule_try_expand_r(g: Inequality, cap: int) -> List[Inequality]:
    try:
        s = _succ(g, g.lhs, expand(g.rhs, cap))
    except SizeLimitError:
        return []
    return [s] if s else []


def cyclic_multiplier_candidates(g: Inequality) -> List[Expr]:
    """Positive cyclically symmetric multipliers built from factors found
    on either side: the inverse of a cyclic factor, or the cyclic closure
    of a non-symmetric generator."""
    order = [v for v in g.assumptions.cyclic_order if v in g.free_symbols()]
    if len(order) < 2:
        order = sorted(g.free_symbols())
    cands: list = []
    seen = set()

    def consider(base: Expr, exp: Fraction):
        if isinstance(base, Const):
            return
        orbit = {rotate(base, order, k)._key for k in range(len(order))}
        if len(orbit) == 1:
            mult = pow_(base, Const(-exp))
        else:
            mult = muln([pow_(rotate(base, order, k), Const(-exp))
                         for k in range(len(order))])
        if mult == ONE:
            return
        if mult._key in seen:
            return
        seen.add(mult._key)
        if infer_sign(mult, g.assumptions) is Sign.POSITIVE:
            cands.append(mult)

    for side in (g.lhs, g.rhs):
        f = factor_terms(side, detect_powers=False)
        for b, x in f.factors:
            consider(b, x)
    return cands


def rule_all_cyc_mul_expr(g: Inequality, cap: int) -> List[Inequality]:
    out = []
    for mult in cyclic_multiplier_candidates(g):
        lhs = muln([g.lhs, mult])
        rhs = muln([g.rhs, mult])
        s = _succ(g, lhs, rhs)
        if s:
            out.append(s)
    return out


def rule_try_factor_both(g: Inequality, cap: int) -> List[Inequality]:
    fl = factor_terms(g.lhs).expr()
    fr = factor_terms(g.rhs).expr()
    s = _succ(g, fl, fr)
    return [s] if s else []


def rule_try_simp_r(g: Inequality, cap: int) -> List[Inequality]:
    """Collapse a constant-reducible right side."""
    try:
        r = together(g.rhs, cap)
    except SizeLimitError:
        return []
    if not isinstance(r, Const):
        return []
    s = _succ(g, g.lhs, r)
    return [s] if s else []


# ---------------------------------------------------------------------------
# homogenization


def _condition_parts(g: Inequality):
    """(c_expr, k) for the single equational condition c(X) = k, k > 0."""
    conds = [c for c in g.assumptions.conditions if c.relation == "="]
    if len(conds) != 1:
        return None
    c = conds[0]
    if isinstance(c.rhs, Const) and c.rhs.value > 0:
        return c.lhs, c.rhs.value
    if isinstance(c.lhs, Const) and c.lhs.value > 0:
        return c.rhs, c.lhs.value
    return None


def _balance(e: Expr, unit: Expr, d: Fraction):
    """Recursively equalize the degrees inside sums by multiplying the
    lighter terms with unit^q; returns (expr, degree)."""
    if isinstance(e, (Const,)):
        return e, Fraction(0)
    if isinstance(e, Sym):
        return e, Fraction(1)
    if isinstance(e, Pow):
        if not isinstance(e.exp, Const):
            raise _NotHomogenizable()
        b, db = _balance(e.base, unit, d)
        return pow_(b, e.exp), db * e.exp.value
    if isinstance(e, Mul):
        parts = []
        total = Fraction(0)
        for op in e.ops:
            p, dp = _balance(op, unit, d)
            parts.append(p)
            total += dp
        return muln(parts), total
    if isinstance(e, Add):
        parts = []
        degs = []
        for op in e.ops:
            p, dp = _balance(op, unit, d)
            parts.append(p)
            degs.append(dp)
        target = max(degs)
        fixed = []
        for p, dp in zip(parts, degs):
            if dp == target:
                fixed.append(p)
            else:
                q = (target - dp) / d
                fixed.append(muln([p, pow_(unit, Const(q))]))
        return addn(fixed), target
    raise _NotHomogenizable()


class _NotHomogenizable(Exception):
    pass


def homogenize(g: Inequality) -> List[Inequality]:
    """Use the single condition c(X) = k (c homogeneous of degree > 0) to
    give both sides one common degree; empty when not applicable."""
    parts = _condition_parts(g)
    if parts is None:
        return []
    c_expr, k = parts
    d = total_degree(c_expr)
    if d is None or d <= 0:
        log.debug("homogenize: condition is not homogeneous")
        return []
    unit = muln([c_expr, Const(1 / k)]) if k != 1 else c_expr
    try:
        lhs, dl = _balance(g.lhs, unit, d)
        rhs, dr = _balance(g.rhs, unit, d)
    except _NotHomogenizable:
        return []
    lconst = not free_symbols(g.lhs)
    rconst = not free_symbols(g.rhs)
    if lhs == g.lhs and rhs == g.rhs and (dl == dr or lconst or rconst):
        if dl == dr:
            return []
        if lconst and rconst:
            return []
    # smallest target degree >= max(dl, dr) giving integer exponents on
    # every side that actually contains symbols
    t = max(dl, dr)
    for _ in range(64):
        ql = (t - dl) / d
        qr = (t - dr) / d
        if (lconst or ql.denominator == 1) and (rconst or qr.denominator == 1):
            break
        t += Fraction(1)
    else:
        return []
    ql = (t - dl) / d
    qr = (t - dr) / d
    lhs2 = _apply_unit(lhs, unit, ql)
    rhs2 = _apply_unit(rhs, unit, qr)
    s = _succ(g, lhs2, rhs2)
    return [s] if s else []


def _apply_unit(e: Expr, unit: Expr, q: Fraction) -> Expr:
    if q == 0:
        return e
    u = pow_(unit, Const(q))
    if isinstance(e, Add):
        return addn([muln([op, u]) for op in e.ops])
    return muln([e, u])


_RULE_FUNCS: Dict[str, Callable[[Inequality, int], List[Inequality]]] = {
    "nodiv_expr": rule_nodiv_expr,
    "nomul_expr": rule_nomul_expr,
    "no_sep_denom": rule_no_sep_denom,
    "sep_neg": rule_sep_neg,
    "zero_side": rule_zero_side,
    "no_pow": rule_no_pow,
    "try_together_l": rule_try_together_l,
    "try_together_r": rule_try_together_r,
    "try_expand_l": rule_try_expand_l,
    "try_expand_r": rule_try_expand_r,
    "all_cyc_mul_expr": rule_all_cyc_mul_expr,
    "try_factor_both": rule_try_factor_both,
    "try_homo": lambda g, cap: homogenize(g),
    "try_simp_r": rule_try_simp_r,
}


def apply_rule(tag: str, g: Inequality,
               registry: Optional[RuleRegistry] = None) -> List[Inequality]:
    """Apply one transformation rule; successors are canonical, never the
    input itself, and capped per registry."""
    registry = registry or RuleRegistry()
    fn = _RULE_FUNCS[tag]
    out = fn(g, registry.size_cap)
    return out[:registry.max_successors]
