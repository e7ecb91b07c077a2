"""Built-in inequality theorems as bound-producing matchers.

Each matcher inspects one side of a goal, finds sites where a theorem
applies (gated by the monotonicity labeling), and emits MatchResults: the
whole side with the site replaced by the theorem's bound, together with
the bound direction relative to the side and the equality condition.

When the side is cyclically symmetric, a match at one member of a cyclic
orbit is applied to the whole orbit simultaneously, which is how the
reference proofs rewrite all three fractions of a cyclic sum in one step.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .expr import (Add, Const, Expr, Mul, ONE, Pow, Sym, ZERO, addn,
                   canonical_hash, children, differentiate, free_symbols,
                   is_cyclic_symmetric, muln, neg, pow_, render, replace_at,
                   rotate, sub_, subexpr_at, substitute, sym)
from .ineq import AssumptionSet, Inequality
from .poly import (GPoly, MONO_ONE, factor_terms, from_poly, mono_degree,
                   mono_expr, mono_mul, poly_add, poly_scale, to_poly,
                   together, total_degree, univariate_coeffs,
                   poly_sign_on_interval, rational_roots, upoly_divmod,
                   SizeLimitError)
from .signs import Sign, infer_sign, label_monotonicity, MonotoneLabeling

UPPER = "upper"
LOWER = "lower"

_HOLE = "_x"


@dataclass
class MatchBudget:
    time_limit: float = 2.0
    max_results: int = 64
    max_partition_elems: int = 6
    max_blocks: int = 4
    max_cover_subsets: int = 8
    term_cap: int = 5000

    def deadline(self) -> float:
        return time.monotonic() + self.time_limit


@dataclass
class MatchResult:
    theorem: str
    site: Tuple[int, ...]
    direction: str            # bound direction for the whole side
    produced: Expr            # side with the site replaced
    equality_condition: Tuple[Tuple[Expr, Expr], ...] = ()
    instantiation: Tuple[str, ...] = ()
    budget_used: float = 0.0
    truncated: bool = False

    def sort_token(self):
        return (self.theorem, self.site, canonical_hash(self.produced))


@dataclass
class SiteBound:
    """A theorem bound for a single node: rel=+1 bound >= node, -1 <=."""
    name: str
    bound: Expr
    rel: int
    eq: Tuple[Tuple[Expr, Expr], ...] = ()
    inst: Tuple[str, ...] = ()


def _nonneg(e: Expr, asm: AssumptionSet) -> bool:
    return infer_sign(e, asm).nonneg()


def _nonpos(e: Expr, asm: AssumptionSet) -> bool:
    return infer_sign(e, asm).nonpos()


def shallow_mul(a: Expr, b: Expr) -> Expr:
    """Product distributed across one Add level (no power expansion)."""
    if isinstance(b, Add):
        return addn([muln([a, op]) for op in b.ops])
    if isinstance(a, Add):
        return addn([muln([op, b]) for op in a.ops])
    return muln([a, b])


# ---------------------------------------------------------------------------
# factor bags (multiplicative views used by Hölder)


def _term_bags(t: Expr, asm: AssumptionSet):
    """(coeff, num_bag, den_bag) with bags as lists of (base, exp > 0)."""
    f = factor_terms(t, detect_powers=False)
    num, den = [], []
    for base, exp in f.factors:
        if exp > 0:
            num.append((base, exp))
        else:
            den.append((base, -exp))
    return f.content, num, den


def _bag_expr(bag: list) -> Expr:
    return muln([pow_(b, Const(x)) for b, x in bag]) if bag else ONE


def _bag_shallow_expr(bag: list) -> Expr:
    """Like _bag_expr but distributes simple factors over a single Add."""
    adds = [(b, x) for b, x in bag if isinstance(b, Add) and x == 1]
    rest = [(b, x) for b, x in bag if not (isinstance(b, Add) and x == 1)]
    if len(adds) != 1:
        return _bag_expr(bag)
    other = _bag_expr(rest)
    return shallow_mul(other, adds[0][0])


def _bag_common(bags: list) -> list:
    """Componentwise min across bags (bases present in all)."""
    if not bags:
        return []
    common = dict(bags[0])
    for bag in bags[1:]:
        d = dict(bag)
        for b in list(common):
            v = min(common[b], d.get(b, Fraction(0)))
            if v <= 0:
                del common[b]
            else:
                common[b] = v
    return list(common.items())


def _bag_sub(bag: list, common: list) -> list:
    d = dict(bag)
    for b, x in common:
        d[b] = d[b] - x
    return [(b, x) for b, x in d.items() if x != 0]


def _sum_with_extraction(bags: list, coeffs: list) -> Expr:
    """Sum of coeff_i * bag_i with the common factor pulled out."""
    common = _bag_common(bags)
    terms = [muln([Const(c), _bag_shallow_expr(_bag_sub(bag, common))])
             for c, bag in zip(coeffs, bags)]
    return muln([_bag_expr(common), addn(terms)])


# ---------------------------------------------------------------------------
# AM-GM


def _set_partitions(items: list, max_blocks: int):
    """All partitions of items into at most max_blocks blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, max_blocks):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        if len(part) < max_blocks:
            yield [[first]] + part


def _amgm_partition_bounds(node: Add, asm: AssumptionSet,
                           budget: MatchBudget, deadline: float) -> List[SiteBound]:
    ops = list(node.ops)
    out: List[SiteBound] = []
    signm = [infer_sign(op, asm) for op in ops]
    for flip in (False, True):
        if flip:
            if not all(s.nonpos() for s in signm):
                continue
            items = [neg(op) for op in ops]
        else:
            if not all(s.nonneg() for s in signm):
                continue
            items = ops
        if len(items) <= budget.max_partition_elems:
            partitions = _set_partitions(items, budget.max_blocks)
        else:
            partitions = iter([[[x] for x in items]])
        for part in partitions:
            if time.monotonic() > deadline:
                break
            k = len(part)
            if k < 2:
                continue
            blocks = [addn(block) for block in part]
            gm = muln([Const(k), pow_(muln(blocks), Const(Fraction(1, k)))])
            eq = tuple((blocks[0], b) for b in blocks[1:])
            if flip:
                out.append(SiteBound("check_AM_GM", neg(gm), +1, eq))
            else:
                out.append(SiteBound("check_AM_GM", gm, -1, eq))
    return out


def _sym_mono(op: Expr):
    """(coeff, mono) when op is coeff * product of symbol powers, else None."""
    try:
        p = to_poly(op, cap=64)
    except SizeLimitError:
        return None
    if len(p) != 1:
        return None
    (m, c), = p.items()
    if any(not isinstance(atom, Sym) or exp < 0 for atom, exp in m):
        return None
    return c, m


def _poly_view(node: Add):
    """List of (coeff, mono) for a sum of symbol monomials, else None."""
    out = []
    for op in node.ops:
        cm = _sym_mono(op)
        if cm is None:
            return None
        out.append(cm)
    return out


def _mono_rotate(m, vars: Sequence[str]):
    return tuple(sorted((( sym(vars[(vars.index(atom.name) + 1) % len(vars)]), exp)
                         for atom, exp in m),
                        key=lambda kv: kv[0].sort_key()))


def _amgm_cover_bounds(node: Add, asm: AssumptionSet, budget: MatchBudget,
                       deadline: float, cyc_vars: Optional[Sequence[str]]) -> List[SiteBound]:
    """Cancel part of a negative monomial with the geometric mean of
    positive monomials whose exponent vectors average to it."""
    view = _poly_view(node)
    if view is None:
        return []
    pos = [(c, m) for c, m in view if c > 0]
    negs = [(c, m) for c, m in view if c < 0]
    if not pos or not negs:
        return []
    if any(asm.sign_of(s) not in ("positive", "nonnegative")
           for s in free_symbols(node)):
        return []
    poly = {m: c for c, m in view}
    pos_index = {m: c for c, m in pos}
    cyc = None
    if cyc_vars and len(cyc_vars) >= 2:
        rotated = {_mono_rotate(m, cyc_vars): c for m, c in poly.items()}
        if rotated == poly:
            cyc = list(cyc_vars)
    out: List[SiteBound] = []
    for tc, tm in sorted(negs, key=lambda cm: _mono_key(cm[1])):
        candidates = _cover_candidates(tm, pos_index, budget, deadline)
        for subset in candidates:
            bundle = [(tm, subset)]
            if cyc:
                seen = {tuple(sorted(_mono_key(s) for s in subset))}
                cur_t, cur_s = tm, subset
                for _ in range(len(cyc) - 1):
                    cur_t = _mono_rotate(cur_t, cyc)
                    cur_s = [_mono_rotate(s, cyc) for s in cur_s]
                    key = tuple(sorted(_mono_key(s) for s in cur_s))
                    if key in seen:
                        continue
                    seen.add(key)
                    if all(s in pos_index for s in cur_s) and \
                            poly.get(cur_t, Fraction(0)) < 0:
                        bundle.append((cur_t, cur_s))
            usage: dict = {}
            for _, ss in bundle:
                for s in ss:
                    usage[s] = usage.get(s, 0) + 1
            n = len(subset)
            u = min(-poly[t] / n for t, _ in bundle)
            for s, times in usage.items():
                u = min(u, pos_index[s] / times)
            if u <= 0:
                continue
            new_poly = dict(poly)
            for t, ss in bundle:
                new_poly[t] = new_poly.get(t, Fraction(0)) + n * u
                if new_poly[t] == 0:
                    del new_poly[t]
                for s in ss:
                    new_poly[s] = new_poly.get(s, Fraction(0)) - u
                    if new_poly[s] == 0:
                        del new_poly[s]
            bound = from_poly(new_poly)
            name = "check_AM_GM_Mul2" if n == 2 else "check_AM_GM"
            eq = tuple((mono_expr(subset[0]), mono_expr(s)) for s in subset[1:])
            out.append(SiteBound(name, bound, -1, eq))
            if len(out) >= budget.max_results:
                return out
        if time.monotonic() > deadline:
            break
    return out


def _mono_key(m):
    return tuple((atom.skey, exp) for atom, exp in m)


def _cover_candidates(target, pos_index: dict, budget: MatchBudget,
                      deadline: float) -> list:
    """Subsets of positive monomials averaging exactly to the target."""
    sources = sorted(pos_index.keys(), key=_mono_key)
    found = []
    seen = set()

    def scaled(m, k: int):
        return tuple((atom, exp * k) for atom, exp in m)

    by_key = {m: m for m in sources}
    # pairs: m1 + m2 = 2*target
    want2 = scaled(target, 2)
    for i, m1 in enumerate(sources):
        m2 = _mono_diff(want2, m1)
        if m2 is None or _mono_key(m2) <= _mono_key(m1):
            continue
        if m2 in by_key:
            key = (_mono_key(m1), _mono_key(m2))
            if key not in seen:
                seen.add(key)
                found.append([m1, m2])
    # triples
    want3 = scaled(target, 3)
    for i, m1 in enumerate(sources):
        if time.monotonic() > deadline or len(found) >= budget.max_cover_subsets:
            break
        for m2 in sources[i:]:
            rest = _mono_diff(want3, mono_mul(m1, m2))
            if rest is None or _mono_key(rest) < _mono_key(m2):
                continue
            if rest in by_key:
                trip = sorted([m1, m2, rest], key=_mono_key)
                key = tuple(_mono_key(m) for m in trip)
                if key not in seen:
                    seen.add(key)
                    found.append(trip)
    # quadruples
    want4 = scaled(target, 4)
    for i, m1 in enumerate(sources):
        if time.monotonic() > deadline or len(found) >= budget.max_cover_subsets:
            break
        for j in range(i, len(sources)):
            m2 = sources[j]
            for k in range(j, len(sources)):
                m3 = sources[k]
                rest = _mono_diff(want4, mono_mul(mono_mul(m1, m2), m3))
                if rest is None or _mono_key(rest) < _mono_key(m3):
                    continue
                if rest in by_key:
                    quad = sorted([m1, m2, m3, rest], key=_mono_key)
                    key = tuple(_mono_key(m) for m in quad)
                    if key not in seen:
                        seen.add(key)
                        found.append(quad)
    return found[:budget.max_cover_subsets]


def _mono_diff(a, b):
    """a - b componentwise, or None if any exponent would go negative."""
    d = dict(a)
    for atom, exp in b:
        nv = d.get(atom, Fraction(0)) - exp
        if nv < 0:
            return None
        if nv == 0:
            d.pop(atom, None)
        else:
            d[atom] = nv
    return tuple(sorted(d.items(), key=lambda kv: kv[0].sort_key()))


def _mul_power_bounds(node: Mul, asm: AssumptionSet) -> List[SiteBound]:
    """Product bounds: x1*...*xn <= (x1^n+...+xn^n)/n, and the weighted
    form prod x^w <= ((sum w x)/W)^W."""
    coeff = Fraction(1)
    factors = []
    for f in node.ops:
        if isinstance(f, Const):
            coeff *= f.value
        else:
            factors.append(f)
    if len(factors) < 2:
        return []
    out: List[SiteBound] = []
    plain = []
    for f in factors:
        base, exp = (f.base, f.exp.value) if isinstance(f, Pow) and \
            isinstance(f.exp, Const) else (f, Fraction(1))
        plain.append((base, exp))
    if not all(_nonneg(b, asm) and x > 0 for b, x in plain):
        return []
    rel = +1 if coeff > 0 else -1
    if len(factors) >= 2:
        n = len(factors)
        core = muln([Const(Fraction(1, n)),
                     addn([pow_(f, Const(n)) for f in factors])])
        eq = tuple((factors[0], f) for f in factors[1:])
        name = "check_AM_GM_Mul2" if n == 2 else "check_AM_GM"
        out.append(SiteBound(name, muln([Const(coeff), core]), rel, eq))
    weights = [x for _, x in plain]
    if len(plain) >= 2 and any(w != 1 for w in weights):
        W = sum(weights, Fraction(0))
        mean = muln([Const(1 / W),
                     addn([muln([Const(w), b]) for b, w in plain])])
        core = pow_(mean, Const(W))
        eq = tuple((plain[0][0], b) for b, _ in plain[1:])
        out.append(SiteBound("weighted_AM_GM", muln([Const(coeff), core]), rel, eq))
    return out


def _weighted_amgm_bounds(node: Add, asm: AssumptionSet) -> List[SiteBound]:
    """w1 x1 + ... + wn xn >= W * prod x^(w/W) for positive weights."""
    terms = []
    for op in node.ops:
        if isinstance(op, Const):
            if op.value <= 0:
                return []
            terms.append((op.value, ONE))
            continue
        if isinstance(op, Mul) and isinstance(op.ops[0], Const):
            w = op.ops[0].value
            core = muln(op.ops[1:])
        else:
            w, core = Fraction(1), op
        if w <= 0 or not _nonneg(core, asm):
            return []
        terms.append((w, core))
    if len(terms) < 2:
        return []
    W = sum((w for w, _ in terms), Fraction(0))
    gm = muln([Const(W)] + [pow_(x, Const(w / W)) for w, x in terms])
    eq = tuple((terms[0][1], x) for _, x in terms[1:])
    return [SiteBound("weighted_AM_GM", gm, -1, eq)]


# ---------------------------------------------------------------------------
# Hölder


def _holder_bounds(node: Add, asm: AssumptionSet, ms: Sequence[int],
                   budget: MatchBudget) -> List[SiteBound]:
    terms = list(node.ops)
    if len(terms) < 2:
        return []
    bags = []
    for t in terms:
        coeff, num, den = _term_bags(t, asm)
        if coeff <= 0 or not den:
            return []
        bags.append((coeff, num, den))
    out: List[SiteBound] = []
    for m in ms:
        out.extend(_holder_fractional(node, bags, m, asm))
        out.extend(_holder_integer(node, bags, m, asm))
    return out


def _holder_fractional(node: Add, bags, m: int, asm: AssumptionSet) -> List[SiteBound]:
    """Terms c * d^(-1/m): bound (sum c)^((m+1)/m) * (sum c d)^(-1/m)."""
    want = Fraction(1, m)
    cs, ds = [], []
    for coeff, num, den in bags:
        frac = [(b, x) for b, x in den if x.denominator != 1]
        intp = [(b, x) for b, x in den if x.denominator == 1]
        if len(frac) != 1 or frac[0][1] != want:
            return []
        d = frac[0][0]
        c = muln([Const(coeff), _bag_expr(num)]
                 + [pow_(b, Const(-x)) for b, x in intp])
        if not _nonneg(c, asm) or not _nonneg(d, asm):
            return []
        cs.append(c)
        ds.append(d)
    sum_c = addn(cs)
    aux = addn([shallow_mul(c, d) for c, d in zip(cs, ds)])
    bound = muln([pow_(sum_c, Const(Fraction(m + 1, m))),
                  pow_(aux, Const(Fraction(-1, m)))])
    eq = tuple((ds[0], d) for d in ds[1:])
    inst = (f"we use Hölder's inequality: ({render(sum_c)})^{m + 1} <= "
            f"({render(node)})^{m} * ({render(aux)})",)
    return [SiteBound("holder", bound, -1, eq, inst)]


def _holder_integer(node: Add, bags, m: int, asm: AssumptionSet) -> List[SiteBound]:
    """Terms x^(m+1)/y^m via exponent completion: w_f = e mod (m+1)."""
    xs, ys = [], []
    x_coeffs, y_coeffs = [], []
    for coeff, num, den in bags:
        if any(x.denominator != 1 or x % m != 0 for _, x in den):
            return []
        if any(x.denominator != 1 for _, x in num):
            return []
        w = [(b, Fraction(int(x) % (m + 1))) for b, x in num
             if int(x) % (m + 1) != 0]
        x_bag = {}
        for b, x in num:
            x_bag[b] = x_bag.get(b, Fraction(0)) + x
        for b, x in w:
            x_bag[b] = x_bag.get(b, Fraction(0)) + x * m
        x_list = [(b, x / (m + 1)) for b, x in x_bag.items() if x != 0]
        if any(x.denominator != 1 for _, x in x_list):
            return []
        y_bag = {}
        for b, x in den:
            y_bag[b] = y_bag.get(b, Fraction(0)) + x / m
        for b, x in w:
            y_bag[b] = y_bag.get(b, Fraction(0)) + x
        y_list = [(b, x) for b, x in y_bag.items() if x != 0]
        cx = _frac_root(coeff, m + 1)
        if cx is None:
            return []
        if not all(_nonneg(b, asm) for b, _ in x_list + y_list):
            return []
        xs.append(sorted(x_list, key=lambda kv: kv[0].sort_key()))
        ys.append(sorted(y_list, key=lambda kv: kv[0].sort_key()))
        x_coeffs.append(cx)
        y_coeffs.append(Fraction(1))
    sum_x = _sum_with_extraction(xs, x_coeffs)
    sum_y = _sum_with_extraction(ys, y_coeffs)
    if sum_y == ZERO:
        return []
    bound = muln([pow_(sum_x, Const(m + 1)), pow_(sum_y, Const(-m))])
    eq = tuple((muln([_bag_expr(xs[0]), _bag_expr(ys[i])]),
                muln([_bag_expr(xs[i]), _bag_expr(ys[0])]))
               for i in range(1, len(xs)))
    inst = (f"we use Hölder's inequality: ({render(sum_x)})^{m + 1} <= "
            f"({render(node)})^{m} * ({render(sum_y)})" if m > 1 else
            f"we use Hölder's inequality: ({render(sum_x)})^2 <= "
            f"({render(node)}) * ({render(sum_y)})",)
    return [SiteBound("holder", bound, -1, eq, inst)]


def _frac_root(c: Fraction, n: int) -> Optional[Fraction]:
    from .poly import _frac_nth_root
    return _frac_nth_root(c, n)


# ---------------------------------------------------------------------------
# Jensen


def _au_candidates(nodes: tuple, limit: int = 48) -> list:
    """(template, hole value tuples) candidates, finest cut first."""
    first = nodes[0]
    if all(e == first for e in nodes[1:]):
        return [(first, [])]
    results = []
    kinds = {type(e) for e in nodes}
    if len(kinds) == 1 and not isinstance(first, (Sym, Const)):
        chs = [children(e) for e in nodes]
        if len({len(c) for c in chs}) == 1:
            per_child = [_au_candidates(tuple(c[i] for c in chs), limit)
                         for i in range(len(chs[0]))]
            total = 1
            for pc in per_child:
                total *= len(pc)
            if total <= limit:
                from .expr import rebuild
                for combo in itertools.product(*per_child):
                    holes: list = []
                    new_children = []
                    for tmpl, hs in combo:
                        if hs:
                            shift = len(holes)
                            ren = {f"_h{i}": sym(f"_h{i + shift}")
                                   for i in range(len(hs))}
                            tmpl = substitute(tmpl, ren)
                        holes.extend(hs)
                        new_children.append(tmpl)
                    results.append((rebuild(first, new_children), holes))
    results.append((sym("_h0"), [tuple(nodes)]))
    return results[:limit]


def find_main_fun(terms: Sequence[Expr]) -> Optional[Tuple[Expr, List[Expr]]]:
    """Anti-unify cyclic summands to a one-hole template f and arguments.

    Hole cuts are tried finest-first; secondary holes whose values are
    complements of the primary hole (v + t constant across summands) fold
    into K - x.  Templates needing more than one independent hole fail.
    """
    target = addn(list(terms))
    x = sym(_HOLE)
    for template, holes in _au_candidates(tuple(terms)):
        if not holes:
            continue
        primary = holes[0]
        mapping = {}
        ok = True
        for i, values in enumerate(holes):
            marker = f"_h{i}"
            if values == primary:
                mapping[marker] = x
                continue
            sums = {addn([values[k], primary[k]]) for k in range(len(values))}
            if len(sums) == 1:
                k_expr = sums.pop()
                if all(not n.startswith("_h") for n in free_symbols(k_expr)):
                    mapping[marker] = sub_(k_expr, x)
                    continue
            ok = False
            break
        if not ok:
            continue
        f = substitute(template, mapping)
        if _HOLE not in free_symbols(f):
            continue
        ts = list(primary)
        if addn([substitute(f, {_HOLE: t}) for t in ts]) == target:
            return f, ts
    return None


def _jensen_bounds(node: Add, asm: AssumptionSet, budget: MatchBudget) -> List[SiteBound]:
    terms = list(node.ops)
    n = len(terms)
    if n < 2:
        return []
    fm = find_main_fun(terms)
    if fm is None:
        return []
    f, ts = fm
    if _HOLE not in free_symbols(f):
        return []
    if not all(_nonneg(t, asm) for t in ts):
        return []
    try:
        f2 = differentiate(differentiate(f, _HOLE), _HOLE)
    except Exception:
        return []
    convexity = _convexity_verdict(f2, asm)
    if convexity == 0:
        return []
    mean = muln([Const(Fraction(1, n)), addn(ts)])
    bound = muln([Const(n), substitute(f, {_HOLE: mean})])
    eq = tuple((ts[0], t) for t in ts[1:])
    fx = render(substitute(f, {_HOLE: sym("x")}))
    if convexity > 0:
        inst = (f"For f(x) = {fx}, f''(x) > 0 on the domain.",
                f"we use Jensen's inequality: {render(bound)} <= {render(node)}")
        return [SiteBound("jensen", bound, -1, eq, inst)]
    inst = (f"For f(x) = {fx}, f''(x) < 0 on the domain.",
            f"we use Jensen's inequality: {render(node)} <= {render(bound)}")
    return [SiteBound("jensen", bound, +1, eq, inst)]


def _convexity_verdict(f2: Expr, asm: AssumptionSet) -> int:
    """+1 convex, -1 concave, 0 undecided/affine, on the positive domain."""
    if f2 == ZERO:
        return 0
    names = sorted(free_symbols(f2))
    asm2 = AssumptionSet.for_symbols(names, "positive",
                                     ordering=asm.ordering)
    s = infer_sign(f2, asm2)
    if s in (Sign.POSITIVE, Sign.NONNEG):
        return +1
    if s in (Sign.NEGATIVE, Sign.NONPOS):
        return -1
    # numeric fallback on 200 sampled points
    import numpy as np
    from .expr import compile_numeric
    fn = compile_numeric(f2, names)
    rng = np.random.default_rng(20240229)
    m = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=(len(names), 200)))
    with np.errstate(all="ignore"):
        v = np.asarray(fn(m), dtype=float)
    v = v[np.isfinite(v)]
    if v.size < 50:
        return 0
    if (v > 1e-12).all():
        return +1
    if (v < -1e-12).all():
        return -1
    return 0


# ---------------------------------------------------------------------------
# Muirhead


def _majorizes(a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
    if sum(a) != sum(b):
        return False
    pa = pb = 0
    for x, y in zip(a, b):
        pa += x
        pb += y
        if pa < pb:
            return False
    return True


def _sym_sum_tuples(k: int, total: int) -> List[Tuple[int, ...]]:
    out = []

    def rec(prefix, remaining, bound):
        if len(prefix) == k:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for v in range(min(bound, remaining), -1, -1):
            rec(prefix + [v], remaining - v, v)

    rec([], total, total)
    return out


def _stab(tpl: Tuple[int, ...]) -> int:
    """Number of permutations fixing each arrangement of the tuple."""
    out = 1
    for e in set(tpl):
        out *= _factorial(tpl.count(e))
    return out


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _sym_sum_expr(tpl: Tuple[int, ...], syms: Tuple[str, ...],
                  coeff: Fraction) -> Expr:
    """coeff * sum over distinct arrangements of tpl on syms."""
    terms = []
    for perm in sorted(set(itertools.permutations(tpl))):
        terms.append(muln([Const(coeff)] +
                          [pow_(sym(s), Const(e)) for s, e in zip(syms, perm)
                           if e != 0]))
    return addn(terms)


def _sym_family_of(ops: Sequence[Expr]):
    """If ops are exactly coeff * {all distinct arrangements of one
    exponent tuple}, return (coeff, syms, tuple)."""
    monos = []
    for op in ops:
        cm = _sym_mono(op)
        if cm is None:
            return None
        monos.append(cm)
    coeffs = {c for c, _ in monos}
    if len(coeffs) != 1:
        return None
    coeff = coeffs.pop()
    syms = tuple(sorted({atom.name for _, m in monos for atom, _ in m}))
    if len(syms) not in (2, 3):
        return None
    arrangements = set()
    for _, m in monos:
        d = {atom.name: exp for atom, exp in m}
        if any(exp.denominator != 1 for exp in d.values()):
            return None
        arrangements.add(tuple(int(d.get(s, 0)) for s in syms))
    if len(arrangements) != len(monos):
        return None
    tpl = tuple(sorted(next(iter(arrangements)), reverse=True))
    if arrangements != set(itertools.permutations(tpl)):
        return None
    return coeff, syms, tpl


def _muirhead_site_bounds(node: Add, asm: AssumptionSet,
                          budget: MatchBudget) -> List[SiteBound]:
    """Rewrite a complete symmetric family among the operands into a
    majorization-dominated (or dominating) symmetric sum.

    Coefficients scale by the arrangement multiplicity so that e.g.
    a*b*c maps to (a^3 + b^3 + c^3)/3 under (1,1,1) -> (3,0,0)."""
    ops = list(node.ops)
    if any(asm.sign_of(s) not in ("positive", "nonnegative")
           for s in free_symbols(node)):
        return []
    buckets: dict = {}
    for idx, op in enumerate(ops):
        cm = _sym_mono(op)
        if cm is None:
            continue
        c, m = cm
        if c <= 0 or any(exp.denominator != 1 for _, exp in m):
            continue
        nz = tuple(sorted((int(exp) for _, exp in m), reverse=True))
        buckets.setdefault((c, sum(nz), nz), []).append(idx)
    out: List[SiteBound] = []
    for (c, total, nz), idxs in buckets.items():
        fam = _sym_family_of([ops[i] for i in idxs])
        if fam is None:
            continue
        coeff, syms, tpl = fam
        if total > 9:
            continue
        rest = [op for i, op in enumerate(ops) if i not in idxs]
        base_coeff = coeff / _stab(tpl)  # coefficient per permutation
        for cand in _sym_sum_tuples(len(tpl), total):
            if cand == tpl:
                continue
            if _majorizes(tpl, cand):
                rel = -1  # dominated symmetric sum is a lower bound
            elif _majorizes(cand, tpl):
                rel = +1
            else:
                continue
            new = _sym_sum_expr(cand, syms, base_coeff * _stab(cand))
            bound = addn(rest + [new])
            eq = tuple((sym(syms[0]), sym(s)) for s in syms[1:])
            out.append(SiteBound("check_SimpMuirhead", bound, rel, eq))
            if len(out) >= budget.max_results:
                return out
    return out


def match_muirhead(lhs: Expr, rhs: Expr, asm: AssumptionSet) -> Optional[MatchResult]:
    """Full-statement comparator: lhs <= rhs by majorization of symmetric
    sums with equal per-permutation coefficient and total degree."""
    gl = _whole_sym_family(lhs)
    gr = _whole_sym_family(rhs)
    if gl is None or gr is None:
        return None
    cl, sl, tl = gl
    cr, sr, tr = gr
    if sl != sr or cl <= 0:
        return None
    if cl / _stab(tl) != cr / _stab(tr):
        return None
    if any(asm.sign_of(s) not in ("positive", "nonnegative") for s in sl):
        return None
    if _majorizes(tr, tl):
        return MatchResult("check_SimpMuirhead", (), LOWER, lhs,
                           tuple((sym(sl[0]), sym(s)) for s in sl[1:]))
    return None


def _whole_sym_family(e: Expr):
    """(coeff, syms, tuple) when e is a complete symmetric monomial sum."""
    try:
        p = to_poly(e, cap=256)
    except SizeLimitError:
        return None
    if not p:
        return None
    coeffs = set(p.values())
    if len(coeffs) != 1:
        return None
    coeff = coeffs.pop()
    syms = set()
    for m in p:
        for atom, exp in m:
            if not isinstance(atom, Sym) or exp.denominator != 1 or exp < 0:
                return None
            syms.add(atom.name)
    syms = tuple(sorted(syms))
    if len(syms) not in (2, 3):
        return None
    arrangements = set()
    for m in p:
        d = {atom.name: int(exp) for atom, exp in m}
        arrangements.add(tuple(d.get(s, 0) for s in syms))
    if len(arrangements) != len(p):
        return None
    tpl = tuple(sorted(next(iter(arrangements)), reverse=True))
    if arrangements != set(itertools.permutations(tpl)):
        return None
    return coeff, syms, tpl


# ---------------------------------------------------------------------------
# Schur


def match_schur(p: Expr, asm: AssumptionSet) -> Optional[MatchResult]:
    """p = lam * sum_cyc a^t (a-b)(a-c) + r with r coefficient-nonnegative,
    t in {1, 2}, lam in {1, 1/2, 1/3, 2, 3}; asserts p >= 0."""
    names = sorted(free_symbols(p))
    if len(names) != 3:
        return None
    if any(asm.sign_of(s) not in ("positive", "nonnegative") for s in names):
        return None
    try:
        pp = to_poly(p)
    except SizeLimitError:
        return None
    if not pp or not all(isinstance(atom, Sym) and exp.denominator == 1
                         for m in pp for atom, exp in m):
        return None
    a, b, c = (sym(n) for n in names)
    for t in (1, 2):
        schur = ZERO
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            schur = addn([schur, muln([pow_(x, Const(t)),
                                       sub_(x, y), sub_(x, z)])])
        sp = to_poly(schur)
        for lam in (Fraction(1), Fraction(1, 2), Fraction(1, 3),
                    Fraction(2), Fraction(3)):
            r = poly_add(pp, poly_scale(sp, -lam))
            if all(v >= 0 for v in r.values()):
                eq = ((a, b), (b, c))
                return MatchResult("check_schur", (), LOWER, p, eq,
                                   (f"Schur t={t}, lambda={lam}",))
    return None


# ---------------------------------------------------------------------------
# one-variable decision and the tangent line trick


def one_var_check(ineq: Inequality, lo: Optional[Fraction],
                  hi: Optional[Fraction]) -> Optional[bool]:
    """Exact decision of a univariate rational inequality on an open
    interval; None when undecidable (non-rational input)."""
    names = sorted(ineq.free_symbols())
    if len(names) > 1:
        return None
    if not names:
        small, large, strict = ineq.oriented()
        from .expr import evaluate
        try:
            sv, lv = evaluate(small, {}), evaluate(large, {})
        except Exception:
            return None
        return (sv < lv) if strict else (sv <= lv)
    var = names[0]
    small, large, strict = ineq.oriented()
    diff = together(sub_(large, small))
    from .poly import split_fraction
    num, den = split_fraction(diff)
    num_c = univariate_coeffs(num, var)
    if num_c is None:
        return None
    sign = _den_sign(den, var, lo, hi)
    if sign is None:
        return None
    cc = num_c if sign > 0 else [-x for x in num_c]
    return poly_sign_on_interval(cc, lo, hi, strict=strict)


def _den_sign(den, var: str, lo, hi) -> Optional[int]:
    """Sign of a factored denominator on the open interval, or None."""
    sign = 1
    for base, exp in den:
        bc = univariate_coeffs(base, var)
        if bc is None:
            return None
        if poly_sign_on_interval(bc, lo, hi, strict=True):
            s = 1
        elif poly_sign_on_interval([-x for x in bc], lo, hi, strict=True):
            s = -1
        else:
            return None
        if exp.denominator != 1:
            if s < 0:
                return None
            continue
        if s < 0 and int(exp) % 2 == 1:
            sign = -sign
    return sign


@dataclass
class TangentBound:
    line: Expr                 # alpha*x + beta
    direction: str             # "le": f <= line, "ge": f >= line
    certificate: Expr          # the signed together() residual
    x0: Fraction


def tangent_line_check(f: Expr, lo: Fraction, hi: Fraction,
                       x0: Fraction) -> Optional[TangentBound]:
    """Tangent of f at x0 when f - line has a (x-x0)^2-factored sign
    certificate on the open interval."""
    names = sorted(free_symbols(f))
    if len(names) != 1:
        return None
    var = names[0]
    x = sym(var)
    f0 = substitute(f, {var: Const(x0)})
    f1 = substitute(differentiate(f, var), {var: Const(x0)})
    if not isinstance(f0, Const) or not isinstance(f1, Const):
        return None
    line = addn([Const(f0.value - f1.value * x0), muln([f1, x])])
    diff = together(sub_(f, line))
    from .poly import split_fraction
    num, den = split_fraction(diff)
    num_c = univariate_coeffs(num, var)
    if num_c is None:
        return None
    den_sign = _den_sign(den, var, lo, hi)
    if den_sign is None:
        return None
    # factor out (x - x0)^2
    lin = [-x0, Fraction(1)]
    q1, r1 = upoly_divmod(num_c, lin)
    if r1:
        return None
    q2, r2 = upoly_divmod(q1, lin)
    if r2:
        return None
    if poly_sign_on_interval([v * den_sign for v in q2], lo, hi):
        return TangentBound(line, "ge", diff, x0)
    if poly_sign_on_interval([-v * den_sign for v in q2], lo, hi):
        return TangentBound(line, "le", diff, x0)
    return None


# ---------------------------------------------------------------------------
# site enumeration and orbit application


def side_bounds(e: Expr, asm: AssumptionSet, budget: MatchBudget,
                want: Tuple[str, ...] = (UPPER, LOWER),
                theorems: Tuple[str, ...] = ("amgm", "weighted", "holder",
                                             "jensen", "muirhead"),
                holder_ms: Sequence[int] = (1, 2, 3)) -> List[MatchResult]:
    """All theorem bounds of the expression e, orbit-applied, sorted."""
    if isinstance(e, (Const, Sym)):
        return []
    deadline = budget.deadline()
    start = time.monotonic()
    labeling = label_monotonicity(e, asm)
    order = [v for v in asm.cyclic_order if v in free_symbols(e)] or \
        sorted(free_symbols(e))
    cyc = len(order) >= 2 and is_cyclic_symmetric(e, order)
    results: List[MatchResult] = []
    truncated = False
    for path, node, lab in sorted(labeling.sites(), key=lambda s: s[0]):
        if time.monotonic() > deadline:
            truncated = True
            break
        sbs: List[SiteBound] = []
        if isinstance(node, Add):
            if "amgm" in theorems:
                sbs += _amgm_cover_bounds(node, asm, budget, deadline,
                                          order if cyc or path == () else None)
                sbs += _amgm_partition_bounds(node, asm, budget, deadline)
            if "weighted" in theorems:
                sbs += _weighted_amgm_bounds(node, asm)
            if "holder" in theorems:
                sbs += _holder_bounds(node, asm, holder_ms, budget)
            if "jensen" in theorems:
                sbs += _jensen_bounds(node, asm, budget)
            if "muirhead" in theorems:
                sbs += _muirhead_site_bounds(node, asm, budget)
        elif isinstance(node, Mul):
            if "amgm" in theorems or "weighted" in theorems:
                sbs += [sb for sb in _mul_power_bounds(node, asm)
                        if (sb.name.startswith("check_AM_GM") and "amgm" in theorems)
                        or (sb.name == "weighted_AM_GM" and "weighted" in theorems)]
        for sb in sbs:
            if sb.bound == node:
                continue
            direction = UPPER if lab * sb.rel > 0 else LOWER
            if direction not in want:
                continue
            produced, eq = _apply_at_orbit(e, path, node, sb, order, cyc)
            if produced == e:
                continue
            results.append(MatchResult(sb.name, path, direction, produced,
                                       eq, sb.inst,
                                       time.monotonic() - start, truncated))
    uniq = {}
    for r in results:
        key = (canonical_hash(r.produced), r.direction)
        if key not in uniq:
            uniq[key] = r
    out = sorted(uniq.values(), key=lambda r: r.sort_token())
    if len(out) > budget.max_results:
        out = out[:budget.max_results]
        for r in out:
            r.truncated = True
    return out


def _apply_at_orbit(root: Expr, path: Tuple[int, ...], node: Expr,
                    sb: SiteBound, order: Sequence[str], cyc: bool):
    """Replace the site; on a cyclically symmetric root, replace the whole
    orbit of the member containing the site."""
    eq = sb.eq
    if not path or not cyc or not isinstance(root, (Add, Mul)):
        return replace_at(root, path, sb.bound), eq
    i = path[0]
    member = children(root)[i]
    new_member = replace_at(member, path[1:], sb.bound)
    orbit = {}
    ok = True
    ops = list(children(root))
    keys = {op._key: j for j, op in enumerate(ops)}
    for k in range(len(order)):
        rm = rotate(member, order, k)
        j = keys.get(rm._key)
        if j is None:
            ok = False
            break
        orbit[j] = rotate(new_member, order, k)
    if not ok or len(orbit) <= 1:
        return replace_at(root, path, sb.bound), eq
    new_ops = [orbit.get(j, op) for j, op in enumerate(ops)]
    from .expr import rebuild
    produced = rebuild(root, new_ops)
    all_eq = list(eq)
    for k in range(1, len(order)):
        for l, r in eq:
            all_eq.append((rotate(l, order, k), rotate(r, order, k)))
    seen = set()
    dedup = []
    for l, r in all_eq:
        if l == r:
            continue
        key = (l._key, r._key)
        if key not in seen:
            seen.add(key)
            dedup.append((l, r))
    return produced, tuple(dedup)


# ---------------------------------------------------------------------------
# spec-level wrappers


def match_amgm(e: Expr, asm: AssumptionSet, labeling=None,
               budget: Optional[MatchBudget] = None) -> List[MatchResult]:
    return side_bounds(e, asm, budget or MatchBudget(), theorems=("amgm",))


def match_weighted_amgm(e: Expr, asm: AssumptionSet, labeling=None,
                        budget: Optional[MatchBudget] = None) -> List[MatchResult]:
    return side_bounds(e, asm, budget or MatchBudget(), theorems=("weighted",))


def match_holder(e: Expr, asm: AssumptionSet, labeling=None,
                 budget: Optional[MatchBudget] = None, m: int = 1) -> List[MatchResult]:
    return side_bounds(e, asm, budget or MatchBudget(), theorems=("holder",),
                       holder_ms=(m,))


def match_jensen(e: Expr, asm: AssumptionSet,
                 budget: Optional[MatchBudget] = None) -> List[MatchResult]:
    return side_bounds(e, asm, budget or MatchBudget(), theorems=("jensen",))


# ---------------------------------------------------------------------------
# full AM-GM cover certificate (used by the triviality ladder)


def amgm_cover_certificate(p: GPoly, budget: Optional[MatchBudget] = None):
    """Greedy proof that the polynomial is >= 0 by cancelling every
    negative monomial against geometric means of positive ones.
    Returns ("check_AM_GM" | "check_AM_GM_Mul2") or None."""
    budget = budget or MatchBudget()
    deadline = budget.deadline()
    if not p:
        return "check_AM_GM"
    if any(not isinstance(atom, Sym) or exp < 0 for m in p for atom, exp in m):
        return None
    work = dict(p)
    sizes = set()
    for _ in range(64):
        negs = sorted([(c, m) for m, c in work.items() if c < 0],
                      key=lambda cm: _mono_key(cm[1]))
        if not negs:
            return "check_AM_GM_Mul2" if sizes == {2} else "check_AM_GM"
        if time.monotonic() > deadline:
            return None
        progress = False
        for tc, tm in negs:
            pos_index = {m: c for m, c in work.items() if c > 0}
            cands = _cover_candidates(tm, pos_index, budget, deadline)
            for subset in cands:
                n = len(subset)
                counts: dict = {}
                for s in subset:
                    counts[s] = counts.get(s, 0) + 1
                u = min([-work[tm] / n] +
                        [pos_index[s] / cnt for s, cnt in counts.items()])
                if u <= 0:
                    continue
                work[tm] += n * u
                if work[tm] == 0:
                    del work[tm]
                for s, cnt in counts.items():
                    work[s] -= u * cnt
                    if work[s] == 0:
                        del work[s]
                sizes.add(n)
                progress = True
                break
            if progress:
                break
        if not progress:
            return None
    return None
