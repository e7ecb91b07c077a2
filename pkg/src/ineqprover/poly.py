"""Generalized polynomial arithmetic over expression atoms.

A monomial maps atoms (symbols, or opaque subtrees such as ``(a+b)^(1/2)``)
to rational exponents; a polynomial maps monomials to rational
coefficients.  This is the workhorse behind ``expand``, ``together``,
factor extraction and the univariate decision procedures.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .expr import (Add, Const, Expr, Mul, Pow, SizeLimitError, Sym, ZERO, ONE,
                   addn, muln, pow_)

DEFAULT_TERM_CAP = 5000

Mono = tuple  # ((atom Expr, Fraction exp), ...) sorted by atom sort key
GPoly = dict  # Mono -> Fraction

MONO_ONE: Mono = ()


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for atom, exp in b:
        cur = merged.get(atom)
        ne = exp if cur is None else cur + exp
        if ne == 0:
            merged.pop(atom, None)
        else:
            merged[atom] = ne
    return tuple(sorted(merged.items(), key=lambda kv: kv[0].sort_key()))


def mono_div(a: Mono, b: Mono) -> Mono:
    return mono_mul(a, tuple((atom, -exp) for atom, exp in b))


def mono_divides(b: Mono, a: Mono) -> bool:
    da = dict(a)
    return all(da.get(atom, Fraction(0)) >= exp for atom, exp in b)


def mono_degree(m: Mono) -> Fraction:
    return sum((exp for _, exp in m), Fraction(0))


def mono_expr(m: Mono) -> Expr:
    if not m:
        return ONE
    return muln([pow_(atom, Const(exp)) for atom, exp in m])


def poly_add(p: GPoly, q: GPoly) -> GPoly:
    out = dict(p)
    for m, c in q.items():
        nc = out.get(m, Fraction(0)) + c
        if nc == 0:
            out.pop(m, None)
        else:
            out[m] = nc
    return out


def poly_neg(p: GPoly) -> GPoly:
    return {m: -c for m, c in p.items()}


def poly_scale(p: GPoly, c: Fraction, m: Mono = MONO_ONE) -> GPoly:
    if c == 0:
        return {}
    return {mono_mul(k, m): v * c for k, v in p.items()}


def poly_mul(p: GPoly, q: GPoly, cap: int = DEFAULT_TERM_CAP) -> GPoly:
    out: GPoly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            nc = out.get(m, Fraction(0)) + c1 * c2
            if nc == 0:
                out.pop(m, None)
            else:
                out[m] = nc
        if len(out) > cap:
            raise SizeLimitError(f"polynomial exceeds {cap} terms")
    return out


def poly_pow(p: GPoly, n: int, cap: int = DEFAULT_TERM_CAP) -> GPoly:
    out: GPoly = {MONO_ONE: Fraction(1)}
    base = p
    while n:
        if n & 1:
            out = poly_mul(out, base, cap)
        n >>= 1
        if n:
            base = poly_mul(base, base, cap)
    return out


def to_poly(e: Expr, cap: int = DEFAULT_TERM_CAP) -> GPoly:
    """Distribute into a sum of generalized monomials.

    Positive integer powers of sums expand; negative or fractional powers
    of composite bases become atoms keyed by the base, so a monomial can
    carry entries like ((a+b), -2) or (a, 1/2).
    """
    if isinstance(e, Const):
        return {MONO_ONE: e.value} if e.value != 0 else {}
    if isinstance(e, Sym):
        return {((e, Fraction(1)),): Fraction(1)}
    if isinstance(e, Add):
        out: GPoly = {}
        for op in e.ops:
            out = poly_add(out, to_poly(op, cap))
            if len(out) > cap:
                raise SizeLimitError(f"polynomial exceeds {cap} terms")
        return out
    if isinstance(e, Mul):
        out = {MONO_ONE: Fraction(1)}
        for op in e.ops:
            out = poly_mul(out, to_poly(op, cap), cap)
        return out
    if isinstance(e, Pow):
        if isinstance(e.exp, Const):
            ev = e.exp.value
            if ev.denominator == 1 and ev > 0 and isinstance(e.base, Add):
                return poly_pow(to_poly(e.base, cap), int(ev), cap)
            return {((e.base, ev),): Fraction(1)}
        return {((e, Fraction(1)),): Fraction(1)}
    raise TypeError(e)


def from_poly(p: GPoly) -> Expr:
    if not p:
        return ZERO
    terms = []
    for m, c in p.items():
        factors = [Const(c)] if c != 1 else []
        factors.extend(pow_(atom, Const(exp)) for atom, exp in m)
        terms.append(muln(factors) if factors else ONE)
    return addn(terms)


def expand(e: Expr, cap: int = DEFAULT_TERM_CAP) -> Expr:
    """Fully distributed sum-of-monomials form for the polynomial parts.

    Recurses into the bases of fractional and negative powers (the proof
    traces expand denominators too).  Raises SizeLimitError past the cap.
    """
    return from_poly(to_poly(_expand_bases(e, cap), cap))


def _expand_bases(e: Expr, cap: int) -> Expr:
    if isinstance(e, (Const, Sym)):
        return e
    if isinstance(e, Pow):
        base = _expand_bases(e.base, cap)
        ev = e.exp
        if isinstance(ev, Const) and (ev.value < 0 or ev.value.denominator != 1):
            composite = isinstance(base, Add) or (
                isinstance(base, Mul) and any(isinstance(f, Add) for f in base.ops))
            if composite:
                if ev.value < 0:
                    # denominators absorb the power: X^(-p/q) -> (X^p)^(-1/q)
                    p = -ev.value
                    base = from_poly(poly_pow(to_poly(base, cap),
                                              p.numerator, cap))
                    ev = Const(Fraction(-1, p.denominator))
                else:
                    base = from_poly(to_poly(base, cap))
        return pow_(base, ev)
    if isinstance(e, Add):
        return addn([_expand_bases(op, cap) for op in e.ops])
    if isinstance(e, Mul):
        return muln([_expand_bases(op, cap) for op in e.ops])
    return e


def poly_is_symbol_monomials(p: GPoly) -> bool:
    """Every atom a bare symbol with nonnegative exponent."""
    return all(isinstance(atom, Sym) and exp > 0
               for m in p for atom, exp in m)


def poly_content(p: GPoly) -> Fraction:
    it = iter(p.values())
    try:
        first = next(it)
    except StopIteration:
        return Fraction(1)
    num = abs(first.numerator)
    den = first.denominator
    for c in it:
        num = math.gcd(num, abs(c.numerator))
        den = math.lcm(den, c.denominator)
    return Fraction(num, den) if num else Fraction(1)


def poly_common_mono(p: GPoly) -> Mono:
    """Componentwise minimum over all monomials (common monomial factor)."""
    if not p:
        return MONO_ONE
    monos = list(p.keys())
    mins: dict = {a: x for a, x in monos[0] if x > 0}
    for m in monos[1:]:
        if not mins:
            return MONO_ONE
        dm = dict(m)
        for atom in list(mins):
            v = min(mins[atom], dm.get(atom, Fraction(0)))
            if v <= 0:
                del mins[atom]
            else:
                mins[atom] = v
    return tuple(sorted(mins.items(), key=lambda kv: kv[0].sort_key()))


def _mono_order_key(m: Mono):
    """Graded-lex key: smaller key = larger monomial (use min() for lead)."""
    return (-mono_degree(m), tuple((atom.sort_key(), -exp) for atom, exp in m))


def _mono_lt(a: Mono, b: Mono) -> bool:
    """a strictly below b in the graded-lex order."""
    return _mono_order_key(a) > _mono_order_key(b)


def _lead(p: GPoly):
    m = min(p.keys(), key=_mono_order_key)
    return m, p[m]


def poly_divide_exact(p: GPoly, d: GPoly, max_steps: int = 20000) -> Optional[GPoly]:
    """Quotient of p by d when the division is exact, else None."""
    if not d:
        return None
    if not p:
        return {}
    dm, dc = _lead(d)
    q: GPoly = {}
    r = dict(p)
    steps = 0
    while r:
        steps += 1
        if steps > max_steps:
            return None
        rm, rc = _lead(r)
        if not mono_divides(dm, rm):
            return None
        qm = mono_div(rm, dm)
        if any(exp < 0 for _, exp in qm):
            return None
        qc = rc / dc
        q[qm] = q.get(qm, Fraction(0)) + qc
        r = poly_add(r, poly_scale(d, -qc, qm))
    return q


def poly_nth_root(p: GPoly, n: int, max_terms: int = 400) -> Optional[GPoly]:
    """Exact n-th root of a polynomial, or None."""
    if not p:
        return {}
    lm, lc = _lead(p)
    root_c = _frac_nth_root(lc, n)
    if root_c is None:
        return None
    if any(exp.denominator != 1 or exp % n != 0 for _, exp in lm):
        return None
    rm = tuple((atom, exp / n) for atom, exp in lm)
    r: GPoly = {rm: root_c}
    if len(p) == 1:
        return r
    denom_c = n * root_c ** (n - 1)
    denom_m = tuple((atom, exp * (n - 1)) for atom, exp in rm)
    for _ in range(max_terms):
        diff = poly_add(p, poly_neg(poly_pow(r, n)))
        if not diff:
            return r
        dm, dc = _lead(diff)
        if not mono_divides(denom_m, dm):
            return None
        tm = mono_div(dm, denom_m)
        if any(exp < 0 for _, exp in tm) or not _mono_lt(tm, rm):
            return None
        r[tm] = r.get(tm, Fraction(0)) + dc / denom_c
    return None


def _frac_nth_root(c: Fraction, n: int) -> Optional[Fraction]:
    if c < 0:
        if n % 2 == 0:
            return None
        r = _frac_nth_root(-c, n)
        return -r if r is not None else None

    from .expr import _int_nth_root
    rn = _int_nth_root(c.numerator, n)
    rd = _int_nth_root(c.denominator, n)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


# ---------------------------------------------------------------------------
# factoring: content + common monomial + perfect powers


class Factored:
    """content * prod(base^exp); bases are canonical Exprs."""

    __slots__ = ("content", "factors")

    def __init__(self, content: Fraction, factors: list):
        self.content = content
        self.factors = factors  # list[(Expr, Fraction)]

    def expr(self) -> Expr:
        parts = [Const(self.content)] if self.content != 1 else []
        parts += [pow_(b, Const(e)) for b, e in self.factors]
        return muln(parts) if parts else ONE

    def __repr__(self):
        return f"Factored({self.content}, {self.factors})"


def _merge_factors(factors: list, new: Iterable):
    for base, exp in new:
        for i, (b, x) in enumerate(factors):
            if b == base:
                factors[i] = (b, x + exp)
                break
        else:
            factors.append((base, exp))


def factor_terms(e: Expr, detect_powers: bool = True) -> Factored:
    """Multiplicative split: rational content, common monomial of sums,
    perfect square/cube cores.  No general multivariate factoring."""
    if isinstance(e, Const):
        return Factored(e.value, [])
    if isinstance(e, Sym):
        return Factored(Fraction(1), [(e, Fraction(1))])
    if isinstance(e, Mul):
        content = Fraction(1)
        factors: list = []
        for op in e.ops:
            f = factor_terms(op, detect_powers)
            content *= f.content
            _merge_factors(factors, f.factors)
        return Factored(content, factors)
    if isinstance(e, Pow) and isinstance(e.exp, Const):
        inner = factor_terms(e.base, detect_powers)
        ev = e.exp.value
        content = Fraction(1)
        factors = []
        if inner.content != 1:
            if ev.denominator == 1:
                content = inner.content ** int(ev)
            else:
                factors.append((Const(inner.content), ev))
        _merge_factors(factors, [(b, x * ev) for b, x in inner.factors])
        return Factored(content, factors)
    if isinstance(e, Add):
        try:
            p = to_poly(e)
        except SizeLimitError:
            return Factored(Fraction(1), [(e, Fraction(1))])
        content = poly_content(p)
        if from_poly(p) != e:
            # atoms collapsed differently; stay conservative
            return Factored(Fraction(1), [(e, Fraction(1))])
        cm = poly_common_mono(p)
        core = poly_scale(p, 1 / content)
        if cm != MONO_ONE:
            core = {mono_div(m, cm): c for m, c in core.items()}
        factors = [(atom, exp) for atom, exp in cm]
        core_expr = from_poly(core)
        if detect_powers and isinstance(core_expr, Add):
            for n in (2, 3):
                root = poly_nth_root(core, n)
                if root is not None and len(root) > 1:
                    factors.append((from_poly(root), Fraction(n)))
                    core_expr = None
                    break
        if core_expr is not None and core_expr != ONE:
            if isinstance(core_expr, Mul):
                sub = factor_terms(core_expr, detect_powers=False)
                content *= sub.content
                _merge_factors(factors, sub.factors)
            else:
                factors.append((core_expr, Fraction(1)))
        return Factored(content, [(b, x) for b, x in factors if x != 0])
    return Factored(Fraction(1), [(e, Fraction(1))])


# ---------------------------------------------------------------------------
# together


def together(e: Expr, cap: int = DEFAULT_TERM_CAP) -> Expr:
    """Combine into a single fraction with cancelled common factors."""
    num, den = _frac(e, cap)
    return _rebuild_frac(num, den)


def split_fraction(e: Expr, cap: int = DEFAULT_TERM_CAP):
    """(numerator Expr, denominator factor list [(base, exp > 0), ...])."""
    return _frac(e, cap)


def _rebuild_frac(num: Expr, den: list) -> Expr:
    if not den:
        return num
    return muln([num] + [pow_(b, Const(-x)) for b, x in den])


def _bag_insert(bag: list, base: Expr, exp: Fraction):
    """Insert base^exp (exp > 0) into a denominator bag, factored."""
    if isinstance(base, Const):
        if base.value != 1:
            _merge_factors(bag, [(base, exp)])
        return
    f = factor_terms(base)
    if f.content != 1:
        _merge_factors(bag, [(Const(f.content), exp)])
    _merge_factors(bag, [(b, x * exp) for b, x in f.factors])


def _frac(e: Expr, cap: int):
    if isinstance(e, (Const, Sym)):
        return e, []
    if isinstance(e, Pow):
        if isinstance(e.exp, Const):
            ev = e.exp.value
            n, d = _frac(e.base, cap)
            if ev > 0:
                den: list = []
                for b, x in d:
                    _merge_factors(den, [(b, x * ev)])
                return pow_(n, Const(ev)), den
            ev = -ev
            den = []
            _bag_insert(den, n, ev)
            num = muln([pow_(b, Const(x * ev)) for b, x in d]) if d else ONE
            return num, den
        return e, []
    if isinstance(e, Mul):
        nums = []
        den = []
        for op in e.ops:
            n, d = _frac(op, cap)
            nums.append(n)
            for b, x in d:
                _merge_factors(den, [(b, x)])
        return _cancel(muln(nums), den, cap)
    if isinstance(e, Add):
        parts = [_frac(op, cap) for op in e.ops]
        lcm: list = []
        for _, d in parts:
            for b, x in d:
                for i, (bb, xx) in enumerate(lcm):
                    if bb == b:
                        lcm[i] = (bb, max(xx, x))
                        break
                else:
                    lcm.append((b, x))
        if not lcm:
            return addn([n for n, _ in parts]), []
        terms = []
        for n, d in parts:
            dd = {b: x for b, x in d}
            cof = [pow_(b, Const(x - dd.get(b, Fraction(0))))
                   for b, x in lcm if x != dd.get(b, Fraction(0))]
            terms.append(muln([n] + cof))
        return _cancel(addn(terms), lcm, cap)
    return e, []


def _cancel(num: Expr, den: list, cap: int):
    """Cancel denominator factors against the expanded numerator."""
    den = [(b, x) for b, x in den if x != 0]
    if num == ZERO:
        return ZERO, []
    if not den:
        return num, den
    try:
        p = to_poly(num, cap)
    except SizeLimitError:
        return num, den
    content = poly_content(p)
    if from_poly(p) != num:
        return num, den
    p = poly_scale(p, 1 / content)
    out_den = []
    cm = dict(poly_common_mono(p))
    for b, x in den:
        if isinstance(b, Const):
            if x.denominator == 1:
                content /= b.value ** int(x)
                continue
            out_den.append((b, x))
            continue
        if isinstance(b, Sym):
            avail = cm.get(b, Fraction(0))
            take = min(avail, x)
            if take > 0:
                p = {mono_div(m, ((b, take),)): c for m, c in p.items()}
                cm[b] = avail - take
                x -= take
            if x > 0:
                out_den.append((b, x))
            continue
        bp = None
        try:
            bp = to_poly(b, cap)
        except SizeLimitError:
            pass
        if bp is not None:
            while x >= 1:
                q = poly_divide_exact(p, bp)
                if q is None:
                    break
                p = q
                x -= 1
        if x > 0:
            out_den.append((b, x))
    num_expr = from_poly(poly_scale(p, content))
    return num_expr, out_den


# ---------------------------------------------------------------------------
# degree / homogeneity


def total_degree(e: Expr) -> Optional[Fraction]:
    """Degree under X -> t*X scaling of every symbol; None when some sum
    mixes degrees (not homogeneous)."""
    if isinstance(e, Const):
        return Fraction(0)
    if isinstance(e, Sym):
        return Fraction(1)
    if isinstance(e, Mul):
        total = Fraction(0)
        for op in e.ops:
            d = total_degree(op)
            if d is None:
                return None
            total += d
        return total
    if isinstance(e, Pow):
        if not isinstance(e.exp, Const):
            return None
        d = total_degree(e.base)
        return None if d is None else d * e.exp.value
    if isinstance(e, Add):
        degs = set()
        for op in e.ops:
            d = total_degree(op)
            if d is None:
                return None
            degs.add(d)
        return degs.pop() if len(degs) == 1 else None
    raise TypeError(e)


def is_homogeneous_pair(lhs: Expr, rhs: Expr) -> bool:
    dl = total_degree(lhs)
    dr = total_degree(rhs)
    if dl is None or dr is None:
        return False
    if isinstance(lhs, Const):
        dl = dr
    if isinstance(rhs, Const):
        dr = dl
    return dl == dr


# ---------------------------------------------------------------------------
# univariate polynomials, Sturm sequences, interval sign decisions


def univariate_coeffs(e: Expr, var: str, cap: int = DEFAULT_TERM_CAP):
    """Dense coefficients c0..cn of a polynomial in one symbol, or None."""
    try:
        p = to_poly(e, cap)
    except SizeLimitError:
        return None
    coeffs: dict = {}
    for m, c in p.items():
        deg = 0
        for atom, exp in m:
            if isinstance(atom, Sym) and atom.name == var \
                    and exp.denominator == 1 and exp > 0:
                deg = int(exp)
            else:
                return None
        coeffs[deg] = coeffs.get(deg, Fraction(0)) + c
    n = max(coeffs) if coeffs else 0
    return [coeffs.get(i, Fraction(0)) for i in range(n + 1)]


def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def upoly_eval(c: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def upoly_deriv(c: Sequence[Fraction]) -> list:
    return [c[i] * i for i in range(1, len(c))]


def upoly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    db, lb = len(b) - 1, b[-1]
    while a and len(a) - 1 >= db:
        da, la = len(a) - 1, a[-1]
        shift = da - db
        coef = la / lb
        q[shift] += coef
        for i in range(len(b)):
            a[shift + i] -= coef * b[i]
        a = _trim(a)
    return _trim(q), a


def upoly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def upoly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = upoly_divmod(a, b)
        a, b = b, r
    if a:
        lc = a[-1]
        a = [x / lc for x in a]
    return a


def squarefree_decomposition(c: Sequence[Fraction]) -> list:
    """Yun's algorithm: [(factor, multiplicity), ...], factors monic-ish."""
    p = _trim(list(c))
    if len(p) <= 1:
        return []
    dp = upoly_deriv(p)
    g = upoly_gcd(p, dp)
    if len(g) <= 1:
        return [(p, 1)]
    out = []
    ci, _ = upoly_divmod(p, g)
    di, _ = upoly_divmod(dp, g)
    di = _trim([x - y for x, y in
                zip_longest_frac(di, upoly_deriv(ci))])
    i = 1
    while len(ci) > 1:
        a = upoly_gcd(ci, di)
        if len(a) > 1:
            out.append((a, i))
        ci, _ = upoly_divmod(ci, a)
        da, _ = upoly_divmod(di, a)
        di = _trim([x - y for x, y in
                    zip_longest_frac(da, upoly_deriv(ci))])
        i += 1
    return out


def zip_longest_frac(a: Sequence[Fraction], b: Sequence[Fraction]):
    n = max(len(a), len(b))
    for i in range(n):
        yield (a[i] if i < len(a) else Fraction(0),
               b[i] if i < len(b) else Fraction(0))


def upoly_squarefree(c: Sequence[Fraction]) -> list:
    parts = squarefree_decomposition(c)
    if not parts:
        return _trim(list(c))
    out = [Fraction(1)]
    for f, _ in parts:
        out = upoly_mul(out, f)
    return out


def _odd_multiplicity_part(c: Sequence[Fraction]) -> list:
    parts = squarefree_decomposition(c)
    out = [Fraction(1)]
    for f, mult in parts:
        if mult % 2 == 1:
            out = upoly_mul(out, f)
    return out


def sturm_sequence(c: Sequence[Fraction]) -> list:
    seq = [_trim(list(c)), _trim(upoly_deriv(c))]
    while seq[-1]:
        _, r = upoly_divmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-x for x in r])
    return [s for s in seq if s]


def _sign_variations(seq: list, x: Fraction) -> int:
    signs = []
    for p in seq:
        v = upoly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_root_bound(c: Sequence[Fraction]) -> Fraction:
    lead = c[-1]
    m = max((abs(x / lead) for x in c[:-1]), default=Fraction(0))
    return m + 1


def count_roots_open(c: Sequence[Fraction], lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots of c in the open interval (lo, hi), exactly."""
    cc = _trim(list(c))
    if len(cc) <= 1:
        return 0
    sf = upoly_squarefree(cc)
    if len(sf) <= 1:
        return 0
    seq = sturm_sequence(sf)
    n = _sign_variations(seq, lo) - _sign_variations(seq, hi)
    if upoly_eval(sf, hi) == 0:
        n -= 1
    return n


def poly_sign_on_interval(c: Sequence[Fraction], lo: Optional[Fraction],
                          hi: Optional[Fraction], strict: bool = False) -> bool:
    """Decide p(x) >= 0 (or > 0) on the open interval, exactly.

    None endpoints mean unbounded.  Never returns an unsound True.
    """
    cc = _trim(list(c))
    if not cc:
        return not strict
    if len(cc) == 1:
        return cc[0] > 0 or (cc[0] == 0 and not strict)
    bound = cauchy_root_bound(cc)
    lo_x = lo if lo is not None else -bound - 1
    hi_x = hi if hi is not None else bound + 1
    if lo_x >= hi_x:
        return True
    odd = _odd_multiplicity_part(cc)
    if len(odd) > 1 and count_roots_open(odd, lo_x, hi_x) > 0:
        return False
    if strict:
        sf = upoly_squarefree(cc)
        if count_roots_open(sf, lo_x, hi_x) > 0:
            return False
    sf = upoly_squarefree(cc)
    x = _interior_nonroot(sf, lo_x, hi_x)
    v = upoly_eval(cc, x)
    return v > 0 or (v == 0 and not strict)


def _interior_nonroot(sf: list, lo: Fraction, hi: Fraction) -> Fraction:
    x = (lo + hi) / 2
    step = (hi - lo) / 4
    for _ in range(200):
        if upoly_eval(sf, x) != 0:
            return x
        x = x + step
        step = step / 3
        if x >= hi:
            x = lo + (hi - lo) / 7
    raise ArithmeticError("could not find interior non-root")


def rational_roots(c: Sequence[Fraction]) -> list:
    """All rational roots of the polynomial, ascending."""
    cc = _trim(list(c))
    if len(cc) <= 1:
        return []
    den = math.lcm(*[x.denominator for x in cc])
    ic = [int(x * den) for x in cc]
    roots = set()
    shift = 0
    while ic and ic[0] == 0:
        roots.add(Fraction(0))
        ic = ic[1:]
        shift += 1
    if not ic:
        return sorted(roots)
    g = math.gcd(*[abs(x) for x in ic if x != 0])
    ic = [x // g for x in ic]
    lead, tail = ic[-1], ic[0]
    fc = [Fraction(x) for x in ic]
    for pnum in _divisors(abs(tail)):
        for qden in _divisors(abs(lead)):
            for cand in (Fraction(pnum, qden), Fraction(-pnum, qden)):
                if upoly_eval(fc, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def _divisors(n: int) -> list:
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return sorted(out)
