"""Immutable expression trees with exact rational constants.

Nodes: rational constants, symbols, n-ary sums/products, powers.  All
construction goes through the smart constructors (``addn``, ``muln``,
``pow_`` ...), which enforce the canonical form:

* Add/Mul operands are flattened, sorted by a total node order, and carry
  at most one leading constant; like terms and like bases are merged.
* A sum whose coefficients share a rational content != 1 is pulled apart
  into ``content * sum``.
* Rational exponents distribute over monomial factors, and nested powers
  merge whenever that is sound on the nonnegative orthant (the domain the
  whole engine works in).  The one deliberate exception is ``(x^2)^(1/2)``,
  which is kept intact so it can encode ``|x|``.

Equality of canonical trees is structural and is the equality used
everywhere downstream.
"""

from __future__ import annotations

import hashlib
import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

Number = Union[int, float, Fraction]

HASH_SEED = b"ineqprover-1"


class ExprError(Exception):
    """Base class for expression errors."""


class ParseError(ExprError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


class DomainError(ExprError):
    """Evaluation outside the real domain (zero denominator, bad radicand)."""


class SizeLimitError(ExprError):
    """Recoverable: an expansion or combination exceeded its term cap."""


# ---------------------------------------------------------------------------
# nodes


class Expr:
    __slots__ = ("_key", "_hash", "_skey")
    kind = "?"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<{self.kind} {render(self)}>"

    def sort_key(self):
        return self._key

    @property
    def skey(self) -> str:
        """Deterministic serialization, stable across processes."""
        s = self._skey
        if s is None:
            s = _build_skey(self)
            object.__setattr__(self, "_skey", s)
        return s


class Const(Expr):
    __slots__ = ("value",)
    kind = "const"

    def __init__(self, value):
        v = value if isinstance(value, Fraction) else Fraction(value)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "_key", (0, v))
        object.__setattr__(self, "_hash", hash((0, v)))
        object.__setattr__(self, "_skey", None)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __reduce__(self):
        return (Const, (self.value,))

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1


class Sym(Expr):
    __slots__ = ("name",)
    kind = "sym"

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_key", (1, name))
        object.__setattr__(self, "_hash", hash((1, name)))
        object.__setattr__(self, "_skey", None)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __reduce__(self):
        return (Sym, (self.name,))


class Add(Expr):
    __slots__ = ("ops",)
    kind = "add"

    def __init__(self, ops: tuple):
        object.__setattr__(self, "ops", ops)
        key = (2, tuple(o._key for o in ops))
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))
        object.__setattr__(self, "_skey", None)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __reduce__(self):
        return (Add, (self.ops,))


class Mul(Expr):
    __slots__ = ("ops",)
    kind = "mul"

    def __init__(self, ops: tuple):
        object.__setattr__(self, "ops", ops)
        key = (3, tuple(o._key for o in ops))
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))
        object.__setattr__(self, "_skey", None)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __reduce__(self):
        return (Mul, (self.ops,))


class Pow(Expr):
    __slots__ = ("base", "exp")
    kind = "pow"

    def __init__(self, base: Expr, exp: Expr):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", exp)
        key = (4, base._key, exp._key)
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))
        object.__setattr__(self, "_skey", None)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __reduce__(self):
        return (Pow, (self.base, self.exp))


def _build_skey(e: Expr) -> str:
    if isinstance(e, Const):
        return f"0C{e.value.numerator}/{e.value.denominator}"
    if isinstance(e, Sym):
        return f"1S{e.name}"
    if isinstance(e, Add):
        return "2A(" + ",".join(o.skey for o in e.ops) + ")"
    if isinstance(e, Mul):
        return "3M(" + ",".join(o.skey for o in e.ops) + ")"
    if isinstance(e, Pow):
        return "4P(" + e.base.skey + "," + e.exp.skey + ")"
    raise TypeError(e)


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)
HALF = Const(Fraction(1, 2))

_sym_cache: dict = {}


def sym(name: str) -> Sym:
    s = _sym_cache.get(name)
    if s is None:
        s = _sym_cache[name] = Sym(name)
    return s


def const(v: Number) -> Const:
    return Const(v if isinstance(v, Fraction) else Fraction(v))


# ---------------------------------------------------------------------------
# canonical constructors


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator, b.numerator),
                    math.lcm(a.denominator, b.denominator))


def _split_coeff(e: Expr):
    """Decompose into (rational coefficient, core); core None for consts."""
    if isinstance(e, Const):
        return e.value, None
    if isinstance(e, Mul) and isinstance(e.ops[0], Const):
        rest = e.ops[1:]
        core = rest[0] if len(rest) == 1 else Mul(rest)
        return e.ops[0].value, core
    return Fraction(1), e


def _coeff_core(c: Fraction, core: Expr) -> Expr:
    if c == 1:
        return core
    if isinstance(core, Mul):
        return Mul((Const(c),) + core.ops)
    return Mul((Const(c), core))


def add_(*ops: Expr) -> Expr:
    return addn(ops)


def addn(ops: Iterable[Expr]) -> Expr:
    const_sum = Fraction(0)
    merged: dict = {}
    work = [(Fraction(1), op) for op in ops]
    while work:
        scale, op = work.pop()
        if isinstance(op, Add):
            work.extend((scale, o) for o in op.ops)
            continue
        coeff, core = _split_coeff(op)
        coeff *= scale
        if core is None:
            const_sum += coeff
            continue
        if isinstance(core, Add):
            # a rational multiple of a sum distributes into the sum
            work.extend((coeff, o) for o in core.ops)
            continue
        k = core._key
        if k in merged:
            merged[k][0] += coeff
        else:
            merged[k] = [coeff, core]
    terms = [(c, core) for c, core in merged.values() if c != 0]
    if not terms:
        return Const(const_sum)
    coeffs = [c for c, _ in terms]
    if const_sum != 0:
        coeffs.append(const_sum)
    content = abs(coeffs[0])
    for c in coeffs[1:]:
        content = _frac_gcd(content, abs(c))
    if content != 1 and content != 0:
        inner = addn([_coeff_core(c / content, core) for c, core in terms]
                     + ([Const(const_sum / content)] if const_sum else []))
        return muln([Const(content), inner])
    parts = [_coeff_core(c, core) for c, core in terms]
    if const_sum != 0:
        parts.append(Const(const_sum))
    parts.sort(key=lambda e: e._key)
    if len(parts) == 1:
        return parts[0]
    return Add(tuple(parts))


def mul_(*ops: Expr) -> Expr:
    return muln(ops)


def muln(ops: Iterable[Expr]) -> Expr:
    pending = list(ops)
    coeff = Fraction(1)
    powers: dict = {}
    while pending:
        f = pending.pop()
        if isinstance(f, Mul):
            pending.extend(f.ops)
            continue
        if isinstance(f, Const):
            if f.value == 0:
                return ZERO
            coeff *= f.value
            continue
        if isinstance(f, Pow) and isinstance(f.exp, Const):
            base, exp = f.base, f.exp.value
        else:
            base, exp = f, Fraction(1)
        if isinstance(base, Const) and exp.denominator == 1:
            if base.value == 0:
                if exp < 0:
                    raise DomainError("zero base with negative exponent")
                return ZERO
            coeff *= base.value ** int(exp)
            continue
        k = base._key
        if k in powers:
            powers[k][1] += exp
        else:
            powers[k] = [base, exp]
    factors = []
    rerun = []
    rad_vals = []
    for base, exp in powers.values():
        if exp == 0:
            continue
        if isinstance(base, Const) and exp.denominator != 1:
            rad_vals.append((base.value, exp))
            continue
        f = pow_(base, Const(exp))
        if isinstance(f, (Const, Mul)):
            rerun.append(f)
        else:
            factors.append(f)
    if rad_vals:
        # all constant radicals fold into a single N^(1/q) normal form
        q = 1
        for _, e in rad_vals:
            q = math.lcm(q, e.denominator)
        n = Fraction(1)
        for v, e in rad_vals:
            n *= v ** int(e * q)
        combined = pow_(Const(n), Const(Fraction(1, q)))
        for part in (combined.ops if isinstance(combined, Mul) else (combined,)):
            if isinstance(part, Const):
                coeff *= part.value
            else:
                factors.append(part)
    if rerun:
        return muln(rerun + factors + [Const(coeff)])
    if not factors:
        return Const(coeff)
    factors.sort(key=lambda e: e._key)
    if coeff == 1:
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))
    return Mul((Const(coeff),) + tuple(factors))


def _int_nth_root(n: int, k: int) -> Optional[int]:
    """Exact integer k-th root of n, or None; robust for big integers."""
    if n < 0:
        return None
    if n in (0, 1) or k == 1:
        return n
    if n.bit_length() < 53:
        r = round(n ** (1.0 / k))
    else:
        r = 1 << ((n.bit_length() + k - 1) // k)
        while True:
            nxt = ((k - 1) * r + n // r ** (k - 1)) // k
            if nxt >= r:
                break
            r = nxt
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def _const_pow(b: Fraction, e: Fraction) -> Optional[Fraction]:
    """Exact rational power, or None when the result is irrational."""
    if b == 0 and e < 0:
        raise DomainError("0 raised to a negative power")
    if e.denominator == 1:
        return b ** int(e)
    if b < 0:
        return None
    rn = _int_nth_root(b.numerator, e.denominator)
    rd = _int_nth_root(b.denominator, e.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd) ** e.numerator


def _const_radical(v: Fraction, e: Fraction) -> Expr:
    """Canonical irrational constant power: factors of the form m^r with
    m a non-perfect-power integer >= 2 and 0 < r < 1, times a rational."""
    if v < 0:
        return Pow(Const(v), Const(e))

    def int_part(n: int, ev: Fraction):
        if n == 1:
            return Fraction(1), None
        m, k = n, 1
        for kk in range(2, n.bit_length() + 1):
            cand = _int_nth_root(n, kk)
            if cand is not None and cand >= 2:
                m, k = cand, kk
        if k > 1:
            # recurse in case m is itself a perfect power
            return int_part(m, ev * k)
        ee = ev
        i = ee.numerator // ee.denominator
        r = ee - i
        coeff = Fraction(m) ** i
        return coeff, (m, r) if r else None

    c1, rad1 = int_part(v.numerator, e)
    c2, rad2 = int_part(v.denominator, -e)
    coeff = c1 * c2
    factors = []
    if coeff != 1:
        factors.append(Const(coeff))
    for rad in (rad1, rad2):
        if rad is not None:
            factors.append(Pow(Const(rad[0]), Const(rad[1])))
    if not factors:
        return ONE
    if len(factors) == 1:
        return factors[0]
    return muln(factors)


def _is_monomial_factor(e: Expr) -> bool:
    if isinstance(e, Sym):
        return True
    if isinstance(e, Const):
        return e.value > 0
    if isinstance(e, Pow) and isinstance(e.exp, Const):
        return isinstance(e.base, Sym) or \
            (isinstance(e.base, Const) and e.base.value > 0)
    return False


def pow_(base: Expr, exp: Expr) -> Expr:
    if not isinstance(exp, Const):
        return Pow(base, exp)
    ev = exp.value
    if ev == 0:
        return ONE
    if ev == 1:
        return base
    if isinstance(base, Const):
        folded = _const_pow(base.value, ev)
        if folded is not None:
            return Const(folded)
        return _const_radical(base.value, ev)
    if isinstance(base, Mul):
        # distributes for any rational exponent: sound on the nonnegative
        # orthant, which is the engine's domain
        return muln([pow_(f, exp) for f in base.ops])
    if isinstance(base, Pow):
        inner = base.exp
        if isinstance(inner, Const):
            iv = inner.value
            # (x^even)^(p/q) stays put: it may encode |x|
            blocked = iv.denominator == 1 and iv.numerator % 2 == 0 \
                and ev.denominator != 1
            if not blocked:
                return pow_(base.base, Const(iv * ev))
        elif ev.denominator == 1:
            return pow_(base.base, muln([Const(ev), inner]))
        return Pow(base, exp)
    return Pow(base, exp)


def neg(e: Expr) -> Expr:
    return muln([MINUS_ONE, e])


def sub_(a: Expr, b: Expr) -> Expr:
    return addn([a, neg(b)])


def div_(a: Expr, b: Expr) -> Expr:
    return muln([a, pow_(b, MINUS_ONE)])


def sqrt_(e: Expr) -> Expr:
    return pow_(e, HALF)


# ---------------------------------------------------------------------------
# structure helpers


def children(e: Expr) -> tuple:
    if isinstance(e, (Add, Mul)):
        return e.ops
    if isinstance(e, Pow):
        return (e.base, e.exp)
    return ()


def rebuild(e: Expr, new_children: Sequence[Expr]) -> Expr:
    if isinstance(e, Add):
        return addn(new_children)
    if isinstance(e, Mul):
        return muln(new_children)
    if isinstance(e, Pow):
        return pow_(new_children[0], new_children[1])
    return e


def subexpr_at(e: Expr, path: Sequence[int]) -> Expr:
    for i in path:
        e = children(e)[i]
    return e


def replace_at(e: Expr, path: Sequence[int], new: Expr) -> Expr:
    """Replace the subtree at path, re-canonicalizing along the spine."""
    if not path:
        return new
    ch = list(children(e))
    ch[path[0]] = replace_at(ch[path[0]], path[1:], new)
    return rebuild(e, ch)


def walk(e: Expr):
    """Yield (path, node) pairs in preorder."""
    stack = [((), e)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for i, c in enumerate(children(node)):
            stack.append((path + (i,), c))


def free_symbols(e: Expr) -> frozenset:
    out = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Sym):
            out.add(n.name)
        else:
            stack.extend(children(n))
    return frozenset(out)


def node_count(e: Expr) -> int:
    return 1 + sum(node_count(c) for c in children(e))


def tree_depth(e: Expr) -> int:
    """Depth of the canonical tree; a bare symbol or constant has depth 1."""
    ch = children(e)
    if not ch:
        return 1
    return 1 + max(tree_depth(c) for c in ch)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    if not mapping:
        return e
    if isinstance(e, Sym):
        return mapping.get(e.name, e)
    if isinstance(e, Const):
        return e
    return rebuild(e, [substitute(c, mapping) for c in children(e)])


def rotate(e: Expr, vars: Sequence[str], steps: int = 1) -> Expr:
    m = {vars[i]: sym(vars[(i + steps) % len(vars)]) for i in range(len(vars))}
    return substitute(e, m)


def cyclic_sum(e: Expr, vars: Sequence[str]) -> Expr:
    return addn([rotate(e, vars, k) for k in range(len(vars))])


def cyclic_product(e: Expr, vars: Sequence[str]) -> Expr:
    return muln([rotate(e, vars, k) for k in range(len(vars))])


def is_cyclic_symmetric(e: Expr, vars: Sequence[str]) -> bool:
    return rotate(e, vars, 1) == e


def canonical_hash(e: Expr) -> int:
    """64-bit digest; equal canonical forms hash equal across processes."""
    h = hashlib.blake2b(e.skey.encode(), digest_size=8, key=HASH_SEED)
    return int.from_bytes(h.digest(), "big")


def string_length(e: Expr) -> int:
    return len(render(e))


# ---------------------------------------------------------------------------
# evaluation


def evaluate(e: Expr, assignment: Mapping[str, Number]):
    """Evaluate at a point; exact (Fraction) wherever possible, float else.

    Raises DomainError on zero denominators, negative radicands and missing
    symbols.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Sym):
        try:
            v = assignment[e.name]
        except KeyError:
            raise DomainError(f"missing symbol {e.name!r}") from None
        return Fraction(v) if isinstance(v, int) else v
    if isinstance(e, Add):
        total = Fraction(0)
        for op in e.ops:
            total = total + evaluate(op, assignment)
        return total
    if isinstance(e, Mul):
        total = Fraction(1)
        for op in e.ops:
            total = total * evaluate(op, assignment)
        return total
    if isinstance(e, Pow):
        return _pow_value(evaluate(e.base, assignment),
                          evaluate(e.exp, assignment))
    raise TypeError(e)


def _pow_value(b, x):
    if isinstance(x, Fraction) and x.denominator == 1:
        n = int(x)
        if (b == 0 or b == 0.0) and n < 0:
            raise DomainError("division by zero")
        return b ** n if isinstance(b, Fraction) else float(b) ** n
    bf = float(b)
    if bf < 0:
        raise DomainError("negative base with fractional exponent")
    if bf == 0 and float(x) < 0:
        raise DomainError("division by zero")
    if isinstance(b, Fraction) and isinstance(x, Fraction):
        exact = _const_pow(b, x)
        if exact is not None:
            return exact
    try:
        return math.pow(bf, float(x))
    except OverflowError:
        raise DomainError("overflow in power") from None


def compile_numeric(e: Expr, var_order: Sequence[str]) -> Callable:
    """Compile to a vectorized numpy evaluator f(args) -> array.

    ``args`` is a sequence of arrays (or floats) matching var_order.
    Out-of-domain points come back as nan/inf; callers filter.
    """
    import numpy as np

    idx = {name: i for i, name in enumerate(var_order)}

    def comp(node):
        if isinstance(node, Const):
            try:
                v = float(node.value)
            except OverflowError:
                v = math.inf if node.value > 0 else -math.inf
            return lambda args: v
        if isinstance(node, Sym):
            i = idx[node.name]
            return lambda args: args[i]
        if isinstance(node, Add):
            fs = [comp(c) for c in node.ops]

            def f_add(args, fs=fs):
                acc = fs[0](args)
                for g in fs[1:]:
                    acc = acc + g(args)
                return acc
            return f_add
        if isinstance(node, Mul):
            fs = [comp(c) for c in node.ops]

            def f_mul(args, fs=fs):
                acc = fs[0](args)
                for g in fs[1:]:
                    acc = acc * g(args)
                return acc
            return f_mul
        if isinstance(node, Pow):
            fb = comp(node.base)
            fe = comp(node.exp)

            def f_pow(args, fb=fb, fe=fe):
                with np.errstate(all="ignore"):
                    return np.power(fb(args), fe(args))
            return f_pow
        raise TypeError(node)

    return comp(e)


# ---------------------------------------------------------------------------
# calculus


def differentiate(e: Expr, s: str) -> Expr:
    """Symbolic derivative with respect to s; result is canonical."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Sym):
        return ONE if e.name == s else ZERO
    if isinstance(e, Add):
        return addn([differentiate(op, s) for op in e.ops])
    if isinstance(e, Mul):
        terms = []
        ops = e.ops
        for i, op in enumerate(ops):
            d = differentiate(op, s)
            if d == ZERO:
                continue
            terms.append(muln([d] + [o for j, o in enumerate(ops) if j != i]))
        return addn(terms) if terms else ZERO
    if isinstance(e, Pow):
        if s in free_symbols(e.exp):
            raise DomainError("cannot differentiate a symbolic exponent")
        db = differentiate(e.base, s)
        if db == ZERO:
            return ZERO
        return muln([e.exp, pow_(e.base, sub_(e.exp, ONE)), db])
    raise TypeError(e)


# ---------------------------------------------------------------------------
# parsing


_TOKEN_OPS = set("+-*/^()")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _TOKEN_OPS:
            tokens.append((c, i, None))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("num", i, int(text[i:j])))
            i = j
            continue
        if c.isalpha() and c.islower():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "_"
                             or (text[j].isalpha() and text[j].islower())):
                j += 1
            tokens.append(("name", i, text[i:j]))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("end", n, None))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.advance()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, got {t[0]!r}", t[1])
        return t

    def parse_expr(self) -> Expr:
        terms = [self.parse_term()]
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            t = self.parse_term()
            terms.append(t if op == "+" else neg(t))
        return addn(terms)

    def parse_term(self) -> Expr:
        factors = [self.parse_unary()]
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            f = self.parse_unary()
            factors.append(f if op == "*" else pow_(f, MINUS_ONE))
        return muln(factors)

    def parse_unary(self) -> Expr:
        if self.peek()[0] == "-":
            self.advance()
            return neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.peek()[0] == "^":
            self.advance()
            exp = self.parse_unary()
            return pow_(base, exp)
        return base

    def parse_atom(self) -> Expr:
        t = self.advance()
        if t[0] == "num":
            return Const(t[2])
        if t[0] == "name":
            if self.peek()[0] == "(":
                if t[2] != "sqrt":
                    raise ParseError(f"unknown function {t[2]!r}", t[1])
                self.advance()
                arg = self.parse_expr()
                self.expect(")")
                return sqrt_(arg)
            return sym(t[2])
        if t[0] == "(":
            e = self.parse_expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected token {t[0]!r}", t[1])


def parse(text: str) -> Expr:
    """Parse the problem grammar into a canonical Expr."""
    p = _Parser(text)
    e = p.parse_expr()
    end = p.advance()
    if end[0] != "end":
        raise ParseError(f"trailing input {end[0]!r}", end[1])
    return e


# ---------------------------------------------------------------------------
# rendering


def render(e: Expr, style: str = "plain") -> str:
    """Plain text that re-parses to a structurally equal Expr, or LaTeX."""
    if style == "plain":
        return _render_plain(e)
    if style == "latex":
        return _render_latex(e)
    raise ValueError(f"unknown style {style!r}")


def _exp_str(ev: Fraction) -> str:
    if ev.denominator == 1 and ev >= 0:
        return str(ev.numerator)
    if ev.denominator == 1:
        return f"({ev.numerator})"
    return f"({ev.numerator}/{ev.denominator})"


def _pow_base_str(base: Expr) -> str:
    s = _render_plain(base)
    if isinstance(base, Sym):
        return s
    if isinstance(base, Const) and base.value >= 0 and base.is_integer:
        return s
    return f"({s})"


def _pow_str(base: Expr, ev: Fraction) -> str:
    if ev == 1:
        return _pow_base_str(base)
    if ev == Fraction(1, 2):
        return f"sqrt({_render_plain(base)})"
    return f"{_pow_base_str(base)}^{_exp_str(ev)}"


def _factor_str(e: Expr) -> str:
    """Render a Mul factor; Adds get parens."""
    if isinstance(e, Add):
        return f"({_render_plain(e)})"
    if isinstance(e, Mul):
        return f"({_render_plain(e)})"
    s = _render_plain(e)
    if s.startswith("-") or (isinstance(e, Const) and not e.is_integer):
        return f"({s})"
    if isinstance(e, Pow) and isinstance(e.exp, Const) and e.exp.value < 0:
        return f"({s})"
    return s


def _group_items(items: list) -> list:
    """Render factor list, grouping equal fractional exponents:
    a^(1/2)*b^(1/2) -> sqrt(a*b)."""
    buckets: dict = {}
    order: list = []
    for base, ev in items:
        if ev not in buckets:
            buckets[ev] = []
            order.append(ev)
        buckets[ev].append(base)
    out = []
    for ev in order:
        bases = buckets[ev]
        if ev.denominator != 1 and len(bases) > 1:
            out.append(_pow_str(muln(bases), ev))
        else:
            for b in bases:
                out.append(_factor_str(b) if ev == 1 else _pow_str(b, ev))
    return out


def _mul_parts(e: Mul):
    coeff = Fraction(1)
    num_items: list = []
    den_items: list = []
    for f in e.ops:
        if isinstance(f, Const):
            coeff *= f.value
        elif isinstance(f, Pow) and isinstance(f.exp, Const) and f.exp.value < 0:
            den_items.append((f.base, -f.exp.value))
        elif isinstance(f, Pow) and isinstance(f.exp, Const):
            num_items.append((f.base, f.exp.value))
        else:
            num_items.append((f, Fraction(1)))
    return coeff, num_items, den_items


def _render_plain(e: Expr) -> str:
    if isinstance(e, Const):
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        sign = "-" if v < 0 else ""
        return f"{sign}{abs(v.numerator)}/{v.denominator}"
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Pow):
        if isinstance(e.exp, Const):
            ev = e.exp.value
            if ev < 0:
                den = _pow_str(e.base, -ev)
                if not _no_outer_mul(den) or den.startswith("-"):
                    den = f"({den})"
                return f"1/{den}"
            return _pow_str(e.base, ev)
        return f"{_pow_base_str(e.base)}^({_render_plain(e.exp)})"
    if isinstance(e, Mul):
        coeff, num_items, den_items = _mul_parts(e)
        neg_sign = coeff < 0
        cn, cd = abs(coeff.numerator), coeff.denominator
        num_parts = ([str(cn)] if (cn != 1 or not num_items) else []) \
            + _group_items(num_items)
        s = "*".join(num_parts)
        den_parts = ([str(cd)] if cd != 1 else []) + _group_items(den_items)
        if den_parts:
            if len(den_parts) == 1 and _no_outer_mul(den_parts[0]):
                s = f"{s}/{den_parts[0]}"
            else:
                s = f"{s}/(" + "*".join(den_parts) + ")"
        return f"-{s}" if neg_sign else s
    if isinstance(e, Add):
        parts = []
        for i, op in enumerate(e.ops):
            s = _render_plain(op)
            if i == 0:
                parts.append(s)
            elif s.startswith("-"):
                parts.append(f" - {s[1:]}")
            else:
                parts.append(f" + {s}")
        return "".join(parts)
    raise TypeError(e)


def _no_outer_mul(s: str) -> bool:
    depth = 0
    for c in s:
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif depth == 0 and c in "*/+- ":
            return False
    return True


def _render_latex(e: Expr) -> str:
    if isinstance(e, Const):
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        sign = "-" if v < 0 else ""
        return sign + r"\frac{%d}{%d}" % (abs(v.numerator), v.denominator)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Pow):
        if isinstance(e.exp, Const):
            ev = e.exp.value
            if ev == Fraction(1, 2):
                return r"\sqrt{%s}" % _render_latex(e.base)
            if ev < 0:
                return r"\frac{1}{%s}" % _render_latex(pow_(e.base, Const(-ev)))
            b = _render_latex(e.base)
            if isinstance(e.base, (Add, Mul)):
                b = r"\left(%s\right)" % b
            if ev.denominator == 1:
                return "%s^{%d}" % (b, ev.numerator)
            return "%s^{%d/%d}" % (b, ev.numerator, ev.denominator)
        return "%s^{%s}" % (_render_latex(e.base), _render_latex(e.exp))
    if isinstance(e, Mul):
        coeff, num_items, den_items = _mul_parts(e)
        num = []
        if abs(coeff.numerator) != 1 or not num_items:
            num.append(str(abs(coeff.numerator)))
        for b, ev in num_items:
            if ev == 1:
                s = _render_latex(b)
                if isinstance(b, Add):
                    s = r"\left(%s\right)" % s
            else:
                s = _render_latex(Pow(b, Const(ev)))
            num.append(s)
        ns = " ".join(num)
        den = []
        if coeff.denominator != 1:
            den.append(str(coeff.denominator))
        for b, ev in den_items:
            den.append(_render_latex(Pow(b, Const(ev))) if ev != 1
                       else _render_latex(b))
        sign = "-" if coeff < 0 else ""
        if den:
            return sign + r"\frac{%s}{%s}" % (ns, " ".join(den))
        return sign + ns
    if isinstance(e, Add):
        parts = []
        for i, op in enumerate(e.ops):
            s = _render_latex(op)
            if i == 0:
                parts.append(s)
            elif s.startswith("-"):
                parts.append(" - " + s[1:])
            else:
                parts.append(" + " + s)
        return "".join(parts)
    raise TypeError(e)
