"""Polynomial engine: expansion, together, factoring, Sturm machinery."""

import random
from fractions import Fraction

import pytest

from ineqprover.expr import (Const, Mul, addn, evaluate, muln, parse, pow_,
                             render, sub_, sym)
from ineqprover.poly import (SizeLimitError, count_roots_open, expand,
                             factor_terms, poly_divide_exact, poly_nth_root,
                             poly_sign_on_interval, rational_roots,
                             split_fraction, squarefree_decomposition,
                             to_poly, together, total_degree,
                             univariate_coeffs, upoly_eval)
from oracles import (expand_equal, naive_expand, random_expr,
                     random_positive_point)


class TestExpand:
    def test_square(self):
        assert expand(parse("(a+b)^2")) == parse("a^2 + 2*a*b + b^2")

    def test_monomial_fixed_point(self):
        assert expand(sym("a")) == sym("a")

    def test_imo2001_polynomial(self):
        # the cube difference from the IMO-2001 closing steps, checked
        # against the independent expansion oracle
        e = sub_(parse("(a+b+c)^3"), parse("a^3 + 24*a*b*c + b^3 + c^3"))
        expected = parse("3*a^2*b + 3*a^2*c + 3*a*b^2 - 18*a*b*c"
                         " + 3*a*c^2 + 3*b^2*c + 3*b*c^2")
        assert expand_equal(e, expected)
        assert expand(e) == expand(expected)

    def test_matches_oracle_fuzz(self):
        rng = random.Random(5)
        for _ in range(300):
            e = random_expr(rng, depth=3, allow_fractions=False,
                            allow_radicals=False)
            assert expand_equal(expand(e), e)

    def test_expands_denominators(self):
        from ineqprover.expr import Pow, walk
        e = expand(parse("2/(3*(a+b+c+d)^2)"))
        bases = [n.base for _, n in walk(e)
                 if isinstance(n, Pow) and n.exp == Const(-1)]
        assert len(bases) == 1
        assert expand_equal(bases[0], parse("(a+b+c+d)^2"))

    def test_size_cap(self):
        with pytest.raises(SizeLimitError):
            expand(parse("(a+b+c+d)^12"), cap=100)


class TestTogether:
    def test_two_fractions(self):
        assert together(parse("1/a + 1/b")) == parse("(a+b)/(a*b)")

    def test_korea_constant_collapse(self):
        e = parse("(3*a+2*b+2*c)/(18*a+18*b+18*c)"
                  " + (2*a+3*b+2*c)/(18*a+18*b+18*c)"
                  " + (2*a+2*b+3*c)/(18*a+18*b+18*c)")
        assert together(e) == Const(Fraction(7, 18))

    def test_usamo97_collapse(self):
        e = parse("1/(a*b*c+b^2*c+b*c^2) + 1/(a^2*c+a*b*c+a*c^2)"
                  " + 1/(a^2*b+a*b^2+a*b*c)")
        assert together(e) == parse("1/(a*b*c)")

    def test_fixed_point(self):
        assert together(sym("a")) == sym("a")

    def test_semantic_preservation_fuzz(self, rng):
        for _ in range(120):
            e = random_expr(rng, depth=3)
            t = together(e)
            names = sorted(__import__("ineqprover.expr",
                                      fromlist=["free_symbols"]).free_symbols(e))
            good = 0
            tries = 0
            while good < 40 and tries < 200:
                tries += 1
                pt = random_positive_point(names, rng)
                try:
                    v1 = float(evaluate(e, pt))
                    v2 = float(evaluate(t, pt))
                except Exception:
                    continue
                good += 1
                assert abs(v1 - v2) <= 1e-9 * max(1.0, abs(v1), abs(v2)), \
                    (render(e), render(t))


class TestFactorTerms:
    def test_common_monomial(self):
        f = factor_terms(parse("a*b*c + b^2*c + b*c^2"))
        bases = {render(b) for b, _ in f.factors}
        assert bases == {"b", "c", "a + b + c"}

    def test_perfect_square(self):
        f = factor_terms(parse("a^2 + 2*a*b + b^2"))
        assert f.factors == [(parse("a+b"), Fraction(2))]

    def test_perfect_cube(self):
        f = factor_terms(parse("a^3 + 3*a^2*b + 3*a*b^2 + b^3"))
        assert f.factors == [(parse("a+b"), Fraction(3))]

    def test_rebuild_equals_input(self, rng):
        for _ in range(100):
            e = random_expr(rng, depth=3, allow_radicals=False)
            f = factor_terms(e)
            assert expand_equal(f.expr(), e)


class TestDivision:
    def test_exact(self):
        q = poly_divide_exact(to_poly(parse("(a+b)*(a+2*b)")),
                              to_poly(parse("a+b")))
        assert q is not None and q == to_poly(parse("a+2*b"))

    def test_inexact(self):
        assert poly_divide_exact(to_poly(parse("a^2+b")),
                                 to_poly(parse("a+b"))) is None

    def test_nth_root(self):
        r = poly_nth_root(to_poly(parse("a^2 + 2*a*b + b^2")), 2)
        assert r == to_poly(parse("a+b"))
        assert poly_nth_root(to_poly(parse("a^2 + b^2")), 2) is None


class TestDegree:
    def test_homogeneous(self):
        assert total_degree(parse("a^2*b^2/(c*(a+b))")) == 2

    def test_mixed_degrees(self):
        assert total_degree(parse("a^2 + b")) is None

    def test_scaling_property(self, rng):
        # substituting X -> t*X multiplies by t^deg
        t = sym("t")
        for _ in range(50):
            e = random_expr(rng, depth=3, allow_fractions=False,
                            allow_radicals=False)
            d = total_degree(e)
            if d is None:
                continue
            names = __import__("ineqprover.expr",
                               fromlist=["free_symbols"]).free_symbols(e)
            scaled = __import__("ineqprover.expr", fromlist=["substitute"]) \
                .substitute(e, {n: muln([t, sym(n)]) for n in names})
            expected = muln([pow_(t, Const(d)), e])
            assert expand_equal(scaled, expected)


class TestUnivariate:
    def test_coeffs(self):
        assert univariate_coeffs(parse("x^2 - 4*x + 9"), "x") == \
            [Fraction(9), Fraction(-4), Fraction(1)]
        assert univariate_coeffs(parse("x + y"), "x") is None

    def test_squarefree_decomposition(self):
        # x(x-1)^2
        c = univariate_coeffs(parse("x*(x-1)^2"), "x")
        parts = squarefree_decomposition(c)
        assert sorted(m for _, m in parts) == [1, 2]

    def test_count_roots(self):
        c = univariate_coeffs(parse("(x-1)*(x-2)*(x-3)"), "x")
        assert count_roots_open(c, Fraction(0), Fraction(10)) == 3
        assert count_roots_open(c, Fraction(1), Fraction(3)) == 1
        assert count_roots_open(c, Fraction(4), Fraction(10)) == 0

    def test_sign_on_interval(self):
        c = univariate_coeffs(parse("(3*x-1)^2*(4*x+1)"), "x")
        assert poly_sign_on_interval(c, Fraction(0), Fraction(1)) is True
        assert poly_sign_on_interval(c, Fraction(0), Fraction(1),
                                     strict=True) is False  # root at 1/3
        c2 = univariate_coeffs(parse("x-2"), "x")
        assert poly_sign_on_interval(c2, Fraction(0), Fraction(1)) is False
        c3 = univariate_coeffs(parse("x^2+1"), "x")
        assert poly_sign_on_interval(c3, None, None, strict=True) is True

    def test_sign_never_unsound_fuzz(self, rng):
        for _ in range(300):
            deg = rng.randint(1, 5)
            c = [Fraction(rng.randint(-4, 4)) for _ in range(deg + 1)]
            if not any(c):
                continue
            lo, hi = Fraction(0), Fraction(2)
            verdict = poly_sign_on_interval(c, lo, hi)
            # sample the interval densely; a True verdict must never be
            # contradicted
            if verdict:
                for k in range(1, 400):
                    x = lo + (hi - lo) * Fraction(k, 400)
                    assert upoly_eval(c, x) >= 0

    def test_rational_roots(self):
        c = univariate_coeffs(parse("(2*x-1)*(x+3)*x"), "x")
        assert rational_roots(c) == [Fraction(-3), Fraction(0), Fraction(1, 2)]


class TestSemanticPreservation:
    """expand, together, numeric substitution and cyclic_sum preserve
    values at random positive assignments."""

    def test_all_four_ops(self, rng):
        from ineqprover.expr import cyclic_sum, substitute, sym, Const
        from fractions import Fraction
        checked = 0
        for _ in range(100):
            e = random_expr(rng, depth=3)
            names = sorted(__import__("ineqprover.expr",
                                      fromlist=["free_symbols"]).free_symbols(e))
            variants = []
            try:
                variants.append(expand(e))
            except SizeLimitError:
                pass
            try:
                variants.append(together(e))
            except SizeLimitError:
                pass
            if names:
                # numeric substitution of one symbol must agree with
                # evaluating at the same point
                target = names[0]
                val = Fraction(rng.randint(1, 5), rng.randint(1, 3))
                substituted = substitute(e, {target: Const(val)})
            else:
                substituted = None
            cyc = cyclic_sum(e, names) if names else None
            good = 0
            tries = 0
            while good < 100 and tries < 500:
                tries += 1
                pt = random_positive_point(names, rng)
                try:
                    v0 = float(evaluate(e, pt))
                except Exception:
                    continue
                ok_pt = True
                for v_expr in variants:
                    try:
                        v1 = float(evaluate(v_expr, pt))
                    except Exception:
                        ok_pt = False
                        break
                    assert abs(v0 - v1) <= 1e-9 * max(1.0, abs(v0), abs(v1))
                if not ok_pt:
                    continue
                if substituted is not None:
                    pt_s = dict(pt)
                    pt_s[target] = val
                    try:
                        lhs = float(evaluate(substituted,
                                             {k: v for k, v in pt_s.items()
                                              if k != target} | {target: float(val)}))
                        rhs = float(evaluate(e, pt_s))
                        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))
                    except Exception:
                        pass
                if cyc is not None:
                    try:
                        from ineqprover.expr import rotate
                        total = sum(float(evaluate(rotate(e, names, k), pt))
                                    for k in range(len(names)))
                        vc = float(evaluate(cyc, pt))
                        assert abs(vc - total) <= 1e-9 * max(1.0, abs(total))
                    except Exception:
                        pass
                good += 1
                checked += 1
        assert checked >= 2000
