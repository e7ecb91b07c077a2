"""Random assignments satisfying an AssumptionSet, vectorized.

Positive/nonnegative symbols draw log-uniform from [lo, hi].  A single
equational condition is satisfied by rescaling (homogeneous case) or by a
one-dimensional solve along the sampled ray; simple ordering chains
(a >= b >= c) are enforced by sorting, anything else by rejection.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .expr import Expr, compile_numeric, free_symbols, sub_
from .ineq import AssumptionSet, Inequality
from .poly import total_degree


class SampleSpace:
    """Prepares vectorized samplers for a fixed assumption set."""

    def __init__(self, asm: AssumptionSet, variables: Sequence[str],
                 lo: float = 1e-2, hi: float = 1e2):
        self.asm = asm
        self.vars = list(variables)
        self.lo = lo
        self.hi = hi
        self.condition = self._normalize_condition()
        self.chain = self._ordering_chain()
        self.extra_facts = [f for f in asm.ordering if f not in (self.chain or [])]
        self._fact_fns = [compile_numeric(f, self.vars) for f in asm.ordering
                          if not self._is_chain_fact(f)]

    # -- condition handling

    def _normalize_condition(self):
        conds = [c for c in self.asm.conditions if c.relation == "="]
        if len(conds) != 1:
            return None if not conds else ("unsupported",)
        c = conds[0]
        from .expr import Const
        if isinstance(c.rhs, Const):
            lhs, k = c.lhs, c.rhs.value
        elif isinstance(c.lhs, Const):
            lhs, k = c.rhs, c.lhs.value
        else:
            lhs, k = sub_(c.lhs, c.rhs), Fraction(0)
        deg = total_degree(lhs)
        fn = compile_numeric(lhs, self.vars)
        return (lhs, float(k), deg, fn)

    def _is_chain_fact(self, f: Expr) -> bool:
        from .expr import Add, Mul, Sym, Const
        if not isinstance(f, Add) or len(f.ops) != 2:
            return False
        syms = [op for op in f.ops if isinstance(op, Sym)]
        negs = [op for op in f.ops if isinstance(op, Mul) and len(op.ops) == 2
                and isinstance(op.ops[0], Const) and op.ops[0].value == -1
                and isinstance(op.ops[1], Sym)]
        return len(syms) == 1 and len(negs) == 1

    def _ordering_chain(self) -> Optional[list]:
        """If every fact is x - y for symbols, return a descending order."""
        from .expr import Add, Mul, Sym, Const
        pairs = []
        for f in self.asm.ordering:
            if not self._is_chain_fact(f):
                return None
            hi = next(op for op in f.ops if isinstance(op, Sym)).name
            lo = next(op.ops[1].name for op in f.ops if isinstance(op, Mul))
            pairs.append((hi, lo))
        if not pairs:
            return None
        # topological order of the >= relation
        names = sorted({n for p in pairs for n in p})
        order = []
        remaining = set(names)
        deps = {n: {h for h, l in pairs if l == n} for n in names}
        while remaining:
            ready = sorted(n for n in remaining if not (deps[n] & remaining))
            if not ready:
                return None
            order.append(ready[0])
            remaining.discard(ready[0])
        return order  # descending: order[0] largest

    # -- sampling

    def draw(self, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """Returns (matrix of shape (len(vars), n), valid mask)."""
        lo, hi = math.log(self.lo), math.log(self.hi)
        m = np.exp(rng.uniform(lo, hi, size=(len(self.vars), n)))
        valid = np.ones(n, dtype=bool)
        if self.chain:
            idx = [self.vars.index(v) for v in self.chain if v in self.vars]
            if len(idx) >= 2:
                sub = np.sort(m[idx, :], axis=0)[::-1]
                m[idx, :] = sub
        cond = self.condition
        if cond is not None:
            if cond[0] == "unsupported":
                return m, np.zeros(n, dtype=bool)
            lhs, k, deg, fn = cond
            with np.errstate(all="ignore"):
                vals = np.asarray(fn(m), dtype=float)
            if deg is not None and deg != 0:
                good = np.isfinite(vals) & (vals > 0)
                scale = np.ones(n)
                scale[good] = (k / vals[good]) ** (1.0 / float(deg))
                m = m * scale[None, :]
                valid &= good
            else:
                valid &= self._ray_solve(m, fn, k)
        for fn in self._fact_fns:
            with np.errstate(all="ignore"):
                v = np.asarray(fn(m), dtype=float)
            valid &= np.isfinite(v) & (v >= -1e-12)
        return m, valid

    def _ray_solve(self, m: np.ndarray, fn, k: float) -> np.ndarray:
        """Scale each column by t > 0 so the condition holds; bisection."""
        n = m.shape[1]
        ok = np.zeros(n, dtype=bool)
        ts = np.logspace(-3, 3, 61)
        for j in range(n):
            col = m[:, j:j + 1]
            with np.errstate(all="ignore"):
                g = np.array([float(fn(col * t)) - k for t in ts])
            finite = np.isfinite(g)
            bracket = None
            for i in range(len(ts) - 1):
                if finite[i] and finite[i + 1] and g[i] * g[i + 1] <= 0:
                    bracket = (ts[i], ts[i + 1])
                    break
            if bracket is None:
                continue
            a, b = bracket
            for _ in range(80):
                mid = 0.5 * (a + b)
                with np.errstate(all="ignore"):
                    gm = float(fn(col * mid)) - k
                if not math.isfinite(gm):
                    break
                ga = float(fn(col * a)) - k
                if ga * gm <= 0:
                    b = mid
                else:
                    a = mid
            t = 0.5 * (a + b)
            m[:, j] = m[:, j] * t
            with np.errstate(all="ignore"):
                ok[j] = abs(float(fn(m[:, j:j + 1])) - k) <= 1e-6 * max(1.0, abs(k))
        return ok


def sample_points(asm: AssumptionSet, variables: Sequence[str], n: int,
                  rng: np.random.Generator, lo: float = 1e-2, hi: float = 1e2):
    """Convenience wrapper; returns (matrix, valid mask)."""
    return SampleSpace(asm, variables, lo, hi).draw(n, rng)


def holds_numerically(ineq: Inequality, n: int = 100,
                      seed: int = 0, slack: float = 1e-9) -> bool:
    """True when no sampled satisfying point violates the inequality."""
    return find_counterexample(ineq, n, seed, slack)[0] is None


def find_counterexample(ineq: Inequality, n: int = 200, seed: int = 0,
                        margin: float = 1e-6):
    """(assignment or None, n_checked). Violation must exceed the relative
    margin; abstains (None, 0) when sampling cannot satisfy assumptions."""
    variables = sorted(ineq.free_symbols())
    if not variables:
        small, large, strict = ineq.oriented()
        from .expr import evaluate
        try:
            sv, lv = evaluate(small, {}), evaluate(large, {})
        except Exception:
            return None, 0
        if isinstance(sv, Fraction) and isinstance(lv, Fraction):
            # exact comparison; huge rationals overflow float conversion
            violated = sv > lv or (strict and sv >= lv)
            return ({}, 1) if violated else (None, 1)
        sv, lv = float(sv), float(lv)
        if sv > lv + margin * max(1.0, abs(sv), abs(lv)) or (strict and sv >= lv):
            return {}, 1
        return None, 1
    space = SampleSpace(ineq.assumptions, variables)
    rng = np.random.default_rng(seed)
    small, large, strict = ineq.oriented()
    f = compile_numeric(sub_(large, small), variables)
    scale_fn = compile_numeric(large, variables)
    m, valid = space.draw(n, rng)
    if not valid.any():
        return None, 0
    with np.errstate(all="ignore"):
        diff = np.asarray(f(m), dtype=float)
        ref = np.abs(np.asarray(scale_fn(m), dtype=float))
    usable = valid & np.isfinite(diff) & np.isfinite(ref)
    bad = usable & (diff < -margin * np.maximum(1.0, ref))
    idx = np.nonzero(bad)[0]
    if idx.size:
        j = int(idx[0])
        return {v: float(m[i, j]) for i, v in enumerate(variables)}, int(usable.sum())
    return None, int(usable.sum())
