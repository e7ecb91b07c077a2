"""Synthetic theorem generation by forward reasoning.

Random cyclically symmetric premises feed the theorem matchers; new
inequalities whose equality condition holds are kept, transformed by the
rewrite rules, extended by transitive links, and the shortest survivors
seed the next round.  Every stored record is numerically validated and
carries enough provenance to replay its derivation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .expr import (Expr, ONE, addn, cyclic_sum, evaluate, free_symbols,
                   is_cyclic_symmetric, muln, parse, pow_, render, sqrt_,
                   string_length, sub_, sym, tree_depth, Const)
from .ineq import AssumptionSet, Inequality, ineq_key, parse_inequality
from .poly import total_degree

from .rules import RuleRegistry, apply_rule
from .sampling import find_counterexample
from .theorems import LOWER, UPPER, MatchBudget, side_bounds

DEFAULT_OPS = ("add", "mul", "div", "sqrt_sq", "square")


@dataclass
class GeneratorConfig:
    variables: Tuple[str, ...] = ("a", "b", "c")
    premise_loops: int = 1            # pair-combination rounds
    loops: int = 3                    # forward-reasoning rounds (N)
    select_m: int = 20                # survivors per round (M)
    max_iterations: int = 25          # per-premise matching iterations
    operations: Tuple[str, ...] = DEFAULT_OPS
    seed: int = 0
    max_premises: int = 64
    premise_length_cap: int = 120
    validation_samples: int = 100
    budget: MatchBudget = field(default_factory=lambda: MatchBudget(
        time_limit=1.0, max_results=24))


@dataclass
class TheoremRecord:
    record_id: int
    inequality: str                  # canonical text "lhs <= rhs"
    premise: str
    rule_chain: Tuple[str, ...]
    inference_depth: int
    tree_depth: int
    string_length: int
    equality_point: Dict[str, str]   # symbol -> exact Fraction text
    parent_id: Optional[int]
    seed: int

    def to_json(self) -> str:
        d = asdict(self)
        d["rule_chain"] = list(self.rule_chain)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "TheoremRecord":
        d = json.loads(line)
        d["rule_chain"] = tuple(d["rule_chain"])
        return cls(**d)

    def goal(self) -> Inequality:
        asm = AssumptionSet.for_symbols(sorted(_vars_of_text(self.inequality)))
        return parse_inequality(self.inequality, asm)


def _vars_of_text(text: str) -> set:
    lhs, rhs = text.split("<=") if "<=" in text else text.split("<")
    return set(free_symbols(parse(lhs)) | free_symbols(parse(rhs)))


# ---------------------------------------------------------------------------
# premises (random cyclically symmetric expressions)


def _apply_op(op: str, a: Expr, b: Expr, vars: Sequence[str]) -> Optional[Expr]:
    if op == "add":
        return addn([a, b])
    if op == "mul":
        return muln([a, b])
    if op == "div":
        if a == b:
            return None
        return muln([a, pow_(b, Const(-1))])
    if op == "square":
        return pow_(a, Const(2))
    if op == "sqrt_sq":
        # sqrt(x^2 + 2*y*z): the shape behind premises like
        # sqrt(a^2+2bc) + sqrt(b^2+2ca) + sqrt(c^2+2ab)
        from .expr import Sym
        if not (isinstance(a, Sym) and isinstance(b, Sym)) or a == b:
            return None
        rest = [v for v in vars if v not in (a.name, b.name)]
        if not rest:
            return None
        prod = muln([Const(2), b] + [sym(v) for v in rest[:1]])
        return sqrt_(addn([pow_(a, Const(2)), prod]))
    return None


def gen_premises(cfg: GeneratorConfig) -> List[Expr]:
    """Algorithm: combine pairs with the operation set for premise_loops
    rounds, then emit cyclic summations, deduplicated and size-capped."""
    vars = list(cfg.variables)
    pool: List[Expr] = [sym(v) for v in vars]
    seen = {e._key for e in pool}
    for _ in range(cfg.premise_loops):
        new: List[Expr] = []
        for a in pool:
            for b in pool:
                for op in cfg.operations:
                    if op == "square" and b is not pool[0]:
                        continue
                    e = _apply_op(op, a, b, vars)
                    if e is None or e._key in seen:
                        continue
                    if string_length(e) > cfg.premise_length_cap // 2:
                        continue
                    seen.add(e._key)
                    new.append(e)
        pool.extend(new)
    results: List[Expr] = []
    out_seen = set()
    for e in pool:
        s = cyclic_sum(e, vars)
        if s._key in out_seen or isinstance(s, Const):
            continue
        if string_length(s) > cfg.premise_length_cap:
            continue
        out_seen.add(s._key)
        results.append(s)
    results.sort(key=lambda e: (string_length(e), e.skey))
    if len(results) > cfg.max_premises:
        rng = np.random.default_rng(cfg.seed)
        idx = sorted(rng.choice(len(results), cfg.max_premises, replace=False))
        results = [results[i] for i in idx]
    return results


# ---------------------------------------------------------------------------
# forward reasoning


def check_equality_condition(ineq: Inequality,
                             candidate: Optional[Dict[str, Fraction]] = None,
                             tol: float = 1e-9) -> bool:
    """True iff |lhs - rhs| <= tol * max(1, |lhs|) at the candidate point
    (default: the all-equal point, scaled onto a homogeneous condition)."""
    if candidate is None:
        candidate = equality_candidate(ineq)
        if candidate is None:
            return False
    try:
        lv = float(evaluate(ineq.lhs, candidate))
        rv = float(evaluate(ineq.rhs, candidate))
    except Exception:
        return False
    return abs(lv - rv) <= tol * max(1.0, abs(lv))


def equality_candidate(ineq: Inequality) -> Optional[Dict[str, Fraction]]:
    names = sorted(ineq.free_symbols())
    point = {n: Fraction(1) for n in names}
    conds = [c for c in ineq.assumptions.conditions if c.relation == "="]
    if not conds:
        return point
    if len(conds) > 1:
        return None
    c = conds[0]
    expr, k = (c.lhs, c.rhs) if isinstance(c.rhs, Const) else (c.rhs, c.lhs)
    if not isinstance(k, Const):
        return None
    d = total_degree(expr)
    if d is None or d == 0:
        return None
    try:
        v = evaluate(expr, point)
        scale = float(k.value) / float(v)
        if scale <= 0:
            return None
        s = scale ** (1.0 / float(d))
    except Exception:
        return None
    return {n: Fraction(s).limit_denominator(10 ** 12) for n in names}


def _validated(ineq: Inequality, samples: int, seed: int) -> bool:
    cex, checked = find_counterexample(ineq, n=samples, seed=seed,
                                       margin=1e-9)
    return cex is None and checked > 0


def generate_theorems(premise: Expr, cfg: GeneratorConfig) -> List[TheoremRecord]:
    """Forward reasoning from one premise; returns every stored record."""
    vars = tuple(sorted(free_symbols(premise)))
    asm = AssumptionSet.for_symbols(vars)
    records: List[TheoremRecord] = []
    rid = [0]
    by_key: Dict[int, TheoremRecord] = {}
    premise_text = render(premise)

    def store(ineq: Inequality, chain: Tuple[str, ...],
              parent: Optional[TheoremRecord]) -> Optional[TheoremRecord]:
        ineq = ineq.normalized()
        key = ineq_key(ineq)
        if key in by_key:
            return None
        point = equality_candidate(ineq)
        if point is None or not check_equality_condition(ineq, point):
            return None
        if not _validated(ineq, cfg.validation_samples, cfg.seed ^ (key & 0xFFFF)):
            return None
        rec = TheoremRecord(
            record_id=rid[0],
            inequality=ineq.render(),
            premise=premise_text,
            rule_chain=chain,
            inference_depth=len(chain),
            tree_depth=ineq.metrics()[0],
            string_length=ineq.metrics()[1],
            equality_point={n: str(v) for n, v in point.items()},
            parent_id=parent.record_id if parent else None,
            seed=cfg.seed)
        rid[0] += 1
        by_key[key] = rec
        records.append(rec)
        return rec

    # seed round: theorems applied to the premise itself
    frontier: List[Tuple[Inequality, TheoremRecord]] = []
    for r in side_bounds(premise, asm, cfg.budget):
        if r.direction == UPPER:
            ineq = Inequality("<=", premise, r.produced, asm)
        else:
            ineq = Inequality("<=", r.produced, premise, asm)
        rec = store(ineq, (r.theorem,), None)
        if rec is not None:
            frontier.append((ineq, rec))
    registry = RuleRegistry()
    for _ in range(cfg.loops):
        if not frontier:
            break
        a1: List[Tuple[Inequality, TheoremRecord, str]] = []
        a2: List[Tuple[Inequality, TheoremRecord, str]] = []
        iterations = 0
        for ineq, rec in frontier:
            if iterations >= cfg.max_iterations:
                break
            iterations += 1
            for tag in registry.tags:
                if tag == "try_homo":
                    continue
                for s in apply_rule(tag, ineq, registry):
                    a1.append((s, rec, tag))
            small, large, strict = ineq.oriented()
            for r in side_bounds(large, asm, cfg.budget, want=(UPPER,)):
                linked = Inequality("<=", small, r.produced, asm)
                a2.append((linked, rec, r.theorem))
            for r in side_bounds(small, asm, cfg.budget, want=(LOWER,)):
                linked = Inequality("<=", r.produced, large, asm)
                a2.append((linked, rec, r.theorem))
        pool: List[Tuple[Inequality, TheoremRecord]] = []
        for ineq, rec, tag in a2 + a1:
            new = store(ineq, rec.rule_chain + (tag,), rec)
            if new is not None:
                pool.append((ineq, new))
        frontier = select_shortest(pool, cfg.select_m)
    return records


def select_shortest(pool: Sequence[Tuple[Inequality, TheoremRecord]],
                    m: int) -> List[Tuple[Inequality, TheoremRecord]]:
    """The M survivors by ascending string length (stable canonical ties)."""
    ranked = sorted(pool, key=lambda p: (p[1].string_length, p[0].lhs.skey,
                                         p[0].rhs.skey))
    return ranked[:m]


def generate_dataset(cfg: GeneratorConfig,
                     workers: int = 1) -> List[TheoremRecord]:
    """Premises in deterministic order; per-premise work is independent so
    the merged result does not depend on the worker count."""
    premises = gen_premises(cfg)
    batches: List[List[TheoremRecord]] = [None] * len(premises)  # type: ignore
    if workers <= 1:
        for i, p in enumerate(premises):
            batches[i] = generate_theorems(p, _with_seed(cfg, cfg.seed + i))
    else:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = {ex.submit(generate_theorems, p,
                              _with_seed(cfg, cfg.seed + i)): i
                    for i, p in enumerate(premises)}
            for fut, i in futs.items():
                batches[i] = fut.result()
    merged: List[TheoremRecord] = []
    next_id = 0
    remap: Dict[Tuple[int, int], int] = {}
    for i, batch in enumerate(batches):
        for rec in batch:
            remap[(i, rec.record_id)] = next_id
            parent = remap.get((i, rec.parent_id)) \
                if rec.parent_id is not None else None
            merged.append(TheoremRecord(
                record_id=next_id, inequality=rec.inequality,
                premise=rec.premise, rule_chain=rec.rule_chain,
                inference_depth=rec.inference_depth,
                tree_depth=rec.tree_depth, string_length=rec.string_length,
                equality_point=rec.equality_point, parent_id=parent,
                seed=rec.seed))
            next_id += 1
    return dedup(merged)


def _with_seed(cfg: GeneratorConfig, seed: int) -> GeneratorConfig:
    from dataclasses import replace
    return replace(cfg, seed=seed)


# ---------------------------------------------------------------------------
# dedup / persistence / stats


_FINGERPRINT_BASES = (
    (1.0, 2.0, 0.5, 3.0),
    (2.0, 1.0, 3.0, 0.5),
    (0.5, 3.0, 1.0, 2.0),
    (3.0, 0.5, 2.0, 1.0),
    (1.5, 1.0, 2.5, 0.75),
)


def _fingerprint(ineq: Inequality) -> Tuple:
    names = sorted(ineq.free_symbols())
    out = []
    for base in _FINGERPRINT_BASES:
        point = {n: base[i % len(base)] for i, n in enumerate(names)}
        try:
            v = float(evaluate(sub_(ineq.rhs, ineq.lhs), point))
            out.append(round(v, 6))
        except Exception:
            out.append(None)
    return tuple(out)


def dedup(records: Sequence[TheoremRecord]) -> List[TheoremRecord]:
    """By canonical hash of the oriented statement, then by a numeric
    fingerprint at five fixed assignments.

    Parent links survive: key-duplicates remap onto the kept record (an
    identical statement), and ancestors of fingerprint-survivors are kept
    so every stored derivation stays replayable."""
    from dataclasses import replace as dc_replace
    by_key: Dict[int, TheoremRecord] = {}
    remap: Dict[int, int] = {}
    kept: List[TheoremRecord] = []
    for rec in records:
        key = ineq_key(rec.goal())
        if key in by_key:
            remap[rec.record_id] = by_key[key].record_id
        else:
            by_key[key] = rec
            kept.append(rec)

    def resolve(pid: Optional[int]) -> Optional[int]:
        while pid in remap:
            pid = remap[pid]
        return pid

    kept = [dc_replace(r, parent_id=resolve(r.parent_id)) for r in kept]
    by_id = {r.record_id: r for r in kept}
    seen_fp = set()
    primary = []
    for rec in kept:
        fp = _fingerprint(rec.goal())
        if None not in fp and fp in seen_fp:
            continue
        seen_fp.add(fp)
        primary.append(rec)
    needed = set()
    for rec in primary:
        pid = rec.parent_id
        while pid is not None and pid not in needed:
            needed.add(pid)
            pid = by_id[pid].parent_id if pid in by_id else None
    chosen = {r.record_id for r in primary} | needed
    return [r for r in kept if r.record_id in chosen]


def persist(records: Iterable[TheoremRecord], path: str) -> int:
    n = 0
    with open(path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")
            n += 1
    return n


def load(path: str) -> List[TheoremRecord]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(TheoremRecord.from_json(line))
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise ValueError(f"malformed record on line {lineno}: {e}") \
                    from None
    return out


def replay_record(rec: TheoremRecord,
                  store: Dict[int, TheoremRecord]) -> bool:
    """Re-apply the stored rule chain to the premise and confirm the
    inequality's canonical form reappears."""
    target = rec.goal()
    budget = MatchBudget(time_limit=1.0, max_results=24)
    registry = RuleRegistry()
    if rec.parent_id is None:
        prev = None
    else:
        prev = store[rec.parent_id].goal()
    tag = rec.rule_chain[-1]
    vars = tuple(sorted(target.free_symbols() |
                        free_symbols(parse(rec.premise))))
    asm = AssumptionSet.for_symbols(vars)
    key = ineq_key(target)
    if prev is None:
        premise = parse(rec.premise)
        for r in side_bounds(premise, asm, budget):
            cand = Inequality("<=", premise, r.produced, asm) \
                if r.direction == UPPER else \
                Inequality("<=", r.produced, premise, asm)
            if ineq_key(cand.normalized()) == key and r.theorem == tag:
                return True
        return False
    if tag in registry.tags:
        for s in apply_rule(tag, prev, registry):
            if ineq_key(s.normalized()) == key:
                return True
    small, large, strict = prev.oriented()
    for r in side_bounds(large, asm, budget, want=(UPPER,)):
        if r.theorem == tag and \
                ineq_key(Inequality("<=", small, r.produced, asm)) == key:
            return True
    for r in side_bounds(small, asm, budget, want=(LOWER,)):
        if r.theorem == tag and \
                ineq_key(Inequality("<=", r.produced, large, asm)) == key:
            return True
    return False


def stats(records: Sequence[TheoremRecord]) -> str:
    """Histograms of inference depth, tree depth and string length as a
    small text report plus a TSV block."""
    if not records:
        return "no records\n"

    def hist(values, width: int = 40):
        counts: Dict[int, int] = {}
        for v in values:
            counts[v] = counts.get(v, 0) + 1
        peak = max(counts.values())
        lines = []
        for v in sorted(counts):
            bar = "#" * max(1, counts[v] * width // peak)
            lines.append(f"  {v:>4}  {counts[v]:>6}  {bar}")
        return lines, counts

    blocks = []
    tsv = ["metric\tvalue\tcount"]
    for name, values in (
            ("inference depth", [r.inference_depth for r in records]),
            ("tree depth", [r.tree_depth for r in records]),
            ("string length", [_length_bucket(r.string_length) for r in records])):
        lines, counts = hist(values)
        blocks.append(f"{name} ({len(records)} records)")
        blocks.extend(lines)
        for v in sorted(counts):
            tsv.append(f"{name}\t{v}\t{counts[v]}")
    return "\n".join(blocks) + "\n\n" + "\n".join(tsv) + "\n"


def _length_bucket(n: int, size: int = 20) -> int:
    return (n // size) * size
