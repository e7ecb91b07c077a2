"""Goal-directed proof search.

Subgoals come from theorem matching on both sides, the transformation
rules, homogenization and the tangent-line trick.  Every generated subgoal
runs through a trivial-truth decision ladder and a numeric falsification
filter before entering the open list.  Three strategies share the
machinery: best-first under a heuristic, breadth-first, and a UCB tree
search with capped branching.
"""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .expr import (Add, Const, Expr, Mul, ONE, Pow, Sym, ZERO, addn,
                   evaluate, free_symbols, muln, neg, pow_, render, sub_,
                   substitute, sym, tree_depth)
from .ineq import AssumptionSet, Inequality, ineq_key
from .poly import (SizeLimitError, expand, split_fraction, to_poly, together,
                   total_degree, univariate_coeffs, rational_roots)
from .rules import DEFAULT_RULE_ORDER, RuleRegistry, apply_rule, homogenize
from .sampling import find_counterexample
from .signs import Sign, infer_sign
from .theorems import (LOWER, UPPER, MatchBudget, MatchResult,
                       amgm_cover_certificate, match_muirhead, match_schur,
                       one_var_check, side_bounds, tangent_line_check)


@dataclass
class SearchLimits:
    time_limit: float = 5400.0          # 90 minutes
    max_expansions: int = 2000
    max_open: int = 20000
    falsify_samples: int = 200
    match_budget: MatchBudget = field(default_factory=MatchBudget)
    registry: RuleRegistry = field(default_factory=RuleRegistry)


@dataclass
class MctsConfig:
    k: int = 5
    c: float = 0.3 * math.sqrt(2)
    lookahead_depth: int = 2
    value_mode: str = "direct"          # "direct" or "lookahead"


@dataclass
class Certificate:
    name: str
    detail: str = ""


class Goal:
    """A node of the search: an oriented inequality plus provenance."""

    __slots__ = ("target", "derivation", "parent", "depth", "payload",
                 "_metrics", "_key", "score")

    def __init__(self, target: Inequality, derivation: str = "root",
                 parent: Optional["Goal"] = None, payload=None):
        self.target = target.normalized()
        self.derivation = derivation
        self.parent = parent
        self.depth = 0 if parent is None else parent.depth + 1
        self.payload = payload
        self._metrics = None
        self._key = None
        self.score = None

    @property
    def metrics(self) -> Tuple[int, int]:
        if self._metrics is None:
            self._metrics = self.target.metrics()
        return self._metrics

    @property
    def tree_depth(self) -> int:
        return self.metrics[0]

    @property
    def length(self) -> int:
        return self.metrics[1]

    def key(self) -> int:
        if self._key is None:
            self._key = ineq_key(self.target)
        return self._key

    def __repr__(self):
        return f"<goal {self.target.render()} via {self.derivation}>"


@dataclass
class ProofTree:
    goals: List[Goal]                 # root .. terminal
    certificate: Certificate

    @property
    def steps(self) -> int:
        """Rule/theorem applications plus the closing certificate."""
        return len(self.goals)  # len-1 transitions + terminal check

    def derivations(self) -> List[str]:
        return [g.derivation for g in self.goals[1:]] + [self.certificate.name]


@dataclass
class SearchStats:
    solved: bool = False
    expansions: int = 0
    generated: int = 0
    pruned: int = 0
    open_size: int = 0
    elapsed: float = 0.0


@dataclass
class SearchResult:
    proof: Optional[ProofTree]
    stats: SearchStats
    scored: dict = field(default_factory=dict)   # key -> (goal, score)
    path_keys: frozenset = frozenset()
    expanded_keys: frozenset = frozenset()


# ---------------------------------------------------------------------------
# trivial-truth ladder


_LADDER_COVER_CAP = 36


def is_trivially_true(goal: Goal,
                      budget: Optional[MatchBudget] = None) -> Optional[Certificate]:
    """Four-case decision ladder; a certificate is a finished proof."""
    t = goal.target
    small, large, strict = t.oriented()
    asm = t.assumptions
    # (1) structural equality / constant comparison
    if small == large:
        return None if strict else Certificate("check_eq")
    if isinstance(small, Const) and isinstance(large, Const):
        ok = small.value < large.value if strict else small.value <= large.value
        return Certificate("check_eq") if ok else None
    d = sub_(large, small)
    # (2a) expanded difference with only nonnegative terms
    try:
        p = expand(d)
    except SizeLimitError:
        p = None
    if p is not None:
        s = infer_sign(p, asm)
        if strict and s is Sign.POSITIVE:
            return Certificate("check_nonneg")
        if not strict and s.nonneg():
            return Certificate("check_nonneg")
    # (2b) combined fraction with a sign-decided denominator
    try:
        num, den = split_fraction(d)
    except SizeLimitError:
        num, den = d, None
    if den is not None and not strict:
        den_sign = Sign.POSITIVE
        from .signs import _mul_signs
        for b, x in den:
            s = infer_sign(b, asm)
            if x.denominator == 1 and int(x) % 2 == 0:
                s = Sign.POSITIVE if s in (Sign.POSITIVE, Sign.NEGATIVE) \
                    else Sign.NONNEG
            den_sign = _mul_signs(den_sign, s)
        if den_sign is Sign.POSITIVE:
            try:
                pn = expand(num)
            except SizeLimitError:
                pn = None
            if pn is not None and (pn == ZERO or infer_sign(pn, asm).nonneg()):
                return Certificate("try_together_l")
    # (3) one-step closures on the expanded difference
    if p is not None and not strict:
        cert = _poly_certificates(p, asm, budget)
        if cert:
            return cert
        mu = match_muirhead(small, large, asm)
        if mu is not None:
            return Certificate("check_SimpMuirhead")
    # (4) univariate decision
    names = t.free_symbols()
    if len(names) <= 1:
        verdict = one_var_check(t, Fraction(0), None)
        if verdict:
            return Certificate("check_one_var")
    return None


def _poly_certificates(p: Expr, asm: AssumptionSet,
                       budget: Optional[MatchBudget]) -> Optional[Certificate]:
    try:
        gp = to_poly(p, cap=_LADDER_COVER_CAP * 8)
    except SizeLimitError:
        return None
    if not gp:
        return Certificate("check_eq")
    if len(gp) <= _LADDER_COVER_CAP:
        name = amgm_cover_certificate(gp, budget)
        if name:
            return Certificate(name)
        sch = match_schur(p, asm)
        if sch is not None:
            return Certificate("check_schur", sch.instantiation[0])
    return None


# ---------------------------------------------------------------------------
# falsification


def falsify(goal: Goal, n: int = 200, seed: int = 0) -> Optional[dict]:
    """A satisfying assignment violating the goal by a clear margin, or
    None (which also covers sampling abstention)."""
    cex, _checked = find_counterexample(goal.target, n=n,
                                        seed=seed ^ (goal.key() & 0xFFFF))
    return cex


# ---------------------------------------------------------------------------
# tangent-line subgoals


def _tangent_subgoals(goal: Goal) -> List[Goal]:
    t = goal.target
    small, large, strict = t.oriented()
    if strict:
        return []
    for side, other, want in ((small, large, "le"), (large, small, "ge")):
        if not isinstance(other, Const):
            continue
        sg = _tangent_on_side(goal, side, other.value, want)
        if sg is not None:
            return [sg]
    return []


def _tangent_on_side(goal: Goal, side: Expr, c_val: Fraction,
                     want: str) -> Optional[Goal]:
    """Cyclic sum of f(x_i / S) compared against a constant."""
    t = goal.target
    asm = t.assumptions
    names = sorted(free_symbols(side))
    n = len(names)
    if n < 3 or not isinstance(side, Add) or len(side.ops) != n:
        return None
    if total_degree(side) != 0:
        return None
    hole = sym("_x")
    ops = list(side.ops)
    f = None
    term_vars: dict = {}
    for v in names:
        others = [w for w in names if w != v]
        elim = others[0]
        subst = {v: hole,
                 elim: sub_(sub_(ONE, hole), addn([sym(w) for w in others[1:]]))}
        cand = substitute(ops[0], subst)
        if free_symbols(cand) == {"_x"}:
            f = cand
            term_vars[0] = v
            break
    if f is None:
        return None
    # identify the distinguished variable of every other term
    for i, op in enumerate(ops[1:], start=1):
        found = None
        for v in names:
            others = [w for w in names if w != v]
            elim = others[0]
            subst = {v: hole,
                     elim: sub_(sub_(ONE, hole),
                                addn([sym(w) for w in others[1:]]))}
            if substitute(op, subst) == f:
                found = v
                break
        if found is None or found in term_vars.values():
            return None
        term_vars[i] = found
    # x0 candidates: tightness roots plus the symmetric point
    try:
        f1 = substitute(_diff(f), {})
    except Exception:
        return None
    tight = addn([muln([f1, sub_(ONE, muln([Const(n), hole]))]),
                  muln([Const(n), f]), Const(-c_val)])
    cands = [Fraction(1, n)]
    try:
        num, _den = split_fraction(together(tight))
        coeffs = univariate_coeffs(num, "_x")
        if coeffs:
            cands += [r for r in rational_roots(coeffs)
                      if 0 <= r <= 1]
    except (SizeLimitError, ZeroDivisionError):
        pass
    seen = set()
    S = addn([sym(v) for v in names])
    for x0 in cands:
        if x0 in seen or not (0 <= x0 <= 1):
            continue
        seen.add(x0)
        tb = tangent_line_check(f, Fraction(0), Fraction(1), x0)
        if tb is None or tb.direction != want:
            continue
        alpha = substitute(_diff(tb.line), {})
        beta = substitute(tb.line, {"_x": ZERO})
        if not isinstance(alpha, Const) or not isinstance(beta, Const):
            continue
        total = alpha.value + n * beta.value
        if want == "le" and total > c_val:
            continue
        if want == "ge" and total < c_val:
            continue
        new_terms = []
        for i, op in enumerate(ops):
            xi = sym(term_vars[i])
            li = substitute(tb.line, {"_x": muln([xi, pow_(S, Const(-1))])})
            new_terms.append(together(li))
        new_side = addn(new_terms)
        if want == "le":
            target = Inequality("<=", new_side, Const(c_val), asm)
            sub_stmt = f"{render(ops[0])} <= {render(new_terms[0])}"
        else:
            target = Inequality("<=", Const(c_val), new_side, asm)
            sub_stmt = f"{render(new_terms[0])} <= {render(ops[0])}"
        fx = render(substitute(f, {"_x": sym("x")}))
        lx = render(substitute(tb.line, {"_x": sym("x")}))
        rel = "<=" if want == "le" else ">="
        lines = (
            f"we have f(x) = {fx} {rel} {lx} for 0 < x < 1,",
            f"with certificate {render(tb.certificate)} "
            f"{'<= 0' if want == 'le' else '>= 0'} on (0, 1), which is true.",
            f"Substitute x for {term_vars[0]}/({render(S)}), we have "
            f"{sub_stmt}.",
        )
        return Goal(target, "check_linear_ctr", goal, payload=lines)
    return None


def _diff(e: Expr) -> Expr:
    from .expr import differentiate
    return differentiate(e, "_x")


# ---------------------------------------------------------------------------
# subgoal generation


def generate_subgoals(goal: Goal, budget: Optional[MatchBudget] = None,
                      registry: Optional[RuleRegistry] = None) -> List[Goal]:
    """Homogenization, tangent trick, theorem bounds on both sides, then
    every registry rule; deduplicated, deterministic order."""
    budget = budget or MatchBudget()
    registry = registry or RuleRegistry()
    t = goal.target
    small, large, strict = t.oriented()
    out: List[Goal] = []
    for s in homogenize(t):
        out.append(Goal(s, "try_homo", goal))
    out.extend(_tangent_subgoals(goal))
    asm = t.assumptions
    if not _is_atomic(small):
        for r in side_bounds(small, asm, budget, want=(UPPER,)):
            target = Inequality("<" if strict else "<=", r.produced, large, asm)
            out.append(Goal(target, r.theorem, goal, payload=r))
    if not _is_atomic(large):
        for r in side_bounds(large, asm, budget, want=(LOWER,)):
            target = Inequality("<" if strict else "<=", small, r.produced, asm)
            out.append(Goal(target, r.theorem, goal, payload=r))
    for tag in registry.tags:
        if tag == "try_homo":
            continue
        for s in apply_rule(tag, t, registry):
            out.append(Goal(s, tag, goal))
    seen = {goal.key()}
    uniq = []
    for g in out:
        k = g.key()
        if k in seen:
            continue
        seen.add(k)
        uniq.append(g)
    return uniq


def _is_atomic(e: Expr) -> bool:
    return isinstance(e, (Const, Sym))


# ---------------------------------------------------------------------------
# searches


Heuristic = Callable[[Goal], float]


def _heap_item(g: Goal, score: float, counter: int):
    return (score, g.tree_depth, g.length, g.key(), counter, g)


def _proof_from(goal: Goal, cert: Certificate) -> ProofTree:
    chain = []
    cur = goal
    while cur is not None:
        chain.append(cur)
        cur = cur.parent
    chain.reverse()
    return ProofTree(chain, cert)


def _score_goal(g: Goal, h: Heuristic) -> float:
    if g.derivation == "try_homo":
        return 0.0
    return float(h(g))


def best_first_search(root: Inequality | Goal, h: Heuristic,
                      limits: Optional[SearchLimits] = None,
                      seed: int = 0) -> SearchResult:
    """Pop the lowest-score goal, expand, certificate-check and prune each
    new subgoal; deterministic given (root, h, limits, seed)."""
    limits = limits or SearchLimits()
    root_goal = root if isinstance(root, Goal) else Goal(root)
    stats = SearchStats()
    t0 = time.monotonic()
    scored: dict = {}
    expanded: set = set()
    cert = is_trivially_true(root_goal, limits.match_budget)
    if cert is not None:
        stats.solved = True
        stats.elapsed = time.monotonic() - t0
        return SearchResult(_proof_from(root_goal, cert), stats,
                            scored, frozenset({root_goal.key()}),
                            frozenset())
    heap: list = []
    counter = 0
    seen = {root_goal.key()}
    root_goal.score = _score_goal(root_goal, h)
    scored[root_goal.key()] = (root_goal, root_goal.score)
    heapq.heappush(heap, _heap_item(root_goal, root_goal.score, counter))
    closed: set = set()
    while heap:
        if time.monotonic() - t0 > limits.time_limit or \
                stats.expansions >= limits.max_expansions:
            break
        _, _, _, key, _, goal = heapq.heappop(heap)
        if key in closed:
            continue
        closed.add(key)
        expanded.add(key)
        stats.expansions += 1
        subgoals = generate_subgoals(goal, limits.match_budget, limits.registry)
        stats.generated += len(subgoals)
        for sg in subgoals:
            k = sg.key()
            if k in seen:
                continue
            seen.add(k)
            cert = is_trivially_true(sg, limits.match_budget)
            if cert is not None:
                stats.solved = True
                stats.open_size = len(heap)
                stats.elapsed = time.monotonic() - t0
                sg.score = _score_goal(sg, h)
                scored[k] = (sg, sg.score)
                return SearchResult(_proof_from(sg, cert), stats, scored,
                                    frozenset(g.key() for g in _chain(sg)),
                                    frozenset(expanded))
            if falsify(sg, limits.falsify_samples, seed) is not None:
                stats.pruned += 1
                continue
            counter += 1
            sg.score = _score_goal(sg, h)
            scored[k] = (sg, sg.score)
            heapq.heappush(heap, _heap_item(sg, sg.score, counter))
        if len(heap) > limits.max_open:
            keep = heapq.nsmallest(limits.max_open // 2, heap)
            heap = keep
            heapq.heapify(heap)
    stats.open_size = len(heap)
    stats.elapsed = time.monotonic() - t0
    return SearchResult(None, stats, scored, frozenset(), frozenset(expanded))


def _chain(goal: Goal):
    cur = goal
    while cur is not None:
        yield cur
        cur = cur.parent


def bfs_search(root: Inequality | Goal,
               limits: Optional[SearchLimits] = None,
               seed: int = 0) -> SearchResult:
    """Depth-layered FIFO expansion, no heuristic."""
    limits = limits or SearchLimits()
    root_goal = root if isinstance(root, Goal) else Goal(root)
    stats = SearchStats()
    t0 = time.monotonic()
    cert = is_trivially_true(root_goal, limits.match_budget)
    if cert is not None:
        stats.solved = True
        stats.elapsed = time.monotonic() - t0
        return SearchResult(_proof_from(root_goal, cert), stats)
    queue = deque([root_goal])
    seen = {root_goal.key()}
    while queue:
        if time.monotonic() - t0 > limits.time_limit or \
                stats.expansions >= limits.max_expansions:
            break
        goal = queue.popleft()
        stats.expansions += 1
        for sg in generate_subgoals(goal, limits.match_budget, limits.registry):
            k = sg.key()
            if k in seen:
                continue
            seen.add(k)
            stats.generated += 1
            cert = is_trivially_true(sg, limits.match_budget)
            if cert is not None:
                stats.solved = True
                stats.elapsed = time.monotonic() - t0
                return SearchResult(_proof_from(sg, cert), stats)
            if falsify(sg, limits.falsify_samples, seed) is not None:
                stats.pruned += 1
                continue
            if len(queue) < limits.max_open:
                queue.append(sg)
    stats.open_size = len(queue)
    stats.elapsed = time.monotonic() - t0
    return SearchResult(None, stats)


def ucb_score(v: float, n_visits: int, total_visits: int, c: float) -> float:
    """Upper confidence bound v + c * sqrt(ln N / n)."""
    if n_visits == 0:
        return float("inf")
    return v + c * math.sqrt(math.log(total_visits) / n_visits)


class _MctsNode:
    __slots__ = ("goal", "children", "visits", "value", "expanded")

    def __init__(self, goal: Goal):
        self.goal = goal
        self.children: List["_MctsNode"] = []
        self.visits = 0
        self.value = 0.0
        self.expanded = False


def mcts_search(root: Inequality | Goal, h: Heuristic,
                cfg: Optional[MctsConfig] = None,
                limits: Optional[SearchLimits] = None,
                seed: int = 0) -> SearchResult:
    """UCB selection over at most k children per node; child values come
    from the heuristic directly or from a short best-first lookahead."""
    cfg = cfg or MctsConfig()
    limits = limits or SearchLimits()
    root_goal = root if isinstance(root, Goal) else Goal(root)
    stats = SearchStats()
    t0 = time.monotonic()
    cert = is_trivially_true(root_goal, limits.match_budget)
    if cert is not None:
        stats.solved = True
        stats.elapsed = time.monotonic() - t0
        return SearchResult(_proof_from(root_goal, cert), stats)
    tree = _MctsNode(root_goal)
    seen = {root_goal.key()}
    while True:
        if time.monotonic() - t0 > limits.time_limit or \
                stats.expansions >= limits.max_expansions:
            break
        node = tree
        path = [node]
        while node.expanded and node.children:
            node = max(node.children,
                       key=lambda ch: ucb_score(ch.value, ch.visits,
                                                max(node.visits, 1), cfg.c))
            path.append(node)
        if not node.expanded:
            result = _mcts_expand(node, h, cfg, limits, seen, stats, seed, t0)
            if result is not None:
                stats.solved = True
                stats.elapsed = time.monotonic() - t0
                return SearchResult(result, stats)
        for n in path:
            n.visits += 1
        if node.expanded and not node.children:
            node.value = -1.0  # dead end, discourage
        if not tree.children and tree.expanded:
            break
    stats.elapsed = time.monotonic() - t0
    return SearchResult(None, stats)


def _mcts_expand(node: _MctsNode, h: Heuristic, cfg: MctsConfig,
                 limits: SearchLimits, seen: set, stats: SearchStats,
                 seed: int, t0: float) -> Optional[ProofTree]:
    node.expanded = True
    stats.expansions += 1
    candidates = []
    for sg in generate_subgoals(node.goal, limits.match_budget, limits.registry):
        k = sg.key()
        if k in seen:
            continue
        seen.add(k)
        stats.generated += 1
        cert = is_trivially_true(sg, limits.match_budget)
        if cert is not None:
            return _proof_from(sg, cert)
        if falsify(sg, limits.falsify_samples, seed) is not None:
            stats.pruned += 1
            continue
        sg.score = _score_goal(sg, h)
        candidates.append(sg)
    candidates.sort(key=lambda g: (g.score, g.tree_depth, g.length, g.key()))
    for sg in candidates[:cfg.k]:
        ch = _MctsNode(sg)
        if cfg.value_mode == "lookahead":
            ch.value = 1.0 - _lookahead_best(sg, h, cfg.lookahead_depth,
                                             limits, seed)
        else:
            ch.value = 1.0 - sg.score
        node.children.append(ch)
    return None


def _lookahead_best(goal: Goal, h: Heuristic, depth: int,
                    limits: SearchLimits, seed: int) -> float:
    best = goal.score if goal.score is not None else float(h(goal))
    frontier = [goal]
    for _ in range(depth):
        nxt = []
        for g in frontier[:3]:
            for sg in generate_subgoals(g, limits.match_budget, limits.registry):
                sg.score = float(h(sg))
                best = min(best, sg.score)
                nxt.append(sg)
        nxt.sort(key=lambda g: (g.score, g.tree_depth, g.length, g.key()))
        frontier = nxt[:3]
        if not frontier:
            break
    return best


# ---------------------------------------------------------------------------
# rendering and replay


def render_proof(proof: ProofTree) -> str:
    """One block per step, in the house style of the solver's transcripts."""
    lines: List[str] = []
    goals = proof.goals
    lines.append("To prove")
    lines.append(f"    {goals[0].target.render()}")
    for g in goals[1:]:
        if g.derivation == "try_homo":
            lines.append("by <function try_homo>, it is equivalent to prove")
        elif g.derivation == "holder":
            for ln in (g.payload.instantiation if g.payload else ()):
                lines.append(ln)
            lines.append("It remains to prove")
        elif g.derivation == "jensen":
            for ln in (g.payload.instantiation if g.payload else ()):
                lines.append(ln)
            lines.append("it remains to prove")
        elif g.derivation == "check_linear_ctr":
            for ln in (g.payload or ()):
                lines.append(ln)
            lines.append("It remains to prove")
        else:
            lines.append(f"by <function {g.derivation}>, it remains to prove")
        lines.append(f"    {g.target.render()}")
    lines.append(f"by <function {proof.certificate.name}>, this is true!")
    return "\n".join(lines)


def replay(proof: ProofTree, budget: Optional[MatchBudget] = None,
           registry: Optional[RuleRegistry] = None) -> bool:
    """Re-derive every step from its parent and re-verify the terminal."""
    budget = budget or MatchBudget()
    registry = registry or RuleRegistry()
    for parent, child in zip(proof.goals, proof.goals[1:]):
        fresh = Goal(parent.target)
        regenerated = generate_subgoals(fresh, budget, registry)
        if not any(g.key() == child.key() and g.derivation == child.derivation
                   for g in regenerated):
            return False
    return is_trivially_true(proof.goals[-1], budget) is not None
