"""Goal scoring: tree-depth baseline, a trainable feature-based value
model with curriculum relabeling, and the external-scorer wire protocol.

The value model stands in for a neural scorer: a fixed feature vector per
goal feeds a one-hidden-layer network with a sigmoid output in (0, 1).
Lower scores are popped first by the best-first search, so "easy" goals
must score low; the pretraining target is depth/(depth+1).
"""

from __future__ import annotations

import base64
import math
import select
import socket
import subprocess
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .expr import Add, Const, Expr, Mul, Pow, Sym, free_symbols, walk
from .ineq import Inequality
from .poly import SizeLimitError, is_homogeneous_pair, to_poly
from .prover import Goal, SearchLimits, SearchResult, best_first_search

FEATURE_DIM = 10


def tree_depth_score(goal: Goal) -> float:
    """depth/(depth+1): a solved form (depth 1) scores 1/2, deep goals
    approach 1.  Lower is better for the open list."""
    d = goal.tree_depth
    return d / (d + 1)


def features(goal: Goal) -> np.ndarray:
    t = goal.target
    d, length = goal.metrics
    n_add = n_mul = n_pow = fracs = radicals = 0
    for side in (t.lhs, t.rhs):
        for _, node in walk(side):
            if isinstance(node, Add):
                n_add += 1
            elif isinstance(node, Mul):
                n_mul += 1
            elif isinstance(node, Pow):
                n_pow += 1
                if isinstance(node.exp, Const):
                    ev = node.exp.value
                    if ev < 0:
                        fracs += 1
                    if ev.denominator != 1:
                        radicals += 1
    max_deg = 0.0
    for side in (t.lhs, t.rhs):
        try:
            p = to_poly(side, cap=400)
        except SizeLimitError:
            continue
        for m in p:
            deg = sum((float(exp) for atom, exp in m if isinstance(atom, Sym)),
                      0.0)
            max_deg = max(max_deg, deg)
    homog = 1.0 if is_homogeneous_pair(t.lhs, t.rhs) else 0.0
    return np.array([d, length, n_add, n_mul, n_pow,
                     len(t.free_symbols()), max_deg, fracs, radicals, homog],
                    dtype=float)


class ValueModel:
    """One hidden tanh layer, sigmoid output, SGD on squared error.

    Inputs are standardized by running statistics collected during
    training.  Output is strictly inside (0, 1)."""

    def __init__(self, hidden: int = 32, lr: float = 1e-2, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.hidden = hidden
        self.lr = lr
        self.w1 = rng.normal(0, 0.3, size=(hidden, FEATURE_DIM))
        self.b1 = np.zeros(hidden)
        self.w2 = rng.normal(0, 0.3, size=hidden)
        self.b2 = 0.0
        self.mean = np.zeros(FEATURE_DIM)
        self.var = np.ones(FEATURE_DIM)
        self.count = 0

    # -- running standardization

    def _observe(self, x: np.ndarray):
        self.count += 1
        if self.count == 1:
            self.mean = x.copy()
            self.var = np.ones_like(x)
            self._m2 = np.zeros_like(x)
            return
        m2 = getattr(self, "_m2", self.var * max(self.count - 1, 1))
        delta = x - self.mean
        self.mean = self.mean + delta / self.count
        m2 = m2 + delta * (x - self.mean)
        self._m2 = m2
        self.var = np.maximum(m2 / max(self.count - 1, 1), 1e-8)

    def _norm(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / np.sqrt(self.var)

    # -- forward / backward

    def predict_features(self, x: np.ndarray) -> float:
        z = self._norm(x)
        hsum = self.w1 @ z + self.b1
        hact = np.tanh(hsum)
        out = self.w2 @ hact + self.b2
        return float(1.0 / (1.0 + math.exp(-out)))

    def score(self, goal: Goal) -> float:
        return self.predict_features(features(goal))

    __call__ = score

    def train_one(self, x: np.ndarray, target: float, observe: bool = True):
        if observe:
            self._observe(x)
        z = self._norm(x)
        hsum = self.w1 @ z + self.b1
        hact = np.tanh(hsum)
        out = self.w2 @ hact + self.b2
        y = 1.0 / (1.0 + math.exp(-out))
        # d/dout of (y - target)^2
        grad_out = 2.0 * (y - target) * y * (1.0 - y)
        grad_w2 = grad_out * hact
        grad_b2 = grad_out
        grad_h = grad_out * self.w2 * (1.0 - hact ** 2)
        grad_w1 = np.outer(grad_h, z)
        grad_b1 = grad_h
        self.w2 -= self.lr * grad_w2
        self.b2 -= self.lr * grad_b2
        self.w1 -= self.lr * grad_w1
        self.b1 -= self.lr * grad_b1

    # -- checkpoints

    def save(self, path: str):
        parts = [self.mean, np.asarray(self.var), np.array([float(self.count)]),
                 self.w1.ravel(), self.b1, self.w2, np.array([self.b2])]
        with open(path, "w") as fh:
            fh.write(f"IFVM 1 {FEATURE_DIM} {self.hidden}\n")
            for arr in parts:
                for v in np.asarray(arr).ravel():
                    fh.write(repr(float(v)) + "\n")

    @classmethod
    def load(cls, path: str) -> "ValueModel":
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 4 or header[0] != "IFVM" or header[1] != "1":
                raise ValueError("bad checkpoint header")
            fd, hidden = int(header[2]), int(header[3])
            if fd != FEATURE_DIM:
                raise ValueError(f"feature dim mismatch: {fd}")
            vals = [float(line) for line in fh if line.strip()]
        model = cls(hidden=hidden)
        it = iter(vals)

        def take(n):
            return np.array([next(it) for _ in range(n)])

        model.mean = take(fd)
        model.var = take(fd)
        model.count = int(take(1)[0])
        model._m2 = model.var * max(model.count - 1, 1)
        model.w1 = take(hidden * fd).reshape(hidden, fd)
        model.b1 = take(hidden)
        model.w2 = take(hidden)
        model.b2 = float(take(1)[0])
        return model


def pretrain(model: ValueModel, dataset: Sequence[Tuple[Goal, int]],
             epochs: int = 60, seed: int = 0) -> ValueModel:
    """Regress the model output toward depth/(depth+1)."""
    if not dataset:
        raise ValueError("empty dataset")
    feats = [features(g) for g, _ in dataset]
    targets = [d / (d + 1) for _, d in dataset]
    for x in feats:
        model._observe(x)
    rng = np.random.default_rng(seed)
    idx = np.arange(len(dataset))
    for _ in range(epochs):
        rng.shuffle(idx)
        for i in idx:
            model.train_one(feats[i], targets[i], observe=False)
    return model


@dataclass
class CurriculumConfig:
    epsilon: float = 0.3
    eta: float = 0.7
    loops: int = 10
    time_cap: float = 2400.0      # 40 minutes per problem
    max_expansions: int = 500

    def __post_init__(self):
        if not (0 < self.epsilon < 1 and 0 < self.eta < 1):
            raise ValueError("epsilon and eta must lie in (0, 1)")


def curriculum_relabel(path: Sequence[Tuple[Goal, float]],
                       off_path: Sequence[Tuple[Goal, float]],
                       cfg: CurriculumConfig) -> List[Tuple[Goal, float]]:
    """Path values scale by epsilon; off-path values blend toward 1:
    max(m, v) * eta + 1 - eta with m the max relabeled path value."""
    labeled = [(g, cfg.epsilon * v) for g, v in path]
    m = max((lv for _, lv in labeled), default=0.0)
    for g, v in off_path:
        labeled.append((g, max(m, v) * cfg.eta + 1 - cfg.eta))
    return labeled


@dataclass
class CurriculumReport:
    rows: List[dict] = field(default_factory=list)

    def solved_count(self) -> int:
        return sum(1 for r in self.rows if r["solved"])


ProverHandle = Callable[[Inequality, Callable[[Goal], float]], SearchResult]


def default_prover(limits: Optional[SearchLimits] = None) -> ProverHandle:
    def run(problem: Inequality, h):
        lim = limits or SearchLimits()
        return best_first_search(problem, h, lim)
    return run


def curriculum_run(model: ValueModel, problems: Sequence[Inequality],
                   prover: Optional[ProverHandle] = None,
                   cfg: Optional[CurriculumConfig] = None
                   ) -> Tuple[ValueModel, CurriculumReport]:
    """Solve the pre-sorted problems in order; after each solve, relabel
    the proof-path and searched-off-path goals and fine-tune in place."""
    cfg = cfg or CurriculumConfig()
    prover = prover or default_prover(SearchLimits(
        time_limit=cfg.time_cap, max_expansions=cfg.max_expansions))
    report = CurriculumReport()
    for i, problem in enumerate(problems):
        result = prover(problem, model.score)
        row = {"index": i, "solved": result.stats.solved,
               "expansions": result.stats.expansions,
               "elapsed": result.stats.elapsed}
        report.rows.append(row)
        if not result.stats.solved:
            continue
        path = [(g, v) for k, (g, v) in result.scored.items()
                if k in result.path_keys]
        off = [(g, v) for k, (g, v) in result.scored.items()
               if k in result.expanded_keys and k not in result.path_keys]
        labeled = curriculum_relabel(path, off, cfg)
        for _ in range(cfg.loops):
            for g, label in labeled:
                model.train_one(features(g), label)
    return model, report


# ---------------------------------------------------------------------------
# external scorer protocol


class ProtocolError(Exception):
    pass


class ScorerTimeout(ProtocolError):
    pass


class _LineTransport:
    def send_line(self, line: str):
        raise NotImplementedError

    def recv_line(self, timeout: float) -> str:
        raise NotImplementedError

    def close(self):
        pass


class SubprocessTransport(_LineTransport):
    def __init__(self, cmd: Sequence[str]):
        self.proc = subprocess.Popen(list(cmd), stdin=subprocess.PIPE,
                                     stdout=subprocess.PIPE, text=True,
                                     bufsize=1)

    def send_line(self, line: str):
        if self.proc.stdin is None:
            raise ProtocolError("connection lost")
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError) as e:
            raise ProtocolError(f"connection lost: {e}") from None

    def recv_line(self, timeout: float) -> str:
        out = self.proc.stdout
        if out is None:
            raise ProtocolError("connection lost")
        ready, _, _ = select.select([out], [], [], timeout)
        if not ready:
            raise ScorerTimeout(f"no reply within {timeout}s")
        line = out.readline()
        if not line:
            raise ProtocolError("connection closed")
        return line.rstrip("\n")

    def close(self):
        try:
            if self.proc.stdin:
                self.proc.stdin.close()
            self.proc.wait(timeout=5)
        except Exception:
            self.proc.kill()


class TcpTransport(_LineTransport):
    def __init__(self, host: str, port: int):
        self.sock = socket.create_connection((host, port), timeout=10)
        self.file = self.sock.makefile("rw", newline="\n")

    def send_line(self, line: str):
        self.file.write(line + "\n")
        self.file.flush()

    def recv_line(self, timeout: float) -> str:
        self.sock.settimeout(timeout)
        try:
            line = self.file.readline()
        except socket.timeout:
            raise ScorerTimeout(f"no reply within {timeout}s") from None
        if not line:
            raise ProtocolError("connection closed")
        return line.rstrip("\n")

    def close(self):
        try:
            self.file.close()
            self.sock.close()
        except Exception:
            pass


class ScorerClient:
    """HELLO/READY handshake, then strictly serialized SCORE/VALUE."""

    def __init__(self, transport: _LineTransport, timeout: float = 5.0):
        self.transport = transport
        self.timeout = timeout
        self.counter = 0
        self.transport.send_line("HELLO 1")
        reply = self.transport.recv_line(timeout)
        if reply != "READY":
            raise ProtocolError(f"expected READY, got {reply!r}")

    def score_text(self, text: str) -> float:
        self.counter += 1
        rid = self.counter
        payload = base64.b64encode(text.encode()).decode()
        self.transport.send_line(f"SCORE {rid} {payload}")
        reply = self.transport.recv_line(self.timeout)
        parts = reply.split(maxsplit=2)
        if len(parts) >= 2 and parts[0] == "ERR":
            raise ProtocolError(f"scorer error: {reply}")
        if len(parts) != 3 or parts[0] != "VALUE":
            raise ProtocolError(f"malformed reply {reply!r}")
        if parts[1] != str(rid):
            raise ProtocolError(f"reply id mismatch: {reply!r}")
        try:
            value = float(parts[2])
        except ValueError:
            raise ProtocolError(f"bad value in {reply!r}") from None
        if not (0.0 <= value <= 1.0) or math.isnan(value):
            raise ProtocolError(f"value out of range: {value}")
        return value

    def close(self):
        try:
            self.transport.send_line("BYE")
        except ProtocolError:
            pass
        self.transport.close()


def goal_wire_text(goal: Goal) -> str:
    small, large, strict = goal.target.oriented()
    from .expr import render
    rel = "<" if strict else "<="
    return f"{render(small)} {rel} {render(large)}"


def external_score(conn: ScorerClient, goal: Goal) -> float:
    """Score a goal through the wire protocol; protocol violations raise."""
    return conn.score_text(goal_wire_text(goal))


def external_heuristic(conn: ScorerClient) -> Callable[[Goal], float]:
    def h(goal: Goal) -> float:
        return external_score(conn, goal)
    return h
