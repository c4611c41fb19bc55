"""
Random k-uniform hypergraphs and random k-QSAT instances.

All samplers take a ``numpy.random.Generator``. :func:`make_rng` builds the
counter-based Philox generator used throughout; per-trial streams use the
key ``seed ^ trial``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from .qsat import Projector, QsatInstance, haar_random_state

__all__ = [
    "Hypergraph",
    "DegreeStats",
    "PoissonFactReport",
    "RejectionBudgetExceeded",
    "make_rng",
    "trial_seed",
    "sample_k_subsets",
    "sample_gknm",
    "sample_gknp",
    "sample_regular",
    "edge_count",
    "random_instance",
    "instance_from_hypergraph",
    "hypergraph_of",
    "degree_stats",
    "poisson_conditional_mean_check",
    "dumps_hypergraph",
    "loads_hypergraph",
]


class RejectionBudgetExceeded(RuntimeError):
    def __init__(self, attempts: int):
        super().__init__(f"no valid regular hypergraph after {attempts} attempts")
        self.attempts = attempts


def trial_seed(seed: int, trial: int) -> int:
    return (seed ^ trial) & 0xFFFFFFFFFFFFFFFF


def make_rng(seed: int, trial: int | None = None) -> np.random.Generator:
    """Philox generator keyed by a 64-bit seed (xor the trial index if given)."""
    key = seed & 0xFFFFFFFFFFFFFFFF if trial is None else trial_seed(seed, trial)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """k-uniform multi-hypergraph; ``edges`` is an (m, k) int array with sorted rows."""

    n_vertices: int
    k: int
    edges: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        e = np.array(self.edges, dtype=np.int64, copy=True).reshape(-1, self.k)
        if e.size:
            e.sort(axis=1)
            if e.min() < 0 or e.max() >= self.n_vertices:
                raise ValueError("edge vertex out of range")
            if self.k > 1 and np.any(e[:, 1:] == e[:, :-1]):
                raise ValueError("edge with repeated vertex")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices)

    def edge_list(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.edges]


def sample_k_subsets(n: int, k: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """m independent uniform k-subsets of range(n), vectorised Floyd sampling."""
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    out = np.empty((m, k), dtype=np.int64)
    for i, j in enumerate(range(n - k, n)):
        t = rng.integers(0, j + 1, size=m)
        clash = (out[:, :i] == t[:, None]).any(axis=1) if i else np.zeros(m, dtype=bool)
        out[:, i] = np.where(clash, j, t)
    out.sort(axis=1)
    return out


def sample_gknm(n: int, m: int, k: int, rng: np.random.Generator) -> Hypergraph:
    """G_k(n, m): m uniform k-subsets drawn with replacement."""
    return Hypergraph(n, k, sample_k_subsets(n, k, m, rng))


def _unrank_combination(rank: int, k: int) -> list[int]:
    # colex order: rank = sum_i C(c_i, i), c_k > ... > c_1 >= 0
    out = []
    for i in range(k, 0, -1):
        c = i - 1
        while math.comb(c + 1, i) <= rank:
            c += 1
        out.append(c)
        rank -= math.comb(c, i)
    return sorted(out)


def sample_gknp(n: int, p: float, k: int, rng: np.random.Generator) -> Hypergraph:
    """G_k(n, p): Binomial(C(n,k), p) edges, then that many distinct uniform subsets."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    total = math.comb(n, k)
    if total < 2 ** 62:
        count = int(rng.binomial(total, p))
        ranks = rng.choice(total, size=count, replace=False) if count else []
        edges = [_unrank_combination(int(r), k) for r in ranks]
    else:
        # beyond int64 the count is drawn from its Poisson limit; only tiny p is feasible here
        count = int(rng.poisson(total * p))
        seen: set[tuple[int, ...]] = set()
        while len(seen) < count:
            for row in sample_k_subsets(n, k, count - len(seen), rng):
                seen.add(tuple(row))
        edges = sorted(seen)
    edges = np.array(sorted(map(tuple, edges)), dtype=np.int64).reshape(-1, k)
    return Hypergraph(n, k, edges)


def sample_regular(n: int, D: int, k: int, rng: np.random.Generator,
                   max_attempts: int = 100_000) -> Hypergraph:
    """D-regular k-uniform hypergraph by the configuration model.

    D copies of every vertex are shuffled and cut into blocks of k; the whole
    pairing is redrawn if any block repeats a vertex. Repeated edges are kept.
    """
    if (n * D) % k:
        raise ValueError(f"k={k} does not divide D*n={D * n}")
    stubs = np.repeat(np.arange(n, dtype=np.int64), D)
    if stubs.size == 0:
        return Hypergraph(n, k, np.zeros((0, k), dtype=np.int64))
    for _ in range(max_attempts):
        blocks = rng.permutation(stubs).reshape(-1, k)
        blocks.sort(axis=1)
        if k == 1 or not np.any(blocks[:, 1:] == blocks[:, :-1]):
            return Hypergraph(n, k, blocks)
    raise RejectionBudgetExceeded(max_attempts)


def instance_from_hypergraph(g: Hypergraph, rng: np.random.Generator) -> QsatInstance:
    """One independent Haar rank-1 projector per edge."""
    projs = tuple(Projector(tuple(int(v) for v in e), haar_random_state(g.k, rng))
                  for e in g.edges)
    return QsatInstance(g.n_vertices, projs)


def edge_count(n: int, alpha: float) -> int:
    """m = round(alpha * n), halves rounded up, computed exactly.

    A float alpha is read as the decimal it prints as, so 0.3 means 3/10.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    a = Fraction(repr(alpha)) if isinstance(alpha, float) else Fraction(alpha)
    return math.floor(a * n + Fraction(1, 2))


def random_instance(n: int, alpha: float, k: int, rng: np.random.Generator) -> QsatInstance:
    """Random k-QSAT: G_k(n, m) with m = round(alpha * n), then Haar rank-1 projectors."""
    return instance_from_hypergraph(sample_gknm(n, edge_count(n, alpha), k, rng), rng)


def hypergraph_of(inst: QsatInstance) -> Hypergraph:
    """Constraint hypergraph of a uniform-locality instance."""
    k = inst.k
    if any(p.locality != k for p in inst.projectors):
        raise ValueError("instance has mixed locality")
    edges = np.array([p.qubits for p in inst.projectors], dtype=np.int64).reshape(-1, max(k, 1))
    return Hypergraph(inst.n_qubits, max(k, 1), edges)


@dataclass(frozen=True)
class DegreeStats:
    degrees: np.ndarray
    max: int
    mean: Fraction
    histogram: np.ndarray


def degree_stats(g: Hypergraph) -> DegreeStats:
    deg = g.degrees()
    return DegreeStats(degrees=deg, max=int(deg.max(initial=0)),
                       mean=Fraction(g.k * g.m, g.n_vertices),
                       histogram=np.bincount(deg))


@dataclass(frozen=True)
class PoissonFactReport:
    lam: float
    c: float
    threshold: int
    n_conditioned: int
    mean: float | None
    upper: float | None
    bound: float
    verdict: str


def poisson_conditional_mean_check(lam: float, c: float, trials: int,
                                   rng: np.random.Generator,
                                   confidence: float = 0.99) -> PoissonFactReport:
    """Monte Carlo check of E[X | X >= c*lam] <= (c+1)*lam for X ~ Poisson(lam).

    The threshold is ceil(c*lam). ``upper`` is a one-sided normal-approximation
    confidence bound on the conditional mean.
    """
    threshold = math.ceil(c * lam)
    x = rng.poisson(lam, size=trials)
    sel = x[x >= threshold]
    bound = (c + 1) * lam
    if sel.size < 2:
        return PoissonFactReport(lam, c, threshold, int(sel.size), None, None, bound,
                                 "inconclusive")
    mean = float(sel.mean())
    se = float(sel.std(ddof=1)) / math.sqrt(sel.size)
    upper = mean + float(stats.norm.ppf(confidence)) * se
    return PoissonFactReport(lam, c, threshold, int(sel.size), mean, upper, bound,
                             "pass" if upper <= bound else "fail")


# -- text format: "k n m" header then one sorted edge per line ----------------

def dumps_hypergraph(g: Hypergraph) -> str:
    lines = [f"{g.k} {g.n_vertices} {g.m}"]
    lines += [" ".join(map(str, row)) for row in g.edges.tolist()]
    return "\n".join(lines) + "\n"


def loads_hypergraph(text: str) -> Hypergraph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0]) != 3:
        raise ValueError("line 1: expected header 'k n m'")
    try:
        k, n, m = map(int, rows[0])
        edges = [[int(t) for t in r] for r in rows[1:]]
    except ValueError as exc:
        raise ValueError(f"non-integer token: {exc}") from None
    if len(edges) != m:
        raise ValueError(f"header declares {m} edges, found {len(edges)}")
    for i, e in enumerate(edges, start=2):
        if len(e) != k:
            raise ValueError(f"line {i}: expected {k} vertices, got {len(e)}")
    return Hypergraph(n, k, np.array(edges, dtype=np.int64).reshape(-1, k))
