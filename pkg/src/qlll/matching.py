"""
Matching of constraints to private qubits (Hall's condition).

The bipartite graph has hyperedges on the left and vertices on the right.
Maximum matching is Hopcroft-Karp; when some edge stays unmatched, the
alternating-path closure of that edge is returned as a Hall violator: a set
of t edges whose union has t - 1 vertices.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["Matching", "hall_matching", "hopcroft_karp", "check_matching"]

_INF = float("inf")


@dataclass(frozen=True)
class Matching:
    """A maximum matching of edges to vertices.

    ``pairs`` maps edge index -> vertex. If not every edge could be matched,
    ``violator`` lists edge indices whose union (``violator_vertices``) is
    strictly smaller than the set itself.
    """

    pairs: dict[int, int]
    n_edges: int
    violator: tuple[int, ...] | None = None
    violator_vertices: tuple[int, ...] | None = None

    @property
    def perfect(self) -> bool:
        return self.violator is None

    def to_dict(self) -> dict:
        d: dict = {"perfect": self.perfect,
                   "pairs": [[e, v] for e, v in sorted(self.pairs.items())]}
        if self.violator is not None:
            d["violator"] = list(self.violator)
            d["violator_vertices"] = list(self.violator_vertices)
        return d


def hopcroft_karp(adj: Sequence[Sequence[int]], n_right: int) -> list[int]:
    """Maximum bipartite matching; returns match[u] (right vertex or -1) per left node."""
    n_left = len(adj)
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [_INF] * n_left

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = _INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def augment(root: int) -> bool:
        # iterative DFS along the BFS layering
        stack = [root]
        via: list[int] = []
        ptr = {root: 0}
        while stack:
            u = stack[-1]
            nbrs = adj[u]
            i = ptr[u]
            pushed = False
            while i < len(nbrs):
                v = nbrs[i]
                i += 1
                w = match_r[v]
                if w == -1:
                    ptr[u] = i
                    via.append(v)
                    for uu, vv in zip(stack, via):
                        match_l[uu] = vv
                        match_r[vv] = uu
                    return True
                if dist[w] == dist[u] + 1:
                    ptr[u] = i
                    ptr[w] = 0
                    via.append(v)
                    stack.append(w)
                    pushed = True
                    break
            if not pushed:
                dist[u] = _INF
                stack.pop()
                if via:
                    via.pop()
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == -1:
                augment(u)
    return match_l


def hall_matching(edges: Iterable[Iterable[int]], n: int) -> Matching:
    """Match every edge to one of its own vertices, injectively, if possible."""
    adj = [sorted(set(int(v) for v in e)) for e in edges]
    for i, a in enumerate(adj):
        if a and not (0 <= a[0] and a[-1] < n):
            raise ValueError(f"edge {i} has a vertex outside [0, {n})")
    match_l = hopcroft_karp(adj, n)
    pairs = {u: v for u, v in enumerate(match_l) if v != -1}
    free = [u for u, v in enumerate(match_l) if v == -1]
    if not free:
        return Matching(pairs, len(adj))
    # alternating closure from one unmatched edge: every reached vertex is
    # matched (the matching is maximum), so |vertices| = |edges| - 1
    match_r = {v: u for u, v in pairs.items()}
    left = {free[0]}
    right: set[int] = set()
    q = deque([free[0]])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in right:
                right.add(v)
                w = match_r[v]
                if w not in left:
                    left.add(w)
                    q.append(w)
    return Matching(pairs, len(adj), tuple(sorted(left)), tuple(sorted(right)))


def check_matching(edges: Sequence[Iterable[int]], m: Matching) -> bool:
    """Independent validation of a matching or a Hall violator against ``edges``."""
    sets = [set(e) for e in edges]
    if m.violator is not None:
        union = set().union(*(sets[i] for i in m.violator)) if m.violator else set()
        return len(union) < len(m.violator) and union == set(m.violator_vertices)
    if set(m.pairs) != set(range(len(sets))):
        return False
    if len(set(m.pairs.values())) != len(m.pairs):
        return False
    return all(v in sets[e] for e, v in m.pairs.items())
