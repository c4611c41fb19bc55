"""
High-degree decomposition, gluing, and the hybrid matching + QLLL certificate.

The constraint hypergraph is split into a high-degree closure V_H with its
induced edges H, and the remaining edges L, each of which meets V_H in at
most one vertex. H is certified by a matching; L, after each edge touching
V_H is replaced by a rank <= 2 projector on its other k - 1 qubits, is
certified by the degree-bounded local lemma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from .ensembles import Hypergraph, hypergraph_of
from .matching import Matching, hall_matching
from .qsat import Projector, QsatInstance, check_state
from .subspace import DEFAULT_TOL, Tolerances, span

__all__ = [
    "Partition",
    "GlueSplit",
    "GlueError",
    "HybridCertificate",
    "RegionReport",
    "build_vh",
    "partition_violations",
    "decouple_projector",
    "glue_transform",
    "glue_states",
    "hybrid_threshold",
    "hybrid_certificate",
    "region_report",
]


@dataclass(frozen=True)
class Partition:
    """V_H, H and L with the layer trace V_0, V_1, ... and E_1, E_2, ..."""

    n_vertices: int
    cutoff: float
    v_h: tuple[int, ...]
    h_edges: tuple[int, ...]
    l_edges: tuple[int, ...]
    vertex_layers: tuple[tuple[int, ...], ...]
    edge_layers: tuple[tuple[int, ...], ...]

    def to_dict(self, include_l: bool = True) -> dict[str, Any]:
        d = {
            "n_vertices": self.n_vertices,
            "cutoff": self.cutoff,
            "v_h": list(self.v_h),
            "h_edges": list(self.h_edges),
            "vertex_layers": [list(x) for x in self.vertex_layers],
            "edge_layers": [list(x) for x in self.edge_layers],
            "sizes": {"v_h": len(self.v_h), "h": len(self.h_edges), "l": len(self.l_edges)},
        }
        if include_l:
            d["l_edges"] = list(self.l_edges)
        return d


def build_vh(g: Hypergraph, D: float) -> Partition:
    """Layered closure: V_0 = {deg > D}; step i moves every remaining edge with
    two or more vertices in V_0 ∪ ... ∪ V_{i-1} into E_i and its new vertices
    into V_i; stop when E_i is empty."""
    if not D > 0:
        raise ValueError("cutoff D must be positive")
    edges = g.edges
    in_vh = np.zeros(g.n_vertices, dtype=bool)
    in_h = np.zeros(g.m, dtype=bool)
    count = np.zeros(g.m, dtype=np.int64)
    frontier = np.flatnonzero(g.degrees() > D)
    in_vh[frontier] = True
    vertex_layers = [tuple(int(v) for v in frontier)]
    edge_layers = []
    while frontier.size and g.m:
        mark = np.zeros(g.n_vertices, dtype=bool)
        mark[frontier] = True
        count += mark[edges].sum(axis=1)
        layer = np.flatnonzero((count >= 2) & ~in_h)
        if layer.size == 0:
            break
        in_h[layer] = True
        touched = np.unique(edges[layer].ravel())
        frontier = touched[~in_vh[touched]]
        in_vh[frontier] = True
        edge_layers.append(tuple(int(e) for e in layer))
        if frontier.size:
            vertex_layers.append(tuple(int(v) for v in frontier))
    return Partition(
        n_vertices=g.n_vertices,
        cutoff=float(D),
        v_h=tuple(int(v) for v in np.flatnonzero(in_vh)),
        h_edges=tuple(int(e) for e in np.flatnonzero(in_h)),
        l_edges=tuple(int(e) for e in np.flatnonzero(~in_h)),
        vertex_layers=tuple(vertex_layers) if vertex_layers[0] else (),
        edge_layers=tuple(edge_layers),
    )


def partition_violations(g: Hypergraph, part: Partition) -> list[str]:
    """Audit a partition against the construction's invariants; [] means sound."""
    problems = []
    seen: set[int] = set()
    for i, layer in enumerate(part.vertex_layers):
        if seen & set(layer):
            problems.append(f"vertex layer {i} overlaps earlier layers")
        seen |= set(layer)
    if seen != set(part.v_h):
        problems.append("v_h differs from the union of vertex layers")
    seen_e: set[int] = set()
    for i, layer in enumerate(part.edge_layers, start=1):
        if seen_e & set(layer):
            problems.append(f"edge layer {i} overlaps earlier layers")
        seen_e |= set(layer)
    if seen_e != set(part.h_edges):
        problems.append("h_edges differs from the union of edge layers")
    if set(part.h_edges) | set(part.l_edges) != set(range(g.m)) or set(part.h_edges) & set(part.l_edges):
        problems.append("h_edges and l_edges do not partition the edge set")
    in_vh = np.zeros(g.n_vertices, dtype=bool)
    in_vh[list(part.v_h)] = True
    hits = in_vh[g.edges].sum(axis=1) if g.m else np.zeros(0, dtype=int)
    induced = set(np.flatnonzero(hits == g.k).tolist())
    if induced != set(part.h_edges):
        problems.append("H is not the edge set induced on V_H")
    if np.any(hits[list(part.l_edges)] > 1):
        problems.append("some L edge has two or more vertices in V_H")
    deg = g.degrees()
    if set(np.flatnonzero(deg > part.cutoff).tolist()) != set(part.vertex_layers[0] if part.vertex_layers else ()):
        problems.append("V_0 is not the set of vertices with degree above the cutoff")
    return problems


# -- gluing ------------------------------------------------------------------

class GlueError(ValueError):
    """Gluing precondition failed; ``residuals`` holds offending values if any."""

    def __init__(self, message: str, residuals: dict[str, list[float]] | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


def decouple_projector(p: Projector, pos: int,
                       tol: Tolerances = DEFAULT_TOL) -> tuple[tuple[int, ...], np.ndarray]:
    """Split off the qubit at position ``pos`` of ``p``.

    Writes each local vector as |0>|v^0> a_0 + |1>|v^1> a_1 and returns the
    remaining qubits with an orthonormal basis of span{v^0, v^1} (rows).
    Components of norm at most ``tol.rank`` are dropped.
    """
    k = p.locality
    t = p.vectors.reshape((p.rank,) + (2,) * k)
    t = np.moveaxis(t, 1 + pos, 1).reshape(2 * p.rank, 2 ** (k - 1))
    t = t[np.linalg.norm(t, axis=1) > tol.rank]
    rest = p.qubits[:pos] + p.qubits[pos + 1:]
    return rest, span(t, dim=2 ** (k - 1), tol=tol).basis.T


@dataclass(frozen=True)
class GlueSplit:
    """H restricted to V_H and the decoupled instance L' on the other qubits.

    Qubits are renumbered: h_qubits[j] (original index) becomes qubit j of
    ``h_instance``; likewise for l_qubits and ``l_instance``. Either
    instance is None when its qubit set is empty.
    """

    n_qubits: int
    h_qubits: tuple[int, ...]
    l_qubits: tuple[int, ...]
    h_index: tuple[int, ...]
    l_index: tuple[int, ...]
    h_instance: QsatInstance | None
    l_instance: QsatInstance | None


def glue_transform(inst: QsatInstance, v_h: Iterable[int],
                   tol: Tolerances = DEFAULT_TOL) -> GlueSplit:
    """Separate H (projectors inside V_H) from the decoupled remainder L'."""
    vh = set(int(v) for v in v_h)
    n = inst.n_qubits
    h_qubits = tuple(sorted(vh))
    l_qubits = tuple(q for q in range(n) if q not in vh)
    h_map = {q: j for j, q in enumerate(h_qubits)}
    l_map = {q: j for j, q in enumerate(l_qubits)}
    h_index, l_index, h_projs, l_projs = [], [], [], []
    for i, p in enumerate(inst.projectors):
        inside = [j for j, q in enumerate(p.qubits) if q in vh]
        if len(inside) == p.locality:
            h_index.append(i)
            h_projs.append(Projector(tuple(h_map[q] for q in p.qubits), p.vectors))
            continue
        if len(inside) > 1:
            raise GlueError(f"projector {i} has {len(inside)} qubits in V_H")
        l_index.append(i)
        if inside:
            rest, vecs = decouple_projector(p, inside[0], tol)
        else:
            rest, vecs = p.qubits, p.vectors
        l_projs.append(Projector(tuple(l_map[q] for q in rest), vecs))
    return GlueSplit(
        n_qubits=n, h_qubits=h_qubits, l_qubits=l_qubits,
        h_index=tuple(h_index), l_index=tuple(l_index),
        h_instance=QsatInstance(len(h_qubits), tuple(h_projs)) if h_qubits else None,
        l_instance=QsatInstance(len(l_qubits), tuple(l_projs)) if l_qubits else None,
    )


def glue_states(inst: QsatInstance, split: GlueSplit, phi_h: np.ndarray | None,
                phi_l: np.ndarray | None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """|phi_H> ⊗ |phi_L'> laid out on the original qubit order.

    Both factors are checked against their sub-instances first, and the
    glued state against the original instance; failures raise GlueError.
    """
    parts = []
    bad: dict[str, list[float]] = {}
    for name, sub, phi in (("H", split.h_instance, phi_h), ("L'", split.l_instance, phi_l)):
        if sub is None:
            continue
        if phi is None:
            raise GlueError(f"missing state for {name}")
        phi = np.asarray(phi, dtype=complex)
        r = check_state(sub, phi)
        if r.size and r.max() > tol.residual:
            bad[name] = r.tolist()
        parts.append(phi)
    if bad:
        raise GlueError("factor states do not satisfy their sub-instances", bad)
    psi = parts[0] if len(parts) == 1 else np.kron(parts[0], parts[1])
    n = split.n_qubits
    order = list(split.h_qubits) + list(split.l_qubits)
    psi = psi.reshape((2,) * n).transpose(np.argsort(order)).reshape(-1)
    r = check_state(inst, psi)
    if r.size and r.max() > tol.residual:
        raise GlueError("glued state violates the original instance", {"P": r.tolist()})
    return psi


# -- hybrid certificate --------------------------------------------------------

def hybrid_threshold(k: int) -> float:
    """2^k / (4 e k): the L-degree bound and the default cutoff."""
    return 2.0 ** k / (4 * math.e * k)


@dataclass
class HybridCertificate:
    partition: Partition
    matching: Matching
    l_degree_ok: bool
    max_l_degree: int
    l_threshold: float
    passed: bool
    reason: str

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self, include_l: bool = False) -> dict[str, Any]:
        return {
            "kind": "hybrid",
            "verdict": self.verdict,
            "reason": self.reason,
            "partition": self.partition.to_dict(include_l=include_l),
            "matching": self.matching.to_dict(),
            "l_degree_ok": self.l_degree_ok,
            "max_l_degree": self.max_l_degree,
            "l_threshold": self.l_threshold,
        }


def hybrid_certificate(source: QsatInstance | Hypergraph, D: float | None = None) -> HybridCertificate:
    """Check the three gluing conditions on the constraint hypergraph.

    1. H has a matching of projectors to private qubits;
    2. qubits outside V_H lie in fewer than 2^k/(4ek) projectors of L, or
       in at most one (L' then splits into disjoint factors);
    3. every L projector has at most one qubit in V_H (holds by construction).
    """
    if isinstance(source, QsatInstance):
        if any(p.rank != 1 for p in source.projectors):
            raise ValueError("hybrid certificate requires rank-1 projectors")
        g = hypergraph_of(source)
    else:
        g = source
    thr = hybrid_threshold(g.k)
    part = build_vh(g, thr if D is None else D)
    h_edges = g.edges[list(part.h_edges)]
    matching = hall_matching(h_edges.tolist(), g.n_vertices)
    in_vh = np.zeros(g.n_vertices, dtype=bool)
    in_vh[list(part.v_h)] = True
    l_rows = g.edges[list(part.l_edges)]
    assert not np.any(in_vh[l_rows].sum(axis=1) > 1), "L edge with two V_H vertices"
    l_deg = np.bincount(l_rows.ravel(), minlength=g.n_vertices)
    l_deg[in_vh] = 0
    max_l = int(l_deg.max(initial=0))
    # with no qubit shared inside L' the product rule is exact; it only needs
    # every decoupled projector (rank <= 2 on k - 1 qubits) to be proper
    touches = bool(np.any(in_vh[l_rows])) if l_rows.size else False
    l_ok = max_l < thr or (max_l <= 1 and (g.k >= 3 or not touches))
    if not matching.perfect:
        reason = f"H has no matching: {len(matching.violator)} edges on {len(matching.violator_vertices)} vertices"
        # report the violator with original edge indices
        matching = Matching(
            {part.h_edges[e]: v for e, v in matching.pairs.items()}, len(part.h_edges),
            tuple(part.h_edges[e] for e in matching.violator), matching.violator_vertices)
    else:
        matching = Matching({part.h_edges[e]: v for e, v in matching.pairs.items()},
                            len(part.h_edges))
        reason = "" if l_ok else f"qubit outside V_H has L-degree {max_l} >= {thr:.6g}"
    return HybridCertificate(part, matching, l_ok, max_l, thr,
                             matching.perfect and l_ok, reason or "all conditions hold")


# -- region report ---------------------------------------------------------------

@dataclass(frozen=True)
class RegionReport:
    """Constants of the high-degree analysis evaluated at (n, k, alpha, D).

    ``epsilon0`` is evaluated at alpha itself; the asymptotic density alpha + o(1)
    has no finite-n value.
    """

    n: int
    k: int
    alpha: float
    D: float
    gamma: float
    epsilon0: float
    vh_size: int
    vh_fraction: float
    vh_within_2eps0: bool
    two_eps0_below_gamma: bool
    layer_sizes: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__, layer_sizes=list(self.layer_sizes))


def region_report(n: int, k: int, alpha: float, D: float, partition: Partition) -> RegionReport:
    """gamma = 1/(e (e^2 alpha)^(1/(k-2))), epsilon0 = alpha / (12 D^2 k)."""
    if k < 3:
        raise ValueError("gamma is undefined for k < 3")
    if alpha > 0:
        gamma = 1.0 / (math.e * (math.e ** 2 * alpha) ** (1.0 / (k - 2)))
    else:
        gamma = math.inf
    eps0 = alpha / (12 * D ** 2 * k)
    vh = len(partition.v_h)
    return RegionReport(
        n=n, k=k, alpha=alpha, D=D, gamma=gamma, epsilon0=eps0,
        vh_size=vh, vh_fraction=vh / n,
        vh_within_2eps0=vh <= 2 * eps0 * n,
        two_eps0_below_gamma=2 * eps0 < gamma,
        layer_sizes=tuple(len(v) for v in partition.vertex_layers),
    )
