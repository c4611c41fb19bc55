"""
Dependency graphs and local-lemma certificates.

Certificates never over-claim: every floating comparison against a
threshold involving e is strict on the unsafe side, so a tie fails.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .qsat import MAX_BRUTE_QUBITS, QsatInstance, brute_force_sat_dim

__all__ = [
    "DependencyGraph",
    "Certificate",
    "CnfFormula",
    "DimacsError",
    "EmptyClauseError",
    "dependency_graph_from_supports",
    "dependency_graph_from_instance",
    "symmetric_qlll_check",
    "degree_threshold",
    "qsat_degree_certificate",
    "asymmetric_qlll_check",
    "default_y",
    "classical_ksat_certificate",
    "qlll_oracle_test",
    "parse_dimacs",
    "brute_force_sat",
]


@dataclass(frozen=True)
class DependencyGraph:
    """Symmetric dependency graph; ``adjacency[i]`` is the sorted neighbour tuple of i."""

    n_nodes: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n_nodes:
            raise ValueError("adjacency length differs from n_nodes")
        for i, nbrs in enumerate(self.adjacency):
            if i in nbrs:
                raise ValueError(f"self-loop at node {i}")
            if any(not 0 <= j < self.n_nodes for j in nbrs):
                raise ValueError(f"neighbour index out of range at node {i}")

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Iterable[tuple[int, int]]) -> "DependencyGraph":
        nbrs: list[set[int]] = [set() for _ in range(n_nodes)]
        for i, j in edges:
            if i != j:
                nbrs[i].add(j)
                nbrs[j].add(i)
        return cls(n_nodes, tuple(tuple(sorted(s)) for s in nbrs))

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)


@dataclass
class Certificate:
    """Outcome of a satisfiability check.

    kind is one of symmetric-qlll, asymmetric-qlll, qsat-degree,
    classical-ksat, matching, hybrid. On failure ``witness`` names the
    violated condition. ``bound`` is a lower bound on R(∩ X_i) when one is
    established.
    """

    kind: str
    passed: bool
    witness: dict[str, Any] = field(default_factory=dict)
    bound: Fraction | None = None

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "verdict": self.verdict,
                             "witness": _jsonable(self.witness)}
        if self.bound is not None:
            d["bound"] = str(self.bound)
            d["bound_float"] = float(self.bound)
        return d


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


# -- dependency graphs -------------------------------------------------------

def dependency_graph_from_supports(supports: Sequence[Sequence[int]]) -> DependencyGraph:
    """Edge (i, j) iff supports i and j share a vertex."""
    by_vertex: dict[int, list[int]] = defaultdict(list)
    for i, s in enumerate(supports):
        for q in set(s):
            by_vertex[q].append(i)
    nbrs: list[set[int]] = [set() for _ in supports]
    for members in by_vertex.values():
        for i in members:
            nbrs[i].update(members)
    for i, s in enumerate(nbrs):
        s.discard(i)
    return DependencyGraph(len(supports), tuple(tuple(sorted(s)) for s in nbrs))


def dependency_graph_from_instance(inst: QsatInstance) -> DependencyGraph:
    """Projectors sharing a qubit are dependent; disjoint ones are mutually
    R-independent by tensor structure, so this edge set is conservative."""
    return dependency_graph_from_supports(inst.supports())


# -- symmetric criterion -----------------------------------------------------

def symmetric_qlll_check(p: Fraction | float, d: float) -> bool:
    """p * e * (d + 1) <= 1, with an exact-looking tie treated as failure."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if d < 0:
        raise ValueError("d must be non-negative")
    if p == 0:
        return True
    return float(p) * math.e * (d + 1) < 1.0


def degree_threshold(k: int, r: int = 1) -> float:
    """Largest qubit degree allowed by the rank-r corollary: 2^k / (e r k)."""
    return 2.0 ** k / (math.e * r * k)


def qsat_degree_certificate(inst: QsatInstance, r_max: int | None = None,
                            k: int | None = None) -> Certificate:
    """Degree-bounded QLLL certificate.

    A projector of rank r on j <= k qubits is treated as a k-local projector
    of rank r * 2^(k-j); all such effective ranks must be at most ``r_max``
    (inferred when omitted). ``k`` defaults to the largest locality present.
    Passes iff every qubit lies in fewer than 2^k / (e r_max k) projectors,
    or if no qubit is shared at all (then the bound is the exact product).
    """
    if k is None:
        k = inst.k
    elif k < inst.k:
        raise ValueError(f"k={k} is below the instance locality {inst.k}")
    eff = [p.rank * 2 ** (k - p.locality) for p in inst.projectors]
    if r_max is None:
        r_max = max(eff, default=1)
    for i, r in enumerate(eff):
        if r > r_max:
            raise ValueError(f"projector {i} has effective rank {r} > r_max={r_max}")
    if not inst.projectors:
        return Certificate("qsat-degree", True, {"k": 0, "r_max": r_max, "max_degree": 0},
                           Fraction(1))
    deg = inst.qubit_degrees()
    dmax = int(deg.max())
    thr = degree_threshold(k, r_max)
    witness: dict[str, Any] = {"k": k, "r_max": r_max, "max_degree": dmax, "threshold": thr}
    if dmax <= 1:
        # no two projectors share a qubit: the product rule is exact
        witness["d"] = 0
        bound = math.prod((1 - Fraction(p.rank, 2 ** p.locality) for p in inst.projectors),
                          start=Fraction(1))
        if bound == 0:
            witness["projector"] = next(i for i, p in enumerate(inst.projectors)
                                        if p.rank == 2 ** p.locality)
            return Certificate("qsat-degree", False, witness)
        return Certificate("qsat-degree", True, witness, bound)
    if not dmax < thr:
        witness["qubit"] = int(np.argmax(deg))
        return Certificate("qsat-degree", False, witness)
    d = k * (dmax - 1)
    witness["d"] = d
    return Certificate("qsat-degree", True, witness, Fraction(d, d + 1) ** inst.m)


# -- asymmetric criterion ----------------------------------------------------

def asymmetric_qlll_check(r_values: Sequence[Fraction], graph: DependencyGraph,
                          y: Sequence[Fraction]) -> Certificate:
    """Check R(X_i) >= 1 - y_i * prod_{j ~ i} (1 - y_j) for every node, exactly.

    ``r_values`` are lower bounds on R(X_i). On success the bound is
    prod_i (1 - y_i).
    """
    if not len(r_values) == len(y) == graph.n_nodes:
        raise ValueError("r_values, y and graph sizes disagree")
    r_values = [Fraction(r) for r in r_values]
    y = [Fraction(v) for v in y]
    for i, (r, yi) in enumerate(zip(r_values, y)):
        if not 0 <= yi < 1:
            raise ValueError(f"y[{i}]={yi} outside [0, 1)")
        if not 0 <= r <= 1:
            raise ValueError(f"r_values[{i}]={r} outside [0, 1]")
    for i in range(graph.n_nodes):
        need = 1 - y[i] * math.prod((1 - y[j] for j in graph.adjacency[i]), start=Fraction(1))
        if r_values[i] < need:
            return Certificate("asymmetric-qlll", False,
                               {"node": i, "r_value": r_values[i], "required": need})
    bound = math.prod((1 - v for v in y), start=Fraction(1))
    return Certificate("asymmetric-qlll", True, {"y": list(y)}, bound)


def default_y(graph: DependencyGraph) -> list[Fraction]:
    """y_i = 1/(d_i + 1), with isolated nodes given 1/2 to keep y < 1."""
    return [Fraction(1, len(a) + 1) if a else Fraction(1, 2) for a in graph.adjacency]


# -- classical k-SAT -----------------------------------------------------------

class DimacsError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class EmptyClauseError(ValueError):
    """The formula contains an empty clause and is trivially unsatisfiable."""


@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} invalid for {self.n_vars} variables")
        object.__setattr__(self, "clauses", clauses)


def parse_dimacs(text: str) -> CnfFormula:
    """Read DIMACS CNF: comments 'c', header 'p cnf V C', 0-terminated clauses."""
    n_vars = n_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("c"):
            continue
        if s.startswith("%"):
            break
        if s.startswith("p"):
            if n_vars is not None:
                raise DimacsError("duplicate problem line", lineno)
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed problem line {s!r}", lineno)
            try:
                n_vars, n_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"non-integer counts in {s!r}", lineno) from None
            if n_vars < 0 or n_clauses < 0:
                raise DimacsError("negative counts in problem line", lineno)
            continue
        if n_vars is None:
            raise DimacsError("clause before 'p cnf' header", lineno)
        for tok in s.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > n_vars:
                raise DimacsError(f"literal {lit} exceeds {n_vars} variables", lineno)
            else:
                current.append(lit)
    if n_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    if len(clauses) != n_clauses:
        raise DimacsError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    return CnfFormula(n_vars, tuple(clauses))


def classical_ksat_certificate(f: CnfFormula) -> Certificate:
    """Pass iff every variable occurs in fewer than 2^k/(e k) clauses, or in
    at most one clause (then the clauses are independent).

    Clauses must all have the same width k. Raises EmptyClauseError for an
    empty clause and ValueError for mixed widths.
    """
    widths = {len(c) for c in f.clauses}
    if 0 in widths:
        raise EmptyClauseError("formula contains an empty clause")
    if len(widths) > 1:
        raise ValueError(f"mixed clause widths {sorted(widths)}")
    if not f.clauses:
        return Certificate("classical-ksat", True, {"k": 0, "max_occurrence": 0})
    k = widths.pop()
    occ = np.zeros(f.n_vars + 1, dtype=np.int64)
    for c in f.clauses:
        for v in {abs(l) for l in c}:
            occ[v] += 1
    thr = degree_threshold(k)
    dmax = int(occ.max())
    witness: dict[str, Any] = {"k": k, "max_occurrence": dmax, "threshold": thr}
    if dmax <= 1:
        # variable-disjoint clauses are independent events
        return Certificate("classical-ksat", True, witness,
                           (1 - Fraction(1, 2 ** k)) ** len(f.clauses))
    if not dmax < thr:
        witness["variable"] = int(np.argmax(occ))
        return Certificate("classical-ksat", False, witness)
    return Certificate("classical-ksat", True, witness)


def brute_force_sat(f: CnfFormula) -> np.ndarray | None:
    """Exhaustive search; returns a boolean assignment (index v-1) or None."""
    if f.n_vars > 24:
        raise ValueError("exhaustive search limited to 24 variables")
    n = f.n_vars
    idx = np.arange(2 ** n, dtype=np.int64)
    ok = np.ones(2 ** n, dtype=bool)
    for c in f.clauses:
        sat = np.zeros(2 ** n, dtype=bool)
        for lit in c:
            bit = (idx >> (abs(lit) - 1)) & 1
            sat |= bit.astype(bool) if lit > 0 else ~bit.astype(bool)
        ok &= sat
        if not ok.any():
            return None
    hit = int(np.argmax(ok))
    if not ok[hit]:
        return None
    return np.array([(hit >> v) & 1 for v in range(n)], dtype=bool)


# -- oracle harness ------------------------------------------------------------

def qlll_oracle_test(inst: QsatInstance, max_qubits: int = MAX_BRUTE_QUBITS) -> dict[str, Any]:
    """Run the degree certificate and, when it passes, confront it with the
    brute-force kernel dimension. The report says whether the claim held."""
    cert = qsat_degree_certificate(inst)
    report: dict[str, Any] = {"certificate": cert.to_dict()}
    if not cert.passed:
        report["claim"] = "none"
        return report
    dim = brute_force_sat_dim(inst, max_qubits)
    r = Fraction(dim, 2 ** inst.n_qubits)
    report.update(claim="satisfiable", oracle_dim=dim, oracle_r=str(r),
                  holds=bool(dim > 0 and r >= cert.bound))
    return report
