"""
k-local projector instances on n qubits and the brute-force kernel oracle.

Qubit 0 is the most significant bit of a computational-basis index, so a
state on n qubits reshaped to ``(2,) * n`` has axis ``q`` for qubit ``q``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .subspace import DEFAULT_TOL, Subspace, Tolerances, complement, intersect, span

__all__ = [
    "Projector",
    "QsatInstance",
    "BruteForceLimitError",
    "InstanceFormatError",
    "MAX_BRUTE_QUBITS",
    "haar_random_state",
    "projector_matrix",
    "satisfying_space",
    "hamiltonian",
    "brute_force_sat_dim",
    "iterated_sat_dim",
    "find_satisfying_state",
    "check_state",
    "satisfies",
    "instance_to_dict",
    "instance_from_dict",
    "dumps_instance",
    "loads_instance",
]

MAX_BRUTE_QUBITS = 14
FORMAT_VERSION = 1


class BruteForceLimitError(ValueError):
    """The instance is too large for dense 2^n x 2^n linear algebra."""


class InstanceFormatError(ValueError):
    """Malformed JSON instance; the message names the offending field."""


@dataclass(frozen=True, eq=False)
class Projector:
    """``sum_j |v_j><v_j|`` acting on ``qubits``, identity elsewhere.

    ``vectors`` has shape (rank, 2**k); rows are orthonormal. The first entry
    of ``qubits`` is the most significant bit of the local index.
    """

    qubits: tuple[int, ...]
    vectors: np.ndarray

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        if len(set(qubits)) != len(qubits) or not qubits:
            raise ValueError(f"projector qubits must be distinct and nonempty: {qubits}")
        if min(qubits) < 0:
            raise ValueError("negative qubit index")
        v = np.array(self.vectors, dtype=complex, copy=True)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[1] != 2 ** len(qubits):
            raise ValueError(f"local vectors must have length 2**{len(qubits)}")
        if not 1 <= v.shape[0] <= v.shape[1]:
            raise ValueError("projector rank must be between 1 and 2**k")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite projector entries")
        if np.max(np.abs(v.conj() @ v.T - np.eye(v.shape[0]))) > DEFAULT_TOL.ortho:
            raise ValueError("projector vectors are not orthonormal")
        v.setflags(write=False)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def rank_one(cls, qubits: Sequence[int], vector: np.ndarray) -> "Projector":
        """Projector onto a single (normalised here) local vector."""
        v = np.asarray(vector, dtype=complex)
        return cls(tuple(qubits), v / np.linalg.norm(v))

    @property
    def locality(self) -> int:
        return len(self.qubits)

    @property
    def rank(self) -> int:
        return self.vectors.shape[0]

    def local_matrix(self) -> np.ndarray:
        return self.vectors.T @ self.vectors.conj()


@dataclass(frozen=True, eq=False)
class QsatInstance:
    """A list of local projectors on ``n_qubits`` qubits.

    Locality is stored per projector; ``k`` reports the largest one.
    Duplicate supports are allowed.
    """

    n_qubits: int
    projectors: tuple[Projector, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        projectors = tuple(self.projectors)
        for i, p in enumerate(projectors):
            if max(p.qubits) >= self.n_qubits:
                raise ValueError(f"projector {i} acts on qubit outside [0, {self.n_qubits})")
        object.__setattr__(self, "projectors", projectors)

    @property
    def m(self) -> int:
        return len(self.projectors)

    @property
    def k(self) -> int:
        return max((p.locality for p in self.projectors), default=0)

    @property
    def density(self) -> float:
        return self.m / self.n_qubits

    def supports(self) -> list[tuple[int, ...]]:
        return [p.qubits for p in self.projectors]

    def qubit_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_qubits, dtype=np.int64)
        for p in self.projectors:
            deg[list(p.qubits)] += 1
        return deg


def haar_random_state(k: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector on k qubits (normalised complex Gaussian)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    z = rng.standard_normal(2 ** k) + 1j * rng.standard_normal(2 ** k)
    return z / np.linalg.norm(z)


def _guard(n: int, max_qubits: int):
    if n > max_qubits:
        raise BruteForceLimitError(
            f"n={n} exceeds the brute-force bound of {max_qubits} qubits "
            f"(raise it with max_qubits / --max-qubits)")


def _embed_rows(local: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Embed columns of ``local`` (on ``qubits``) tensored with identity elsewhere.

    Returns a (2**n, cols * 2**(n-k)) array.
    """
    k = len(qubits)
    others = [q for q in range(n) if q not in qubits]
    order = list(qubits) + others
    cols = local.shape[1]
    full = np.kron(local, np.eye(2 ** (n - k)))
    t = full.reshape((2,) * n + (cols * 2 ** (n - k),))
    inv = list(np.argsort(order))
    return t.transpose(inv + [n]).reshape(2 ** n, -1)


def projector_matrix(p: Projector, n: int) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the embedded projector."""
    rows = _embed_rows(p.vectors.T, p.qubits, n)
    # rows spans range(P) with orthonormal columns
    return rows @ rows.conj().T


def satisfying_space(p: Projector, n: int, max_qubits: int = MAX_BRUTE_QUBITS) -> Subspace:
    """ker(P) on n qubits, of rank 2^n - r * 2^(n-k)."""
    _guard(n, max_qubits)
    local_kernel = complement(span(p.vectors, dim=2 ** p.locality)).basis
    return Subspace(_embed_rows(local_kernel, p.qubits, n))


def hamiltonian(inst: QsatInstance, max_qubits: int = MAX_BRUTE_QUBITS) -> np.ndarray:
    """Sum of the embedded projectors."""
    _guard(inst.n_qubits, max_qubits)
    dim = 2 ** inst.n_qubits
    h = np.zeros((dim, dim), dtype=complex)
    for p in inst.projectors:
        rows = _embed_rows(p.vectors.T, p.qubits, inst.n_qubits)
        h += rows @ rows.conj().T
    return h


def _kernel_basis(inst: QsatInstance, max_qubits: int, tol: Tolerances) -> np.ndarray:
    # projectors are PSD, so ker(sum) equals the intersection of kernels
    h = hamiltonian(inst, max_qubits)
    w, v = np.linalg.eigh(h)
    cutoff = tol.rank * max(1.0, float(w[-1]))
    return v[:, w <= cutoff]


def brute_force_sat_dim(inst: QsatInstance, max_qubits: int = MAX_BRUTE_QUBITS,
                        tol: Tolerances = DEFAULT_TOL) -> int:
    """dim of the joint satisfying space, via the null space of sum_i P_i."""
    _guard(inst.n_qubits, max_qubits)
    if not inst.projectors:
        return 2 ** inst.n_qubits
    w = np.linalg.eigvalsh(hamiltonian(inst, max_qubits))
    return int(np.count_nonzero(w <= tol.rank * max(1.0, float(w[-1]))))


def iterated_sat_dim(inst: QsatInstance, max_qubits: int = MAX_BRUTE_QUBITS,
                     tol: Tolerances = DEFAULT_TOL) -> int:
    """Same quantity as :func:`brute_force_sat_dim` by left-to-right intersection."""
    _guard(inst.n_qubits, max_qubits)
    acc = Subspace.full(2 ** inst.n_qubits)
    for p in inst.projectors:
        acc = intersect(acc, satisfying_space(p, inst.n_qubits, max_qubits), tol)
        if acc.rank == 0:
            break
    return acc.rank


def find_satisfying_state(inst: QsatInstance, max_qubits: int = MAX_BRUTE_QUBITS,
                          tol: Tolerances = DEFAULT_TOL) -> np.ndarray | None:
    """A unit state annihilated by every projector, or None if unsatisfiable."""
    _guard(inst.n_qubits, max_qubits)
    dim = 2 ** inst.n_qubits
    if not inst.projectors:
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1.0
        return psi
    kernel = _kernel_basis(inst, max_qubits, tol)
    if kernel.shape[1] == 0:
        return None
    psi = kernel[:, 0]
    return psi / np.linalg.norm(psi)


def _local_overlaps(psi: np.ndarray, p: Projector, n: int) -> np.ndarray:
    t = psi.reshape((2,) * n)
    t = np.moveaxis(t, list(p.qubits), list(range(p.locality)))
    return p.vectors.conj() @ t.reshape(2 ** p.locality, -1)


def check_state(inst: QsatInstance, psi: np.ndarray) -> np.ndarray:
    """Residual norms ||P_i psi|| for every projector, without dense matrices."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2 ** inst.n_qubits,):
        raise ValueError(f"state must have length 2**{inst.n_qubits}, got {psi.shape}")
    # rows of P.vectors are orthonormal, so ||P psi|| = ||V^H psi_local||_F
    return np.array([np.linalg.norm(_local_overlaps(psi, p, inst.n_qubits))
                     for p in inst.projectors])


def satisfies(inst: QsatInstance, psi: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    r = check_state(inst, psi)
    return bool(r.size == 0 or r.max() <= tol.residual)


# -- JSON instance format ---------------------------------------------------

def _cplx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def instance_to_dict(inst: QsatInstance, meta: dict[str, Any] | None = None) -> dict:
    d: dict[str, Any] = {"version": FORMAT_VERSION, "n_qubits": inst.n_qubits}
    if meta is not None:
        d["meta"] = meta
    d["projectors"] = [
        {"qubits": list(p.qubits), "vectors": [[_cplx(z) for z in row] for row in p.vectors]}
        for p in inst.projectors
    ]
    return d


def instance_from_dict(d: Any) -> QsatInstance:
    if not isinstance(d, dict):
        raise InstanceFormatError("top level: expected a JSON object")
    if d.get("version") != FORMAT_VERSION:
        raise InstanceFormatError(f"version: expected {FORMAT_VERSION}, got {d.get('version')!r}")
    n = d.get("n_qubits")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InstanceFormatError(f"n_qubits: expected a positive integer, got {n!r}")
    raw = d.get("projectors")
    if not isinstance(raw, list):
        raise InstanceFormatError("projectors: expected a list")
    projectors = []
    for i, pd in enumerate(raw):
        where = f"projectors[{i}]"
        try:
            qubits = pd["qubits"]
            vecs = pd["vectors"]
        except (TypeError, KeyError) as exc:
            raise InstanceFormatError(f"{where}: missing field {exc}") from None
        try:
            arr = np.asarray(vecs, dtype=float)
            if arr.ndim != 3 or arr.shape[2] != 2:
                raise ValueError("vectors must be a list of lists of [re, im] pairs")
            projectors.append(Projector(tuple(qubits), arr[..., 0] + 1j * arr[..., 1]))
        except (TypeError, ValueError) as exc:
            raise InstanceFormatError(f"{where}: {exc}") from None
    try:
        return QsatInstance(n, tuple(projectors))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def dumps_instance(inst: QsatInstance, meta: dict[str, Any] | None = None) -> str:
    return json.dumps(instance_to_dict(inst, meta), indent=1) + "\n"


def loads_instance(text: str) -> QsatInstance:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(d)
