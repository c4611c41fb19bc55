"""
Subspace algebra with relative dimension.

Subspaces of C^d are stored as orthonormal bases (columns of a d x r array).
Every rank decision is made once, by singular-value thresholding, after which
all dimension bookkeeping is exact integer arithmetic. Relative dimensions are
returned as ``fractions.Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "Subspace",
    "AmbientMismatchError",
    "DegenerateConditioningError",
    "span",
    "relative_dimension",
    "complement",
    "subspace_sum",
    "intersect",
    "intersect_all",
    "conditional_r",
    "is_r_independent",
    "is_mutually_r_independent",
    "contains",
]


class AmbientMismatchError(ValueError):
    """Raised when two subspaces live in ambient spaces of different dimension."""


class DegenerateConditioningError(ValueError):
    """Raised when conditioning on the zero subspace.

    ``subset`` holds the indices of the conditioning family whose
    intersection vanished, when known.
    """

    def __init__(self, message: str, subset: tuple[int, ...] | None = None):
        super().__init__(message)
        self.subset = subset


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    rank: singular values below ``rank * s_max`` count as zero.
    ortho: allowed deviation of B^H B from the identity for a stored basis.
    residual: allowed norm of a membership / annihilation residual.
    """

    rank: float = 1e-9
    ortho: float = 1e-8
    residual: float = 1e-8

    def __post_init__(self):
        for name in ("rank", "ortho", "residual"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be strictly positive")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of C^dim given by an orthonormal basis.

    ``basis`` has shape (dim, rank); the zero subspace has shape (dim, 0).
    Use :func:`span` to build one from arbitrary vectors.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex, copy=True)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-d array of shape (dim, rank)")
        if b.shape[0] < 1:
            raise ValueError("ambient dimension must be at least 1")
        if b.shape[1] > b.shape[0]:
            raise ValueError("rank exceeds ambient dimension")
        if not np.all(np.isfinite(b)):
            raise ValueError("basis has non-finite entries")
        if b.shape[1] and np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1]))) > DEFAULT_TOL.ortho:
            raise ValueError("basis is not orthonormal; build subspaces with span()")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(np.zeros((dim, 0), dtype=complex))

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls(np.eye(dim, dtype=complex))

    @property
    def dim(self) -> int:
        """Dimension of the ambient space."""
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace, as a dense dim x dim matrix."""
        return self.basis @ self.basis.conj().T

    def ortho_error(self) -> float:
        if self.rank == 0:
            return 0.0
        gram = self.basis.conj().T @ self.basis
        return float(np.max(np.abs(gram - np.eye(self.rank))))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, rank={self.rank})"


def _numerical_rank(s: np.ndarray, tol: Tolerances) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank * s[0]))


def _orth(matrix: np.ndarray, tol: Tolerances) -> np.ndarray:
    if matrix.shape[1] == 0:
        return np.zeros((matrix.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(matrix, full_matrices=False)
    return u[:, : _numerical_rank(s, tol)]


def _check_same(a: Subspace, b: Subspace):
    if a.dim != b.dim:
        raise AmbientMismatchError(f"ambient dimensions differ: {a.dim} vs {b.dim}")


def span(vectors: Iterable[Sequence[complex]] | np.ndarray, dim: int | None = None,
         tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the span of ``vectors`` (one vector per row).

    ``dim`` is required when ``vectors`` is empty and otherwise checked
    against the vector length.
    """
    m = np.asarray(list(vectors) if not isinstance(vectors, np.ndarray) else vectors,
                   dtype=complex)
    if m.size == 0:
        if dim is None:
            if m.ndim == 2 and m.shape[1] > 0:
                dim = m.shape[1]
            else:
                raise ValueError("dim is required to span an empty set of vectors")
        return Subspace.zero(dim)
    if m.ndim == 1:
        m = m[None, :]
    if m.ndim != 2:
        raise ValueError("vectors must form a 2-d array (one vector per row)")
    if dim is not None and m.shape[1] != dim:
        raise ValueError(f"vector length {m.shape[1]} does not match dim {dim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("vectors contain non-finite entries")
    return Subspace(_orth(m.T, tol))


def relative_dimension(a: Subspace) -> Fraction:
    """R(A) = dim A / dim V."""
    return Fraction(a.rank, a.dim)


def complement(a: Subspace) -> Subspace:
    """Orthogonal complement A^perp."""
    if a.rank == 0:
        return Subspace.full(a.dim)
    if a.rank == a.dim:
        return Subspace.zero(a.dim)
    u, _, _ = np.linalg.svd(a.basis, full_matrices=True)
    return Subspace(u[:, a.rank:])


def subspace_sum(a: Subspace, b: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """A + B."""
    _check_same(a, b)
    if b.rank == 0:
        return a
    if a.rank == 0:
        return b
    return Subspace(_orth(np.hstack([a.basis, b.basis]), tol))


def intersect(a: Subspace, b: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """A ∩ B, computed as (A^perp + B^perp)^perp."""
    _check_same(a, b)
    if a.rank == 0 or b.rank == 0:
        return Subspace.zero(a.dim)
    if a.rank == a.dim:
        return b
    if b.rank == b.dim:
        return a
    return complement(subspace_sum(complement(a), complement(b), tol))


def intersect_all(subspaces: Sequence[Subspace], dim: int | None = None,
                  tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Intersection of a family; the empty family gives the full space."""
    if not subspaces:
        if dim is None:
            raise ValueError("dim is required for an empty family")
        return Subspace.full(dim)
    dim = subspaces[0].dim
    perps = []
    for s in subspaces:
        if s.dim != dim:
            raise AmbientMismatchError("ambient dimensions differ within family")
        if s.rank < s.dim:
            perps.append(complement(s).basis)
    if not perps:
        return Subspace.full(dim)
    return complement(Subspace(_orth(np.hstack(perps), tol)))


def conditional_r(a: Subspace, b: Subspace, tol: Tolerances = DEFAULT_TOL) -> Fraction:
    """R(A|B) = dim(A ∩ B) / dim B.

    Raises DegenerateConditioningError when B is the zero subspace.
    """
    _check_same(a, b)
    if b.rank == 0:
        raise DegenerateConditioningError("cannot condition on the zero subspace")
    return Fraction(intersect(a, b, tol).rank, b.rank)


def is_r_independent(a: Subspace, b: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Exact test of rank(A ∩ B) * dim V == rank A * rank B."""
    _check_same(a, b)
    return intersect(a, b, tol).rank * a.dim == a.rank * b.rank


def is_mutually_r_independent(x: Subspace, ys: Sequence[Subspace], cap: int = 20,
                              tol: Tolerances = DEFAULT_TOL) -> bool:
    """Check R(X | ∩_{i in S} Y_i) = R(X) for every nonempty S.

    Enumerates all 2^len(ys) - 1 subsets, so ``len(ys)`` is capped. If some
    subset intersection is the zero subspace the conditional is undefined and
    DegenerateConditioningError is raised carrying that subset.
    """
    if len(ys) > cap:
        raise ValueError(f"{len(ys)} conditioning subspaces exceeds cap={cap}")
    for y in ys:
        _check_same(x, y)
    target = Fraction(x.rank, x.dim)

    def walk(start: int, cond: Subspace, chosen: tuple[int, ...]) -> bool:
        # depth-first over subsets containing ``chosen`` plus indices >= start
        for i in range(start, len(ys)):
            nxt = intersect(cond, ys[i], tol)
            subset = chosen + (i,)
            if nxt.rank == 0:
                raise DegenerateConditioningError(
                    f"intersection over subset {subset} is the zero subspace", subset)
            if Fraction(intersect(x, nxt, tol).rank, nxt.rank) != target:
                return False
            if not walk(i + 1, nxt, subset):
                return False
        return True

    return walk(0, Subspace.full(x.dim), ())


def contains(a: Subspace, vectors: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True if every column of ``vectors`` lies in A within ``tol.residual``."""
    v = np.asarray(vectors, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[1] == 0:
        return True
    resid = v - a.basis @ (a.basis.conj().T @ v)
    return bool(np.max(np.linalg.norm(resid, axis=0)) <= tol.residual)
