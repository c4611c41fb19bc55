"""Random subspace generators shared by the property tests."""
import numpy as np

from qlll.subspace import span


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def generic_subspace(rng, dim, rank):
    return span(random_complex(rng, rank, dim), dim=dim)


def pooled_subspace(rng, pool, rank):
    """Span of ``rank`` random combinations of rows of ``pool``.

    Subspaces drawn from a small common pool intersect non-generically,
    which exercises the rank decisions far more than generic position does.
    """
    coeffs = random_complex(rng, rank, pool.shape[0])
    return span(coeffs @ pool, dim=pool.shape[1])


def random_subspace(rng, dim, min_rank=0):
    """Either a generic subspace, a pooled one, or a coordinate subspace."""
    kind = rng.integers(3)
    rank = int(rng.integers(min_rank, dim + 1))
    if kind == 0:
        return generic_subspace(rng, dim, rank)
    if kind == 1:
        pool = random_complex(rng, int(rng.integers(max(1, rank), dim + 1)), dim)
        return pooled_subspace(rng, pool, rank)
    idx = rng.choice(dim, size=rank, replace=False)
    return span(np.eye(dim)[idx], dim=dim)


def degree_bounded_instance(rng, n, k, max_degree, m, rank=1):
    """Random instance with up to ``m`` projectors, no qubit in more than ``max_degree``.

    Supports are drawn uniformly and rejected when they would overload a
    qubit; gives up on a slot after a few failed draws.
    """
    from qlll.qsat import Projector, QsatInstance

    deg = np.zeros(n, dtype=int)
    projs = []
    for _ in range(m):
        for _attempt in range(20):
            q = rng.choice(n, size=k, replace=False)
            if np.all(deg[q] < max_degree):
                deg[q] += 1
                z = random_complex(rng, 2 ** k, rank)
                basis, _ = np.linalg.qr(z)
                projs.append(Projector(tuple(int(x) for x in q), basis.T))
                break
    return QsatInstance(n, tuple(projs))


def crafted_glue_instance(rng, n=12, k=3, h_size=4):
    """Rank-1 instance with a chosen V_H meeting the three gluing conditions.

    H: edges inside V_H that admit a matching to private qubits.
    L: edges with at most one qubit in V_H whose outside qubits are pairwise
    disjoint, so L' splits into independent factors. Some L edges avoid V_H.
    Returns (instance, v_h).
    """
    from qlll.matching import hall_matching
    from qlll.qsat import Projector, QsatInstance, haar_random_state

    qubits = rng.permutation(n)
    v_h = sorted(int(q) for q in qubits[:h_size])
    outside = [int(q) for q in qubits[h_size:]]
    supports = []
    for _ in range(int(rng.integers(1, h_size + 1))):
        cand = supports + [tuple(int(q) for q in rng.choice(v_h, size=k, replace=False))]
        if hall_matching(cand, n).perfect:
            supports = cand
    pos = 0
    while pos < len(outside):
        touch = rng.random() < 0.7
        width = k - 1 if touch else k
        if pos + width > len(outside):
            break
        rest = outside[pos:pos + width]
        pos += width
        if rng.random() < 0.15:
            continue  # leave these qubits untouched
        extra = [int(rng.choice(v_h))] if touch else []
        sup = extra + rest
        rng.shuffle(sup)
        supports.append(tuple(sup))
    order = rng.permutation(len(supports))
    projs = tuple(Projector.rank_one(supports[i], haar_random_state(k, rng)) for i in order)
    return QsatInstance(n, projs), v_h
