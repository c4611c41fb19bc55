"""Subspaces as events: relative dimension, conditioning and independence."""
import numpy as np

from qlll.subspace import (complement, conditional_r, intersect, is_mutually_r_independent,
                           is_r_independent, relative_dimension, span, subspace_sum)

e = np.eye(4)

# Two planes in C^4 sharing the line through e1
A = span([e[0], e[1]])
B = span([e[0], e[1] + e[2]])
print("R(A)        =", relative_dimension(A))
print("R(A | B)    =", conditional_r(A, B))
print("independent:", is_r_independent(A, B))

# Unlike probabilities, independence does not survive taking complements
Ap = complement(A)
print("R(A^perp)     =", relative_dimension(Ap))
print("R(A^perp | B) =", conditional_r(Ap, B))
print("B mutually independent of {A^perp}:", is_mutually_r_independent(B, [Ap]))

# Ranks are integers, so the dimension identities hold exactly
rng = np.random.default_rng(0)
X = span(rng.standard_normal((6, 10)) + 1j * rng.standard_normal((6, 10)))
Y = span(rng.standard_normal((7, 10)) + 1j * rng.standard_normal((7, 10)))
print(f"rank X + rank Y = {X.rank + Y.rank}, "
      f"rank(X+Y) + rank(X∩Y) = {subspace_sum(X, Y).rank} + {intersect(X, Y).rank}")
