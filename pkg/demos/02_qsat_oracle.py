"""Random k-QSAT instances and the brute-force satisfying-space oracle."""
import numpy as np

from qlll.ensembles import make_rng, random_instance
from qlll.qsat import (brute_force_sat_dim, check_state, dumps_instance, find_satisfying_state,
                       iterated_sat_dim, loads_instance)

rng = make_rng(7)
inst = random_instance(n=8, alpha=0.5, k=3, rng=rng)
print(f"{inst.m} projectors on {inst.n_qubits} qubits, supports {inst.supports()}")

# kernel of the summed projectors vs iterated subspace intersection
dim = brute_force_sat_dim(inst)
print("dim of satisfying space:", dim, "(iterated:", iterated_sat_dim(inst), ")")
print("R =", dim, "/", 2 ** inst.n_qubits)

psi = find_satisfying_state(inst)
print("largest residual ||P_i psi|| =", check_state(inst, psi).max())

# instances round-trip through JSON without losing a bit
back = loads_instance(dumps_instance(inst))
same = all(np.array_equal(a.vectors, b.vectors)
           for a, b in zip(inst.projectors, back.projectors))
print("JSON round trip exact:", same)
