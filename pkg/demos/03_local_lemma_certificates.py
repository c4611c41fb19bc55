"""Degree-bounded certificates, checked against the exact oracle."""
import math
from fractions import Fraction

from qlll.lll import (CnfFormula, asymmetric_qlll_check, classical_ksat_certificate, default_y,
                      degree_threshold, dependency_graph_from_instance, qlll_oracle_test,
                      qsat_degree_certificate)
from qlll.qsat import Projector, QsatInstance, haar_random_state
from qlll.ensembles import make_rng

for k in (3, 5, 7, 10):
    print(f"k={k:2d}: a qubit may sit in fewer than {degree_threshold(k):.3f} projectors")

# k=5, ten qubits, every qubit in at most two projectors
rng = make_rng(1)
supports = [(0, 1, 2, 3, 4), (4, 5, 6, 7, 8), (0, 5, 9, 2, 7), (1, 3, 6, 8, 9)]
inst = QsatInstance(10, tuple(Projector.rank_one(s, haar_random_state(5, rng)) for s in supports))
cert = qsat_degree_certificate(inst)
print("\ncertificate:", cert.verdict, "bound", cert.bound, f"~ {float(cert.bound):.4f}")
report = qlll_oracle_test(inst)
print("oracle R =", report["oracle_r"], "claim held:", report["holds"])

# the asymmetric form with the per-node default y
g = dependency_graph_from_instance(inst)
r = [1 - Fraction(1, 32)] * inst.m
a = asymmetric_qlll_check(r, g, default_y(g))
print("asymmetric:", a.verdict, "bound", a.bound)

# classical k-SAT: seven-literal clauses, each variable in six of them
f = CnfFormula(7, tuple(tuple(range(1, 8)) for _ in range(6)))
c = classical_ksat_certificate(f)
print("\n7-SAT with occurrence 6:", c.verdict, f"(limit {2 ** 7 / (7 * math.e):.2f})")
