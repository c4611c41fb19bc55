"""Split an instance at its high-degree qubits, solve both halves, glue."""
import numpy as np

from qlll.decompose import build_vh, glue_states, glue_transform, partition_violations
from qlll.ensembles import Hypergraph, make_rng
from qlll.qsat import Projector, QsatInstance, check_state, find_satisfying_state, haar_random_state

# a small hand-made hypergraph; vertices 0 and 1 have degree above 2
edges = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 7), (1, 5, 8), (1, 2, 9)]
g = Hypergraph(10, 3, edges)
p = build_vh(g, D=2)
print("layers V_i:", p.vertex_layers)
print("layers E_i:", p.edge_layers)
print("V_H =", p.v_h, " H =", p.h_edges, " L =", p.l_edges)
print("audit:", partition_violations(g, p) or "clean")

# an instance that meets the gluing conditions by construction
rng = make_rng(5)
supports = [(0, 1, 2), (1, 2, 3),            # inside V_H = {0, 1, 2, 3}
            (0, 4, 5), (2, 6, 7), (3, 8, 9),  # one V_H qubit each
            (10, 11, 12)]                     # away from V_H
inst = QsatInstance(13, tuple(Projector.rank_one(s, haar_random_state(3, rng)) for s in supports))
split = glue_transform(inst, [0, 1, 2, 3])
print("\nL' ranks after decoupling:", [q.rank for q in split.l_instance.projectors])
print("L' localities:           ", [q.locality for q in split.l_instance.projectors])

phi_h = find_satisfying_state(split.h_instance)
phi_l = find_satisfying_state(split.l_instance)
psi = glue_states(inst, split, phi_h, phi_l)
print("glued state, largest residual:", check_state(inst, psi).max())
