"""Random hypergraph ensembles and their degree statistics."""
import numpy as np
from scipy import stats

from qlll.ensembles import (degree_stats, make_rng, poisson_conditional_mean_check,
                            sample_gknm, sample_gknp, sample_regular)

rng = make_rng(2024)

g = sample_gknm(10_000, 20_000, 3, rng)
s = degree_stats(g)
print(f"G_3(n, m): mean degree {s.mean} (= k m / n), max {s.max}")
print("histogram   ", s.histogram[:12])
print("Poisson(6)  ", np.round(stats.poisson(6).pmf(np.arange(12)) * g.n_vertices).astype(int))

gp = sample_gknp(30, 60 / 4060, 3, rng)
print(f"\nG_3(30, p): {gp.m} distinct edges (expected 60)")

gr = sample_regular(60, 6, 3, rng)
print("6-regular sample: degrees all 6?", bool(np.all(gr.degrees() == 6)), "edges:", gr.m)

# Poisson tails: E[X | X >= c lam] <= (c + 1) lam
rep = poisson_conditional_mean_check(10, 2, 1_000_000, rng)
print(f"\nE[X | X >= {rep.threshold}] ~ {rep.mean:.3f}, 99% upper bound {rep.upper:.3f}"
      f" vs {rep.bound}: {rep.verdict}")
