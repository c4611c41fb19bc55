"""A seeded density sweep through the hybrid certificate."""
import math

from qlll.harness import MonteCarloConfig, rows_to_csv, run_montecarlo

# matching alone: random 3-uniform instances below and above the matching threshold
cfg = MonteCarloConfig(mode="matching", n=2000, k=3, alphas=(0.5, 0.8, 1.0), trials=40, seed=1)
_, summary = run_montecarlo(cfg)
for grp in summary["groups"]:
    lo, hi = grp["wilson95"]
    print(f"k=3 alpha={grp['alpha']:.2f}: matched {grp['passes']:2d}/{grp['trials']}"
          f"  Wilson95 [{lo:.2f}, {hi:.2f}]")

# full hybrid certificate at k=12, density up to the proven region and beyond
k = 12
edge = 2 ** k / (12 * math.e * k ** 2)
cfg = MonteCarloConfig(mode="hybrid", n=20_000, k=k, alphas=(edge, 1.5 * edge, 2 * edge, 3 * edge),
                       trials=5, seed=2)
rows, summary = run_montecarlo(cfg)
print(f"\nk={k}, D={cfg.resolved_D():.2f}")
for grp in summary["groups"]:
    print(f"alpha={grp['alpha']:.3f}: pass {grp['passes']}/{grp['trials']},"
          f" largest V_H {grp['max_v_h_size']}")
print()
print(rows_to_csv(rows[:3]))
