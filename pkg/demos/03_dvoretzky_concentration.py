"""Concentration of Schatten norms on random subspaces.

A random unit matrix X in M_d has ||X||_q close to its mean M. On a random
subspace of dimension m ~ d^(1+2/q) the ratio ||x||_q / ||x||_2 stays within a
constant factor of M for every x, which is what "Dvoretzky-like" means here.

Run: python3 demos/03_dvoretzky_concentration.py   (about 10 seconds)
"""
import numpy as np

from renyi_dvoretzky import AscentConfig, RngStream, estimate_M, shrinking_experiment, window_experiment

d = 12
for q in (2.5, 4, np.inf):
    s = estimate_M(d, q, 300, RngStream(1))
    print(f"q={q:<4} M_hat = {s.M_hat:.4f} +- {s.M_stderr:.4f}   Holder bound {s.holder_bound:.4f}")

print("\nE||X||_inf * sqrt(d) ->", round(estimate_M(48, np.inf, 300, RngStream(2)).opnorm_mean_hat * np.sqrt(48), 3),
      "(semicircle edge: 2)")

cfg = AscentConfig(restarts=6, max_iters=300)
w = window_experiment(d, 4, 36, trials=4, cfg=cfg, rng=RngStream(3))
for row in w.rows():
    print(f"trial {row['trial']}: min {row['min_ratio']:.4f}  max {row['max_ratio']:.4f}")
print("spread max/min:", round(w.ratio_spread, 3))

# Below the critical dimension the worst ratio is governed by sqrt(m)/d.
for pt in shrinking_experiment(d, np.inf, [12, 36, 72, 144], trials=3, cfg=cfg, rng=RngStream(4)):
    print(f"m={pt.m:3d}  worst ||x||_inf/||x||_2 = {pt.worst_max_ratio:.4f}  C = {pt.empirical_C:.3f}")
