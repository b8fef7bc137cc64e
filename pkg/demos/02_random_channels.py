"""Random channels and the product channel at the maximally entangled input.

For any channel with m-dimensional input, (Phi (x) conj Phi)(psi_m) has an
eigenvalue of at least m/d^2. That single large eigenvalue is what keeps the
product output entropy low.

Run: python3 demos/02_random_channels.py
"""
import numpy as np

from renyi_dvoretzky import (AscentConfig, RngStream, certified_product_lower_bounds, estimate_max_output_norm,
                             haar_isometry)

d, p = 6, 2
print(" m   lambda_max   m/d^2   max ||Phi(x)||_p (estimate)")
for m in (4, 9, 18, 36):
    iso = haar_isometry(m, d, d, "complex", RngStream(m))
    b = certified_product_lower_bounds(iso, p)
    est = estimate_max_output_norm(iso, p, AscentConfig(restarts=5), RngStream(m).child("ascent"))
    print(f"{m:2d}   {b.lambda_max:.4f}      {m / d**2:.4f}  {est.best_value:.4f}")

# Squaring the single-channel estimate and comparing with the product lower
# bound is the multiplicativity test; see demos/04_violation_scan.py.
