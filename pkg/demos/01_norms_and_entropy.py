"""Schatten norms, Renyi entropies and the Schmidt picture of a channel output.

Run: python3 demos/01_norms_and_entropy.py
"""
import numpy as np

from renyi_dvoretzky import (DensityMatrix, PartialTraceChannel, RngStream, apply, haar_isometry,
                             renyi_entropy, schatten_norm, schmidt_coefficients)

# The maximally mixed state has the smallest p-norm of all states: d^(1/p - 1).
d = 4
rho = DensityMatrix.maximally_mixed(d)
for p in (1.5, 2, 3, np.inf):
    print(f"p={p:<4} ||I/d||_p = {schatten_norm(rho, p):.6f}   d^(1/p-1) = {d ** ((0 if np.isinf(p) else 1 / p) - 1):.6f}")

# Renyi entropies decrease with p and reach log d for the maximally mixed state.
print("\nRenyi entropy of I/4:", [round(renyi_entropy(rho, p), 6) for p in (1, 2, np.inf)], "log 4 =", np.log(4))

# A random channel C^m -> M_d is tr_2 of an isometry V: C^m -> C^d (x) C^d.
ch = PartialTraceChannel(haar_isometry(5, 3, 3, "complex", RngStream(0)))
x = np.ones(5) / np.sqrt(5)
out = apply(ch, DensityMatrix.from_pure(x))

# Output eigenvalues are the squared Schmidt coefficients of V x.
print("\noutput eigenvalues   :", np.round(np.sort(out.eigenvalues())[::-1], 10))
print("squared Schmidt coeff:", np.round(schmidt_coefficients(ch.V @ x, (3, 3)) ** 2, 10))
print("S_2(Phi(x)) =", renyi_entropy(out, 2))
