"""
Compare two ways of estimating the entanglement of formation of
p |psi><psi| + (1-p) sigma, with sigma a random separable state.

WIT feeds a witness mean into the Legendre bound; RWIT converts the
reduction-witness mean into a concurrence estimate.  A small run; the
CLI (``entbound fig3``) does the full 100-sample version.
"""

import numpy as np

from entbound.experiments import efficiency_table, run_fig3

table = run_fig3(samples=10, seed=1, p_values=np.linspace(0, 1, 21))
print(f"{'p':>5} {'exact':>8} {'WIT':>8} {'RWIT':>8}")
for p, ex, wit, rwit in table.rows[::2]:
    print(f"{p:5.2f} {ex:8.4f} {wit:8.4f} {rwit:8.4f}")

print()
for name, settings, *etas in efficiency_table(table).rows:
    print(f"{name:<5} eta on [0.8, 1]: {etas[0]:5.1f}%   on [0.6, 0.8]: {etas[1]:5.1f}%")
