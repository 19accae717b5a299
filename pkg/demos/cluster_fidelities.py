"""
Geometric-measure bounds for four-qubit states from cluster-basis fidelities.

Knowing one fidelity gives the closed-form single-fidelity bound; using
all of them at once can only do better.
"""

import numpy as np

from entbound.analytic import FidelityVector, multi_fidelity_bound, single_fidelity_bound

E_CLUSTER = 0.75  # geometric measure of every cluster-basis state

for f1, f2, f3 in [(0.9, 0.1, 0.0), (0.6, 0.4, 0.0), (0.5, 0.3, 0.2), (0.4, 0.3, 0.3)]:
    fid = np.zeros(16)
    fid[:3] = f1, f2, f3
    single = single_fidelity_bound(max(f1, f2, f3), E_CLUSTER)
    multi = multi_fidelity_bound(FidelityVector(fid, 4)).bound
    print(f"F = ({f1:.1f}, {f2:.1f}, {f3:.1f})   single {single:.4f}   all fidelities {multi:.4f}")
