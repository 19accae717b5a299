"""
Lower bounds on entanglement measures from a few witness expectation values.

The bound ``E(rho) >= sup_lam {lam w - Ê(lam W)}`` needs only the Legendre
transform ``Ê`` of the measure, which for convex-roof measures is an
optimisation over pure states.  Engines are provided for the concurrence,
the entanglement of formation, the geometric measure and the Meyer-Wallach
measure, together with closed forms for witnesses diagonal in GHZ or
cluster-state bases.
"""

from .analytic import (
    CLUSTER_GENERATORS,
    DiagonalWitness,
    FidelityVector,
    cluster_basis,
    ghz_basis,
    isotropic_concurrence_exact,
    isotropic_state,
    isotropic_witness,
    multi_fidelity_bound,
    observation_bound,
    single_fidelity_bound,
)
from .config import DEFAULT, Numerics
from .errors import DomainError, EntboundError, RecordFormatError, SamplingError, StructureError
from .legendre import (
    MEASURES,
    BoundResult,
    LegendreValue,
    bound_from_record,
    hamiltonian_from_state,
    legendre_concurrence,
    legendre_eof,
    legendre_geometric,
    legendre_meyer_wallach,
    thermal_state_q2,
)
from .measures import (
    Bipartition,
    concurrence_pure,
    eof_from_concurrence,
    eof_pure,
    geometric_pure,
    meyer_wallach,
    reduction_witness,
    reduction_witness_bound,
    wootters_concurrence,
)
from .qcore import (
    DensityMatrix,
    MeasurementRecord,
    Observable,
    PureState,
    TensorStructure,
    expectation,
    partial_trace,
    partial_transpose,
    random_density_matrix,
    random_pure_state,
    random_separable_two_qubit,
)

__version__ = "0.1.0"
