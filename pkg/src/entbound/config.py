"""Numerical tolerances and iteration limits shared across the package."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Numerics:
    """Central record of every tolerance and cap used by the solvers.

    Pass a modified copy (``DEFAULT.with_(restarts=5)``) to any routine that
    accepts ``numerics=`` to trade accuracy for speed.
    """

    # state / operator validation
    norm_tol: float = 1e-12
    hermitian_tol: float = 1e-12
    trace_tol: float = 1e-12
    psd_tol: float = 1e-10
    degeneracy_tol: float = 1e-12

    # random separable sampling
    rejection_cap: int = 1_000_000

    # best product-state overlap (geometric measure)
    product_restarts: int = 50
    product_gain_tol: float = 1e-10
    product_max_sweeps: int = 500
    product_collapse_tol: float = 1e-12

    # fixed-point Legendre engines
    fixed_point_tol: float = 1e-10
    fixed_point_patience: int = 3
    fixed_point_max_iter: int = 5000
    restarts: int = 20
    alpha_floor: float = 1e-8
    entropy_floor: float = 1e-14
    ascent_tol: float = 1e-12

    # slope (lambda) optimisation
    lambda_max: float = 1e3
    lambda_tol: float = 1e-6
    coordinate_rounds: int = 50
    analytic_lambda_max: float = 1e3
    analytic_rounds: int = 100

    def with_(self, **changes) -> "Numerics":
        return replace(self, **changes)


DEFAULT = Numerics()
