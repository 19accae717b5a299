"""
Numerical experiments: isotropic sharpness, the noisy two-qubit method
comparison, and single- versus multi-fidelity bounds on cluster states.

Every run is deterministic given its seed; random items draw from seeds
derived from ``(seed, item index)``, so results do not depend on the
order in which items are processed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analytic import (
    FidelityVector,
    isotropic_concurrence_exact,
    isotropic_witness,
    multi_fidelity_bound,
    single_fidelity_bound,
)
from .config import DEFAULT, Numerics
from .errors import DomainError, StructureError
from .legendre import AffineMinorants, affine_minorants, bound_from_record
from .measures import (
    concurrence_pure,
    eof_from_concurrence,
    reduction_witness,
    reduction_witness_bound,
    schmidt_coefficients,
    wootters_concurrence,
)
from .qcore import (
    DensityMatrix,
    MeasurementRecord,
    Observable,
    PureState,
    TensorStructure,
    partial_transpose,
    sample_separable_two_qubit,
)

__all__ = [
    "Table",
    "STUDY_STATE",
    "WINDOWS",
    "MEASUREMENT_SETTINGS",
    "build_method3_witness",
    "projector_witness",
    "item_seed",
    "efficiency",
    "efficiency_table",
    "witness_eof_minorants",
    "run_fig2",
    "run_fig3",
    "run_fig4",
]

_TWO_QUBITS = TensorStructure((2, 2))

# (4|00> + |11>) / sqrt(17), the pure state of the noisy comparison
STUDY_STATE = PureState(np.array([4.0, 0.0, 0.0, 1.0]), _TWO_QUBITS, normalize=True)

# noise windows over which the efficiency is averaged
WINDOWS = ((0.8, 1.0), (0.6, 0.8))

# local measurement settings per method, as reported alongside the efficiencies
MEASUREMENT_SETTINGS = {"WIT": 3, "RWIT": 3}


@dataclass(frozen=True)
class Table:
    """Rows of numbers with a header; ``meta`` holds run summaries."""

    header: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        j = self.header.index(name)
        return np.array([r[j] for r in self.rows])

    def to_csv(self) -> str:
        lines = [",".join(self.header)]
        lines += [",".join(_fmt(x) for x in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if x == 0.0:
        return "0"  # also folds -0.0
    return format(x, ".10g")


def item_seed(seed: int, index: int) -> np.random.Generator:
    """Independent generator for item ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


# --------------------------------------------------------------------------
# witnesses for the two-qubit comparison


def build_method3_witness(psi: PureState, numerics: Numerics = DEFAULT) -> Observable:
    """
    Witness fitted to ``p |psi><psi| + (1-p) 1/4``: ``|e><e|^{T_B}``.

    ``e`` is the eigenvector of ``(|psi><psi|)^{T_B}`` with the most negative
    eigenvalue.  Since the identity is invariant under partial transposition
    the same ``e`` is optimal along the whole white-noise family, and
    ``Tr(W rho) = <e|rho^{T_B}|e>`` is non-negative on every separable state.
    """
    if psi.structure.local_dims != (2, 2):
        raise StructureError(f"expected a two-qubit state, got {psi.structure.local_dims}")
    pt = partial_transpose(psi.density(), 1)
    vals, vecs = np.linalg.eigh(pt)
    if vals[0] >= -numerics.psd_tol:
        raise DomainError("state has a positive partial transpose; no witness detects it")
    e = vecs[:, 0]
    w = partial_transpose(DensityMatrix(np.outer(e, e.conj()), _TWO_QUBITS), 1)
    return Observable(w, _TWO_QUBITS)


def projector_witness(psi: PureState, cut=None) -> Observable:
    """``alpha 1 - |psi><psi|`` with ``alpha`` the squared largest Schmidt coefficient."""
    lam = schmidt_coefficients(psi, cut)
    if lam[0] >= 1.0 - 1e-12:
        raise DomainError("product state; no projector witness detects it")
    return Observable(lam[0] * np.eye(psi.structure.total_dim) - psi.projector(), psi.structure)


def witness_eof_minorants(
    w: Observable,
    means: Sequence[float],
    tangents: int = 16,
    seed: int = 0,
    numerics: Numerics = DEFAULT,
) -> AffineMinorants:
    """
    Tabulate the entanglement-of-formation bound of ``w`` as affine minorants.

    Optimal slopes are found by :func:`bound_from_record` at ``tangents``
    mean values spread over the entangled part (``w < 0``) of the observed
    range, then midpoints between neighbouring slopes are added.  Each
    member is a valid bound on its own, so the envelope is valid for every
    mean value and tight wherever a tangent was placed.
    """
    lo = float(np.min(means))
    if lo >= 0:
        return AffineMinorants(np.zeros(1), np.zeros(1), np.ones(1, dtype=bool))
    grid = np.linspace(lo, 0.0, tangents, endpoint=False)
    slopes, values, conv = [], [], []
    for x in grid:
        r = bound_from_record(MeasurementRecord.single(w, x), measure="eof", seed=seed, numerics=numerics)
        slopes.append(float(r.optimal_lambdas[0]))
        values.append(r.legendre_at_optimum)
        conv.append(r.converged)
    lam = np.array(slopes)
    mids = np.unique(lam)
    mids = 0.5 * (mids[1:] + mids[:-1])
    extra = affine_minorants(w, "eof", mids, seed=seed, numerics=numerics)
    return AffineMinorants(
        np.concatenate([lam, extra.lambdas]),
        np.concatenate([values, extra.legendre_values]),
        np.concatenate([conv, extra.converged]),
    )


def efficiency(p: np.ndarray, estimate: np.ndarray, exact: np.ndarray, window: tuple[float, float]) -> float:
    """Mean over grid points ``p`` in the closed ``window`` of ``estimate / exact``."""
    lo, hi = window
    mask = (p >= lo - 1e-9) & (p <= hi + 1e-9) & (exact > 0)
    if not np.any(mask):
        return math.nan
    return float(np.mean(estimate[mask] / exact[mask]))


# --------------------------------------------------------------------------
# runs


def run_fig2(
    n: int = 3,
    points: int = 30,
    measure: str = "concurrence",
    seed: int = 0,
    numerics: Numerics = DEFAULT,
) -> Table:
    """Exact isotropic concurrence against the witness bound over ``F in [1/n, 1]``."""
    if points < 2:
        raise DomainError(f"need at least 2 points, got {points}")
    w = isotropic_witness(n)
    rows = []
    unconverged = 0
    for f in np.linspace(1.0 / n, 1.0, points):
        r = bound_from_record(MeasurementRecord.single(w, 1.0 / n - f), measure=measure, seed=seed, numerics=numerics)
        unconverged += not r.converged
        rows.append((float(f), isotropic_concurrence_exact(f, n), r.bound))
    gap = max(abs(e - b) for _, e, b in rows)
    return Table(("F", "exact", "bound"), tuple(rows), {"max_gap": gap, "unconverged": unconverged})


def run_fig3(
    samples: int = 100,
    seed: int = 0,
    p_values: Sequence[float] | None = None,
    tangents: int = 16,
    numerics: Numerics = DEFAULT,
) -> Table:
    """
    Average entanglement of formation of ``p |psi><psi| + (1-p) sigma``.

    ``sigma`` ranges over ``samples`` random separable states.  Columns:
    exact value (Wootters), the Legendre bound from the white-noise witness
    (WIT) and the reduction-witness estimate (RWIT).  ``meta`` holds the
    windowed efficiencies.
    """
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    p = np.round(np.linspace(0.0, 1.0, 101), 10) if p_values is None else np.asarray(p_values, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise DomainError("noise levels must lie in [0, 1]")
    psi = STUDY_STATE
    proj = psi.projector()
    sigmas = [sample_separable_two_qubit(item_seed(seed, k), numerics)[0].matrix for k in range(samples)]

    w_wit = build_method3_witness(psi, numerics)
    w_red = reduction_witness(psi)
    c_psi = concurrence_pure(psi)

    def mean(op, m):
        return float(np.real(np.einsum("ij,ji->", op, m)))

    # means are affine in p
    wit_psi, red_psi = mean(w_wit.matrix, proj), mean(w_red.matrix, proj)
    wit_sig = np.array([mean(w_wit.matrix, s) for s in sigmas])
    red_sig = np.array([mean(w_red.matrix, s) for s in sigmas])
    wit_means = p[:, None] * wit_psi + (1 - p[:, None]) * wit_sig[None, :]
    red_means = p[:, None] * red_psi + (1 - p[:, None]) * red_sig[None, :]

    minorants = witness_eof_minorants(w_wit, wit_means.ravel(), tangents, seed, numerics)
    wit = minorants.bound(wit_means.ravel()).reshape(wit_means.shape)

    exact = np.empty_like(wit)
    rwit = np.empty_like(wit)
    for i, pi in enumerate(p):
        for k, s in enumerate(sigmas):
            rho = DensityMatrix(pi * proj + (1 - pi) * s, _TWO_QUBITS)
            exact[i, k] = eof_from_concurrence(wootters_concurrence(rho))
            c = min(1.0, reduction_witness_bound(red_means[i, k], c_psi))
            rwit[i, k] = eof_from_concurrence(c)

    ex, wm, rm = exact.mean(axis=1), wit.mean(axis=1), rwit.mean(axis=1)
    rows = tuple((float(a), float(b), float(c), float(d)) for a, b, c, d in zip(p, ex, wm, rm))
    meta = {
        "efficiency": {
            "WIT": [efficiency(p, wm, ex, win) for win in WINDOWS],
            "RWIT": [efficiency(p, rm, ex, win) for win in WINDOWS],
        },
        "windows": WINDOWS,
        "unconverged": int(np.sum(~minorants.converged)),
        "samples": samples,
    }
    return Table(("p", "exact_mean", "wit_mean", "rwit_mean"), rows, meta)


def efficiency_table(fig3: Table) -> Table:
    """Windowed efficiencies (percent) per method, one row per method."""
    eff = fig3.meta["efficiency"]
    header = ("method", "measurements") + tuple(f"eta_{lo:g}_{hi:g}" for lo, hi in fig3.meta["windows"])
    rows = tuple(
        (name, str(MEASUREMENT_SETTINGS[name])) + tuple(100.0 * x for x in eff[name]) for name in ("WIT", "RWIT")
    )
    return Table(header, rows)


def run_fig4(grid: int = 20, numerics: Numerics = DEFAULT) -> Table:
    """
    Geometric-measure bounds from three cluster-basis fidelities.

    ``F1`` and ``F2`` run over a ``grid x grid`` lattice of ``[0, 1]``;
    points with ``F1 + F2 > 1`` are skipped and ``F3 = 1 - F1 - F2``.
    """
    if grid < 2:
        raise DomainError(f"grid must be >= 2, got {grid}")
    axis = np.linspace(0.0, 1.0, grid)
    e_cluster = 0.75
    rows = []
    for f1 in axis:
        for f2 in axis:
            f3 = 1.0 - f1 - f2
            if f3 < -1e-12:
                continue
            fid = np.zeros(16)
            fid[:3] = f1, f2, max(0.0, f3)
            single = single_fidelity_bound(float(fid.max()), e_cluster)
            multi = multi_fidelity_bound(FidelityVector(fid, 4), numerics).bound
            rows.append((float(f1), float(f2), single, multi))
    rows.sort()
    diff = np.array([m - s for _, _, s, m in rows])
    meta = {
        "min_gain": float(diff.min()),
        "improved": int(np.sum(diff > 0.02)),
        "points": len(rows),
        "lattice": grid * grid,
    }
    return Table(("F1", "F2", "single_bound", "multi_bound"), tuple(rows), meta)
