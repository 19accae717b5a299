"""
Entanglement measures on pure states, Wootters' two-qubit formula, and the
reduction-witness concurrence estimate.

All entropies use base-2 logarithms, so a Bell pair carries one ebit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT, Numerics
from .errors import DomainError, StructureError
from .qcore import (
    DensityMatrix,
    Observable,
    PureState,
    TensorStructure,
    embed_operator,
    reduced_from_vector,
)

__all__ = [
    "Bipartition",
    "concurrence_pure",
    "tsallis2",
    "von_neumann_entropy",
    "binary_entropy",
    "eof_pure",
    "wootters_concurrence",
    "eof_from_concurrence",
    "best_product_overlap",
    "geometric_pure",
    "meyer_wallach",
    "reduction_witness",
    "reduction_witness_bound",
    "schmidt_coefficients",
    "linear_entropy_from_schmidt",
]


@dataclass(frozen=True)
class Bipartition:
    """The subsystems forming side A of an A|B split."""

    side_a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "side_a", tuple(sorted({int(s) for s in self.side_a})))
        if not self.side_a:
            raise StructureError("side A of a bipartition must be non-empty")

    def sites(self, structure: TensorStructure) -> tuple[int, ...]:
        return structure.check_sites(self.side_a)


def _cut_sites(cut, structure: TensorStructure) -> tuple[int, ...]:
    if cut is None:
        cut = (0,)
    if not isinstance(cut, Bipartition):
        cut = Bipartition(tuple([cut] if np.isscalar(cut) else cut))
    return cut.sites(structure)


def _spectrum(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return np.clip(np.linalg.eigvalsh(m), 0.0, None)


def _schmidt_svd(psi: np.ndarray, dims, side_a) -> tuple[np.ndarray, np.ndarray]:
    """Singular values and left singular vectors of psi viewed as an A x B matrix."""
    rest = [k for k in range(len(dims)) if k not in side_a]
    t = psi.reshape(dims).transpose(list(side_a) + rest)
    da = int(np.prod([dims[k] for k in side_a]))
    u, s, _ = np.linalg.svd(t.reshape(da, -1))
    return s, u


def linear_entropy_from_schmidt(s: np.ndarray) -> float:
    """``1 - sum p_i^2`` for Schmidt weights ``p = s^2``, free of cancellation.

    Uses ``2 sum_{i<j} p_i p_j`` with tail sums, so a state within ``eps`` of a
    product state gives a value of order ``eps^2`` rather than round-off.
    """
    p = np.sort(np.asarray(s, dtype=float) ** 2)
    total = p.sum()
    if total == 0:
        return 0.0
    p = p / total
    tail = np.cumsum(p[:-1])
    return float(2.0 * np.dot(p[1:], tail))


def schmidt_coefficients(psi: PureState, cut=None) -> np.ndarray:
    """Squared Schmidt coefficients across ``cut``, in decreasing order."""
    keep = _cut_sites(cut, psi.structure)
    s, _ = _schmidt_svd(psi.amplitudes, psi.structure.local_dims, keep)
    return s**2


def tsallis2(rho) -> float:
    """Linear entropy ``1 - Tr(rho^2)``."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(1.0 - np.real(np.einsum("ij,ji->", m, m)))


def concurrence_pure(psi: PureState, cut=None) -> float:
    """Pure-state concurrence ``sqrt(2 (1 - Tr rho_A^2))``."""
    keep = _cut_sites(cut, psi.structure)
    s, _ = _schmidt_svd(psi.amplitudes, psi.structure.local_dims, keep)
    return float(np.sqrt(2.0 * linear_entropy_from_schmidt(s)))


def von_neumann_entropy(rho) -> float:
    p = _spectrum(rho)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def eof_pure(psi: PureState, cut=None) -> float:
    """Entropy of entanglement (bits) across ``cut``."""
    keep = _cut_sites(cut, psi.structure)
    red = reduced_from_vector(psi.amplitudes, psi.structure.local_dims, keep)
    return von_neumann_entropy(red)


_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex
)


def wootters_concurrence(rho: DensityMatrix) -> float:
    """
    Exact concurrence of a two-qubit state.

    The decreasing square roots of the eigenvalues of ``rho (Y⊗Y) rho* (Y⊗Y)``
    are obtained as singular values of ``sqrt(rho) (Y⊗Y) sqrt(rho)*``, which
    avoids taking square roots of round-off noise for nearly pure input.
    """
    if isinstance(rho, PureState):
        rho = rho.density()
    if rho.structure.local_dims != (2, 2):
        raise StructureError(f"Wootters' formula needs two qubits, got {rho.structure.local_dims}")
    p, u = np.linalg.eigh(rho.matrix)
    sq = (u * np.sqrt(np.clip(p, 0, None))) @ u.conj().T
    mu = np.linalg.svd(sq @ _YY @ sq.conj(), compute_uv=False)
    return float(min(1.0, max(0.0, mu[0] - mu[1] - mu[2] - mu[3])))


def eof_from_concurrence(c: float) -> float:
    """Two-qubit entanglement of formation (bits) as a function of concurrence."""
    c = float(c)
    if not (-1e-12 <= c <= 1 + 1e-12):
        raise DomainError(f"concurrence must lie in [0, 1], got {c}")
    c = min(1.0, max(0.0, c))
    return binary_entropy(0.5 * (1 + np.sqrt(1 - c * c)))


# --------------------------------------------------------------------------
# geometric measure


def _contract_except(t: np.ndarray, factors: Sequence[np.ndarray], k: int) -> np.ndarray:
    """Contract ``t`` with conj(factors[j]) on every axis j != k."""
    out = t
    for j in range(len(factors) - 1, -1, -1):
        if j == k:
            continue
        out = np.tensordot(out, factors[j].conj(), axes=([j], [0]))
    return out


def _als(t: np.ndarray, factors: list[np.ndarray], numerics: Numerics) -> tuple[float, list[np.ndarray], int]:
    """Alternating single-party maximisation of |<a1 a2 ...|psi>|^2 from ``factors``."""
    n = t.ndim
    factors = [f / np.linalg.norm(f) for f in factors]
    prev = -1.0
    sweeps = 0
    for sweeps in range(1, numerics.product_max_sweeps + 1):
        for k in range(n):
            v = _contract_except(t, factors, k)
            nv = np.linalg.norm(v)
            if nv == 0:
                continue
            factors[k] = v / nv
        ov = float(nv * nv)
        if ov - prev < numerics.product_gain_tol:
            prev = max(prev, ov)
            break
        prev = ov
    return prev, factors, sweeps


def _hosvd_start(t: np.ndarray) -> list[np.ndarray]:
    out = []
    for k in range(t.ndim):
        m = np.moveaxis(t, k, 0).reshape(t.shape[k], -1)
        u, _, _ = np.linalg.svd(m, full_matrices=False)
        out.append(u[:, 0].copy())
    return out


def best_product_overlap(
    psi,
    dims: Sequence[int] | None = None,
    seed=0,
    numerics: Numerics = DEFAULT,
    start: Sequence[np.ndarray] | None = None,
    restarts: int | None = None,
) -> tuple[float, list[np.ndarray]]:
    """
    Maximal squared overlap of ``psi`` with fully product states.

    Parameters
    ----------
    psi : PureState or ndarray
        State; a raw vector needs ``dims``.
    seed : int or Generator
        Seeds the random restarts.
    start : list of ndarray, optional
        Local vectors to start from.  When given (and ``restarts`` is left
        unset) only this start is refined, which makes the result monotone
        with respect to the starting overlap.
    restarts : int, optional
        Number of random product starts; defaults to
        ``numerics.product_restarts`` without ``start`` and 0 with it.

    Returns
    -------
    overlap : float
    factors : list of ndarray
        Normalised local vectors of the best product state found.
    """
    if isinstance(psi, PureState):
        dims = psi.structure.local_dims
        psi = psi.amplitudes
    dims = tuple(dims)
    t = np.asarray(psi, dtype=complex).reshape(dims)
    if len(dims) == 1:
        return 1.0, [t.reshape(-1) / np.linalg.norm(t)]
    if len(dims) == 2 and start is None:
        u, s, vh = np.linalg.svd(t)
        return float(s[0] ** 2), [u[:, 0], vh[0].copy()]

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    starts = []
    if start is not None:
        starts.append([np.asarray(f, dtype=complex) for f in start])
    if restarts is None:
        restarts = 0 if start is not None else numerics.product_restarts
    if restarts > 0:
        starts.append(_hosvd_start(t))
    for _ in range(max(0, restarts - 1)):
        starts.append([rng.standard_normal(d) + 1j * rng.standard_normal(d) for d in dims])

    best, best_f = -1.0, None
    for f0 in starts:
        ov, f, _ = _als(t, list(f0), numerics)
        if ov > best:
            best, best_f = ov, f
    return min(1.0, best), best_f


def geometric_pure(psi: PureState, seed=0, numerics: Numerics = DEFAULT) -> float:
    """One minus the maximal squared overlap with fully product states."""
    ov, _ = best_product_overlap(psi, seed=seed, numerics=numerics)
    return max(0.0, 1.0 - ov)


def meyer_wallach(psi: PureState) -> float:
    """``2 [1 - (1/N) sum_k Tr rho_k^2]`` over the single-qubit reductions."""
    s = psi.structure
    if not s.is_qubits():
        raise StructureError(f"Meyer-Wallach measure needs qubits, got {s.local_dims}")
    n = s.n_parties
    if n == 1:
        return 0.0
    pur = [1 - tsallis2(reduced_from_vector(psi.amplitudes, s.local_dims, (k,))) for k in range(n)]
    return float(min(1.0, max(0.0, 2 * (1 - np.mean(pur)))))


# --------------------------------------------------------------------------
# reduction-criterion witness


def reduction_witness(phi: PureState, cut=None) -> Observable:
    """``2 [1_A ⊗ Tr_A |phi><phi| - |phi><phi|]`` for the split ``cut``."""
    s = phi.structure
    side_a = _cut_sites(cut, s)
    side_b = s.complement(side_a)
    rho_b = reduced_from_vector(phi.amplitudes, s.local_dims, side_b)
    m = 2 * (embed_operator(rho_b, side_b, s) - phi.projector())
    return Observable(m, s)


def reduction_witness_bound(mean: float, e_c_phi: float) -> float:
    """Concurrence lower bound ``max(0, -<W_phi> / E_C(phi))``."""
    if not e_c_phi > 0:
        raise DomainError(f"E_C(phi) must be positive, got {e_c_phi}")
    return max(0.0, -float(mean) / float(e_c_phi))
