"""
Legendre transforms of convex-roof entanglement measures and the duality
bound built on them.

For a convex-roof measure ``E`` the conjugate

    Ê(W) = sup_psi { <psi|W|psi> - E(psi) }

only involves pure states.  Each engine here writes the entropy-like part of
``E`` as an infimum over "Hamiltonians" (a Gibbs variational principle) and
then alternates exact block maximisations:

* concurrence: an auxiliary scale ``alpha`` linearises the square root, the
  linear entropy of the reduction is replaced by the q=2 Gibbs principle,
  and the state update is the top eigenvector of ``W - (H⊗1)/(sqrt(2) alpha)``;
* entanglement of formation: the same with ``H = -log2 rho_A``;
* Meyer-Wallach: one q=2 Gibbs inversion per qubit, no square root;
* geometric measure: ``Ê = sup_phi ||W + |phi><phi||| - 1`` over product
  ``phi``, alternating between the top eigenvector and the closest product
  state.

Every block step is exact, so the objective sequence is non-decreasing.
The limit is a local maximum; random restarts guard against reporting a
value below the global one (which would inflate the entanglement bound).

Any slope ``lambda`` turns ``Ê`` into a valid lower bound
``lambda w - Ê(lambda W)``; :func:`bound_from_record` maximises over it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT, Numerics
from .errors import DomainError, StructureError
from .measures import (
    Bipartition,
    best_product_overlap,
    geometric_pure,
)
from .qcore import (
    DensityMatrix,
    MeasurementRecord,
    Observable,
    PureState,
    TensorStructure,
    embed_operator,
    reduced_from_vector,
)

__all__ = [
    "MEASURES",
    "LegendreValue",
    "BoundResult",
    "GibbsInversion",
    "hamiltonian_from_state",
    "thermal_state_q2",
    "legendre",
    "legendre_concurrence",
    "legendre_eof",
    "legendre_geometric",
    "legendre_meyer_wallach",
    "measure_value",
    "bound_from_record",
    "maximize_concave_1d",
    "AffineMinorants",
    "affine_minorants",
]

log = logging.getLogger(__name__)

MEASURES = ("concurrence", "eof", "geometric", "mw")
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class LegendreValue:
    """Result of one Legendre-transform evaluation.

    ``value`` is attained: it equals ``<psi|W|psi> - E(psi)`` for the returned
    ``maximizer_state`` (or exceeds it by the inner solver's slack), hence it
    never exceeds the true transform.
    """

    value: float
    maximizer_state: PureState
    iterations: int
    converged: bool
    max_descent: float = 0.0
    restarts: int = 1


@dataclass(frozen=True)
class BoundResult:
    bound: float
    optimal_lambdas: np.ndarray
    legendre_at_optimum: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return bool(self.diagnostics.get("converged", True))


# --------------------------------------------------------------------------
# q = 2 Gibbs principle


@dataclass(frozen=True)
class GibbsInversion:
    """Hamiltonian for which a given state is the q=2 thermal state at beta=1.

    Attributes
    ----------
    energies : ndarray
        Increasing energies ``E_i = 2 (p_1 - p_i)`` for decreasing
        eigenvalues ``p_i`` of the state; ``E_1 = 0``.
    free_energy_f2 : float
        ``2 p_1 - sum p_i^2 - 1``.
    basis : ndarray
        Unitary whose columns are the eigenvectors, matching ``energies``.
    """

    energies: np.ndarray
    free_energy_f2: float
    basis: np.ndarray

    def hamiltonian(self) -> np.ndarray:
        u = self.basis
        return (u * self.energies) @ u.conj().T

    @property
    def beta_plus(self) -> float:
        e = self.energies
        gap = e[e > e[0]]
        if gap.size == 0:
            return math.inf
        g = int(np.sum(e == e[0]))
        return 2.0 / (g * (gap[0] - e[0]))


def _gibbs_arrays(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    p, u = np.linalg.eigh(rho)
    p, u = p[::-1], u[:, ::-1]
    energies = 2.0 * (p[0] - p)
    f2 = 2.0 * p[0] - float(np.dot(p, p)) - 1.0
    return energies, u, f2


def hamiltonian_from_state(rho_a) -> GibbsInversion:
    """Invert the q=2 thermal-state map at ``beta = 1``.

    Degenerate and rank-deficient states are handled by the same formulas.
    """
    m = rho_a.matrix if isinstance(rho_a, DensityMatrix) else np.asarray(rho_a, dtype=complex)
    energies, u, f2 = _gibbs_arrays(m)
    energies[0] = 0.0
    return GibbsInversion(energies, f2, u)


def thermal_state_q2(h, beta: float, numerics: Numerics = DEFAULT) -> DensityMatrix:
    """
    Unique minimiser of ``Tr(rho H) - S_2(rho) / beta``.

    Below ``beta_plus = 2 / (g (e* - e0))`` (ground degeneracy ``g``, gap
    ``e* - e0``) the state is ``N([1 - tau (H - e0)]_+)`` where ``tau``
    solves ``beta = 2 tau / Tr[1 - tau (H - e0)]_+``; above it, the
    normalised ground-space projector.  ``beta(t)`` is piecewise rational
    in ``t``, so the root is found exactly by walking the support sizes.
    """
    beta = float(beta)
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if isinstance(h, Observable):
        m, structure = h.matrix, h.structure
    elif isinstance(h, GibbsInversion):
        m, structure = h.hamiltonian(), None
    else:
        m, structure = np.asarray(h, dtype=complex), None
    e, u = np.linalg.eigh(m)
    d = e.size
    x = e - e[0]
    scale = max(1.0, float(np.max(np.abs(e))))
    degenerate = x <= numerics.degeneracy_tol * scale
    g = int(np.sum(degenerate))
    if g == d:
        p = np.full(d, 1.0 / d)
    else:
        gap = x[g]
        beta_plus = 2.0 / (g * gap)
        if beta >= beta_plus:
            p = np.where(degenerate, 1.0 / g, 0.0)
        else:
            x = np.where(degenerate, 0.0, x)
            csum = np.cumsum(x)
            tau = None
            for size in range(g, d + 1):
                t = beta * size / (2.0 + beta * csum[size - 1])
                if t * x[size - 1] < 1.0 and (size == d or t * x[size] >= 1.0):
                    tau = t
                    break
            if tau is None:  # round-off at a support boundary
                tau = beta * d / (2.0 + beta * csum[-1])
            p = np.clip(1.0 - tau * x, 0.0, None)
            p /= p.sum()
    rho = (u * p) @ u.conj().T
    if structure is None:
        structure = TensorStructure((d,))
    return DensityMatrix(rho, structure)


# --------------------------------------------------------------------------
# fixed-point engines


def _haar_vectors(d: int, n: int, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for _ in range(n):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        out.append(v / np.linalg.norm(v))
    return out


def _top_vector(m: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eigh(m)
    return float(vals[-1]), vecs[:, -1]


def _starts(w: np.ndarray, numerics: Numerics, seed, warm) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    starts = [_top_vector(w)[1]]
    if warm is not None:
        starts.append(np.asarray(warm.amplitudes if isinstance(warm, PureState) else warm, dtype=complex))
    n_random = max(0, numerics.restarts - len(starts))
    return starts + _haar_vectors(w.shape[0], n_random, rng)


def _ascend(step, state, numerics: Numerics, scale: float):
    """Iterate ``value, state = step(state)`` until the value stalls.

    A step returning ``None`` as the next state ends the run as converged
    (the engines use this when the iterate has collapsed onto a product
    state).  Returns (best value, state that attained it, iterations,
    converged, largest observed decrease).
    """
    best_v, best_state = -math.inf, state
    prev = None
    stall = 0
    descent = 0.0
    converged = False
    it = 0
    for it in range(1, numerics.fixed_point_max_iter + 1):
        v, nxt = step(state)
        if v > best_v:
            best_v, best_state = v, state
        if nxt is None:
            converged = True
            break
        if prev is not None:
            diff = v - prev
            descent = max(descent, -diff)
            if abs(diff) < numerics.fixed_point_tol * scale:
                stall += 1
                if stall >= numerics.fixed_point_patience:
                    converged = True
                    break
            else:
                stall = 0
        prev = v
        state = nxt
    if descent > numerics.ascent_tol * scale:
        log.debug("fixed-point objective decreased by %.3e", descent)
    return best_v, best_state, it, converged, descent


def _as_observable(w) -> Observable:
    if isinstance(w, Observable):
        return w
    raise StructureError("expected an Observable")


def _cut_sites(cut, structure: TensorStructure) -> tuple[int, ...]:
    if cut is None:
        cut = (0,)
    if not isinstance(cut, Bipartition):
        cut = Bipartition(tuple([cut] if np.isscalar(cut) else cut))
    return cut.sites(structure)


def _local_operator(t: np.ndarray, factors: Sequence[np.ndarray], k: int) -> np.ndarray:
    """``<others|W|others>`` on party ``k``; ``t`` is W reshaped to (dims, dims)."""
    n = len(factors)
    bra = "abcdefghij"[:n]
    ket = "ABCDEFGHIJ"[:n]
    operands, subs = [t], [bra + ket]
    for j in range(n):
        if j != k:
            operands += [factors[j].conj(), factors[j]]
            subs += [bra[j], ket[j]]
    return np.einsum(",".join(subs) + "->" + bra[k] + ket[k], *operands)


def _local_top_vectors(v: np.ndarray, dims: Sequence[int]) -> list[np.ndarray]:
    t = v.reshape(dims)
    out = []
    for k in range(t.ndim):
        u, _, _ = np.linalg.svd(np.moveaxis(t, k, 0).reshape(dims[k], -1), full_matrices=False)
        out.append(u[:, 0].copy())
    return out


def best_product_expectation(
    m: np.ndarray,
    dims: Sequence[int],
    seed=0,
    restarts: int = 5,
    numerics: Numerics = DEFAULT,
    extra_starts: Sequence[np.ndarray] = (),
) -> tuple[float, np.ndarray]:
    """
    Largest ``<phi|W|phi>`` over fully product ``phi`` (local search).

    Each party in turn is set to the top eigenvector of ``W`` compressed by
    the current vectors of the other parties, which never lowers the value.
    Product states carry no entanglement under any measure here, so the
    result is always a candidate for the Legendre transform.  Vectors in
    ``extra_starts`` are compressed to local vectors and searched from too.
    """
    dims = tuple(dims)
    n = len(dims)
    rng = np.random.default_rng(seed)
    t = np.asarray(m).reshape(dims * 2)
    starts = [_local_top_vectors(_top_vector(m)[1], dims)]
    starts += [_local_top_vectors(np.asarray(v), dims) for v in extra_starts]
    starts += [
        [rng.standard_normal(k) + 1j * rng.standard_normal(k) for k in dims]
        for _ in range(max(0, restarts - 1))
    ]
    best_v, best_phi = -math.inf, None
    for factors in starts:
        factors = [f / np.linalg.norm(f) for f in factors]
        prev = -math.inf
        for _ in range(numerics.product_max_sweeps):
            for k in range(n):
                val, factors[k] = _top_vector(_local_operator(t, factors, k))
            if val - prev < numerics.product_gain_tol:
                break
            prev = val
        if val > best_v:
            best_v, best_phi = val, _product_vector(factors)
    return best_v, best_phi


def _finish(w: Observable, v, psi, it, conv, value_of, numerics, seed, collapsed, descent, n_starts) -> LegendreValue:
    """Re-evaluate the best iterate exactly and compare with the product candidate."""
    m = w.matrix
    v = max(v, value_of(psi))
    _, prod_psi = best_product_expectation(
        m, w.structure.local_dims, seed=seed, numerics=numerics, extra_starts=collapsed
    )
    prod_exact = value_of(prod_psi)
    if prod_exact > v:
        v, psi, it, conv = prod_exact, prod_psi, 0, True
    return LegendreValue(
        value=float(v),
        maximizer_state=PureState(psi, w.structure, normalize=True),
        iterations=it,
        converged=conv,
        max_descent=descent,
        restarts=n_starts,
    )


def _spectral_scale(m: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(m)))))


def _run_restarts(w: Observable, make_step, value_of, numerics: Numerics, seed, warm) -> LegendreValue:
    m = w.matrix
    scale = _spectral_scale(m)
    best = None
    total_descent = 0.0
    starts = _starts(m, numerics, seed, warm)
    collapsed = []
    for psi0 in starts:
        step, init = make_step(psi0)
        v, state, it, conv, descent = _ascend(step, init, numerics, scale)
        total_descent = max(total_descent, descent)
        if getattr(step, "collapsed", False):
            collapsed.append(state[0] if isinstance(state, tuple) else state)
        if best is None or v > best[0]:
            best = (v, state, it, conv)
    v, state, it, conv = best
    psi = state[0] if isinstance(state, tuple) else state
    return _finish(w, v, psi, it, conv, value_of, numerics, seed, collapsed, total_descent, len(starts))


def _quad(m: np.ndarray, psi: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, m @ psi)))


def _bipartite_frame(w: Observable, cut):
    """Permute ``W`` so that side A of ``cut`` comes first.

    Returns the permuted matrix, (d_A, d_B) and the maps taking vectors
    into and out of the permuted order.
    """
    s = w.structure
    side_a = _cut_sites(cut, s)
    side_b = s.complement(side_a)
    dims = list(s.local_dims)
    n = len(dims)
    order = list(side_a) + list(side_b)
    da = int(np.prod([dims[k] for k in side_a]))
    db = s.total_dim // da
    if order == list(range(n)):
        return w.matrix, da, db, (lambda v: v), (lambda v: v)
    pdims = [dims[k] for k in order]
    t = w.matrix.reshape(dims * 2).transpose(order + [n + k for k in order])
    m = np.ascontiguousarray(t.reshape(s.total_dim, s.total_dim))
    inv = list(np.argsort(order))

    def fwd(v):
        return np.asarray(v).reshape(dims).transpose(order).reshape(-1)

    def back(v):
        return v.reshape(pdims).transpose(inv).reshape(-1)

    return m, da, db, fwd, back


def _bipartite_engine(w: Observable, cut, seed, numerics: Numerics, warm, entropy, hamiltonian, scale_of):
    """Shared driver for measures that are functions of the spectrum of ``rho_A``.

    All restarts are iterated in lockstep with stacked decompositions; each
    keeps its own stopping state, so the outcome equals running them one
    after another.  The callables act row-wise on Schmidt weights ``p`` of
    shape (restarts, d_A): ``entropy(p)`` gives the measure, ``hamiltonian(p,
    e)`` the Gibbs energies in the Schmidt basis and ``scale_of(p, e)`` the
    factor dividing ``H ⊗ 1`` in the state update.
    """
    m, da, db, fwd, back = _bipartite_frame(w, cut)
    d = da * db
    k = min(da, db)
    eye_b = np.eye(db)
    scale = _spectral_scale(m)

    def schmidt(x):
        u, sv, _ = np.linalg.svd(x.reshape(-1, da, db))
        p = np.zeros((x.shape[0], da))
        p[:, :k] = sv**2
        return p, u

    def values(x):
        p, u = schmidt(x)
        e = entropy(p)
        quad = np.real(np.einsum("ri,ij,rj->r", x.conj(), m, x))
        return quad - e, p, u, e

    if warm is not None:
        warm = fwd(warm.amplitudes if isinstance(warm, PureState) else warm)
    x = np.array(_starts(m, numerics, seed, warm), dtype=complex)
    r = x.shape[0]
    best_v = np.full(r, -np.inf)
    best_x = x.copy()
    prev = np.full(r, np.nan)
    stall = np.zeros(r, dtype=int)
    iters = np.zeros(r, dtype=int)
    descent = np.zeros(r)
    active = np.ones(r, dtype=bool)
    converged = np.zeros(r, dtype=bool)
    collapsed = np.zeros(r, dtype=bool)

    for _ in range(numerics.fixed_point_max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        v, p, u, e = values(xa)
        iters[idx] += 1
        better = v > best_v[idx]
        best_v[idx[better]] = v[better]
        best_x[idx[better]] = xa[better]
        # numerically product: the product search takes over from here
        gone = 1.0 - p[:, 0] < numerics.product_collapse_tol
        diff = v - prev[idx]
        has_prev = ~np.isnan(diff)
        descent[idx[has_prev]] = np.maximum(descent[idx[has_prev]], -diff[has_prev])
        small = has_prev & (np.abs(diff) < numerics.fixed_point_tol * scale)
        stall[idx] = np.where(small, stall[idx] + 1, np.where(has_prev, 0, stall[idx]))
        done = gone | (stall[idx] >= numerics.fixed_point_patience)
        collapsed[idx[gone]] = True
        converged[idx[done]] = True
        active[idx[done]] = False
        prev[idx] = v
        go = ~done
        if not np.any(go):
            continue
        g_idx = idx[go]
        pg, ug, eg = p[go], u[go], e[go]
        hv = hamiltonian(pg, eg)
        h = (ug * hv[:, None, :]) @ np.conj(np.swapaxes(ug, 1, 2))
        hk = (h[:, :, None, :, None] * eye_b[None, None, :, None, :]).reshape(-1, d, d)
        mats = m[None] - hk / scale_of(pg, eg)[:, None, None]
        _, vecs = np.linalg.eigh(mats)
        x[g_idx] = vecs[:, :, -1]

    if np.any(descent > numerics.ascent_tol * scale):
        log.debug("fixed-point objective decreased by %.3e", descent.max())
    j = int(np.argmax(best_v))

    def value_of(psi):
        return float(values(np.asarray(psi, dtype=complex)[None])[0][0])

    frame = Observable(m, TensorStructure((da, db)))
    lv = _finish(
        frame, float(best_v[j]), best_x[j], int(iters[j]), bool(converged[j]), value_of,
        numerics, seed, list(best_x[collapsed]), float(descent.max()), r,
    )
    psi = back(lv.maximizer_state.amplitudes)
    return LegendreValue(
        value=lv.value,
        maximizer_state=PureState(psi, w.structure, normalize=True),
        iterations=lv.iterations,
        converged=lv.converged,
        max_descent=lv.max_descent,
        restarts=lv.restarts,
    )


def _linear_entropy_rows(p: np.ndarray) -> np.ndarray:
    """Row-wise ``1 - sum p^2`` via tail sums (see :func:`linear_entropy_from_schmidt`)."""
    q = np.sort(p, axis=1)
    q = q / q.sum(axis=1, keepdims=True)
    tail = np.cumsum(q[:, :-1], axis=1)
    return 2.0 * np.sum(q[:, 1:] * tail, axis=1)


def legendre_concurrence(w: Observable, cut=None, seed=0, numerics: Numerics = DEFAULT, warm=None) -> LegendreValue:
    """Legendre transform of the concurrence across ``cut`` (default: party 0 vs rest).

    Iterates: ``alpha = sqrt(S_2(rho_A))`` (floored), ``H`` from
    :func:`hamiltonian_from_state` on ``rho_A``, and ``psi`` the top
    eigenvector of ``W - (H⊗1) / (sqrt(2) alpha)``.
    """
    w = _as_observable(w)

    def entropy(p):
        return np.sqrt(2.0 * _linear_entropy_rows(p))

    def hamiltonian(p, e):
        return 2.0 * (p[:, :1] - p)

    def scale_of(p, e):
        # e = sqrt(2) * sqrt(S_2), so sqrt(2) * alpha = e up to the floor
        return _SQRT2 * np.maximum(e / _SQRT2, numerics.alpha_floor)

    return _bipartite_engine(w, cut, seed, numerics, warm, entropy, hamiltonian, scale_of)


def legendre_eof(w: Observable, cut=None, seed=0, numerics: Numerics = DEFAULT, warm=None) -> LegendreValue:
    """Legendre transform of the entanglement of formation (bits).

    The von Neumann Gibbs principle gives ``H = -log2 rho_A`` (eigenvalues
    floored at ``numerics.entropy_floor``); the state update is the top
    eigenvector of ``W - H⊗1``.
    """
    w = _as_observable(w)
    floor = numerics.entropy_floor

    def entropy(p):
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log2(p), 0.0)
        return -terms.sum(axis=1)

    def hamiltonian(p, e):
        logs = -np.log2(np.maximum(p, floor))
        return logs - logs.min(axis=1, keepdims=True)

    return _bipartite_engine(w, cut, seed, numerics, warm, entropy, hamiltonian, lambda p, e: np.ones(len(p)))


def legendre_meyer_wallach(w: Observable, seed=0, numerics: Numerics = DEFAULT, warm=None) -> LegendreValue:
    """Legendre transform of the Meyer-Wallach measure on N qubits.

    ``E_MW = (2/N) sum_k S_2(rho_k)``; each linear entropy is replaced by its
    q=2 Gibbs principle, and the state update is the top eigenvector of
    ``W - (2/N) sum_k H_k``.
    """
    w = _as_observable(w)
    s = w.structure
    if not s.is_qubits():
        raise StructureError(f"Meyer-Wallach measure needs qubits, got {s.local_dims}")
    n = s.n_parties
    dims = s.local_dims
    m = w.matrix

    def mw(psi):
        tot = 0.0
        for k in range(n):
            red = reduced_from_vector(psi, dims, (k,))
            tot += 1.0 - float(np.real(np.vdot(red, red)))
        return 2.0 * tot / n

    def value_of(psi):
        return _quad(m, psi) - mw(psi)

    def make_step(psi0):
        def step(psi):
            value = _quad(m, psi) - mw(psi)
            penalty = np.zeros_like(m)
            for k in range(n):
                red = reduced_from_vector(psi, dims, (k,))
                energies, u, _ = _gibbs_arrays(red)
                penalty += embed_operator((u * energies) @ u.conj().T, (k,), s)
            _, nxt = _top_vector(m - (2.0 / n) * penalty)
            return value, nxt

        return step, psi0

    return _run_restarts(w, make_step, value_of, numerics, seed, warm)


def _product_vector(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def legendre_geometric(w: Observable, seed=0, numerics: Numerics = DEFAULT, warm=None) -> LegendreValue:
    """Legendre transform of the geometric measure.

    Alternates ``psi = top eigenvector of W + |phi><phi|`` with ``phi`` the
    product state closest to ``psi`` (alternating local updates warm-started
    from the previous ``phi``, so the overlap never drops).
    """
    w = _as_observable(w)
    s = w.structure
    dims = s.local_dims
    m = w.matrix
    init_restarts = max(1, min(numerics.product_restarts, 5))

    def value_of(psi):
        return _quad(m, psi) - geometric_pure(PureState(psi, s, normalize=True), seed=seed, numerics=numerics)

    def make_step(psi0):
        ov, factors = best_product_overlap(psi0, dims, seed=seed, numerics=numerics, restarts=init_restarts)

        def step(state):
            psi, factors, ov = state
            value = _quad(m, psi) + ov - 1.0
            phi = _product_vector(factors)
            _, psi_next = _top_vector(m + np.outer(phi, phi.conj()))
            ov_next, factors_next = best_product_overlap(psi_next, dims, numerics=numerics, start=factors)
            return value, (psi_next, factors_next, ov_next)

        return step, (psi0, factors, ov)

    return _run_restarts(w, make_step, value_of, numerics, seed, warm)


_ENGINES = {
    "concurrence": legendre_concurrence,
    "eof": legendre_eof,
    "geometric": legendre_geometric,
    "mw": legendre_meyer_wallach,
}


def _check_measure(measure: str) -> str:
    if measure not in _ENGINES:
        raise DomainError(f"unknown measure {measure!r}; choose from {MEASURES}")
    return measure


def legendre(w: Observable, measure: str, cut=None, seed=0, numerics: Numerics = DEFAULT, warm=None) -> LegendreValue:
    """Dispatch to the engine for ``measure`` (one of :data:`MEASURES`)."""
    engine = _ENGINES[_check_measure(measure)]
    if measure in ("concurrence", "eof"):
        return engine(w, cut=cut, seed=seed, numerics=numerics, warm=warm)
    return engine(w, seed=seed, numerics=numerics, warm=warm)


def measure_value(psi: PureState, measure: str, cut=None, seed=0, numerics: Numerics = DEFAULT) -> float:
    """Pure-state value of ``measure``, matching the engine's convention."""
    from .measures import concurrence_pure, eof_pure, meyer_wallach

    _check_measure(measure)
    if measure == "concurrence":
        return concurrence_pure(psi, _cut_sites(cut, psi.structure))
    if measure == "eof":
        return eof_pure(psi, _cut_sites(cut, psi.structure))
    if measure == "geometric":
        return geometric_pure(psi, seed=seed, numerics=numerics)
    return meyer_wallach(psi)


# --------------------------------------------------------------------------
# slope optimisation

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden(f: Callable[[float], float], a: float, b: float, tol: float, known=None):
    """Golden-section maximisation of a unimodal ``f`` on ``[a, b]``."""
    known = dict(known or {})

    def ev(x):
        if x not in known:
            known[x] = f(x)
        return known[x]

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = ev(c), ev(d)
    while abs(b - a) > tol * max(1.0, abs(a), abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = ev(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = ev(d)
    x, fx = max(known.items(), key=lambda kv: kv[1])
    return x, fx


def maximize_concave_1d(f, x0: float, lo: float, hi: float, step: float, tol: float):
    """
    Maximise a concave function starting from ``x0`` within ``[lo, hi]``.

    Probes ``x0 ± step`` to pick the ascent direction, doubles the step until
    the value drops (or a box edge is hit), then refines the final bracket by
    golden-section search.

    Returns
    -------
    x, fx : float
        Best point found and its value.  ``f(x0)`` is always evaluated, so the
        result is never worse than the start.
    """
    seen = {x0: f(x0)}

    def ev(x):
        x = min(hi, max(lo, x))
        if x not in seen:
            seen[x] = f(x)
        return x, seen[x]

    f0 = seen[x0]
    xp, fp = ev(x0 + step)
    if fp > f0:
        direction = 1.0
    else:
        xm, fm = ev(x0 - step)
        if fm > f0:
            direction, xp, fp = -1.0, xm, fm
        else:
            _golden(lambda x: ev(x)[1], max(lo, x0 - step), min(hi, x0 + step), tol, seen)
            x, fx = max(seen.items(), key=lambda kv: kv[1])
            return x, fx

    a, b, fb = x0, xp, fp
    h = step
    while True:
        h *= 2.0
        c, fc = ev(x0 + direction * h)
        if fc <= fb or c in (lo, hi):
            break
        a, b, fb = b, c, fc
    left, right = (a, c) if a < c else (c, a)
    _golden(lambda x: ev(x)[1], left, right, tol, seen)
    x, fx = max(seen.items(), key=lambda kv: kv[1])
    return x, fx


def bound_from_record(
    record: MeasurementRecord,
    measure: str = "concurrence",
    seed=0,
    cut=None,
    numerics: Numerics = DEFAULT,
) -> BoundResult:
    """
    Optimal lower bound on ``measure`` implied by a measurement record.

    Maximises the concave function ``g(lam) = sum_k lam_k w_k - Ê(sum_k lam_k W_k)``
    by coordinate ascent (one concave line search per coordinate).  Every
    evaluated ``lam`` already gives a valid bound; the best one is reported,
    clamped at zero (``lam = 0`` gives exactly zero).

    Parameters
    ----------
    record : MeasurementRecord
    measure : {'concurrence', 'eof', 'geometric', 'mw'}
    seed : int
        Seeds the random restarts; the same restarts are used for every
        slope so that ``g`` is evaluated consistently.
    cut : Bipartition or sequence of int, optional
        Side A for the bipartite measures; defaults to party 0.
    """
    _check_measure(measure)
    if len(record) == 0:
        raise DomainError("measurement record is empty")
    obs = [o.matrix for o in record.observables]
    means = record.means
    structure = record.structure
    n = len(obs)
    norms = [max(1e-12, float(np.max(np.abs(np.linalg.eigvalsh(o))))) for o in obs]

    cache: dict[tuple, LegendreValue] = {}
    last = {"psi": None}
    evals = []

    def legendre_at(lams: np.ndarray) -> LegendreValue:
        key = tuple(np.round(lams, 15))
        if key not in cache:
            if not np.any(lams):
                zero = PureState(np.eye(structure.total_dim)[0], structure)
                cache[key] = LegendreValue(0.0, zero, 0, True)
            else:
                wsum = Observable(sum(l * o for l, o in zip(lams, obs)), structure)
                lv = legendre(wsum, measure, cut=cut, seed=seed, numerics=numerics, warm=last["psi"])
                last["psi"] = lv.maximizer_state
                cache[key] = lv
                evals.append(lv)
        return cache[key]

    def g(lams: np.ndarray) -> float:
        return float(np.dot(lams, means)) - legendre_at(lams).value

    lams = np.zeros(n)
    best = 0.0
    rounds = 0
    for rounds in range(1, (numerics.coordinate_rounds if n > 1 else 1) + 1):
        before = best
        for k in range(n):
            def g_k(t, k=k):
                trial = lams.copy()
                trial[k] = t
                return g(trial)

            t, val = maximize_concave_1d(
                g_k,
                lams[k],
                -numerics.lambda_max / norms[k],
                numerics.lambda_max / norms[k],
                step=1e-2 / norms[k],
                tol=numerics.lambda_tol,
            )
            if val > best:
                best = val
                lams[k] = t
        if best - before < numerics.fixed_point_tol:
            break

    if best <= numerics.ascent_tol:
        # at or below round-off: no entanglement is certified
        lams = np.zeros(n)
        best = 0.0
    lv = legendre_at(lams)
    diagnostics = {
        "evaluations": len(evals),
        "iterations": [e.iterations for e in evals],
        "converged": all(e.converged for e in evals),
        "max_descent": max([e.max_descent for e in evals], default=0.0),
        "rounds": rounds,
    }
    return BoundResult(
        bound=max(0.0, float(np.dot(lams, means)) - lv.value),
        optimal_lambdas=lams,
        legendre_at_optimum=lv.value,
        diagnostics=diagnostics,
    )


# --------------------------------------------------------------------------
# tabulated single-observable bounds


@dataclass(frozen=True)
class AffineMinorants:
    """Family of affine lower bounds ``lam_j w - Ê(lam_j W)`` for one observable.

    Each member is a valid lower bound for every mean value ``w``; their upper
    envelope approaches the optimal bound as the slope grid is refined.
    """

    lambdas: np.ndarray
    legendre_values: np.ndarray
    converged: np.ndarray

    def bound(self, w) -> np.ndarray | float:
        w_arr = np.atleast_1d(np.asarray(w, dtype=float))
        vals = np.outer(w_arr, self.lambdas) - self.legendre_values[None, :]
        out = np.maximum(0.0, vals.max(axis=1))
        return float(out[0]) if np.ndim(w) == 0 else out

    def slope(self, w: float) -> float:
        vals = w * self.lambdas - self.legendre_values
        j = int(np.argmax(vals))
        return float(self.lambdas[j]) if vals[j] > 0 else 0.0


def affine_minorants(
    w: Observable,
    measure: str,
    lambdas: Sequence[float],
    seed=0,
    cut=None,
    numerics: Numerics = DEFAULT,
) -> AffineMinorants:
    """Evaluate ``Ê(lam W)`` on a slope grid (warm-started along the grid)."""
    _check_measure(measure)
    lambdas = np.array(sorted(float(x) for x in lambdas))
    vals = np.empty_like(lambdas)
    conv = np.empty(lambdas.shape, dtype=bool)
    order = np.argsort(np.abs(lambdas))
    warm = None
    for j in order:
        lam = lambdas[j]
        if lam == 0:
            vals[j], conv[j] = 0.0, True
            continue
        lv = legendre(lam * w, measure, cut=cut, seed=seed, numerics=numerics, warm=warm)
        warm = lv.maximizer_state
        vals[j], conv[j] = lv.value, lv.converged
    return AffineMinorants(lambdas, vals, conv)
