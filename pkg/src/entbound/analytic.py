"""
Closed-form bounds for the geometric measure and special bases.

Stabilizer bases (GHZ, 4-qubit cluster) come from one construction: the
common eigenvectors of ``n`` commuting independent Pauli generators,
labelled by their sign pattern.  For witnesses diagonal in such a basis,
where every basis state has overlap at most ``1/k`` with product states,

    Ê_G(sum_i lam_i |psi_i><psi_i|) <= ||X|| - 1,
    X = diag(k largest lam_i) + J / k,

with ``J`` the all-ones matrix.  The isotropic-state helpers give the
textbook test case for the concurrence bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .config import DEFAULT, Numerics
from .errors import DomainError, StructureError
from .legendre import BoundResult, maximize_concave_1d
from .qcore import DensityMatrix, Observable, PureState, TensorStructure

__all__ = [
    "CLUSTER_GENERATORS",
    "pauli_operator",
    "stabilizer_basis",
    "stabilizer_group",
    "ghz_generators",
    "ghz_basis",
    "cluster_basis",
    "fidelities_from_stabilizer_means",
    "FidelityVector",
    "DiagonalWitness",
    "observation_bound",
    "single_fidelity_legendre",
    "single_fidelity_bound",
    "multi_fidelity_bound",
    "isotropic_state",
    "isotropic_concurrence_exact",
    "isotropic_witness",
]

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# 4-qubit linear cluster state stabilizers
CLUSTER_GENERATORS = ("ZZII", "XXZI", "IZXX", "IIZZ")


def pauli_operator(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``"XXZI"`` (qubit 0 first)."""
    try:
        mats = [_PAULI[c] for c in label.upper()]
    except KeyError as exc:
        raise StructureError(f"invalid Pauli label {label!r}") from exc
    if not mats:
        raise StructureError("empty Pauli label")
    return reduce(np.kron, mats)


def _generator_matrices(generators: Sequence) -> tuple[list[np.ndarray], int]:
    mats = [pauli_operator(g) if isinstance(g, str) else np.asarray(g, dtype=complex) for g in generators]
    if not mats:
        raise StructureError("at least one generator is required")
    d = mats[0].shape[0]
    n = int(round(math.log2(d)))
    if 2**n != d or any(m.shape != (d, d) for m in mats):
        raise StructureError("generators must act on the same number of qubits")
    if len(mats) != n:
        raise StructureError(f"need {n} generators for {n} qubits, got {len(mats)}")
    for a, b in itertools.combinations(range(n), 2):
        if not np.allclose(mats[a] @ mats[b], mats[b] @ mats[a], atol=1e-12):
            raise StructureError(f"generators {a} and {b} do not commute")
    return mats, n


def _signs(index: int, n: int) -> np.ndarray:
    """Sign pattern of basis label ``index``: bit j (most significant first) set means -1."""
    bits = [(index >> (n - 1 - j)) & 1 for j in range(n)]
    return 1 - 2 * np.array(bits)


def stabilizer_basis(generators: Sequence) -> list[PureState]:
    """
    Common eigenbasis of ``n`` commuting, independent ``n``-qubit Paulis.

    State ``i`` has eigenvalue ``s_j = (-1)^{b_j}`` under generator ``j``,
    where ``b`` is the binary expansion of ``i`` (generator 0 most
    significant), so index 0 is the all-``+1`` state.  The global phase is
    fixed by making the first largest-modulus amplitude real and positive.
    """
    mats, n = _generator_matrices(generators)
    d = 2**n
    eye = np.eye(d)
    structure = TensorStructure.qubits(n)
    out = []
    for i in range(d):
        proj = reduce(np.matmul, [(eye + s * g) / 2 for s, g in zip(_signs(i, n), mats)])
        col = int(np.argmax(np.linalg.norm(proj, axis=0)))
        v = proj[:, col]
        if np.linalg.norm(v) < 1e-6:
            raise StructureError("generators are not independent")
        v = v / np.linalg.norm(v)
        j = int(np.argmax(np.abs(v) > np.max(np.abs(v)) - 1e-12))
        v = v * (abs(v[j]) / v[j])
        out.append(PureState(v, structure, normalize=True))
    return out


def stabilizer_group(generators: Sequence) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """All ``2^n`` products of generator subsets, as (subset, matrix) pairs."""
    mats, n = _generator_matrices(generators)
    d = 2**n
    out = []
    for mask in range(d):
        subset = tuple(j for j in range(n) if (mask >> (n - 1 - j)) & 1)
        m = reduce(np.matmul, [mats[j] for j in subset], np.eye(d, dtype=complex))
        out.append((subset, m))
    return out


def fidelities_from_stabilizer_means(generators: Sequence, means: Sequence[float]) -> np.ndarray:
    """
    Basis-state fidelities from the stabilizer-group expectation values.

    ``F_i = 2^{-n} sum_g s_i(g) <g>`` where ``s_i(g)`` is the product of the
    signs of state ``i`` over the generators making up ``g``.  ``means`` is
    ordered as :func:`stabilizer_group`.
    """
    group = stabilizer_group(generators)
    means = np.asarray(means, dtype=float)
    if means.shape != (len(group),):
        raise StructureError(f"expected {len(group)} stabilizer means, got shape {means.shape}")
    n = int(round(math.log2(len(group))))
    f = np.empty(len(group))
    for i in range(len(group)):
        s = _signs(i, n)
        coef = np.array([np.prod(s[list(sub)]) if sub else 1.0 for sub, _ in group])
        f[i] = float(coef @ means) / len(group)
    return f


def ghz_generators(n: int) -> list[str]:
    """``X^{⊗n}`` followed by ``Z_j Z_{j+1}``."""
    if n < 2:
        raise StructureError(f"GHZ basis needs at least 2 qubits, got {n}")
    gens = ["X" * n]
    for j in range(n - 1):
        gens.append("I" * j + "ZZ" + "I" * (n - j - 2))
    return gens


def ghz_basis(n: int) -> list[PureState]:
    """The ``2^n`` states ``(|x> ± |x̄>)/sqrt(2)``; index 0 is the usual GHZ state."""
    return stabilizer_basis(ghz_generators(n))


def cluster_basis(generators: Sequence = CLUSTER_GENERATORS) -> list[PureState]:
    """Common eigenbasis of the cluster-state stabilizers; index 0 is the cluster state."""
    return stabilizer_basis(generators)


# --------------------------------------------------------------------------
# diagonal witnesses


@dataclass(frozen=True)
class FidelityVector:
    """Fidelities with the states of a basis whose product overlap is at most ``1/k``."""

    fidelities: np.ndarray
    overlap_bound_inv: int

    def __post_init__(self):
        f = np.asarray(self.fidelities, dtype=float).ravel()
        if f.size == 0:
            raise DomainError("fidelity vector is empty")
        if np.any(f < -1e-12) or np.any(f > 1 + 1e-12):
            raise DomainError("fidelities must lie in [0, 1]")
        if f.sum() > 1 + 1e-9:
            raise DomainError(f"fidelities sum to {f.sum():.12g} > 1")
        k = int(self.overlap_bound_inv)
        if k < 2:
            raise DomainError(f"overlap_bound_inv must be >= 2, got {k}")
        f = np.clip(f, 0.0, 1.0)
        f.setflags(write=False)
        object.__setattr__(self, "fidelities", f)
        object.__setattr__(self, "overlap_bound_inv", k)


@dataclass(frozen=True)
class DiagonalWitness:
    """``sum_i lam_i |psi_i><psi_i|`` over a fixed basis.

    ``eigenvalues`` are stored in decreasing order; ``indices[i]`` is the
    basis index carrying ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    basis_label: str = "ghz"
    indices: np.ndarray = field(default=None)

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float).ravel()
        idx = np.arange(lam.size) if self.indices is None else np.asarray(self.indices, dtype=int)
        if idx.shape != lam.shape:
            raise StructureError("indices must match eigenvalues")
        order = np.argsort(-lam, kind="stable")
        lam, idx = lam[order], idx[order]
        lam.setflags(write=False)
        idx.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "indices", idx)

    def observable(self, basis: Sequence[PureState]) -> Observable:
        if len(basis) != self.eigenvalues.size:
            raise StructureError(f"basis has {len(basis)} states, witness {self.eigenvalues.size}")
        vecs = np.array([basis[i].amplitudes for i in self.indices]).T
        m = (vecs * self.eigenvalues) @ vecs.conj().T
        return Observable(m, basis[0].structure)


def _top_k_norm(lams: np.ndarray, k: int) -> float:
    """``||diag(top-k lams) + J/k||``; fewer than ``k`` entries give a smaller block."""
    top = np.sort(np.asarray(lams, dtype=float))[::-1][:k]
    x = np.diag(top) + 1.0 / k
    return float(np.linalg.eigvalsh(x)[-1])


def observation_bound(w: DiagonalWitness, k: int) -> float:
    """
    Upper bound ``||X|| - 1`` on ``Ê_G`` of a diagonal witness.

    ``X`` is the ``k x k`` matrix with ``lam_i + 1/k`` on the diagonal for
    the ``k`` largest eigenvalues and ``1/k`` elsewhere; its norm is taken
    by a direct eigensolve.
    """
    k = int(k)
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if w.eigenvalues.size < k:
        raise StructureError(f"need at least {k} eigenvalues, got {w.eigenvalues.size}")
    return _top_k_norm(w.eigenvalues, k) - 1.0


def _check_unit(name: str, x: float, closed: bool = True) -> float:
    x = float(x)
    ok = 0.0 <= x <= 1.0 if closed else 0.0 <= x < 1.0
    if not ok or math.isnan(x):
        raise DomainError(f"{name} must lie in [0, 1{']' if closed else ')'}, got {x}")
    return x


def single_fidelity_legendre(r: float, e_g_chi: float, alpha: float = 0.0) -> float:
    """``Ê_G(r W)`` for ``W = alpha 1 - |chi><chi|`` with ``E_G(chi) = e_g_chi``."""
    r = float(r)
    if r >= 0:
        return r * alpha
    return 0.5 * (math.sqrt((1 - r) ** 2 + 4 * r * e_g_chi) + 2 * alpha * r - r - 1)


def single_fidelity_bound(fidelity: float, e_g_chi: float, alpha: float = 0.0) -> float:
    """
    Best geometric-measure bound from the fidelity with one state ``chi``.

    Maximises ``r (alpha - F) - Ê_G(r W)`` over ``r`` in closed form.  With
    ``s = -r`` the objective is ``s F - s/2 + 1/2 - sqrt((s+a)^2 + b^2)/2``
    (``a = 1 - 2E``, ``b^2 = 4E(1-E)``), independent of ``alpha``; its
    stationary point solves ``(s+a) / sqrt((s+a)^2 + b^2) = 2F - 1``, where
    the objective equals ``(1 - a (2F-1) - 2 b sqrt(F (1-F))) / 2``.
    Non-positive ``r`` never help, so the result is zero for
    ``F <= 1 - E`` and tends to ``E`` as ``F -> 1``.
    """
    f = _check_unit("fidelity", fidelity)
    e = _check_unit("e_g_chi", e_g_chi, closed=False)
    if e == 0.0 or f <= 1 - e:
        return 0.0
    c = 2 * f - 1
    a = 1 - 2 * e
    b = 2 * math.sqrt(e * (1 - e))
    # objective at the stationary point, with sqrt(1 - c^2) = 2 sqrt(F(1-F))
    # to avoid cancellation as F -> 1
    value = 0.5 * (1 - a * c - 2 * b * math.sqrt(f * (1 - f)))
    return max(0.0, value)


def _single_fidelity_slope(f: float, e: float) -> float:
    """The maximising ``s = -r`` of :func:`single_fidelity_bound` (inf at ``F = 1``)."""
    if f <= 1 - e:
        return 0.0
    if f >= 1.0:
        return math.inf
    b = 2 * math.sqrt(e * (1 - e))
    return max(0.0, (2 * f - 1) * b / (2 * math.sqrt(f * (1 - f))) - (1 - 2 * e))


def multi_fidelity_bound(fv: FidelityVector, numerics: Numerics = DEFAULT) -> BoundResult:
    """
    Geometric-measure bound from all basis fidelities at once.

    Maximises the concave function
    ``g(lam) = sum_i lam_i F_i - ||X(lam)|| + 1`` by coordinate ascent.
    ``fv`` must list the fidelities of every basis state.
    States with zero fidelity get ``lam_i = -inf``, which removes them from
    ``X`` (the limit of ever more negative values, each a valid bound).  The
    ascent starts from the single-fidelity optimum (largest ``F_i`` at its
    optimal slope, the remaining positive-fidelity entries at 0), so the
    result is never below :func:`single_fidelity_bound`; at ``F = 1`` that
    optimum is only reached as the slope diverges and its limit is reported.
    """
    f = fv.fidelities
    k = fv.overlap_bound_inv
    e = 1.0 - 1.0 / k
    support = np.flatnonzero(f > 0)
    lams = np.full(f.size, -np.inf)
    if support.size == 0:
        return BoundResult(0.0, lams, 0.0, {"rounds": 0, "converged": True})

    fs = f[support]

    def g(x: np.ndarray) -> float:
        return float(x @ fs) - _top_k_norm(x, k) + 1.0

    top = int(np.argmax(fs))
    single = single_fidelity_bound(float(fs[top]), e)
    x = np.zeros(support.size)
    slope = _single_fidelity_slope(float(fs[top]), e)
    x[top] = min(slope, numerics.analytic_lambda_max)
    best = g(x)
    lim = numerics.analytic_lambda_max
    rounds = 0
    for rounds in range(1, numerics.analytic_rounds + 1):
        before = best
        for j in range(support.size):
            def g_j(t, j=j):
                trial = x.copy()
                trial[j] = t
                return g(trial)

            t, val = maximize_concave_1d(g_j, x[j], -lim, lim, step=1e-2, tol=numerics.lambda_tol)
            if val > best:
                best, x[j] = val, t
        if best - before < numerics.fixed_point_tol:
            break

    diagnostics = {"rounds": rounds, "converged": True, "single_fidelity": single}
    if single > best:
        # F = 1 (or the box clipped the slope): the single-fidelity supremum wins
        x = np.zeros(support.size)
        x[top] = slope
        best = single
        diagnostics["single_fidelity_limit"] = True
    lams[support] = x
    legendre = _top_k_norm(x, k) - 1.0 if np.all(np.isfinite(x)) else math.inf
    best = max(0.0, best)
    return BoundResult(bound=best, optimal_lambdas=lams, legendre_at_optimum=legendre, diagnostics=diagnostics)


# --------------------------------------------------------------------------
# isotropic states


def _max_entangled(n: int) -> np.ndarray:
    return np.eye(n).reshape(-1) / math.sqrt(n)


def isotropic_state(f: float, n: int) -> DensityMatrix:
    """``F |phi><phi| + (1-F)/(n^2-1) (1 - |phi><phi|)`` with ``|phi> = sum_i |ii>/sqrt(n)``."""
    f = _check_unit("f", f)
    if n < 2:
        raise StructureError(f"local dimension must be >= 2, got {n}")
    phi = _max_entangled(n)
    p = np.outer(phi, phi)
    rho = f * p + (1 - f) / (n * n - 1) * (np.eye(n * n) - p)
    return DensityMatrix(rho, TensorStructure((n, n)))


def isotropic_concurrence_exact(f: float, n: int) -> float:
    """``sqrt(2n/(n-1)) (F - 1/n)``, clamped to 0 below ``F = 1/n``."""
    return max(0.0, math.sqrt(2 * n / (n - 1)) * (float(f) - 1.0 / n))


def isotropic_witness(n: int) -> Observable:
    """``1/n - |phi><phi|``; its mean on the isotropic state is ``1/n - F``."""
    if n < 2:
        raise StructureError(f"local dimension must be >= 2, got {n}")
    phi = _max_entangled(n)
    return Observable(np.eye(n * n) / n - np.outer(phi, phi), TensorStructure((n, n)))
