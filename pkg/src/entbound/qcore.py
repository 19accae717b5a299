"""
Multipartite linear-algebra substrate.

States and operators carry an explicit :class:`TensorStructure` so that
reductions, partial transposes and embeddings of local operators can be
computed without the caller tracking subsystem ordering by hand.  Everything
is dense ``numpy`` storage; the dimensions in scope are small.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT, Numerics
from .errors import DomainError, SamplingError, StructureError

__all__ = [
    "TensorStructure",
    "PureState",
    "DensityMatrix",
    "Observable",
    "MeasurementRecord",
    "partial_trace",
    "partial_transpose",
    "max_eig",
    "expectation",
    "embed_operator",
    "reduced_from_vector",
    "random_pure_state",
    "random_density_matrix",
    "random_unitary",
    "random_separable_two_qubit",
    "sample_separable_two_qubit",
    "product_state",
    "basis_state",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TensorStructure:
    """Ordered local dimensions of a multipartite Hilbert space."""

    local_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.local_dims)
        if len(dims) == 0:
            raise StructureError("local_dims must be non-empty")
        if any(d < 2 for d in dims):
            raise StructureError(f"every local dimension must be >= 2, got {dims}")
        object.__setattr__(self, "local_dims", dims)

    @classmethod
    def qubits(cls, n: int) -> "TensorStructure":
        return cls((2,) * n)

    @property
    def n_parties(self) -> int:
        return len(self.local_dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.local_dims))

    def dim_of(self, sites: Iterable[int]) -> int:
        return int(np.prod([self.local_dims[s] for s in sites]))

    def check_sites(self, sites: Iterable[int], proper: bool = True) -> tuple[int, ...]:
        """Validate a subsystem index set and return it sorted."""
        try:
            sites = tuple(sorted({int(s) for s in sites}))
        except TypeError as exc:
            raise StructureError(f"invalid subsystem index set: {sites!r}") from exc
        if not sites:
            raise StructureError("subsystem index set must be non-empty")
        if sites[0] < 0 or sites[-1] >= self.n_parties:
            raise StructureError(
                f"subsystem indices {sites} out of range for {self.n_parties} parties"
            )
        if proper and len(sites) == self.n_parties:
            raise StructureError("subsystem index set must be a proper subset")
        return sites

    def complement(self, sites: Iterable[int]) -> tuple[int, ...]:
        sites = set(sites)
        return tuple(k for k in range(self.n_parties) if k not in sites)

    def is_qubits(self) -> bool:
        return all(d == 2 for d in self.local_dims)


def _coerce_structure(structure, dim: int) -> TensorStructure:
    if structure is None:
        return TensorStructure((dim,))
    if not isinstance(structure, TensorStructure):
        structure = TensorStructure(tuple(structure))
    if structure.total_dim != dim:
        raise StructureError(
            f"array of size {dim} does not match local_dims {structure.local_dims}"
        )
    return structure


@dataclass(frozen=True)
class PureState:
    """Normalised state vector.

    Parameters
    ----------
    amplitudes : array_like
        Complex amplitudes in the computational product basis, first
        subsystem most significant.
    structure : TensorStructure or sequence of int
        Local dimensions; a plain sequence is promoted.
    normalize : bool
        Rescale the amplitudes instead of rejecting unnormalised input.
    """

    amplitudes: np.ndarray
    structure: TensorStructure
    normalize: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        structure = _coerce_structure(self.structure, v.size)
        norm = np.linalg.norm(v)
        if self.normalize:
            if norm == 0:
                raise DomainError("cannot normalise the zero vector")
            v = v / norm
        elif abs(norm - 1) > DEFAULT.norm_tol * max(1, v.size) ** 0.5:
            raise DomainError(f"state vector has norm {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(v))
        object.__setattr__(self, "structure", structure)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector(), self.structure)

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator."""

    matrix: np.ndarray
    structure: TensorStructure

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StructureError(f"density matrix must be square, got shape {m.shape}")
        structure = _coerce_structure(self.structure, m.shape[0])
        _check_hermitian(m, DEFAULT.hermitian_tol)
        tr = np.trace(m).real
        if abs(tr - 1) > DEFAULT.trace_tol * m.shape[0]:
            raise DomainError(f"trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if lo < -DEFAULT.psd_tol:
            raise DomainError(f"matrix is not positive semidefinite (min eig {lo:.3e})")
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + m.conj().T)))
        object.__setattr__(self, "structure", structure)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        return cls(psi.projector(), psi.structure)

    @classmethod
    def maximally_mixed(cls, structure) -> "DensityMatrix":
        structure = structure if isinstance(structure, TensorStructure) else TensorStructure(tuple(structure))
        d = structure.total_dim
        return cls(np.eye(d) / d, structure)

    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.matrix, self.matrix)))

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class Observable:
    """Hermitian operator on a multipartite space."""

    matrix: np.ndarray
    structure: TensorStructure

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StructureError(f"observable must be square, got shape {m.shape}")
        structure = _coerce_structure(self.structure, m.shape[0])
        _check_hermitian(m, DEFAULT.hermitian_tol)
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + m.conj().T)))
        object.__setattr__(self, "structure", structure)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __mul__(self, c: float) -> "Observable":
        return Observable(float(c) * self.matrix, self.structure)

    __rmul__ = __mul__

    def __add__(self, other: "Observable") -> "Observable":
        if other.structure != self.structure:
            raise StructureError("cannot add observables with different structures")
        return Observable(self.matrix + other.matrix, self.structure)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    @classmethod
    def zeros(cls, structure) -> "Observable":
        structure = structure if isinstance(structure, TensorStructure) else TensorStructure(tuple(structure))
        return cls(np.zeros((structure.total_dim,) * 2), structure)


@dataclass(frozen=True)
class MeasurementRecord:
    """Observables together with their measured mean values.

    Parameters
    ----------
    entries : sequence of (Observable, float)
    tol : float
        Slack allowed when checking that each mean lies within the spectrum
        of its observable.
    """

    entries: tuple[tuple[Observable, float], ...]
    tol: float = field(default=1e-9, repr=False, compare=False)

    def __post_init__(self):
        entries = tuple((obs, float(w)) for obs, w in self.entries)
        if entries:
            s = entries[0][0].structure
            for k, (obs, w) in enumerate(entries):
                if obs.structure != s:
                    raise StructureError(f"entry {k}: observable structure differs from entry 0")
                ev = obs.eigvalsh()
                if not (ev[0] - self.tol <= w <= ev[-1] + self.tol):
                    raise DomainError(
                        f"entry {k}: mean value {w} outside spectrum [{ev[0]:.6g}, {ev[-1]:.6g}]"
                    )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def single(cls, observable: Observable, mean: float) -> "MeasurementRecord":
        return cls(((observable, mean),))

    @property
    def structure(self) -> TensorStructure:
        if not self.entries:
            raise StructureError("empty measurement record has no structure")
        return self.entries[0][0].structure

    @property
    def observables(self) -> list[Observable]:
        return [o for o, _ in self.entries]

    @property
    def means(self) -> np.ndarray:
        return np.array([w for _, w in self.entries])

    def __len__(self):
        return len(self.entries)


def _check_hermitian(m: np.ndarray, tol: float) -> None:
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol * scale:
        raise DomainError("matrix is not Hermitian")


# --------------------------------------------------------------------------
# reductions and transposes


def reduced_from_vector(psi: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a raw state vector on the sorted sites ``keep``."""
    dims = tuple(dims)
    rest = [k for k in range(len(dims)) if k not in keep]
    t = psi.reshape(dims).transpose(list(keep) + rest)
    dk = int(np.prod([dims[k] for k in keep]))
    m = t.reshape(dk, -1)
    return m @ m.conj().T


def _partial_trace_matrix(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    n = len(dims)
    rest = [k for k in range(n) if k not in keep]
    t = rho.reshape(tuple(dims) * 2)
    perm = list(keep) + rest
    t = t.transpose(perm + [n + k for k in perm])
    dk = int(np.prod([dims[k] for k in keep]))
    dr = int(np.prod([dims[k] for k in rest])) if rest else 1
    t = t.reshape(dk, dr, dk, dr)
    return np.einsum("ajbj->ab", t)


def partial_trace(rho, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Accepts a :class:`DensityMatrix` or a :class:`PureState`.  The kept
    subsystems appear in increasing index order in the result.
    """
    structure = rho.structure
    keep = structure.check_sites(keep)
    dims = structure.local_dims
    if isinstance(rho, PureState):
        red = reduced_from_vector(rho.amplitudes, dims, keep)
    else:
        red = _partial_trace_matrix(rho.matrix, dims, keep)
    return DensityMatrix(red, TensorStructure(tuple(dims[k] for k in keep)))


def partial_transpose(rho, subsystem) -> np.ndarray:
    """Partial transpose on one subsystem (or an iterable of subsystems).

    Returns a plain Hermitian array since the result is generally not a
    state.  ``rho`` may be a :class:`DensityMatrix` or :class:`Observable`.
    """
    structure = rho.structure
    sites = [subsystem] if np.isscalar(subsystem) else list(subsystem)
    sites = structure.check_sites(sites, proper=False)
    dims = structure.local_dims
    n = len(dims)
    t = np.asarray(rho.matrix).reshape(dims * 2)
    perm = list(range(2 * n))
    for s in sites:
        perm[s], perm[n + s] = perm[n + s], perm[s]
    d = structure.total_dim
    return np.ascontiguousarray(t.transpose(perm).reshape(d, d))


def embed_operator(op: np.ndarray, sites: Sequence[int], structure: TensorStructure) -> np.ndarray:
    """Lift ``op`` acting on ``sites`` (sorted) to the full space as ``op ⊗ 1``."""
    dims = structure.local_dims
    n = len(dims)
    sites = list(sites)
    rest = [k for k in range(n) if k not in sites]
    dr = int(np.prod([dims[k] for k in rest])) if rest else 1
    full = np.kron(op, np.eye(dr))
    if sites + rest == list(range(n)):
        return full
    perm_dims = [dims[k] for k in sites + rest]
    t = full.reshape(perm_dims * 2)
    inv = np.argsort(sites + rest)
    t = t.transpose(list(inv) + [n + k for k in inv])
    d = structure.total_dim
    return t.reshape(d, d)


# --------------------------------------------------------------------------
# spectra and expectation values


def max_eig(op) -> tuple[float, PureState]:
    """Largest eigenvalue and a normalised eigenvector of a Hermitian operator."""
    m = op.matrix if isinstance(op, Observable) else np.asarray(op)
    structure = op.structure if isinstance(op, Observable) else None
    vals, vecs = np.linalg.eigh(m)
    return float(vals[-1]), PureState(vecs[:, -1], structure, normalize=True)


def expectation(op: Observable, rho) -> float:
    """``Tr(op rho)`` for a density matrix or pure state with matching structure."""
    if op.structure != rho.structure:
        raise StructureError(
            f"structure mismatch: {op.structure.local_dims} vs {rho.structure.local_dims}"
        )
    if isinstance(rho, PureState):
        v = rho.amplitudes
        return float(np.real(np.vdot(v, op.matrix @ v)))
    return float(np.real(np.einsum("ij,ji->", op.matrix, rho.matrix)))


# --------------------------------------------------------------------------
# construction helpers


def basis_state(index, structure) -> PureState:
    """Computational basis vector, ``index`` an int or a digit sequence."""
    structure = structure if isinstance(structure, TensorStructure) else TensorStructure(tuple(structure))
    if not np.isscalar(index):
        index = int(np.ravel_multi_index(tuple(index), structure.local_dims))
    v = np.zeros(structure.total_dim, dtype=complex)
    v[index] = 1
    return PureState(v, structure)


def product_state(vectors: Sequence[np.ndarray]) -> PureState:
    """Tensor product of local vectors (each normalised on the way in)."""
    out = np.ones(1, dtype=complex)
    for v in vectors:
        v = np.asarray(v, dtype=complex)
        out = np.kron(out, v / np.linalg.norm(v))
    return PureState(out, TensorStructure(tuple(len(v) for v in vectors)), normalize=True)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_pure_state(structure, seed=None) -> PureState:
    """Haar-random pure state."""
    structure = structure if isinstance(structure, TensorStructure) else TensorStructure(tuple(structure))
    rng = _rng(seed)
    d = structure.total_dim
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(v, structure, normalize=True)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fix."""
    rng = _rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _ginibre_density(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_density_matrix(structure, seed=None) -> DensityMatrix:
    """Density matrix drawn from the Hilbert-Schmidt measure (GG†/Tr GG†)."""
    structure = structure if isinstance(structure, TensorStructure) else TensorStructure(tuple(structure))
    return DensityMatrix(_ginibre_density(structure.total_dim, _rng(seed)), structure)


_TWO_QUBITS = TensorStructure((2, 2))


def _min_pt_eig(m: np.ndarray) -> float:
    t = m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return float(np.linalg.eigvalsh(t)[0])


def sample_separable_two_qubit(seed=None, numerics: Numerics = DEFAULT) -> tuple[DensityMatrix, int]:
    """Rejection-sample a separable two-qubit state; also return the attempt count.

    Candidates are Hilbert-Schmidt distributed and accepted when their
    partial transpose is positive, which for two qubits is exactly
    separability.  The accepted state is therefore HS-uniform on the
    separable set.
    """
    rng = _rng(seed)
    for attempt in range(1, numerics.rejection_cap + 1):
        m = _ginibre_density(4, rng)
        if _min_pt_eig(m) >= 0.0:
            return DensityMatrix(m, _TWO_QUBITS), attempt
    raise SamplingError(f"no separable state after {numerics.rejection_cap} attempts")


def random_separable_two_qubit(seed=None, numerics: Numerics = DEFAULT) -> DensityMatrix:
    """Hilbert-Schmidt random separable two-qubit state."""
    return sample_separable_two_qubit(seed, numerics)[0]
