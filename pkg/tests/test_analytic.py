import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entbound.analytic import (
    CLUSTER_GENERATORS,
    DiagonalWitness,
    FidelityVector,
    cluster_basis,
    fidelities_from_stabilizer_means,
    ghz_basis,
    ghz_generators,
    isotropic_concurrence_exact,
    isotropic_state,
    isotropic_witness,
    multi_fidelity_bound,
    observation_bound,
    pauli_operator,
    single_fidelity_bound,
    single_fidelity_legendre,
    stabilizer_basis,
    stabilizer_group,
)
from entbound.errors import DomainError, StructureError
from entbound.measures import geometric_pure
from entbound.qcore import PureState, expectation, random_density_matrix

from oracles import isotropic_concurrence, single_fidelity_overlap_form

seeds = st.integers(0, 2**32 - 1)


# --------------------------------------------------------------------------
# stabilizer bases


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ghz_basis_is_orthonormal_eigenbasis(n):
    basis = ghz_basis(n)
    v = np.array([b.amplitudes for b in basis]).T
    assert np.allclose(v.conj().T @ v, np.eye(2**n))
    gens = [pauli_operator(g) for g in ghz_generators(n)]
    for i, b in enumerate(basis):
        for j, g in enumerate(gens):
            sign = -1 if (i >> (n - 1 - j)) & 1 else 1
            assert np.allclose(g @ b.amplitudes, sign * b.amplitudes)
    expect = np.zeros(2**n)
    expect[[0, -1]] = 1 / math.sqrt(2)
    assert np.allclose(basis[0].amplitudes, expect)


def test_cluster_state_amplitudes():
    psi = cluster_basis()[0].amplitudes
    # (|0000> + |0011> + |1100> - |1111>)/2 for ZZII, XXZI, IZXX, IIZZ
    expect = np.zeros(16)
    expect[[0b0000, 0b0011, 0b1100]] = 0.5
    expect[0b1111] = -0.5
    assert np.allclose(psi, expect)


def test_stabilizer_basis_phase_convention():
    for b in ghz_basis(3) + cluster_basis():
        v = b.amplitudes
        j = int(np.argmax(np.abs(v) > np.abs(v).max() - 1e-12))
        assert v[j].real > 0 and abs(v[j].imag) < 1e-15


def test_stabilizer_validation():
    with pytest.raises(StructureError):
        stabilizer_basis(["XX", "ZI"])  # anticommute
    with pytest.raises(StructureError):
        stabilizer_basis(["ZZ"])  # too few
    with pytest.raises(StructureError):
        stabilizer_basis(["ZZ", "ZZ"])  # dependent
    with pytest.raises(StructureError):
        pauli_operator("XQ")
    with pytest.raises(StructureError):
        ghz_generators(1)


def test_stabilizer_group_order():
    group = stabilizer_group(["XX", "ZZ"])
    assert [sub for sub, _ in group] == [(), (1,), (0,), (0, 1)]
    assert np.allclose(group[3][1], pauli_operator("XX") @ pauli_operator("ZZ"))


@given(seed=seeds)
def test_fidelities_from_stabilizer_means(seed):
    rho = random_density_matrix((2, 2, 2, 2), seed)
    group = stabilizer_group(CLUSTER_GENERATORS)
    means = [np.trace(m @ rho.matrix).real for _, m in group]
    f = fidelities_from_stabilizer_means(CLUSTER_GENERATORS, means)
    direct = [expectation_of(b, rho.matrix) for b in cluster_basis()]
    assert np.allclose(f, direct, atol=1e-12)
    assert f.sum() == pytest.approx(1.0)


def expectation_of(psi, rho):
    v = psi.amplitudes
    return float(np.vdot(v, rho @ v).real)


def test_fidelities_wrong_length():
    with pytest.raises(StructureError):
        fidelities_from_stabilizer_means(["XX", "ZZ"], [1, 0, 0])


# --------------------------------------------------------------------------
# observation bound


def test_observation_bound_values():
    assert observation_bound(DiagonalWitness([1.0, 0]), 2) == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
    assert observation_bound(DiagonalWitness([1.0, 0, 0, 0]), 4) == pytest.approx(0.5, abs=1e-15)
    assert observation_bound(DiagonalWitness(np.zeros(8)), 2) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        observation_bound(DiagonalWitness([1.0, 0]), 1)
    with pytest.raises(StructureError):
        observation_bound(DiagonalWitness([1.0, 0]), 4)


def test_observation_bound_uses_top_eigenvalues():
    a = DiagonalWitness([-1.0, 0.3, -5, 0.7])
    b = DiagonalWitness([0.7, 0.3])
    assert observation_bound(a, 2) == pytest.approx(observation_bound(b, 2))
    assert list(a.eigenvalues) == [0.7, 0.3, -1.0, -5.0]
    assert list(a.indices) == [3, 1, 0, 2]


@given(lam=st.floats(-3, 3), shift=st.floats(-2, 2))
def test_observation_bound_shift(lam, shift):
    lams = np.array([lam, 0.2, -0.5, 0.1])
    a = observation_bound(DiagonalWitness(lams), 2)
    b = observation_bound(DiagonalWitness(lams + shift), 2)
    assert b == pytest.approx(a + shift, abs=1e-12)


def test_diagonal_witness_observable():
    basis = ghz_basis(2)
    w = DiagonalWitness([0.0, 1.0, 0.0, 0.0]).observable(basis)
    assert expectation(w, basis[1]) == pytest.approx(1.0)
    with pytest.raises(StructureError):
        DiagonalWitness([1.0, 0.0]).observable(basis)


# --------------------------------------------------------------------------
# fidelity bounds


@pytest.mark.parametrize(
    "f, e, expected",
    [
        (0.9, 0.75, 0.440192378864668405971),
        (0.5, 0.5, 0.0),
        (0.8, 0.5, 0.1),
        (1.0, 0.75, 0.75),
        (0.2, 0.75, 0.0),
    ],
)
def test_single_fidelity_bound_values(f, e, expected):
    assert single_fidelity_bound(f, e) == pytest.approx(expected, abs=1e-15)


@given(f=st.floats(0, 1), e=st.floats(0.01, 0.95), alpha=st.floats(0, 1))
def test_single_fidelity_bound_matches_overlap_form(f, e, alpha):
    assert single_fidelity_bound(f, e, alpha) == pytest.approx(single_fidelity_overlap_form(f, e), abs=1e-9)


@given(f=st.floats(0, 1), e=st.floats(0.01, 0.95))
def test_single_fidelity_bound_is_sup_over_slopes(f, e):
    best = single_fidelity_bound(f, e)
    for r in np.linspace(-50, 5, 200):
        assert r * (0 - f) - single_fidelity_legendre(r, e) <= best + 1e-12


def test_single_fidelity_domain():
    with pytest.raises(DomainError):
        single_fidelity_bound(1.2, 0.5)
    with pytest.raises(DomainError):
        single_fidelity_bound(0.5, 1.0)


def test_fidelity_vector_validation():
    with pytest.raises(DomainError):
        FidelityVector([0.7, 0.7], 2)
    with pytest.raises(DomainError):
        FidelityVector([0.5, 0.5], 1)
    with pytest.raises(DomainError):
        FidelityVector([-0.1, 0.5], 2)
    with pytest.raises(DomainError):
        FidelityVector([], 2)


def test_multi_fidelity_values():
    assert multi_fidelity_bound(FidelityVector(np.r_[1.0, np.zeros(15)], 4)).bound == pytest.approx(0.75, abs=1e-12)
    assert multi_fidelity_bound(FidelityVector(np.full(16, 1 / 16), 4)).bound == pytest.approx(0.0, abs=1e-9)
    r = multi_fidelity_bound(FidelityVector(np.r_[0.4, 0.3, 0.3, np.zeros(13)], 4))
    assert r.bound > single_fidelity_bound(0.4, 0.75) + 0.2
    assert np.all(np.isneginf(r.optimal_lambdas[3:]))
    assert multi_fidelity_bound(FidelityVector(np.zeros(4), 2)).bound == 0.0


@settings(max_examples=25)
@given(seed=seeds, support=st.integers(2, 5))
def test_multi_fidelity_bound_is_valid_on_pure_superpositions(seed, support):
    # |psi> = sum_i c_i |cluster_i>: the bound from |c_i|^2 cannot exceed E_G(psi)
    rng = np.random.default_rng(seed)
    basis = cluster_basis()
    idx = rng.choice(16, support, replace=False)
    c = rng.standard_normal(support) + 1j * rng.standard_normal(support)
    c /= np.linalg.norm(c)
    v = sum(ci * basis[i].amplitudes for ci, i in zip(c, idx))
    psi = PureState(v, basis[0].structure, normalize=True)
    f = np.zeros(16)
    f[idx] = np.abs(c) ** 2
    r = multi_fidelity_bound(FidelityVector(f, 4))
    assert r.bound <= geometric_pure(psi) + 1e-6
    assert r.bound >= single_fidelity_bound(f.max(), 0.75) - 1e-12


# --------------------------------------------------------------------------
# isotropic family


@pytest.mark.parametrize("n", [2, 3, 4])
def test_isotropic_family(n):
    w = isotropic_witness(n)
    for f in (0.0, 1 / n, 0.6, 1.0):
        rho = isotropic_state(f, n)
        assert expectation(w, rho) == pytest.approx(1 / n - f, abs=1e-14)
        assert isotropic_concurrence_exact(f, n) == pytest.approx(isotropic_concurrence(f, n), abs=1e-15)
    with pytest.raises(StructureError):
        isotropic_witness(1)
    with pytest.raises(DomainError):
        isotropic_state(1.5, n)
