import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entbound.errors import DomainError, StructureError
from entbound.measures import (
    Bipartition,
    best_product_overlap,
    concurrence_pure,
    eof_from_concurrence,
    eof_pure,
    geometric_pure,
    linear_entropy_from_schmidt,
    meyer_wallach,
    reduction_witness,
    reduction_witness_bound,
    schmidt_coefficients,
    wootters_concurrence,
)
from entbound.qcore import (
    DensityMatrix,
    PureState,
    TensorStructure,
    expectation,
    product_state,
    random_density_matrix,
    random_pure_state,
    random_separable_two_qubit,
)

from oracles import (
    binary_entropy,
    concurrence_pure_def,
    eof_two_qubit,
    product_overlap_grid_2q,
    wootters_eig,
)

TWO = TensorStructure((2, 2))
PSI41 = PureState(np.array([4.0, 0, 0, 1]), TWO, normalize=True)
seeds = st.integers(0, 2**32 - 1)

# frozen high-precision values (mpmath, 30 digits)
EOF_PSI41 = 0.322756958897398231783
C_PSI41 = 8 / 17


def test_study_state_values():
    assert concurrence_pure(PSI41) == pytest.approx(C_PSI41, abs=1e-15)
    assert eof_pure(PSI41) == pytest.approx(EOF_PSI41, abs=1e-14)
    assert eof_from_concurrence(C_PSI41) == pytest.approx(EOF_PSI41, abs=1e-14)
    assert wootters_concurrence(PSI41.density()) == pytest.approx(C_PSI41, abs=1e-12)


def test_bell_and_product_extremes():
    bell = PureState(np.array([1, 0, 0, 1]) / math.sqrt(2), TWO)
    prod = product_state([np.array([1, 2]), np.array([3, -1j])])
    assert concurrence_pure(bell) == pytest.approx(1.0)
    assert eof_pure(bell) == pytest.approx(1.0)
    assert concurrence_pure(prod) == pytest.approx(0.0, abs=1e-15)
    assert eof_pure(prod) == pytest.approx(0.0, abs=1e-12)
    assert geometric_pure(bell) == pytest.approx(0.5)
    assert geometric_pure(prod) == pytest.approx(0.0, abs=1e-12)


def test_linear_entropy_is_cancellation_free():
    eps = 1e-9
    s = np.sqrt([1 - eps, eps])
    assert linear_entropy_from_schmidt(s) == pytest.approx(2 * eps * (1 - eps), rel=1e-12)


@given(seed=seeds, da=st.integers(2, 3), db=st.integers(2, 4))
def test_concurrence_matches_definition(seed, da, db):
    psi = random_pure_state((da, db), seed)
    assert concurrence_pure(psi) == pytest.approx(concurrence_pure_def(psi.amplitudes, da, db), abs=1e-12)
    p = schmidt_coefficients(psi)
    assert p.sum() == pytest.approx(1.0)
    assert np.all(np.diff(p) <= 1e-15)


@given(seed=seeds)
def test_cut_choice_is_symmetric(seed):
    s = TensorStructure((2, 3, 2))
    psi = random_pure_state(s, seed)
    assert concurrence_pure(psi, (0, 2)) == pytest.approx(concurrence_pure(psi, Bipartition((1,))), abs=1e-12)
    assert eof_pure(psi, [1]) == pytest.approx(eof_pure(psi, (0, 2)), abs=1e-10)


def test_bipartition_validation():
    with pytest.raises(StructureError):
        Bipartition(())
    with pytest.raises(StructureError):
        concurrence_pure(random_pure_state((2, 2), 0), (0, 1))


@given(seed=seeds)
def test_wootters_matches_eigenvalue_form(seed):
    rho = random_density_matrix(TWO, seed)
    assert wootters_concurrence(rho) == pytest.approx(wootters_eig(rho.matrix), abs=1e-9)
    assert eof_from_concurrence(wootters_concurrence(rho)) == pytest.approx(eof_two_qubit(rho.matrix), abs=1e-8)


@given(seed=seeds)
def test_wootters_on_pure_states(seed):
    psi = random_pure_state(TWO, seed)
    assert wootters_concurrence(psi.density()) == pytest.approx(concurrence_pure(psi), abs=1e-7)


def test_wootters_vanishes_on_separable_states():
    for seed in range(20):
        assert wootters_concurrence(random_separable_two_qubit(seed)) == pytest.approx(0.0, abs=1e-7)


def test_wootters_needs_two_qubits():
    with pytest.raises(StructureError):
        wootters_concurrence(DensityMatrix.maximally_mixed((2, 3)))


@given(c=st.floats(0, 1))
def test_eof_from_concurrence_formula(c):
    assert eof_from_concurrence(c) == pytest.approx(binary_entropy((1 + math.sqrt(1 - c * c)) / 2), abs=1e-12)


def test_eof_from_concurrence_domain():
    with pytest.raises(DomainError):
        eof_from_concurrence(1.5)


@pytest.mark.parametrize("seed", range(5))
def test_product_overlap_two_qubits_matches_grid(seed):
    psi = random_pure_state(TWO, seed)
    ov, factors = best_product_overlap(psi)
    assert ov == pytest.approx(product_overlap_grid_2q(psi.amplitudes), abs=2e-3)
    # the factors attain the overlap
    v = np.kron(*factors)
    assert abs(np.vdot(v, psi.amplitudes)) ** 2 == pytest.approx(ov, abs=1e-12)


def test_product_overlap_w_state():
    # |W3>: maximal product overlap 4/9
    w = PureState(np.array([0, 1, 1, 0, 1, 0, 0, 0]) / math.sqrt(3), (2, 2, 2))
    assert geometric_pure(w) == pytest.approx(5 / 9, abs=1e-8)


def test_product_overlap_warm_start_is_monotone():
    psi = random_pure_state((2, 2, 2), 4)
    start = [np.array([1, 0]), np.array([1, 0]), np.array([1, 0])]
    ov0 = abs(psi.amplitudes[0]) ** 2
    ov, _ = best_product_overlap(psi, start=start)
    assert ov >= ov0 - 1e-15


@given(seed=seeds)
def test_geometric_bounded_by_one_minus_top_schmidt(seed):
    # the best product state for a bipartite split overlaps at most the top Schmidt weight
    psi = random_pure_state((2, 2, 2), seed)
    assert 1 - geometric_pure(psi) <= schmidt_coefficients(psi, [0])[0] + 1e-9


def test_meyer_wallach_values():
    ghz = PureState(np.r_[1, np.zeros(6), 1] / math.sqrt(2), (2, 2, 2))
    assert meyer_wallach(ghz) == pytest.approx(1.0)
    assert meyer_wallach(product_state([np.array([1, 1j])] * 3)) == pytest.approx(0.0, abs=1e-15)
    w = PureState(np.array([0, 1, 1, 0, 1, 0, 0, 0]) / math.sqrt(3), (2, 2, 2))
    assert meyer_wallach(w) == pytest.approx(8 / 9)
    with pytest.raises(StructureError):
        meyer_wallach(random_pure_state((2, 3), 0))


@given(seed=seeds)
def test_meyer_wallach_two_qubits_is_concurrence_squared(seed):
    psi = random_pure_state(TWO, seed)
    assert meyer_wallach(psi) == pytest.approx(concurrence_pure(psi) ** 2, abs=1e-12)


def test_reduction_witness_study_state():
    w = reduction_witness(PSI41)
    # <W> on phi itself is -E_C(phi)^2 so the bound is E_C(phi)
    mean = expectation(w, PSI41)
    assert mean == pytest.approx(-C_PSI41**2)
    assert reduction_witness_bound(mean, C_PSI41) == pytest.approx(C_PSI41)
    assert reduction_witness_bound(0.3, C_PSI41) == 0.0
    with pytest.raises(DomainError):
        reduction_witness_bound(-0.1, 0.0)


@given(seed=seeds)
def test_reduction_witness_is_a_witness(seed):
    w = reduction_witness(PSI41)
    assert expectation(w, random_separable_two_qubit(seed)) >= -1e-12


@given(seed=seeds)
def test_reduction_witness_bound_is_valid(seed):
    rng = np.random.default_rng(seed)
    p = rng.uniform()
    rho = DensityMatrix(p * PSI41.projector() + (1 - p) * random_separable_two_qubit(rng).matrix, TWO)
    est = reduction_witness_bound(expectation(reduction_witness(PSI41), rho), C_PSI41)
    assert est <= wootters_concurrence(rho) + 1e-9
