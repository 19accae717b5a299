import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entbound.analytic import isotropic_witness, single_fidelity_legendre
from entbound.config import DEFAULT
from entbound.errors import DomainError
from entbound.legendre import (
    MEASURES,
    affine_minorants,
    bound_from_record,
    hamiltonian_from_state,
    legendre,
    legendre_concurrence,
    legendre_eof,
    legendre_geometric,
    legendre_meyer_wallach,
    maximize_concave_1d,
    measure_value,
    thermal_state_q2,
)
from entbound.qcore import (
    MeasurementRecord,
    Observable,
    PureState,
    TensorStructure,
    expectation,
    partial_transpose,
    random_density_matrix,
    random_pure_state,
)

from oracles import binary_entropy, isotropic_concurrence, random_hermitian, wootters_eig

TWO = TensorStructure((2, 2))
PHI = np.array([1, 0, 0, 1]) / math.sqrt(2)
BELL = Observable(np.outer(PHI, PHI), TWO)
seeds = st.integers(0, 2**32 - 1)


def _bell_scan(lam, entropy_of_c, n=200001):
    # Schmidt-symmetric family cos|00> + sin|11>: <phi+> = (1 + C)/2
    c = np.linspace(0, 1, n)
    return float(np.max(lam * (1 + c) / 2 - entropy_of_c(c)))


def _eof_of_c(c):
    x = (1 + np.sqrt(1 - c * c)) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(np.where(x < 1, 1 - x, 1))
    return np.nan_to_num(h)


# --------------------------------------------------------------------------
# q = 2 Gibbs principle


def test_hamiltonian_from_state_energies():
    gi = hamiltonian_from_state(np.diag([0.5, 0.3, 0.2]))
    assert np.allclose(gi.energies, [0.0, 0.4, 0.6])
    assert gi.free_energy_f2 == pytest.approx(2 * 0.5 - 0.38 - 1)
    assert gi.beta_plus == pytest.approx(2 / 0.4)
    assert math.isinf(hamiltonian_from_state(np.eye(2) / 2).beta_plus)


def test_thermal_state_regimes():
    h = np.diag([0.0, 0.0, 1.0, 3.0])
    # ground degeneracy 2, gap 1: beta+ = 1
    assert np.allclose(thermal_state_q2(h, 1.0).matrix, np.diag([0.5, 0.5, 0, 0]))
    assert np.allclose(thermal_state_q2(h, 7.0).matrix, np.diag([0.5, 0.5, 0, 0]))
    rho = np.diag(thermal_state_q2(h, 0.2).matrix).real
    # support covers everything; check the defining relation beta = 2 tau / Tr[1 - tau H]_+
    tau = (rho[0] - rho[2]) / (rho[0] * 1.0)
    assert 0.2 == pytest.approx(2 * tau / np.sum(np.clip(1 - tau * np.diag(h), 0, None)))
    assert np.allclose(thermal_state_q2(np.zeros((3, 3)), 1.0).matrix, np.eye(3) / 3)
    with pytest.raises(DomainError):
        thermal_state_q2(h, 0.0)


@given(seed=seeds, d=st.integers(2, 5), beta=st.floats(0.05, 20))
def test_thermal_state_minimises_free_energy(seed, d, beta):
    h = random_hermitian(d, np.random.default_rng(seed))
    rho = thermal_state_q2(h, beta).matrix

    def free(r):
        return np.trace(r @ h).real - (1 - np.trace(r @ r).real) / beta

    f0 = free(rho)
    for k in range(20):
        other = random_density_matrix((d,), np.random.default_rng([seed, k])).matrix
        assert free(other) >= f0 - 1e-12
        mix = 0.9 * rho + 0.1 * other
        assert free(mix) >= f0 - 1e-12


@given(seed=seeds, d=st.integers(2, 5))
def test_gibbs_round_trip(seed, d):
    rho = random_density_matrix((d,), seed).matrix
    back = thermal_state_q2(hamiltonian_from_state(rho), 1.0).matrix
    assert np.allclose(back, rho, atol=1e-10)


# --------------------------------------------------------------------------
# engines on exactly solvable witnesses


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 3.0])
def test_concurrence_bell_projector(lam):
    exact = lam / 2 if lam <= 2 else lam - 1
    assert legendre_concurrence(lam * BELL).value == pytest.approx(exact, abs=1e-8)


@pytest.mark.parametrize("lam", [0.5, 1.5, 4.0])
def test_eof_bell_projector(lam):
    assert legendre_eof(lam * BELL).value == pytest.approx(_bell_scan(lam, _eof_of_c), abs=1e-8)


@pytest.mark.parametrize("lam", [1.0, 2.0, 6.0])
def test_meyer_wallach_bell_projector(lam):
    # two qubits: MW = C^2
    exact = lam / 2 + lam**2 / 16 if lam <= 4 else lam - 1
    assert legendre_meyer_wallach(lam * BELL).value == pytest.approx(exact, abs=1e-8)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.5])
def test_geometric_bell_projector(lam):
    assert legendre_geometric(lam * BELL).value == pytest.approx(single_fidelity_legendre(-lam, 0.5), abs=1e-8)


def test_negative_definite_witness_picks_product_state():
    w = Observable(-np.diag([1.0, 2, 3, 4]), TWO)
    for m in MEASURES:
        lv = legendre(w, m)
        assert lv.value == pytest.approx(-1.0, abs=1e-9)
        assert measure_value(lv.maximizer_state, m) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=15)
@given(seed=seeds, measure=st.sampled_from(["concurrence", "eof"]))
def test_value_is_attained_and_dominates_random_states(seed, measure):
    rng = np.random.default_rng(seed)
    w = Observable(random_hermitian(4, rng), TWO)
    lv = legendre(w, measure, seed=seed)
    psi = lv.maximizer_state
    assert lv.value == pytest.approx(expectation(w, psi) - measure_value(psi, measure), abs=1e-9)
    for _ in range(30):
        phi = random_pure_state(TWO, rng)
        assert lv.value >= expectation(w, phi) - measure_value(phi, measure) - 1e-9
    assert lv.max_descent <= 1e-12 * max(1.0, np.abs(w.eigvalsh()).max())


@settings(max_examples=10)
@given(seed=seeds, shift=st.floats(-3, 3), measure=st.sampled_from(["concurrence", "eof"]))
def test_identity_shift(seed, shift, measure):
    w = Observable(random_hermitian(4, np.random.default_rng(seed)), TWO)
    a = legendre(w, measure, seed=0).value
    b = legendre(Observable(w.matrix + shift * np.eye(4), TWO), measure, seed=0).value
    assert b == pytest.approx(a + shift, abs=1e-7)


@settings(max_examples=10)
@given(seed=seeds, measure=st.sampled_from(["concurrence", "eof"]))
def test_fenchel_inequality_two_qubits(seed, measure):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(TWO, rng)
    ev, u = np.linalg.eigh(partial_transpose(rho, 1))
    w = -rng.uniform(0.5, 3) * partial_transpose(Observable(np.outer(u[:, 0], u[:, 0].conj()), TWO), 1)
    lv = legendre(Observable(w, TWO), measure, seed=seed)
    c = wootters_eig(rho.matrix)
    exact = c if measure == "concurrence" else binary_entropy((1 + math.sqrt(max(0, 1 - c * c))) / 2)
    assert np.trace(w @ rho.matrix).real - lv.value <= exact + 1e-6


def test_non_contiguous_cut_matches_reordered_problem():
    s = TensorStructure((2, 3, 2))
    w = random_hermitian(12, np.random.default_rng(3))
    # move party 1 to the front: (1 | 0 2) should equal the reordered (0 | 1 2)
    t = w.reshape(2, 3, 2, 2, 3, 2).transpose(1, 0, 2, 4, 3, 5).reshape(12, 12)
    a = legendre_concurrence(Observable(w, s), cut=(1,)).value
    b = legendre_concurrence(Observable(t, (3, 2, 2)), cut=(0,)).value
    assert a == pytest.approx(b, abs=1e-8)


def test_engines_are_deterministic_for_a_seed():
    w = Observable(random_hermitian(4, np.random.default_rng(9)), TWO)
    for m in ("concurrence", "eof"):
        assert legendre(w, m, seed=5).value == legendre(w, m, seed=5).value


def test_unknown_measure():
    with pytest.raises(DomainError):
        legendre(BELL, "negativity")
    with pytest.raises(DomainError):
        bound_from_record(MeasurementRecord.single(BELL, 0.5), "tsallis3")


# --------------------------------------------------------------------------
# bounds from records


def test_isotropic_bound_matches_exact():
    w = isotropic_witness(3)
    for f in (0.5, 0.9, 1.0):
        r = bound_from_record(MeasurementRecord.single(w, 1 / 3 - f))
        assert r.bound == pytest.approx(isotropic_concurrence(f, 3), abs=1e-6)
        assert r.converged
    # frozen high-precision values
    assert isotropic_concurrence(1.0, 3) == pytest.approx(1.15470053837925152902, abs=1e-15)
    assert isotropic_concurrence(0.9, 3) == pytest.approx(0.98149545762236379967, abs=1e-15)


def test_separable_mean_gives_zero_bound():
    w = Observable(0.5 * np.eye(4) - np.outer(PHI, PHI), TWO)
    r = bound_from_record(MeasurementRecord.single(w, 0.1))
    assert r.bound == 0.0
    assert np.all(r.optimal_lambdas == 0)


def test_two_observables_beat_either_alone():
    rng = np.random.default_rng(11)
    rho = random_density_matrix(TWO, rng).matrix
    rho = 0.7 * np.outer(PHI, PHI) + 0.3 * rho
    w1 = Observable(0.5 * np.eye(4) - np.outer(PHI, PHI), TWO)
    zz = np.diag([1.0, -1, -1, 1])
    w2 = Observable(np.eye(4) - zz, TWO)
    m1, m2 = (float(np.trace(w.matrix @ rho).real) for w in (w1, w2))
    both = bound_from_record(MeasurementRecord(((w1, m1), (w2, m2))), "concurrence").bound
    one = bound_from_record(MeasurementRecord.single(w1, m1), "concurrence").bound
    assert both >= one - 1e-9
    assert both <= wootters_eig(rho) + 1e-6


def test_affine_minorants_lower_bound_the_optimum():
    w = isotropic_witness(3)
    mins = affine_minorants(w, "concurrence", np.linspace(-4, 0, 9))
    for mean in (-0.2, -0.5):
        best = bound_from_record(MeasurementRecord.single(w, mean)).bound
        assert mins.bound(mean) <= best + 1e-9
    assert mins.bound(0.1) == 0.0
    assert mins.slope(0.1) == 0.0
    assert mins.slope(-0.6) < 0
    assert np.all(mins.converged)


# --------------------------------------------------------------------------
# concave line search


@pytest.mark.parametrize("x0", [-10.0, 0.0, 2.0, 50.0])
def test_maximize_concave_1d(x0):
    x, fx = maximize_concave_1d(lambda t: -((t - 3.7) ** 2), x0, -100, 100, 0.01, 1e-10)
    assert x == pytest.approx(3.7, abs=1e-4)
    assert fx == pytest.approx(0.0, abs=1e-8)


def test_maximize_concave_1d_respects_box():
    x, fx = maximize_concave_1d(lambda t: t, 0.0, -1.0, 5.0, 0.1, 1e-10)
    assert x == 5.0 and fx == 5.0
    x, _ = maximize_concave_1d(lambda t: -abs(t), 0.0, -1.0, 1.0, 0.1, 1e-10)
    assert x == 0.0


@pytest.mark.parametrize("f", [0.9, 0.95, 1.0])
def test_isotropic_eof_bound_matches_linear_branch(f):
    # for F >= 4(d-1)/d^2 the isotropic EoF is (F-1) d log2(d-1)/(d-2) + log2 d
    d = 3
    exact = (f - 1) * d * math.log2(d - 1) / (d - 2) + math.log2(d)
    r = bound_from_record(MeasurementRecord.single(isotropic_witness(d), 1 / d - f), measure="eof")
    assert r.bound == pytest.approx(exact, abs=1e-6)
