import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catsim.errors import (
    DimensionMismatchError,
    StateValidationError,
    TruncationError,
)
from catsim.hilbert import (
    HilbertSpace,
    JointState,
    OperatorSet,
    _psd_sqrt,
    coherent_amplitudes,
    coherent_state,
    default_cutoff,
    displacement_operator,
    expectation,
    fidelity,
    fock_state,
    partial_trace,
    purity,
    qubit_state,
    tensor,
)


def test_coherent_zero_is_vacuum():
    space = HilbertSpace(10)
    state = coherent_state(0.0, space)
    assert state.data[0] == 1.0
    assert np.all(state.data[1:] == 0.0)


def test_coherent_mean_occupation():
    space = HilbertSpace(default_cutoff(1.75))
    state = coherent_state(1.75, space)
    ops = OperatorSet(space)
    n_mean = expectation(ops.number_op, state).real
    assert n_mean == pytest.approx(1.75 ** 2, abs=1e-6)


def test_coherent_norm_deficit_matches_poisson_tail():
    # independent oracle: the pre-renormalization deficit is the Poisson
    # tail probability P(N > n_max) with mean |alpha|^2
    alpha, n_max = 1.75, 40
    _, deficit = coherent_amplitudes(alpha, n_max)
    lam = alpha ** 2
    log_terms = [-lam + n * math.log(lam) - math.lgamma(n + 1)
                 for n in range(n_max + 1)]
    tail = 1.0 - sum(math.exp(t) for t in log_terms)
    assert abs(deficit) < 1e-12
    assert deficit == pytest.approx(tail, abs=1e-13)


def test_truncation_guard():
    with pytest.raises(TruncationError):
        coherent_state(3.0, HilbertSpace(20))  # 9 > 20/4


@given(st.floats(min_value=0.0, max_value=8.0))
def test_default_cutoff_satisfies_guard(a):
    assert default_cutoff(a) >= 4.0 * a * a
    assert default_cutoff(a) >= 10


def test_bell_like_state_gives_maximally_mixed_qubit():
    phonon_space = HilbertSpace(4)
    space = HilbertSpace(4, has_qubit=True)
    vec = np.zeros(space.dim, dtype=complex)
    vec[0] = 1.0 / math.sqrt(2.0)        # |g, 0>
    vec[space.phonon_dim + 1] = 1.0 / math.sqrt(2.0)  # |e, 1>
    state = JointState(space, vec, "pure")
    rho_q = partial_trace(state, "qubit")
    assert np.allclose(rho_q.data, np.eye(2) / 2.0, atol=1e-12)
    assert purity(rho_q) == pytest.approx(0.5, abs=1e-12)


def test_partial_trace_of_product_state():
    phonon = coherent_state(1.2, HilbertSpace(20))
    joint = tensor(qubit_state(1.0, 0.0), phonon)
    rho_p = partial_trace(joint, "phonon")
    expected = np.outer(phonon.data, phonon.data.conj())
    assert np.allclose(rho_p.data, expected, atol=1e-12)
    rho_q = partial_trace(joint, "qubit")
    assert rho_q.data[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_fidelity_vacuum_vs_coherent():
    space = HilbertSpace(25)
    f = fidelity(fock_state(0, space), coherent_state(1.0, space))
    assert f == pytest.approx(math.exp(-0.5), abs=1e-9)


def test_fidelity_symmetric_mixed_inputs():
    space = HilbertSpace(8)
    rng = np.random.default_rng(3)

    def random_mixed():
        m = rng.standard_normal((space.dim, space.dim)) \
            + 1j * rng.standard_normal((space.dim, space.dim))
        rho = m @ m.conj().T
        return JointState(space, rho / np.trace(rho).real, "mixed")

    rho, sigma = random_mixed(), random_mixed()
    assert fidelity(rho, sigma) == pytest.approx(fidelity(sigma, rho), abs=1e-9)


def test_fidelity_pure_equals_mixed_route():
    space = HilbertSpace(15)
    psi = coherent_state(1.1, space)
    phi = coherent_state(-0.4, space)
    as_mixed = JointState(space, phi.density_matrix(), "mixed")
    assert fidelity(psi, as_mixed) == pytest.approx(fidelity(psi, phi), abs=1e-9)


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(7)
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    mat = m @ m.conj().T
    root = _psd_sqrt(mat)
    assert np.linalg.norm(root @ root - mat) < 1e-9 * np.linalg.norm(mat)


def test_displacement_is_unitary_and_displaces_vacuum():
    beta = 0.7 - 0.3j
    d = displacement_operator(beta, 30)
    assert np.allclose(d @ d.conj().T, np.eye(30), atol=1e-10)
    space = HilbertSpace(29)
    displaced = d @ fock_state(0, space).data
    target = coherent_state(beta, space).data
    assert abs(abs(np.vdot(displaced, target)) - 1.0) < 1e-8


def test_displacement_composes_with_phase():
    # D(b1) D(b2) = e^{i Im(b1 b2*)} D(b1 + b2)
    b1, b2 = 0.4 + 0.2j, -0.3 + 0.5j
    dim = 40
    lhs = displacement_operator(b1, dim) @ displacement_operator(b2, dim)
    rhs = np.exp(1j * (b1 * np.conj(b2)).imag) * displacement_operator(b1 + b2, dim)
    # compare on the low-Fock block, away from truncation edge effects
    assert np.allclose(lhs[:10, :10], rhs[:10, :10], atol=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.05, max_value=2.0),
       st.floats(min_value=-math.pi, max_value=math.pi))
def test_coherent_overlap_formula(r, phi):
    alpha = r * np.exp(1j * phi)
    space = HilbertSpace(40)
    f = fidelity(coherent_state(alpha, space), coherent_state(0.5, space))
    expected = math.exp(-abs(alpha - 0.5) ** 2 / 2.0)
    assert f == pytest.approx(expected, abs=1e-8)


def test_operator_commutator():
    ops = OperatorSet(HilbertSpace(30))
    comm = ops.a @ ops.a_dagger - ops.a_dagger @ ops.a
    # truncation breaks the last diagonal entry only
    assert np.allclose(comm[:-1, :-1], np.eye(comm.shape[0] - 1), atol=1e-12)


def test_state_validation():
    space = HilbertSpace(3)
    with pytest.raises(StateValidationError):
        JointState(space, np.ones(4) * 0.9, "pure")
    with pytest.raises(DimensionMismatchError):
        JointState(space, np.zeros(7), "pure")
    bad = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
    with pytest.raises(StateValidationError):
        JointState(space, bad, "mixed")


def test_qubit_state_normalizes_and_rejects():
    vec = qubit_state(1.0, 0.0)
    assert np.allclose(vec, [1.0, 0.0])
    with pytest.raises(StateValidationError):
        qubit_state(1.0, 1.0)  # norm sqrt(2), outside tolerance
