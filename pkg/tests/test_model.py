import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringtc import ModelParams, ParameterError, build_hamiltonian, initial_state
from ringtc.model import StateVector, swap_operator


def test_dimension_for_default_N():
    p = ModelParams.reference(1.0)
    h = build_hamiltonian(p)
    assert h.dim == 104 == p.dim
    assert len(h.basis_labels) == 104


def test_basis_order():
    p = ModelParams(N=4, delta_omega=0.25, Omega=0.1)
    labels = build_hamiltonian(p).basis_labels
    assert labels == (
        "atom", "cavity",
        "cw_2", "cw_3", "cw_4", "cw_5", "cw_6",
        "ccw_2", "ccw_3", "ccw_4", "ccw_5", "ccw_6",
    )


def test_j0_and_bypass_time_at_default_spacing():
    p = ModelParams.reference()
    assert p.j0 == 250
    assert p.T_R == pytest.approx(500 * math.pi, rel=1e-14)
    assert p.mode_indices[0] == 225 and p.mode_indices[-1] == 275


def test_entries_follow_amplitude_equations():
    p = ModelParams.reference(0.7, epsilon=3e-4)
    h = build_hamiltonian(p).matrix
    js = p.mode_indices
    n = p.n_modes
    assert h[0, 0] == h[1, 1] == 1.0
    assert h[0, 1] == h[1, 0] == p.Omega
    np.testing.assert_allclose(np.diag(h)[2 : 2 + n], js * p.delta_omega * (1 + p.epsilon), rtol=1e-15)
    np.testing.assert_allclose(np.diag(h)[2 + n :], js * p.delta_omega * (1 - p.epsilon), rtol=1e-15)
    assert np.all(h[1, 2:] == p.g) and np.all(h[2:, 1] == p.g)
    # the atom talks only to the cavity; ring modes only to the cavity
    assert np.all(h[0, 2:] == 0)
    ring = h[2:, 2:]
    assert np.all(ring - np.diag(np.diag(ring)) == 0)


def test_unperturbed_ring_is_degenerate():
    p = ModelParams.reference(1.0, 0.0)
    d = np.diag(build_hamiltonian(p).matrix)
    n = p.n_modes
    assert np.array_equal(d[2 : 2 + n], d[2 + n :])
    np.testing.assert_allclose(d[2 : 2 + n], p.mode_indices * p.delta_omega, rtol=1e-15)


def test_initial_state():
    p = ModelParams.reference(2.0)
    psi = initial_state(p)
    assert psi.amplitudes[0] == 1 and np.count_nonzero(psi.amplitudes) == 1
    assert psi.norm == 1.0
    assert psi.time == 0.0


def test_objects_are_read_only():
    h = build_hamiltonian(ModelParams.reference(1.0))
    with pytest.raises(ValueError):
        h.matrix[0, 0] = 2.0
    with pytest.raises(AttributeError):
        h.params.g = 1.0


@pytest.mark.parametrize(
    "kwargs, invariant",
    [
        (dict(delta_omega=3e-3), "omega0/delta_omega integer"),
        (dict(N=51), "N even >= 2"),
        (dict(N=0), "N even >= 2"),
        (dict(N=2.5), "N integer"),
        (dict(epsilon=1.0), "|epsilon|<1"),
        (dict(delta_omega=0.25, N=8), "j0-N/2>=1"),
        (dict(delta_omega=-4e-3), "delta_omega>0"),
        (dict(g=-1e-3), "g>=0"),
        (dict(Omega=-1e-3), "Omega>=0"),
        (dict(omega0=0.0), "omega0>0"),
    ],
)
def test_invalid_parameters_name_the_invariant(kwargs, invariant):
    with pytest.raises(ParameterError) as err:
        ModelParams(**kwargs)
    assert err.value.invariant == invariant


def test_state_vector_rejects_unnormalized():
    with pytest.raises(ParameterError):
        StateVector(np.array([1.0, 1.0]))


ratios = st.floats(0.0, 10.0)
eps_values = st.floats(-0.9, 0.9)


@settings(max_examples=40, deadline=None)
@given(ratios, eps_values)
def test_bitwise_symmetric_and_deterministic(r, eps):
    p = ModelParams.reference(r, eps)
    h = build_hamiltonian(p).matrix
    assert np.array_equal(h, h.T)
    assert np.array_equal(h, build_hamiltonian(p).matrix)


@settings(max_examples=25, deadline=None)
@given(ratios, st.floats(0.0, 0.5))
def test_epsilon_sign_swaps_ring_blocks(r, eps):
    hp = build_hamiltonian(ModelParams.reference(r, eps)).matrix
    hm = build_hamiltonian(ModelParams.reference(r, -eps)).matrix
    P = swap_operator(ModelParams.reference(r))
    np.testing.assert_array_equal(P @ hp @ P.T, hm)
    np.testing.assert_allclose(np.linalg.eigvalsh(hp), np.linalg.eigvalsh(hm), atol=1e-10, rtol=0)


@settings(max_examples=25, deadline=None)
@given(ratios)
def test_unperturbed_commutes_with_cw_ccw_swap(r):
    p = ModelParams.reference(r)
    h = build_hamiltonian(p).matrix
    P = swap_operator(p)
    assert np.max(np.abs(h @ P - P @ h)) < 1e-12
