import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringtc import (
    GridMismatchError,
    ModelParams,
    WindowError,
    fit_alpha,
    markov_envelope,
    memory,
    phase_difference,
    return_probability,
    sensitivity,
    simulate,
)
from ringtc.metrics import bypass_phases, envelope_maxima
from ringtc.propagate import Trajectory

T_R = ModelParams.reference().T_R


def test_markov_rates():
    env = markov_envelope(ModelParams.reference(1.0))
    assert env.gamma == pytest.approx(2 * math.pi * 9e-3, rel=1e-14)
    assert env.gamma == pytest.approx(5.655e-2, rel=1e-3)
    # at Omega = g the effective rate is exactly one per bypass time
    assert env.gamma_eff * T_R == pytest.approx(1.0, rel=1e-12)
    assert env(0.0) == 1.0
    assert env(T_R) == pytest.approx(math.exp(-2), rel=1e-12)


def test_zero_epsilon_gives_zero_sensitivity(ref_traj):
    a = ref_traj(1.0, 0.0)
    b = simulate(ModelParams.reference(1.0, 0.0), 20 * T_R, T_R / 200)
    assert sensitivity(a, b, 10 * T_R).S == 0.0


def test_uncoupled_atom_is_insensitive():
    a = simulate(ModelParams.reference(0.0, 1e-3), 5 * T_R, T_R / 50)
    b = simulate(ModelParams.reference(0.0, 0.0), 5 * T_R, T_R / 50)
    assert abs(sensitivity(a, b, 5 * T_R).S) < 1e-12


def test_swap_identity(ref_traj):
    a = ref_traj(2.0, 1e-4)
    b = ref_traj(2.0, 0.0)
    S = sensitivity(a, b, 15 * T_R).S
    S_swap = sensitivity(b, a, 15 * T_R).S
    assert abs(S_swap - (1 - 1 / (1 - S))) < 1e-10


def test_pair_checks(ref_traj):
    a = ref_traj(1.0, 1e-5)
    with pytest.raises(GridMismatchError):
        sensitivity(a, ref_traj(1.0, 0.0, per_TR=100), 5 * T_R)
    with pytest.raises(GridMismatchError):
        sensitivity(a, ref_traj(2.0, 0.0), 5 * T_R)
    with pytest.raises(WindowError):
        sensitivity(a, ref_traj(1.0, 0.0), 5.001 * T_R)
    with pytest.raises(WindowError):
        sensitivity(a, ref_traj(1.0, 0.0), 25 * T_R)


@pytest.mark.parametrize("r", [0.5, 1.0, 4.0])
def test_dt_halving(r, ref_traj):
    a, b = ref_traj(r, 1e-5), ref_traj(r, 0.0)
    a2, b2 = ref_traj(r, 1e-5, per_TR=400), ref_traj(r, 0.0, per_TR=400)
    S = sensitivity(a, b, 20 * T_R).S
    S2 = sensitivity(a2, b2, 20 * T_R).S
    assert abs(S2 - S) < 1e-4 * abs(S)
    M = memory(b, 10 * T_R, 20 * T_R).M
    M2 = memory(b2, 10 * T_R, 20 * T_R).M
    assert abs(M2 - M) < 1e-5 * M


@pytest.mark.parametrize("r", [0.25, 2.0, 8.0])
def test_return_probability_bounds(r, ref_traj):
    p = return_probability(ref_traj(r, 1e-4))
    assert p.min() >= 0.0 and p.max() <= 1 + 1e-9
    assert p[0] == pytest.approx(1.0, abs=1e-12)
    # for the atom-excited start the overlap is the atom population
    np.testing.assert_allclose(p, ref_traj(r, 1e-4).prob_atom(), atol=1e-12)


def _rabi_traj(per_TR):
    p = ModelParams(g=0.0, Omega=2.7e-3)
    return p, simulate(p, 7 * T_R, T_R / per_TR)


def test_memory_quadrature_is_second_order():
    t1, t2 = 5 * T_R, 7 * T_R
    Om = 2.7e-3
    exact = 0.5 + (math.sin(2 * Om * t2) - math.sin(2 * Om * t1)) / (4 * Om * (t2 - t1))
    errs = [abs(memory(_rabi_traj(n)[1], t1, t2).M - exact) for n in (10, 20, 40)]
    assert errs[2] < 5e-4
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_memory_window_rules(ref_traj):
    traj = ref_traj(1.0, 0.0)
    with pytest.raises(WindowError):
        memory(traj, 4 * T_R, 10 * T_R)
    with pytest.raises(WindowError):
        memory(traj, 12 * T_R, 10 * T_R)
    res = memory(traj, 10 * T_R, 20 * T_R)
    assert 0.0 <= res.M <= 1.0


def test_memory_of_frozen_atom_is_one():
    traj = simulate(ModelParams.reference(0.0), 20 * T_R, T_R / 50)
    assert memory(traj, 10 * T_R, 20 * T_R).M == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-math.pi, math.pi), st.sampled_from([0.25, 2.0, 8.0]), st.integers(10, 18))
def test_phase_invariant_under_global_rotation(theta, r, start):
    traj = simulate(ModelParams.reference(r, 1e-5), 20 * T_R, T_R / 50)
    rotated = Trajectory(traj.times, traj.states * np.exp(1j * theta), traj.params)
    for length in (T_R, 2 * T_R):
        a = phase_difference(traj, start * T_R, length)
        b = phase_difference(rotated, start * T_R, length)
        assert abs(a.mean_phase_diff - b.mean_phase_diff) < 1e-10
        assert a.excluded_fraction == b.excluded_fraction


def test_uncoupled_atom_phase_is_unreliable():
    traj = simulate(ModelParams.reference(0.0), 4 * T_R, T_R / 50)
    rep = phase_difference(traj, T_R, T_R)
    assert rep.excluded_fraction == 1.0
    assert not rep.reliable
    assert math.isnan(rep.mean_phase_diff)
    assert not bypass_phases(traj, T_R, 4 * T_R).reliable


def test_phase_sits_at_quarter_turn_without_rotation(ref_traj):
    # at epsilon = 0 the atom amplitude and the cavity amplitude are in quadrature
    traj = ref_traj(1.0, 0.0)
    cs = traj.atom_amplitude() * np.exp(1j * traj.times)
    ca = traj.cavity_amplitude() * np.exp(1j * traj.times)
    assert np.max(np.abs(cs.imag)) < 1e-9
    assert np.max(np.abs(ca.real)) < 1e-9


def test_normal_regime_phase_averages_vanish(ref_traj):
    bp = bypass_phases(ref_traj(8.0, 1e-5))
    assert bp.reliable
    assert bp.phase_1TR < 0.05 and bp.phase_2TR < 0.05


def test_weak_coupling_phase_averages(ref_traj):
    bp = bypass_phases(ref_traj(0.5, 1e-5))
    assert bp.phase_1TR > 0.05 and bp.phase_2TR < 0.05
    assert len(bp.windows_1TR) == 10 and len(bp.windows_2TR) == 9


def test_phase_window_errors(ref_traj):
    traj = ref_traj(1.0, 0.0)
    with pytest.raises(WindowError):
        phase_difference(traj, 19.5 * T_R, 2 * T_R)
    with pytest.raises(WindowError):
        bypass_phases(traj, 10 * T_R, 11 * T_R)


def test_envelope_maxima_of_monotone_decay(ref_traj):
    t, p = envelope_maxima(ref_traj(0.25, 0.0), T_R)
    assert np.all(np.diff(p) <= 0)
    assert 0 < t[0] and t[-1] < T_R


def test_weak_coupling_growth_is_quadratic(ref_traj):
    a, b = ref_traj(0.5, 1e-5), ref_traj(0.5, 0.0)
    samples = [(k, sensitivity(a, b, k * T_R).S) for k in range(2, 21)]
    assert fit_alpha(samples).alpha == pytest.approx(2.0, abs=0.1)


def test_weak_coupling_sensitivity_grows(ref_traj):
    a, b = ref_traj(0.5, 1e-5), ref_traj(0.5, 0.0)
    S = [sensitivity(a, b, k * T_R).S for k in range(2, 21)]
    assert all(x > 0 for x in S)
    assert all(later > earlier for earlier, later in zip(S, S[1:]))


def test_return_probability_floor_regression(ref_traj):
    # frozen from the first run at dt = T_R/200
    p = return_probability(ref_traj(0.25, 0.0))
    assert p.min() == pytest.approx(0.88257, abs=1e-4)
    assert p.min() > 0.5
