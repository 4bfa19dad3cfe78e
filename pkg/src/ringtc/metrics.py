"""Observables computed from sampled trajectories.

* sensitivity  ``S = 1 - int_0^T |C_sigma,eps|^2 / int_0^T |C_sigma,0|^2``
* return probability ``p(t) = |<psi(0)|psi(t)>|^2``
* memory ``M``: mean of ``p`` over ``[t1, t2]``
* Born-Markov envelope ``exp(-2 gamma' t)`` with ``gamma = 2 pi g^2 / delta_omega``
  and ``gamma' = Omega^2 / gamma``
* bypass-averaged phase difference between atom and cavity amplitudes

All integrals are trapezoidal on the trajectory's uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, NumericalError, ParameterError, WindowError
from .model import ModelParams
from .propagate import Trajectory

TOL_PHI = 0.05
AMPLITUDE_FLOOR = 1e-6
MEMORY_WINDOW_TR = (10.0, 20.0)
PHASE_WINDOW_TR = (10.0, 20.0)
MIN_MEMORY_T1_TR = 5.0
_ZERO_DENOM = 1e-15


@dataclass(frozen=True)
class SensitivityResult:
    observation_time: float
    S: float
    integral_perturbed: float
    integral_unperturbed: float


@dataclass(frozen=True)
class MemoryResult:
    t1: float
    t2: float
    M: float


@dataclass(frozen=True)
class PhaseReport:
    window_start: float
    window_len: float
    mean_phase_diff: float
    excluded_fraction: float

    @property
    def reliable(self) -> bool:
        return self.excluded_fraction < 0.5


@dataclass(frozen=True)
class MarkovEnvelope:
    gamma: float
    gamma_eff: float

    def __call__(self, t):
        return np.exp(-2.0 * self.gamma_eff * np.asarray(t, dtype=float))

    def __iter__(self):
        # allows ``gamma, gamma_eff, f = markov_envelope(p)``
        return iter((self.gamma, self.gamma_eff, self))


def _index(traj: Trajectory, t: float, what: str) -> int:
    dt = traj.dt
    k = int(round(t / dt))
    if abs(k * dt - t) > 1e-9 * max(abs(t), dt):
        raise WindowError(f"{what}={t} is not on the sampling grid (dt={dt})")
    if k < 0 or k >= len(traj.times):
        raise WindowError(f"{what}={t} outside [0, {traj.horizon}]")
    return k


def _trapz(y: np.ndarray, dt: float) -> float:
    if len(y) < 2:
        return 0.0
    return float(dt * (np.sum(y) - 0.5 * (y[0] + y[-1])))


def _trap_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def _check_pair(a: Trajectory, b: Trajectory) -> None:
    if not a.same_grid(b):
        raise GridMismatchError("trajectories are sampled on different time grids")
    if a.n_atoms != b.n_atoms or a.params.replace(epsilon=0.0) != b.params.replace(epsilon=0.0):
        raise GridMismatchError("trajectories differ in parameters other than epsilon")


def integrated_atom_probability(traj: Trajectory, T: float) -> float:
    k = _index(traj, T, "T")
    return _trapz(np.abs(traj.atom_amplitude()[: k + 1]) ** 2, traj.dt)


def sensitivity(traj_perturbed: Trajectory, traj_unperturbed: Trajectory, T: float) -> SensitivityResult:
    _check_pair(traj_perturbed, traj_unperturbed)
    num = integrated_atom_probability(traj_perturbed, T)
    den = integrated_atom_probability(traj_unperturbed, T)
    if den < _ZERO_DENOM:
        raise NumericalError(f"unperturbed integral {den:.3e} below {_ZERO_DENOM}; S undefined")
    return SensitivityResult(T, 1.0 - num / den, num, den)


def return_probability(traj: Trajectory) -> np.ndarray:
    """``|<psi(0)|psi(t)>|^2`` per sample, using the full-state overlap."""
    psi0 = traj.states[0]
    return np.abs(traj.states @ psi0.conj()) ** 2


def memory(traj: Trajectory, t1: float, t2: float) -> MemoryResult:
    """Time average of the return probability over ``[t1, t2]``."""
    t_r = traj.params.T_R
    if t1 < MIN_MEMORY_T1_TR * t_r * (1 - 1e-12):
        raise WindowError(f"t1={t1 / t_r:.6g} T_R; memory window must start at t1 >= {MIN_MEMORY_T1_TR} T_R")
    if not t2 > t1:
        raise WindowError(f"need t2 > t1, got t1={t1}, t2={t2}")
    i1 = _index(traj, t1, "t1")
    i2 = _index(traj, t2, "t2")
    p = return_probability(traj)[i1 : i2 + 1]
    return MemoryResult(t1, t2, float(_trapz(p, traj.dt) / (traj.times[i2] - traj.times[i1])))


def markov_envelope(params: ModelParams) -> MarkovEnvelope:
    if not params.g > 0:
        raise ParameterError("g>0", "Markov rate needs g > 0")
    gamma = 2 * math.pi * params.g**2 / params.delta_omega
    return MarkovEnvelope(gamma, params.Omega**2 / gamma)


def phase_series(traj: Trajectory) -> np.ndarray:
    """Principal value of ``arg(C_sigma conj(C_a))`` per sample."""
    return np.angle(traj.atom_amplitude() * np.conj(traj.cavity_amplitude()))


def phase_difference(
    traj: Trajectory,
    window_start: float,
    window_len: float,
    amp_floor: float = AMPLITUDE_FLOOR,
    unwrap: bool = False,
) -> PhaseReport:
    """Mean atom-cavity phase difference over ``[start, start + len]``.

    Samples where either amplitude is below ``amp_floor`` are dropped. The
    mean is trapezoid-weighted over the retained samples and wrapped to
    ``(-pi, pi]``. By default the principal values are averaged directly:
    for real couplings the phase difference sits at exactly +-pi/2 and jumps
    by exactly pi, where unwrapping would be decided by rounding noise.
    """
    i0 = _index(traj, window_start, "window_start")
    i1 = _index(traj, window_start + window_len, "window end")
    if i1 <= i0:
        raise WindowError("window_len must span at least one sample step")
    cs = traj.atom_amplitude()[i0 : i1 + 1]
    ca = traj.cavity_amplitude()[i0 : i1 + 1]
    keep = (np.abs(cs) >= amp_floor) & (np.abs(ca) >= amp_floor)
    excluded = 1.0 - keep.mean()
    if not keep.any():
        return PhaseReport(window_start, window_len, float("nan"), float(excluded))
    phi = np.angle(cs[keep] * np.conj(ca[keep]))
    if unwrap:
        phi = np.unwrap(phi)
    w = _trap_weights(i1 - i0 + 1)[keep]
    mean = float(np.sum(w * phi) / np.sum(w))
    mean = math.remainder(mean, 2 * math.pi)
    if mean == -math.pi:
        mean = math.pi
    return PhaseReport(window_start, window_len, mean, float(excluded))


@dataclass(frozen=True)
class BypassPhases:
    """Typical one- and two-bypass phase averages over a long window.

    ``phase_1TR`` / ``phase_2TR`` are medians of ``|mean_phase_diff|`` over
    windows starting at every whole bypass in ``[start, end - len]``.
    """

    phase_1TR: float
    phase_2TR: float
    windows_1TR: tuple[PhaseReport, ...]
    windows_2TR: tuple[PhaseReport, ...]

    @property
    def reliable(self) -> bool:
        return all(w.reliable for w in self.windows_1TR + self.windows_2TR)


def _typical(reports) -> float:
    vals = [abs(r.mean_phase_diff) for r in reports if r.reliable]
    return float(np.median(vals)) if vals else float("nan")


def bypass_phases(traj: Trajectory, start: float | None = None, end: float | None = None, **kw) -> BypassPhases:
    """Phase averages over successive one- and two-bypass windows in ``[start, end]``.

    In the time-crystal regime the one-bypass average alternates in sign from
    bypass to bypass, so magnitudes are aggregated; the median keeps single
    windows caught on a rapid sign change from dominating.
    """
    t_r = traj.params.T_R
    start = PHASE_WINDOW_TR[0] * t_r if start is None else start
    end = PHASE_WINDOW_TR[1] * t_r if end is None else end
    n = int(round((end - start) / t_r))
    if n < 2:
        raise WindowError(f"phase window must span at least 2 T_R, got {(end - start) / t_r:.6g}")
    w1 = tuple(phase_difference(traj, start + k * t_r, t_r, **kw) for k in range(n))
    w2 = tuple(phase_difference(traj, start + k * t_r, 2 * t_r, **kw) for k in range(n - 1))
    return BypassPhases(_typical(w1), _typical(w2), w1, w2)


def envelope_maxima(traj: Trajectory, t_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Upper-envelope samples of ``|C_sigma|^2`` on ``(0, t_max)``.

    Interior local maxima when there are any; for a monotone decay the curve
    is its own envelope, so every interior sample is returned.
    """
    k = _index(traj, t_max, "t_max")
    p = np.abs(traj.atom_amplitude()[: k + 1]) ** 2
    t = traj.times[: k + 1]
    inner = np.arange(1, k)
    is_max = (p[inner] > p[inner - 1]) & (p[inner] >= p[inner + 1])
    idx = inner[is_max] if is_max.any() else inner
    return t[idx], p[idx]
