"""Time evolution of single-excitation states.

Production path is exact spectral propagation: ``H = V diag(lam) V^T`` once,
then ``c(t) = V exp(-i lam t) V^T c(0)`` for any ``t`` with no step error.
:func:`evolve_rk_oracle` is a fixed-step RK4 integrator kept only as an
independent cross-check; it works in the frame rotating at ``omega0``.
Both report lab-frame amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ParameterError
from .io import write_csv
from .model import Hamiltonian, ModelParams, StateVector, build_hamiltonian, initial_state

MAX_SAMPLES = 10**8
_RECON_TOL = 1e-9
_ORTHO_TOL = 1e-10
_TRAJ_NORM_TOL = 1e-9
_RK_STEP_LIMIT = 0.1

TRAJECTORY_COLUMNS = (
    "t_over_TR",
    "prob_atom",
    "prob_cavity",
    "prob_cw_total",
    "prob_ccw_total",
    "re_C_sigma",
    "im_C_sigma",
    "re_C_a",
    "im_C_a",
)


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of a real-symmetric Hamiltonian.

    ``offset`` is the diagonal shift used when diagonalizing; eigenvalues are
    stored unshifted, but evolution applies the shift as a separate global
    phase so the fast carrier does not cost precision in the eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    offset: float = 0.0
    params: ModelParams | None = field(default=None, compare=False)
    n_atoms: int = 1

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled states on ``[0, T]``.

    ``states[k]`` holds the amplitudes at ``times[k]``. ``n_atoms > 1`` marks
    a multi-atom layout (atoms first, then cavity, then ring modes).
    """

    times: np.ndarray
    states: np.ndarray
    params: ModelParams
    n_atoms: int = 1

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def cavity_index(self) -> int:
        return self.n_atoms

    def probabilities(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    def atom_amplitude(self) -> np.ndarray:
        """C_sigma(t); for several atoms the collective amplitude."""
        if self.n_atoms == 1:
            return self.states[:, 0]
        return self.states[:, : self.n_atoms].sum(axis=1) / np.sqrt(self.n_atoms)

    def cavity_amplitude(self) -> np.ndarray:
        return self.states[:, self.cavity_index]

    def prob_atom(self) -> np.ndarray:
        """Probability that the excitation sits in the atom(s)."""
        return np.sum(np.abs(self.states[:, : self.n_atoms]) ** 2, axis=1)

    def prob_cavity(self) -> np.ndarray:
        return np.abs(self.cavity_amplitude()) ** 2

    def prob_ring(self) -> tuple[np.ndarray, np.ndarray]:
        off = self.n_atoms + 1
        n = self.params.n_modes
        p = np.abs(self.states[:, off:]) ** 2
        return p[:, :n].sum(axis=1), p[:, n:].sum(axis=1)

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.states) ** 2, axis=1))

    def same_grid(self, other: "Trajectory") -> bool:
        return self.times.shape == other.times.shape and np.array_equal(self.times, other.times)

    def truncated(self, T: float) -> "Trajectory":
        n = _grid_count(T, self.dt)
        if n + 1 > len(self.times):
            raise ParameterError("T<=horizon", f"T={T} exceeds horizon {self.horizon}")
        return Trajectory(self.times[: n + 1], self.states[: n + 1], self.params, self.n_atoms)


def decompose(h: Hamiltonian) -> SpectralDecomposition:
    """Diagonalize ``h``; eigenvalues ascending.

    Raises :class:`NumericalError` with the residual if reconstruction or
    orthogonality misses its tolerance.
    """
    m = h.matrix
    if not np.all(np.isfinite(m)):
        raise ParameterError("finite", "Hamiltonian matrix has non-finite entries")
    if not np.array_equal(m, m.T):
        raise ParameterError("symmetric", "Hamiltonian matrix is not symmetric")
    offset = float(np.mean(np.diag(m)))
    try:
        lam, v = np.linalg.eigh(m - offset * np.eye(h.dim))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    sd = SpectralDecomposition(_readonly(lam + offset), _readonly(v), offset, h.params, h.n_atoms)

    scale = max(np.max(np.abs(m)), np.finfo(float).tiny)
    recon = np.max(np.abs((v * lam) @ v.T + offset * np.eye(h.dim) - m))
    ortho = np.max(np.abs(v.T @ v - np.eye(h.dim)))
    if not (recon < _RECON_TOL * scale and ortho < _ORTHO_TOL):
        raise NumericalError(
            f"decomposition residual too large: reconstruction {recon:.3e}, orthogonality {ortho:.3e}"
        )
    return sd


def _phases(sd: SpectralDecomposition, t: np.ndarray) -> np.ndarray:
    shifted = sd.eigenvalues - sd.offset
    return np.exp(-1j * np.outer(shifted, t)) * np.exp(-1j * sd.offset * t)


def evolve(sd: SpectralDecomposition, psi0: StateVector, t: float) -> StateVector:
    """State after duration ``t``; negative ``t`` runs backwards."""
    v = sd.eigenvectors
    coeff = v.T @ psi0.amplitudes
    amp = v @ (coeff * _phases(sd, np.array([float(t)]))[:, 0])
    return StateVector(amp, psi0.time + t)


def _grid_count(T: float, dt: float) -> int:
    if not dt > 0:
        raise ParameterError("dt>0", f"dt must be positive, got {dt}")
    if not T >= dt:
        raise ParameterError("T>=dt", f"T={T} shorter than dt={dt}")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * T:
        raise ParameterError("T/dt integer", f"T={T} is not an integer multiple of dt={dt}")
    return n


def sample_trajectory(sd: SpectralDecomposition, psi0: StateVector, T: float, dt: float) -> Trajectory:
    """Evaluate :func:`evolve` on the grid ``0, dt, ..., T`` (both ends included)."""
    if sd.params is None:
        raise ParameterError("params", "decomposition carries no ModelParams; build it via decompose()")
    if not dt > 0:
        raise ParameterError("dt>0", f"dt must be positive, got {dt}")
    if T / dt + 1 > MAX_SAMPLES:
        raise ParameterError("grid size", f"{T / dt + 1:.3g} samples exceeds limit {MAX_SAMPLES}")
    n = _grid_count(T, dt)
    times = np.arange(n + 1) * dt
    v = sd.eigenvectors
    coeff = v.T @ psi0.amplitudes
    states = ((v * coeff) @ _phases(sd, times)).T
    states = np.ascontiguousarray(states)

    drift = np.max(np.abs(np.sqrt(np.sum(np.abs(states) ** 2, axis=1)) - 1.0))
    if not drift <= _TRAJ_NORM_TOL:
        raise NumericalError(f"trajectory norm drift {drift:.3e} exceeds {_TRAJ_NORM_TOL}")
    return Trajectory(_readonly(times), _readonly(states), sd.params, sd.n_atoms)


def simulate(params: ModelParams, T: float, dt: float) -> Trajectory:
    """Convenience path: build, decompose and sample from the atom-excited state."""
    sd = decompose(build_hamiltonian(params))
    return sample_trajectory(sd, initial_state(params), T, dt)


def evolve_rk_oracle(h: Hamiltonian, psi0: StateVector, T: float, dt: float) -> StateVector:
    """Classic RK4 integration of ``i dc/dt = H c`` over ``[0, T]``.

    Integrates ``H - omega0 I`` and restores the carrier phase at the end.
    The step bound ``dt * max|H - omega0 I| < 0.1`` applies to that matrix.
    """
    omega0 = h.params.omega0 if h.params is not None else float(h.matrix[0, 0])
    a = -1j * (h.matrix - omega0 * np.eye(h.dim))
    step_norm = dt * np.max(np.abs(h.matrix - omega0 * np.eye(h.dim)))
    if step_norm >= _RK_STEP_LIMIT:
        raise ParameterError("rk step", f"dt*max|H-omega0| = {step_norm:.3g} >= {_RK_STEP_LIMIT}")
    n = _grid_count(T, dt)
    y = np.array(psi0.amplitudes, dtype=complex)
    half = 0.5 * dt
    for _ in range(n):
        k1 = a @ y
        k2 = a @ (y + half * k1)
        k3 = a @ (y + half * k2)
        k4 = a @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    y = y * np.exp(-1j * omega0 * n * dt)
    return StateVector(y, psi0.time + n * dt, check=False)


def trajectory_rows(traj: Trajectory):
    t_r = traj.times / traj.params.T_R
    p_atom = traj.prob_atom()
    p_cav = traj.prob_cavity()
    p_cw, p_ccw = traj.prob_ring()
    cs = traj.atom_amplitude()
    ca = traj.cavity_amplitude()
    cols = [t_r, p_atom, p_cav, p_cw, p_ccw, cs.real, cs.imag, ca.real, ca.imag]
    if traj.n_atoms > 1:
        for k in range(traj.n_atoms):
            cols += [traj.states[:, k].real, traj.states[:, k].imag]
    return zip(*(c.tolist() for c in cols))


def trajectory_header(traj: Trajectory) -> list[str]:
    header = list(TRAJECTORY_COLUMNS)
    if traj.n_atoms > 1:
        for k in range(1, traj.n_atoms + 1):
            header += [f"re_C_{k}", f"im_C_{k}"]
    return header


def write_trajectory_csv(traj: Trajectory, path):
    return write_csv(path, trajectory_header(traj), trajectory_rows(traj))
