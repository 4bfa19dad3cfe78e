"""Parameters, single-excitation Hamiltonian and initial state.

The system is a two-level atom inside a single-mode cavity; the cavity couples
with strength ``g`` to ``N + 1`` clockwise and ``N + 1`` counterclockwise
modes of a ring resonator. Rotation splits the two families of ring modes,
``omega_j = j * delta_omega * (1 +/- epsilon)``.

With a single excitation quantum the state lives in a ``D = 2 + 2(N + 1)``
dimensional space and the Schroedinger equation reduces to ``i dc/dt = H c``
with a real-symmetric ``H``. Basis order is fixed:
``atom, cavity, cw_j (ascending j), ccw_j (ascending j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError

# default ring parameters, units of omega0
DEFAULT_DELTA_OMEGA = 4e-3
DEFAULT_G = 6e-3
DEFAULT_N = 50

_J0_RTOL = 1e-9
_NORM_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the atom-cavity-ring system.

    All frequencies are in the same unit; ``omega0 = 1`` is the intended
    convention and what :func:`from_config`-style loaders produce.
    ``epsilon`` may be negative (reversed rotation); the physical
    requirement is ``|epsilon| < 1``.
    """

    delta_omega: float = DEFAULT_DELTA_OMEGA
    g: float = DEFAULT_G
    Omega: float = 0.0
    N: int = DEFAULT_N
    epsilon: float = 0.0
    omega0: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ParameterError("omega0>0", f"omega0 must be positive, got {self.omega0}")
        if not self.delta_omega > 0:
            raise ParameterError(
                "delta_omega>0", f"delta_omega must be positive, got {self.delta_omega}"
            )
        if not self.g >= 0:
            raise ParameterError("g>=0", f"g must be non-negative, got {self.g}")
        if not self.Omega >= 0:
            raise ParameterError("Omega>=0", f"Omega must be non-negative, got {self.Omega}")
        if not math.isfinite(self.epsilon) or abs(self.epsilon) >= 1:
            raise ParameterError("|epsilon|<1", f"epsilon must satisfy |epsilon| < 1, got {self.epsilon}")
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ParameterError("N integer", f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if self.N < 2 or self.N % 2:
            raise ParameterError("N even >= 2", f"N must be even and >= 2, got {self.N}")
        ratio = self.omega0 / self.delta_omega
        j0 = round(ratio)
        if abs(ratio - j0) > _J0_RTOL * ratio:
            raise ParameterError(
                "omega0/delta_omega integer",
                f"omega0/delta_omega = {ratio!r} is not an integer",
            )
        if j0 - self.N // 2 < 1:
            raise ParameterError(
                "j0-N/2>=1",
                f"mode window reaches j = {j0 - self.N // 2}; need j0 - N/2 >= 1 (j0={j0}, N={self.N})",
            )

    @property
    def j0(self) -> int:
        return round(self.omega0 / self.delta_omega)

    @property
    def mode_indices(self) -> np.ndarray:
        return np.arange(self.j0 - self.N // 2, self.j0 + self.N // 2 + 1)

    @property
    def n_modes(self) -> int:
        """Ring modes per direction, ``N + 1``."""
        return self.N + 1

    @property
    def dim(self) -> int:
        return 2 + 2 * self.n_modes

    @property
    def T_R(self) -> float:
        """Bypass time of the ring, ``2 pi / delta_omega``."""
        return 2 * math.pi / self.delta_omega

    @property
    def Omega_TC(self) -> float:
        """Critical atom-cavity coupling of the time-crystal regime (equals g)."""
        return self.g

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    @classmethod
    def reference(cls, Omega_over_TC: float = 0.0, epsilon: float = 0.0) -> "ModelParams":
        """Default ring parameters with coupling given in units of ``Omega_TC``."""
        return cls(Omega=Omega_over_TC * DEFAULT_G, epsilon=epsilon)


@dataclass(frozen=True)
class Hamiltonian:
    matrix: np.ndarray
    basis_labels: tuple[str, ...]
    params: ModelParams | None = field(default=None, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError("square", f"Hamiltonian must be square, got shape {m.shape}")
        if len(self.basis_labels) != m.shape[0]:
            raise ParameterError("labels", "basis_labels length does not match matrix dimension")
        object.__setattr__(self, "matrix", _readonly(m))
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_atoms(self) -> int:
        return sum(1 for lab in self.basis_labels if lab.startswith("atom"))

    def index(self, label: str) -> int:
        return self.basis_labels.index(label)


@dataclass(frozen=True)
class StateVector:
    """Amplitudes in the Hamiltonian's basis order at ``time`` (units 1/omega0).

    Normalization is enforced unless ``check=False``; the Runge-Kutta oracle
    uses that to hand back states carrying its own norm drift.
    """

    amplitudes: np.ndarray
    time: float = 0.0
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.ndim != 1:
            raise ParameterError("vector", "amplitudes must be one-dimensional")
        nrm = np.vdot(a, a).real
        if self.check and abs(nrm - 1.0) > _NORM_TOL:
            raise ParameterError("normalized", f"sum |c|^2 = {nrm!r}, expected 1")
        object.__setattr__(self, "amplitudes", _readonly(a))
        object.__setattr__(self, "time", float(self.time))

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


def basis_labels(params: ModelParams) -> tuple[str, ...]:
    js = params.mode_indices
    return ("atom", "cavity", *(f"cw_{j}" for j in js), *(f"ccw_{j}" for j in js))


def ring_blocks(params: ModelParams, offset: int = 2) -> tuple[slice, slice]:
    """Index slices of the clockwise and counterclockwise ring modes."""
    n = params.n_modes
    return slice(offset, offset + n), slice(offset + n, offset + 2 * n)


def fill_ring(h: np.ndarray, params: ModelParams, cavity: int, offset: int) -> None:
    """Write ring diagonals and cavity-ring couplings into ``h`` in place."""
    js = params.mode_indices.astype(float)
    cw, ccw = ring_blocks(params, offset)
    idx_cw = np.arange(cw.start, cw.stop)
    idx_ccw = np.arange(ccw.start, ccw.stop)
    h[idx_cw, idx_cw] = js * params.delta_omega * (1 + params.epsilon)
    h[idx_ccw, idx_ccw] = js * params.delta_omega * (1 - params.epsilon)
    h[cavity, offset:] = params.g
    h[offset:, cavity] = params.g


def build_hamiltonian(params: ModelParams) -> Hamiltonian:
    """Assemble the single-excitation Hamiltonian for ``params``.

    Row ``k`` of ``-1j * H @ c`` is the right-hand side of the amplitude
    equation for basis state ``k``.
    """
    h = np.zeros((params.dim, params.dim))
    h[0, 0] = params.omega0
    h[1, 1] = params.omega0
    h[0, 1] = h[1, 0] = params.Omega
    fill_ring(h, params, cavity=1, offset=2)
    return Hamiltonian(h, basis_labels(params), params)


def initial_state(params: ModelParams) -> StateVector:
    """Excitation quantum in the atom: ``C_sigma(0) = 1``, all else zero."""
    a = np.zeros(params.dim, dtype=complex)
    a[0] = 1.0
    return StateVector(a, 0.0)


def swap_operator(params: ModelParams, offset: int = 2) -> np.ndarray:
    """Permutation matrix exchanging each cw_j with ccw_j."""
    d = offset + 2 * params.n_modes
    perm = np.arange(d)
    cw, ccw = ring_blocks(params, offset)
    perm[cw] = np.arange(ccw.start, ccw.stop)
    perm[ccw] = np.arange(cw.start, cw.stop)
    return np.eye(d)[perm]
