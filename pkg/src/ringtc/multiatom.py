"""m identical atoms coupled to the same cavity.

Each atom couples to the cavity with ``Omega0``. The symmetric combination
``C_sigma = sum_k C_k / sqrt(m)`` obeys the single-atom equations with
``Omega = sqrt(m) * Omega0``; the orthogonal combinations are dark.
Basis order: ``atom_1 .. atom_m, cavity, cw_j, ccw_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .model import Hamiltonian, ModelParams, StateVector, fill_ring
from .propagate import Trajectory, decompose, sample_trajectory


@dataclass(frozen=True)
class MultiAtomParams:
    m: int
    Omega0: float
    base: ModelParams = field(default_factory=ModelParams)

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise ParameterError("m>=1", f"atom count must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if not self.Omega0 > 0:
            raise ParameterError("Omega0>0", f"per-atom coupling must be positive, got {self.Omega0}")

    @property
    def Omega(self) -> float:
        """Collective coupling ``sqrt(m) * Omega0``."""
        return math.sqrt(self.m) * self.Omega0

    @property
    def dim(self) -> int:
        return self.m + 1 + 2 * self.base.n_modes

    def equivalent_single(self) -> ModelParams:
        return self.base.replace(Omega=self.Omega)


def multiatom_labels(p: MultiAtomParams) -> tuple[str, ...]:
    js = p.base.mode_indices
    atoms = ("atom",) if p.m == 1 else tuple(f"atom_{k}" for k in range(1, p.m + 1))
    return (*atoms, "cavity", *(f"cw_{j}" for j in js), *(f"ccw_{j}" for j in js))


def build_multiatom_hamiltonian(p: MultiAtomParams) -> Hamiltonian:
    base = p.base
    m = p.m
    h = np.zeros((p.dim, p.dim))
    idx = np.arange(m)
    h[idx, idx] = base.omega0
    h[m, m] = base.omega0
    h[idx, m] = p.Omega0
    h[m, idx] = p.Omega0
    fill_ring(h, base, cavity=m, offset=m + 1)
    return Hamiltonian(h, multiatom_labels(p), base.replace(Omega=p.Omega))


def symmetric_state(p: MultiAtomParams) -> StateVector:
    """Excitation shared equally by all atoms, ``C_k(0) = 1/sqrt(m)``."""
    a = np.zeros(p.dim, dtype=complex)
    a[: p.m] = 1.0 / math.sqrt(p.m)
    return StateVector(a)


def collective_amplitude(states: np.ndarray | Trajectory, m: int | None = None) -> np.ndarray:
    """``sum_k C_k(t) / sqrt(m)`` per sample.

    Accepts a multi-atom :class:`Trajectory` or a ``(n_samples, dim)`` array
    together with ``m``.
    """
    if isinstance(states, Trajectory):
        m = states.n_atoms if m is None else m
        states = states.states
    if m is None:
        raise ParameterError("m", "atom count required for a raw amplitude array")
    states = np.asarray(states)
    return states[..., :m].sum(axis=-1) / math.sqrt(m)


def simulate_multiatom(p: MultiAtomParams, T: float, dt: float, psi0: StateVector | None = None) -> Trajectory:
    sd = decompose(build_multiatom_hamiltonian(p))
    return sample_trajectory(sd, symmetric_state(p) if psi0 is None else psi0, T, dt)
