"""Single-excitation simulator of an atom-cavity-ring system.

Reproduces the sensitivity-versus-observation-time phenomenology of the
time-crystal regime: S ~ T^2 while the atom retains memory of its initial
state, S ~ T once it does not.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    FitError,
    GridMismatchError,
    NoSlowPeakError,
    NumericalError,
    ParameterError,
    RingTCError,
    WindowError,
)
from .model import Hamiltonian, ModelParams, StateVector, build_hamiltonian, initial_state  # noqa: E402
from .propagate import (  # noqa: E402
    SpectralDecomposition,
    Trajectory,
    decompose,
    evolve,
    evolve_rk_oracle,
    sample_trajectory,
    simulate,
)
from .metrics import (  # noqa: E402
    markov_envelope,
    memory,
    phase_difference,
    return_probability,
    sensitivity,
)
from .analysis import (  # noqa: E402
    PowerLawFit,
    Regime,
    SweepSpec,
    classify_regime,
    fit_alpha,
    run_sweep,
    slow_period_estimate,
)
from .multiatom import (  # noqa: E402
    MultiAtomParams,
    build_multiatom_hamiltonian,
    collective_amplitude,
)
