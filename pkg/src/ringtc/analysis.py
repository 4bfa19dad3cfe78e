"""Power-law fits, regime classification and (Omega, epsilon, T) sweeps."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .errors import FitError, NoSlowPeakError, ParameterError, RingTCError
from .io import write_csv, write_json
from .metrics import (
    MEMORY_WINDOW_TR,
    PHASE_WINDOW_TR,
    TOL_PHI,
    bypass_phases,
    memory,
    sensitivity,
)
from .model import ModelParams
from .propagate import Trajectory, simulate

FIT_WINDOW_TR = (10.0, 20.0)
SLOW_BAND_TR = 0.25
SLOW_NOISE_RATIO = 10.0


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    log_prefactor: float
    r_squared: float
    T_range: tuple[float, float]
    n_points: int


def fit_alpha(samples: Sequence[tuple[float, float]], T_unit: float = 1.0) -> PowerLawFit:
    """Least-squares line through ``(log T, log S)``; ``alpha`` is the slope.

    ``T_unit`` only scales the reported ``T_range`` (pass ``T_R`` to get it
    in bypass units when ``T`` is in ``1/omega0``).
    """
    T = np.array([s[0] for s in samples], dtype=float)
    S = np.array([s[1] for s in samples], dtype=float)
    if len(T) < 4:
        raise FitError(f"need at least 4 samples, got {len(T)}")
    bad = [i for i in range(len(T)) if not (S[i] > 0 and T[i] > 0)]
    if bad:
        raise FitError(f"non-positive samples at indices {bad}")
    x, y = np.log(T), np.log(S)
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise FitError("all observation times are equal")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    syy = float((y - y.mean()) @ (y - y.mean()))
    r2 = 1.0 if syy == 0.0 else 1.0 - float(resid @ resid) / syy
    r2 = min(max(r2, 0.0), 1.0)
    return PowerLawFit(slope, intercept, r2, (T.min() / T_unit, T.max() / T_unit), len(T))


class Regime(str, enum.Enum):
    TIME_CRYSTAL = "TimeCrystal"
    TRANSITION = "Transition"
    NORMAL = "Normal"


@dataclass(frozen=True)
class RegimeReport:
    Omega_over_OmegaTC: float
    phase_1TR: float
    phase_2TR: float
    regime: Regime


def classify_regime(phase_1TR: float, phase_2TR: float, tol_phi: float = TOL_PHI, reliable: bool = True) -> Regime:
    if not reliable or math.isnan(phase_1TR) or math.isnan(phase_2TR):
        return Regime.TRANSITION
    small_1 = abs(phase_1TR) <= tol_phi
    small_2 = abs(phase_2TR) <= tol_phi
    if small_1 and small_2:
        return Regime.NORMAL
    if small_2:
        return Regime.TIME_CRYSTAL
    return Regime.TRANSITION


@dataclass(frozen=True)
class SensitivityCurve:
    Omega: float
    epsilon: float
    T: np.ndarray
    S: np.ndarray
    fit: PowerLawFit | None


def sensitivity_curve(
    traj_perturbed: Trajectory, traj_unperturbed: Trajectory, T_values: Sequence[float]
) -> SensitivityCurve:
    """S at each observation time plus the power-law fit through them."""
    S = np.array([sensitivity(traj_perturbed, traj_unperturbed, T).S for T in T_values])
    T = np.asarray(T_values, dtype=float)
    try:
        fit = fit_alpha(list(zip(T, S)), traj_perturbed.params.T_R)
    except FitError:
        fit = None
    p = traj_perturbed.params
    return SensitivityCurve(p.Omega, p.epsilon, T, S, fit)


def integer_window(lo: float, hi: float) -> list[float]:
    """Integer multiples of T_R in ``[lo, hi]``."""
    return [float(k) for k in range(math.ceil(lo - 1e-9), math.floor(hi + 1e-9) + 1)]


@dataclass
class SweepSpec:
    """Grid of a sensitivity sweep.

    ``Omega_grid`` is in units of ``Omega_TC = g``; ``T_grid``, ``dt`` and
    all windows are in units of ``T_R``.
    """

    Omega_grid: list[float]
    epsilon_grid: list[float]
    T_grid: list[float]
    base: ModelParams = field(default_factory=ModelParams)
    dt: float = 1 / 200
    tol_phi: float = TOL_PHI
    fit_window: tuple[float, float] = FIT_WINDOW_TR
    memory_window: tuple[float, float] = MEMORY_WINDOW_TR
    phase_window: tuple[float, float] = PHASE_WINDOW_TR

    def __post_init__(self):
        for name in ("Omega_grid", "epsilon_grid", "T_grid"):
            grid = [float(v) for v in getattr(self, name)]
            if not grid:
                raise ParameterError(f"{name} non-empty", f"{name} is empty")
            if any(not v > 0 for v in grid):
                raise ParameterError(f"{name} positive", f"{name} must be positive: {grid}")
            if grid != sorted(grid):
                raise ParameterError(f"{name} sorted", f"{name} must be sorted ascending: {grid}")
            setattr(self, name, grid)
        if not self.dt > 0:
            raise ParameterError("dt>0", f"dt must be positive, got {self.dt}")
        self.fit_window = tuple(float(v) for v in self.fit_window)
        self.memory_window = tuple(float(v) for v in self.memory_window)
        self.phase_window = tuple(float(v) for v in self.phase_window)
        if len(integer_window(*self.fit_window)) < 4:
            raise ParameterError("fit window", f"fit window {self.fit_window} holds fewer than 4 integer T_R points")

    @property
    def horizon(self) -> float:
        """Trajectory length in T_R that covers every requested quantity."""
        need = max(
            self.T_grid[-1],
            self.fit_window[1],
            self.memory_window[1],
            self.phase_window[1],
        )
        return float(math.ceil(need - 1e-9))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["base"] = asdict(self.base)
        d["fit_window"] = list(self.fit_window)
        d["memory_window"] = list(self.memory_window)
        d["phase_window"] = list(self.phase_window)
        return d


SWEEP_COLUMNS = (
    "Omega_over_OmegaTC",
    "epsilon",
    "T_over_TR",
    "S",
    "M",
    "phase_1TR",
    "phase_2TR",
    "alpha",
    "r_squared",
    "regime",
    "status",
)


@dataclass(frozen=True)
class SweepRow:
    Omega_over_OmegaTC: float
    epsilon: float
    T_over_TR: float
    S: float
    M: float
    phase_1TR: float
    phase_2TR: float
    alpha: float
    r_squared: float
    regime: str
    status: str

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in SWEEP_COLUMNS)


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[SweepRow]

    def select(self, Omega_over_OmegaTC: float | None = None, epsilon: float | None = None) -> list[SweepRow]:
        return [
            r
            for r in self.rows
            if (Omega_over_OmegaTC is None or r.Omega_over_OmegaTC == Omega_over_OmegaTC)
            and (epsilon is None or r.epsilon == epsilon)
        ]

    def regime_reports(self, epsilon: float) -> list[RegimeReport]:
        """One report per coupling at the given perturbation."""
        seen: dict[float, RegimeReport] = {}
        for r in self.select(epsilon=epsilon):
            seen.setdefault(
                r.Omega_over_OmegaTC,
                RegimeReport(r.Omega_over_OmegaTC, r.phase_1TR, r.phase_2TR, Regime(r.regime)),
            )
        return list(seen.values())

    @property
    def failed(self) -> list[SweepRow]:
        return [r for r in self.rows if r.status != "ok"]

    def write(self, csv_path, meta_path=None):
        out = [write_csv(csv_path, SWEEP_COLUMNS, (r.values() for r in self.rows))]
        if meta_path is not None:
            out.append(write_json(meta_path, sweep_metadata(self.spec)))
        return out


def sweep_metadata(spec: SweepSpec) -> dict:
    return {
        "spec": spec.to_dict(),
        "dt_over_TR": spec.dt,
        "tol_phi": spec.tol_phi,
        "fit_window_TR": list(spec.fit_window),
        "fit_points_TR": integer_window(*spec.fit_window),
        "memory_window_TR": list(spec.memory_window),
        "phase_window_TR": list(spec.phase_window),
        "horizon_TR": spec.horizon,
        "code_version": f"ringtc {__version__}",
    }


_NAN = float("nan")


def _failed_rows(spec: SweepSpec, r: float, eps: float, msg: str) -> list[SweepRow]:
    return [
        SweepRow(r, eps, T, _NAN, _NAN, _NAN, _NAN, _NAN, _NAN, Regime.TRANSITION.value, f"failed: {msg}")
        for T in spec.T_grid
    ]


def _omega_cell(spec: SweepSpec, r: float) -> list[SweepRow]:
    t_r = spec.base.T_R
    dt = spec.dt * t_r
    horizon = spec.horizon * t_r
    try:
        params0 = spec.base.replace(Omega=r * spec.base.Omega_TC, epsilon=0.0)
        unpert = simulate(params0, horizon, dt)
    except RingTCError as exc:
        return [row for eps in spec.epsilon_grid for row in _failed_rows(spec, r, eps, str(exc))]

    rows: list[SweepRow] = []
    fit_T = [k * t_r for k in integer_window(*spec.fit_window)]
    for eps in spec.epsilon_grid:
        try:
            pert = simulate(params0.replace(epsilon=eps), horizon, dt)
            M = memory(pert, spec.memory_window[0] * t_r, spec.memory_window[1] * t_r).M
            ph = bypass_phases(pert, spec.phase_window[0] * t_r, spec.phase_window[1] * t_r)
            regime = classify_regime(ph.phase_1TR, ph.phase_2TR, spec.tol_phi, ph.reliable)
            S_fit = [sensitivity(pert, unpert, T).S for T in fit_T]
        except RingTCError as exc:
            rows.extend(_failed_rows(spec, r, eps, str(exc)))
            continue
        status = "ok"
        try:
            fit = fit_alpha(list(zip(fit_T, S_fit)), t_r)
            alpha, r2 = fit.alpha, fit.r_squared
        except FitError as exc:
            alpha = r2 = _NAN
            status = f"fit failed: {exc}"
        for T in spec.T_grid:
            try:
                S = sensitivity(pert, unpert, T * t_r).S
                row_status = status
            except RingTCError as exc:
                S, row_status = _NAN, f"failed: {exc}"
            rows.append(
                SweepRow(r, eps, T, S, M, ph.phase_1TR, ph.phase_2TR, alpha, r2, regime.value, row_status)
            )
    return rows


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Evaluate every (Omega, epsilon, T) cell of ``spec``.

    The unperturbed trajectory is computed once per Omega and shared by all
    epsilon cells. Cells are independent; with ``threads > 1`` Omega cells run
    concurrently and are merged back in grid order, so the result does not
    depend on scheduling. Failed cells are reported in ``status``.
    """
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda r: _omega_cell(spec, r), spec.Omega_grid))
    else:
        chunks = [_omega_cell(spec, r) for r in spec.Omega_grid]
    return SweepResult(spec, [row for chunk in chunks for row in chunk])


def slow_period_estimate(
    traj_perturbed: Trajectory,
    band: float = SLOW_BAND_TR,
    noise_ratio: float = SLOW_NOISE_RATIO,
) -> float:
    """Period of the strongest slow modulation of ``|C_sigma|^2``.

    Searches discrete-Fourier bins below ``band / T_R``; the peak must exceed
    ``noise_ratio`` times the median bin magnitude of that band and be
    resolved by at least two cycles within the horizon. The peak frequency
    is refined by parabolic interpolation of neighbouring bins. Returned in
    units of ``1/omega0``.
    """
    t_r = traj_perturbed.params.T_R
    p = np.abs(traj_perturbed.atom_amplitude()) ** 2
    n = len(p)
    spec = np.abs(np.fft.rfft(p - p.mean()))
    freqs = np.fft.rfftfreq(n, traj_perturbed.dt)
    in_band = np.nonzero((freqs > 0) & (freqs < band / t_r))[0]
    if len(in_band) < 4:
        raise NoSlowPeakError(
            f"horizon {traj_perturbed.horizon / t_r:.3g} T_R too short to resolve frequencies below {band}/T_R"
        )
    mags = spec[in_band]
    k = int(in_band[np.argmax(mags)])
    floor = float(np.median(mags))
    if not spec[k] > noise_ratio * floor or k < 2:
        raise NoSlowPeakError(
            f"no slow component above noise floor (peak {spec[k]:.3g}, floor {floor:.3g}); horizon too short or epsilon = 0"
        )
    a, b, c = spec[k - 1], spec[k], spec[k + 1]
    denom = a - 2 * b + c
    shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    f = (k + shift) * (freqs[1] - freqs[0])
    return float(1.0 / f)
