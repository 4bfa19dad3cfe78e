"""Fast invariant suite behind ``ringtc validate``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .metrics import sensitivity
from .model import ModelParams, build_hamiltonian, initial_state
from .multiatom import MultiAtomParams, collective_amplitude, simulate_multiatom
from .propagate import decompose, sample_trajectory


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _run(builder, params, T, dt):
    sd = decompose(builder(params))
    return sample_trajectory(sd, initial_state(params), T, dt)


def run_validation(builder: Callable = build_hamiltonian) -> list[Check]:
    """Run every check; ``builder`` replaces the Hamiltonian constructor (test hook)."""
    p = ModelParams.reference(2.0)
    t_r = p.T_R
    dt = t_r / 100

    def symmetry():
        h = builder(p).matrix
        err = float(np.max(np.abs(h - h.T)))
        return err == 0.0, f"max|H-H^T| = {err:.3e}"

    def unitarity():
        traj = _run(builder, p, 5 * t_r, dt)
        err = float(np.max(np.abs(traj.norms() - 1)))
        return err < 1e-9, f"max norm error {err:.3e}"

    def rabi():
        q = ModelParams(g=0.0, Omega=3e-3)
        traj = _run(builder, q, 2 * t_r, dt)
        err = float(np.max(np.abs(np.abs(traj.states[:, 0]) ** 2 - np.cos(q.Omega * traj.times) ** 2)))
        return err < 1e-8, f"max |P - cos^2| = {err:.3e}"

    def multiatom():
        mp = MultiAtomParams(2, p.Omega / np.sqrt(2), p)
        coll = collective_amplitude(simulate_multiatom(mp, 5 * t_r, dt))
        single = _run(builder, p, 5 * t_r, dt).states[:, 0]
        err = float(np.max(np.abs(coll - single)))
        return err < 1e-8, f"max |C_coll - C_sigma| = {err:.3e}"

    def zero_eps():
        a = _run(builder, p, 5 * t_r, dt)
        b = _run(builder, p, 5 * t_r, dt)
        S = sensitivity(a, b, 5 * t_r).S
        return S == 0.0, f"S = {S!r}"

    checks = [
        ("hamiltonian_symmetry", symmetry),
        ("unitarity", unitarity),
        ("rabi_limit", rabi),
        ("multiatom_equivalence_m2", multiatom),
        ("zero_epsilon_sensitivity", zero_eps),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(Check(name, bool(ok), detail))
    return results


def format_report(results: list[Check]) -> str:
    width = max(len(c.name) for c in results)
    lines = [f"{'check'.ljust(width)}  status  detail"]
    for c in results:
        lines.append(f"{c.name.ljust(width)}  {'PASS' if c.passed else 'FAIL':6}  {c.detail}")
    n_ok = sum(c.passed for c in results)
    lines.append(f"{n_ok}/{len(results)} checks passed")
    return "\n".join(lines)
