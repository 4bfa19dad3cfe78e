"""Command line entry point: ``ringtc {simulate,sweep,validate,fit}``.

Exit codes: 0 ok, 1 validation-suite failure, 2 bad configuration or
parameters, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from collections import OrderedDict
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analysis import fit_alpha, run_sweep
from .config import ConfigError, load_config, recipe_path, simulate_params, sweep_spec
from .errors import FitError, ParameterError, RingTCError
from .io import fmt, sha256_file, sha256_json, write_json
from .multiatom import MultiAtomParams, simulate_multiatom
from .propagate import simulate, write_trajectory_csv
from .validate import format_report, run_validation

log = logging.getLogger("ringtc")

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class Manifest:
    """Run record; always written, also when the run fails part way."""

    def __init__(self, out_dir: Path, name: str, config: dict):
        self.out_dir = out_dir
        self.path = out_dir / f"{name}.manifest.json"
        self.data = {
            "config_digest": sha256_json(config),
            "config": config,
            "tool_version": f"ringtc {__version__}",
            "started_at": _now(),
            "finished_at": None,
            "status": "running",
            "outputs": [],
        }

    def add(self, path: Path) -> None:
        self.data["outputs"].append(
            {"path": str(Path(path).relative_to(self.out_dir)), "sha256": sha256_file(path)}
        )

    def close(self, status: str) -> None:
        self.data["status"] = status
        self.data["finished_at"] = _now()
        write_json(self.path, self.data)


def _resolve(args, kind: str) -> tuple[str, dict]:
    if bool(args.config) == bool(args.recipe):
        raise ConfigError("--config/--recipe", "give exactly one of --config PATH or --recipe NAME")
    path = recipe_path(args.recipe) if args.recipe else Path(args.config)
    cfg = load_config(path, kind)
    if args.dt_over_TR is not None:
        if not args.dt_over_TR > 0:
            raise ConfigError("dt_over_TR", "must be positive")
        cfg["dt_over_TR"] = args.dt_over_TR
    name = cfg.get("name") or args.recipe or path.stem
    cfg["name"] = name
    return name, cfg


def cmd_simulate(args) -> int:
    name, cfg = _resolve(args, "simulate")
    params_list = simulate_params(cfg)
    out = Path(args.out)
    man = Manifest(out, name, {"command": "simulate", **cfg})
    status = "failed"
    try:
        for p in params_list:
            T = cfg["T_over_TR"] * p.T_R
            dt = cfg["dt_over_TR"] * p.T_R
            if cfg["m"] > 1:
                mp = MultiAtomParams(cfg["m"], p.Omega / cfg["m"] ** 0.5, p)
                traj = simulate_multiatom(mp, T, dt)
            else:
                traj = simulate(p, T, dt)
            path = write_trajectory_csv(traj, out / f"{name}_eps{fmt(p.epsilon)}.csv")
            man.add(path)
            log.info("wrote %s", path)
        status = "ok"
    finally:
        man.close(status)
    return EXIT_OK


def cmd_sweep(args) -> int:
    name, cfg = _resolve(args, "sweep")
    spec = sweep_spec(cfg)
    out = Path(args.out)
    man = Manifest(out, name, {"command": "sweep", **cfg})
    status = "failed"
    try:
        result = run_sweep(spec, threads=max(1, args.threads))
        for path in result.write(out / f"{name}.csv", out / f"{name}.meta.json"):
            man.add(path)
            log.info("wrote %s", path)
        failed = [r for r in result.rows if r.status.startswith("failed")]
        status = "partial" if failed else "ok"
    finally:
        man.close(status)
    if failed:
        print(f"{len(failed)} of {len(result.rows)} cells failed; see status column", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_validation()
    print(format_report(results))
    return EXIT_OK if all(c.passed for c in results) else EXIT_VALIDATION


def cmd_fit(args) -> int:
    try:
        with open(args.csv, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError("csv", f"cannot read {args.csv}: {exc}") from None
    if not rows or "T_over_TR" not in rows[0] or "S" not in rows[0]:
        raise ConfigError("csv", "CSV needs columns T_over_TR and S")
    group_keys = [k for k in ("Omega_over_OmegaTC", "epsilon") if k in rows[0]]
    groups: OrderedDict[tuple, list] = OrderedDict()
    lo, hi = args.T_min, args.T_max
    for r in rows:
        T, S = float(r["T_over_TR"]), float(r["S"])
        if (lo is not None and T < lo) or (hi is not None and T > hi):
            continue
        groups.setdefault(tuple(r[k] for k in group_keys), []).append((T, S))
    code = EXIT_OK
    for key, samples in groups.items():
        label = " ".join(f"{k}={v}" for k, v in zip(group_keys, key))
        try:
            f = fit_alpha(samples)
            print(
                f"{label} alpha={f.alpha:.6f} log_prefactor={f.log_prefactor:.6f} "
                f"r_squared={f.r_squared:.6f} n_points={f.n_points} "
                f"T_range=[{f.T_range[0]:g}, {f.T_range[1]:g}] T_R".strip()
            )
        except FitError as exc:
            print(f"{label} fit failed: {exc}".strip())
            code = EXIT_NUMERICAL
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ringtc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ringtc {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def run_opts(p):
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--recipe", metavar="NAME", help="bundled recipe: fig1, fig6, fig2a, fig3, fig5b")
        p.add_argument("--out", metavar="DIR", default="out")
        p.add_argument("--dt-over-TR", dest="dt_over_TR", type=float, metavar="FLOAT")
        p.add_argument("--threads", type=int, default=1, metavar="INT")

    p = sub.add_parser("simulate", help="write trajectory CSVs")
    run_opts(p)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("sweep", help="run an (Omega, epsilon, T) sweep")
    run_opts(p)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("validate", help="run the fast invariant suite")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("fit", help="fit S ~ T^alpha to an existing CSV")
    p.add_argument("csv", metavar="CSV")
    p.add_argument("--T-min", dest="T_min", type=float, help="lower bound on T_over_TR (default: all rows)")
    p.add_argument("--T-max", dest="T_max", type=float, help="upper bound on T_over_TR")
    p.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RingTCError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
