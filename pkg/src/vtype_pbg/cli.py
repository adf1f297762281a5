"""Command line entry point: ``vtype-pbg simulate`` and ``vtype-pbg verify``."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidInputError, VTypeError
from .free import FreeParams, free_track
from .oracle import check_kernel_consistency, mode_sum_evolve
from .pbg import PbgParams, pbg_track
from .scenarios import BUILTIN_SCENARIOS, ScenarioConfig, load_config, run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

VERIFY_OMEGA32 = 0.1
VERIFY_DETUNINGS = (-1.0, 0.2, 0.9)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    seconds: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.threshold)


def _timed(name, threshold, fn):
    t0 = time.perf_counter()
    value = float(fn())
    return Check(name, value, threshold, time.perf_counter() - t0)


def pbg_checks():
    out = []
    grid = np.linspace(0.0, 10.0, 1001)
    for w3c in VERIFY_DETUNINGS:
        p = PbgParams(VERIFY_OMEGA32, w3c)
        out.append(_timed(f"pbg completeness w3c={w3c:g}", 1e-6,
                          lambda: np.max(np.abs(pbg_track([0.0], p).m[0] - np.eye(2)))))
        out.append(_timed(f"pbg kernel residual w3c={w3c:g}", 1e-3,
                          lambda: check_kernel_consistency(pbg_track(grid, p), p)))
    return out


def free_checks():
    out = []
    p = FreeParams(1.0, 1.0, 0.5)
    grid = np.linspace(0.0, 3.0, 301)
    c = (np.sqrt(0.5), np.sqrt(0.5))

    def mode_sum():
        exact = free_track(grid, p).amplitudes(*c)
        approx = mode_sum_evolve(p, *c, grid, n_modes=2000)
        return max(np.max(np.abs(a - b)) for a, b in zip(exact, approx))

    out.append(_timed("free mode-sum deviation (2000 modes)", 1e-2, mode_sum))
    out.append(_timed("free kernel residual", 1e-6,
                      lambda: check_kernel_consistency(free_track(np.linspace(0, 10, 1001), p), p)))
    return out


def verify(env=None):
    checks = []
    if env in (None, "pbg"):
        checks += pbg_checks()
    if env in (None, "free"):
        checks += free_checks()
    return checks


def _build_parser():
    ap = argparse.ArgumentParser(prog="vtype-pbg")
    sub = ap.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run a scenario and write CSV files")
    sim.add_argument("--config", help="key = value configuration file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--scenario", choices=sorted(BUILTIN_SCENARIOS),
                     help="start from a built-in figure scenario")
    sim.add_argument("--svg", action="store_true", help="also write SVG line plots")
    ver = sub.add_parser("verify", help="run the oracle checks and print residuals")
    ver.add_argument("--env", choices=("pbg", "free"))
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "verify":
        try:
            checks = verify(args.env)
        except VTypeError as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        for c in checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"{status}  {c.name}: {c.value:.3e} (limit {c.threshold:g}, {c.seconds:.2f} s)")
        return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC

    base = BUILTIN_SCENARIOS[args.scenario] if args.scenario else None
    try:
        if args.config:
            cfg = load_config(args.config, base)
        elif base is not None:
            cfg = base
        else:
            raise ConfigError("either --config or --scenario is required")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidInputError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        paths = run_scenario(cfg, args.out, svg=args.svg)
    except VTypeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
