"""Command-line entry point.

Subcommands: analyze, synthesize, certify, simulate, detect, repro-aircraft.
Exit codes: 0 clean/pass, 2 attack detected or certificate/expectation
mismatch, 1 errors.
"""

from __future__ import annotations

import argparse
import sys as _sys
from pathlib import Path

import numpy as np

from .analysis import certify_undetectable
from .detector import Decision, DetectorConfig, run_detector
from .errors import LtisecError
from .model import AttackSequence, SideInformation, simulate
from .numlin import Tol
from .reports import (
    PRINT_PRECISION_REL,
    Report,
    analyze_report,
    certify_report,
    fmt,
    repro_aircraft,
    trace_series,
    write_series_csv,
)
from .scenario import load_attack, load_log, load_scenario, save_attack, save_log
from .synthesis import (
    extend_attack,
    find_zero_dynamics_modes,
    undetectable_from_theta,
    zero_dynamics_attack,
    zero_state_synthesize,
)


def _tol(args, default_residual: float = 1e-8) -> Tol:
    r = args.tol if args.tol is not None else default_residual
    return Tol(rank_rel=1e-10, residual_rel=r)


def _hints(args) -> list[complex] | None:
    if not args.lambda_hint:
        return None
    return [complex(h) for h in args.lambda_hint]


def _cmd_analyze(args) -> int:
    scenario = load_scenario(args.scenario, _tol(args))
    rep = analyze_report(scenario, _tol(args), _hints(args), args.allow_unstable)
    print(rep.render(), end="")
    return 0


def _cmd_synthesize(args) -> int:
    tol = _tol(args)
    scenario = load_scenario(args.scenario, tol)
    sys = scenario.system
    horizon = args.horizon if args.horizon is not None else 2 * sys.n
    if args.kind == "zero-dynamics":
        modes = find_zero_dynamics_modes(sys, tol, _hints(args), args.allow_unstable)
        attack = zero_dynamics_attack(modes[0], horizon, args.scale)
    elif args.kind == "zero-state":
        attack = zero_state_synthesize(sys, horizon, tol, args.scale)
    elif args.kind == "from-theta":
        if args.theta is None:
            raise LtisecError("--theta is required for kind from-theta")
        theta = np.array([float(x) for x in args.theta.split(",")])
        attack = undetectable_from_theta(sys, scenario.side, theta, horizon, tol)
    else:  # extend
        if args.attack is None:
            raise LtisecError("--attack is required for kind extend")
        base = load_attack(args.attack, sys.s)
        cert = certify_undetectable(sys, scenario.side, base, tol)
        attack = extend_attack(sys, scenario.side, base, cert, horizon, tol)
    if args.out:
        save_attack(args.out, attack)
        print(f"wrote attack horizon_t={attack.horizon_t} to {args.out}")
    else:
        for k, frame in enumerate(attack.frames):
            print(f"a({k}) = " + " ".join(fmt(x) for x in frame))
    return 0


def _cmd_certify(args) -> int:
    tol = _tol(args)
    scenario = load_scenario(args.scenario, tol)
    if args.attack:
        attack = load_attack(args.attack, scenario.system.s)
    elif scenario.attack is not None:
        attack = scenario.attack
    else:
        raise LtisecError("no attack given: pass --attack or embed one in the scenario")
    rep, undetectable = certify_report(scenario, attack, tol)
    print(rep.render(), end="")
    return 0 if undetectable else 2


def _cmd_simulate(args) -> int:
    tol = _tol(args)
    scenario = load_scenario(args.scenario, tol)
    sys = scenario.system
    if args.attack:
        attack = load_attack(args.attack, sys.s)
    elif scenario.attack is not None:
        attack = scenario.attack
    else:
        horizon = args.horizon if args.horizon is not None else 2 * sys.n
        attack = AttackSequence.zeros(sys.s, horizon)
    x0 = scenario.x0 if scenario.x0 is not None else np.zeros(sys.n)
    traj = simulate(sys, x0, attack, scenario.side)
    if args.out:
        save_log(args.out, traj)
        print(f"wrote log with {traj.horizon_t + 1} records to {args.out}")
    else:
        print(f"y_omega = " + " ".join(fmt(v) for v in traj.side_value))
        for k, y in enumerate(traj.outputs):
            print(f"y({k}) = " + " ".join(fmt(v) for v in y))
    return 0


def _cmd_detect(args) -> int:
    tol = _tol(args)
    scenario = load_scenario(args.scenario, tol)
    sys = scenario.system
    window = args.window if args.window is not None else sys.n + 1
    side = SideInformation(scenario.side.omega, tol)
    config = DetectorConfig(window_len_l=window, omega=side, tol=tol)
    y_omega, outputs = load_log(args.log)
    trace = run_detector(sys, config, y_omega, outputs)
    rows = trace_series(trace)
    if args.out:
        write_series_csv(args.out, rows)
    rep = Report("detection")
    rep.add("window", str(window))
    rep.add("epochs", str(len(rows)))
    rep.add("verdict", trace.verdict.value)
    first = trace.first_detection()
    rep.add("first_detection", "none" if first is None else str(first))
    rep.series["detect"] = rows
    print(rep.render(), end="")
    return 0 if trace.verdict is Decision.NO_ATTACK else 2


def _cmd_repro_aircraft(args) -> int:
    rep = repro_aircraft(
        window=args.window if args.window is not None else 5,
        residual_rel=args.tol if args.tol is not None else PRINT_PRECISION_REL,
        scale=args.scale,
    )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, rows in sorted(rep.series.items()):
            write_series_csv(out / f"{name}.csv", rows)
    print(rep.render(), end="")
    return 0 if rep.passed else 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltisec",
        description="stealthy-attack analysis, synthesis, and detection for "
        "discrete-time linear systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario_required=True):
        p.add_argument("--scenario", required=scenario_required, help="scenario JSON file")
        p.add_argument("--tol", type=float, default=None, help="residual tolerance")

    p = sub.add_parser("analyze", help="subspace dimensions and attack existence")
    common(p)
    p.add_argument("--lambda-hint", action="append", default=[], help="candidate lambda (repeatable)")
    p.add_argument("--allow-unstable", action="store_true", help="keep modes with |lambda| > 1")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("synthesize", help="construct an attack sequence")
    common(p)
    p.add_argument("--kind", required=True,
                   choices=["zero-dynamics", "zero-state", "from-theta", "extend"])
    p.add_argument("--horizon", type=int, default=None, help="attack horizon T")
    p.add_argument("--scale", type=float, default=1.0, help="attack magnitude")
    p.add_argument("--lambda-hint", action="append", default=[], help="candidate lambda (repeatable)")
    p.add_argument("--allow-unstable", action="store_true", help="keep modes with |lambda| > 1")
    p.add_argument("--theta", default=None, help="comma-separated initial-state shift")
    p.add_argument("--attack", default=None, help="attack JSON file (kind extend)")
    p.add_argument("--out", default=None, help="output attack JSON file")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("certify", help="undetectability certificate for an attack")
    common(p)
    p.add_argument("--attack", default=None, help="attack JSON file")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("simulate", help="run the recursion and write a log")
    common(p)
    p.add_argument("--attack", default=None, help="attack JSON file")
    p.add_argument("--horizon", type=int, default=None, help="horizon for the zero attack")
    p.add_argument("--out", default=None, help="output log file")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("detect", help="run the windowed detector over a log")
    common(p)
    p.add_argument("--log", required=True, help="measurement log file")
    p.add_argument("--window", type=int, default=None, help="window length l")
    p.add_argument("--out", default=None, help="output trace CSV")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("repro-aircraft", help="re-run the bundled aircraft experiment")
    p.add_argument("--tol", type=float, default=None, help="detection tolerance")
    p.add_argument("--window", type=int, default=None, help="window length l")
    p.add_argument("--scale", type=float, default=10.0, help="attack magnitude")
    p.add_argument("--out", default=None, help="directory for CSV series")
    p.set_defaults(func=_cmd_repro_aircraft)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LtisecError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
