"""Command line interface.

Subcommands:

* ``run``      execute a scenario and optionally write telemetry CSV
* ``validate`` check a configuration file and report design ratios
* ``oracle``   solve the static rest position for a given equilibrium

Exit codes: 0 on success, 1 on usage errors, 2 on configuration or
scenario errors, 3 on simulation faults and I/O failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import warnings
from typing import List, Optional

from .config_io import load_config, load_scenario
from .core import (
    FORCE_RATIO_WARN_THRESHOLD,
    equivalent_inertia_adjuster,
    equivalent_inertia_load,
    validate_design,
)
from .errors import ConfigError, PeasimError, ScenarioError, SimulationFault
from .loads import LoadKind, external_torque, load_inertia
from .scenario import (
    Hold,
    ScenarioScript,
    reference_experiment,
    run_scenario,
    static_equilibrium_solve,
    write_csv,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract wants 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(f"{self.format_usage().rstrip()}\n{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="peasim", description="AE-PEA actuator simulator")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p_run = sub.add_parser(
        "run",
        help="run a scenario and print a summary",
        description="Run a scenario script against an actuator configuration.",
    )
    p_run.add_argument("--config", metavar="PATH", help="run configuration file")
    p_run.add_argument(
        "--scenario",
        metavar="PATH",
        default="reference",
        help="scenario script file, or 'reference' for the built-in "
        "load-holding experiment (default)",
    )
    p_run.add_argument("--dt", type=float, metavar="SECONDS", help="override the time step")
    p_run.add_argument(
        "--duration-scale",
        type=float,
        default=1.0,
        metavar="FACTOR",
        help="scale every hold phase duration by this factor",
    )
    p_run.add_argument("--out", metavar="PATH", help="write telemetry CSV here")

    p_val = sub.add_parser(
        "validate",
        help="validate a configuration file",
        description="Parse a configuration, check invariants, report design ratios.",
    )
    p_val.add_argument("--config", metavar="PATH", help="run configuration file")

    p_orc = sub.add_parser(
        "oracle",
        help="solve the static rest position for an equilibrium setting",
        description="Bisection solve of tau_spring + tau_ext = 0 at a fixed "
        "equilibrium position.",
    )
    p_orc.add_argument("--config", metavar="PATH", help="run configuration file")
    p_orc.add_argument(
        "--q-eq", type=float, required=True, metavar="RAD", help="equilibrium position"
    )
    return parser


def _load_cfg(path: Optional[str]):
    if path is None:
        return reference_experiment()[1]
    return load_config(path)


def _cmd_run(args) -> int:
    cfg = _load_cfg(args.config)
    if args.scenario == "reference":
        script = reference_experiment()[0]
    else:
        script = load_scenario(args.scenario)
    if args.duration_scale != 1.0:
        if not args.duration_scale > 0.0:
            raise ConfigError("--duration-scale must be > 0")
        script = ScenarioScript(
            phases=tuple(
                Hold(duration=ph.duration * args.duration_scale)
                if isinstance(ph, Hold)
                else ph
                for ph in script.phases
            )
        )
    if args.dt is not None:
        cfg = dataclasses.replace(cfg, dt=args.dt)

    result = run_scenario(script, cfg)

    print(f"backend: {result.backend}")
    for ph in result.phases:
        line = (
            f"phase {ph.index:2d} {ph.kind:<17s} {ph.status:<8s} "
            f"t=[{ph.t_start:9.4f}, {ph.t_end:9.4f}] s  "
            f"q_eq={ph.final_q_eq:+.6f} rad  "
            f"max|dl|={ph.max_abs_delta_l:.3e} rad"
        )
        if ph.transition_duration is not None:
            line += f"  transition={ph.transition_duration:.4f} s"
        print(line)
    print(
        f"electrical energy: E_M={result.E_M:.6f} J  E_m={result.E_m:.6f} J"
    )
    print(
        f"mechanical work:   W_M={result.W_M:.6f} J  W_m={result.W_m:.6f} J  "
        f"W_ext={result.W_ext:.6f} J"
    )
    print(f"energy residual:   {result.energy_residual:.3e} J")
    fs = result.final_state
    print(
        f"final state: t={fs.t:.4f} s  q_M={fs.q_M:+.6f} rad  "
        f"q_eq={fs.q_m / cfg.params.n:+.6f} rad  mode={fs.mode}"
    )

    out_path = args.out if args.out is not None else cfg.out_path
    if out_path is not None:
        write_csv(result.records, out_path)
        print(f"wrote {len(result.records)} records to {out_path}")
    return 0


def _cmd_validate(args) -> int:
    cfg = _load_cfg(args.config)
    params = cfg.params
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ratio = validate_design(params)
    M_eq = equivalent_inertia_load(params)
    m_eq = equivalent_inertia_adjuster(params)
    load = cfg.base_load
    print(f"load-side inertia M_eq = {M_eq:.6g} kg*m^2")
    print(f"adjuster inertia m_eq = {m_eq:.6g} kg*m^2")
    print(
        f"force ratio n*m_eq/M_eq = {ratio:.6g} "
        f"(warn threshold {FORCE_RATIO_WARN_THRESHOLD:g})"
    )
    print(f"base load: {load.kind.value}")
    if load.kind is not LoadKind.SCRIPTED:
        print(f"base load inertia = {load_inertia(load):.6g} kg*m^2")
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    print("configuration ok")
    return 0


def _cmd_oracle(args) -> int:
    cfg = _load_cfg(args.config)
    if abs(args.q_eq) > cfg.q_eq_limit:
        raise ConfigError(
            f"--q-eq {args.q_eq:.6g} outside the joint range +/-{cfg.q_eq_limit:.6g}"
        )
    q_M = static_equilibrium_solve(cfg.params, cfg.base_load, args.q_eq)
    delta_l = q_M - args.q_eq
    # + 0.0 keeps negative zero out of the report
    tau_spring = -cfg.params.k * delta_l + 0.0
    tau_ext = external_torque(cfg.base_load, q_M, 0.0) + 0.0
    print(f"q_eq = {args.q_eq:.12g} rad")
    print(f"q_M = {q_M:.12g} rad")
    print(f"spring deflection = {delta_l:.12g} rad")
    print(f"spring torque on load side = {tau_spring:.12g} N*m")
    print(f"external torque = {tau_ext:.12g} N*m")
    print(f"residual = {abs(tau_spring + tau_ext):.3e} N*m")
    return 0


def cli_main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        code = exc.code
        return code if isinstance(code, int) else 0
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_oracle(args)
    except (ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationFault as exc:
        print(f"simulation fault: {exc}", file=sys.stderr)
        return 3
    except PeasimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
