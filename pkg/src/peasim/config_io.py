"""Plain-text configuration for runs and scenario scripts.

The format is a flat list of ``dotted.key = value`` assignments, one per
line.  Blank lines and lines starting with ``#`` are ignored.  Keys are
grouped by prefix:

* ``params.*``      actuator parameters (see ActuatorParams)
* ``load.*``        base load model
* ``supervisor.*``  supervisor tolerances and PD gains
* ``run.*``         integration and bookkeeping settings

Every key is optional; missing values fall back to the reference
experiment configuration, so an empty file reproduces the built-in
setup.  Unknown or duplicate keys are rejected rather than ignored so
that typos fail loudly.

Scenario scripts use the same syntax with ``phase.<index>.<field>``
keys, e.g.::

    phase.0.kind = change_equilibrium
    phase.0.target = 0.785398
    phase.1.kind = hold
    phase.1.duration = 2.0

Indices must be contiguous starting at zero.
"""

from __future__ import annotations

import dataclasses
from typing import Dict, List, Tuple

from .errors import ConfigError, ScenarioError
from .loads import LoadKind, LoadModel
from .scenario import (
    AttachPayload,
    ChangeEquilibrium,
    DetachPayload,
    Hold,
    RunConfig,
    ScenarioScript,
    SettleWait,
    reference_experiment,
)

_PARAM_FIELDS = (
    "M_motor",
    "M_load",
    "m_motor",
    "m_worm",
    "m_wormwheel",
    "n",
    "k",
    "alpha",
    "tau_M_max",
    "tau_m_max",
    "k_t_M",
    "k_t_m",
    "V_supply",
    "delta_l_max",
)

_SUPERVISOR_FIELDS = ("q_eq_target", "pos_tol", "defl_tol", "vel_tol", "kp", "kd")

_RUN_FIELDS_FLOAT = (
    "dt",
    "q_eq_initial",
    "settle_trim_kd",
    "settle_window",
    "q_eq_limit",
)

_RUN_FIELDS_INT = ("decimation", "seed", "control_hold_steps")

_LOAD_FIELDS = (
    "kind",
    "m_bar",
    "l_bar",
    "m_payload",
    "l_payload",
    "g",
    "table_t",
    "table_tau",
)

_PHASE_FIELDS = {
    "hold": {"duration"},
    "attach_payload": {"mass", "lever"},
    "detach_payload": set(),
    "change_equilibrium": {"target", "timeout"},
    "settle_wait": {"tolerance", "timeout"},
}


def _parse_assignments(text: str, err: type, label: str) -> Dict[str, str]:
    """Tokenize ``key = value`` lines into an ordered dict of strings."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise err(f"{label}: line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise err(f"{label}: line {lineno}: empty key")
        if not value:
            raise err(f"{label}: line {lineno}: empty value for {key!r}")
        if key in out:
            raise err(f"{label}: line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _to_float(key: str, value: str, err: type) -> float:
    try:
        return float(value)
    except ValueError:
        raise err(f"value for {key!r} is not a number: {value!r}") from None


def _to_int(key: str, value: str, err: type) -> int:
    try:
        return int(value)
    except ValueError:
        raise err(f"value for {key!r} is not an integer: {value!r}") from None


def _to_float_list(key: str, value: str, err: type) -> Tuple[float, ...]:
    parts = [p.strip() for p in value.split(",")]
    if not parts or any(not p for p in parts):
        raise err(f"value for {key!r} is not a comma-separated number list: {value!r}")
    return tuple(_to_float(key, p, err) for p in parts)


def _build_load(fields: Dict[str, str]) -> LoadModel:
    kind = fields.get("kind", "none").lower()
    given = set(fields) - {"kind"}
    if kind == "none":
        if given:
            raise ConfigError(f"load.kind=none accepts no other load fields, got {sorted(given)}")
        return LoadModel.none()
    if kind == "gravity_pendulum":
        allowed = {"m_bar", "l_bar", "m_payload", "l_payload", "g"}
        extra = given - allowed
        if extra:
            raise ConfigError(f"unknown gravity_pendulum load fields: {sorted(extra)}")
        kwargs = {name: _to_float(f"load.{name}", fields[name], ConfigError) for name in given}
        try:
            return LoadModel.gravity_pendulum(
                m_bar=kwargs.get("m_bar", 0.0),
                l_bar=kwargs.get("l_bar", 0.0),
                m_payload=kwargs.get("m_payload", 0.0),
                l_payload=kwargs.get("l_payload", 0.0),
                **({"g": kwargs["g"]} if "g" in kwargs else {}),
            )
        except ValueError as exc:
            raise ConfigError(f"invalid load: {exc}") from None
    if kind == "scripted":
        extra = given - {"table_t", "table_tau"}
        if extra:
            raise ConfigError(f"unknown scripted load fields: {sorted(extra)}")
        if "table_t" not in fields or "table_tau" not in fields:
            raise ConfigError("scripted load requires load.table_t and load.table_tau")
        times = _to_float_list("load.table_t", fields["table_t"], ConfigError)
        torques = _to_float_list("load.table_tau", fields["table_tau"], ConfigError)
        try:
            return LoadModel.scripted(times, torques)
        except ValueError as exc:
            raise ConfigError(f"invalid scripted load: {exc}") from None
    raise ConfigError(f"unknown load.kind: {kind!r}")


def load_config(path: str) -> RunConfig:
    """Read a run configuration file, filling gaps with reference values."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    return parse_config(text, label=path)


def parse_config(text: str, label: str = "<config>") -> RunConfig:
    assignments = _parse_assignments(text, ConfigError, label)
    _, ref = reference_experiment()

    params_over: Dict[str, float] = {}
    sup_over: Dict[str, float] = {}
    run_over: Dict[str, object] = {}
    load_fields: Dict[str, str] = {}

    for key, value in assignments.items():
        section, _, field = key.partition(".")
        if not field:
            raise ConfigError(f"{label}: key {key!r} has no section prefix")
        if section == "params":
            if field not in _PARAM_FIELDS:
                raise ConfigError(f"{label}: unknown key {key!r}")
            params_over[field] = _to_float(key, value, ConfigError)
        elif section == "supervisor":
            if field not in _SUPERVISOR_FIELDS:
                raise ConfigError(f"{label}: unknown key {key!r}")
            sup_over[field] = _to_float(key, value, ConfigError)
        elif section == "run":
            if field in _RUN_FIELDS_FLOAT:
                run_over[field] = _to_float(key, value, ConfigError)
            elif field in _RUN_FIELDS_INT:
                run_over[field] = _to_int(key, value, ConfigError)
            else:
                raise ConfigError(f"{label}: unknown key {key!r}")
        elif section == "load":
            if field not in _LOAD_FIELDS:
                raise ConfigError(f"{label}: unknown key {key!r}")
            load_fields[field] = value
        else:
            raise ConfigError(f"{label}: unknown key {key!r}")

    try:
        params = dataclasses.replace(ref.params, **params_over) if params_over else ref.params
    except ValueError as exc:
        raise ConfigError(f"{label}: invalid params: {exc}") from None
    try:
        supervisor = (
            dataclasses.replace(ref.supervisor, **sup_over) if sup_over else ref.supervisor
        )
    except ValueError as exc:
        raise ConfigError(f"{label}: invalid supervisor settings: {exc}") from None
    base_load = _build_load(load_fields) if load_fields else ref.base_load
    try:
        return dataclasses.replace(
            ref, params=params, supervisor=supervisor, base_load=base_load, **run_over
        )
    except (ValueError, ScenarioError) as exc:
        raise ConfigError(f"{label}: invalid run settings: {exc}") from None


def load_scenario(path: str) -> ScenarioScript:
    """Read a scenario script file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path!r}: {exc}") from None
    return parse_scenario(text, label=path)


def parse_scenario(text: str, label: str = "<scenario>") -> ScenarioScript:
    assignments = _parse_assignments(text, ScenarioError, label)
    grouped: Dict[int, Dict[str, str]] = {}
    for key, value in assignments.items():
        parts = key.split(".")
        if len(parts) != 3 or parts[0] != "phase":
            raise ScenarioError(f"{label}: unknown key {key!r}")
        try:
            index = int(parts[1])
        except ValueError:
            raise ScenarioError(f"{label}: bad phase index in {key!r}") from None
        if index < 0:
            raise ScenarioError(f"{label}: negative phase index in {key!r}")
        grouped.setdefault(index, {})[parts[2]] = value

    if not grouped:
        return ScenarioScript(phases=())
    indices = sorted(grouped)
    if indices != list(range(len(indices))):
        raise ScenarioError(
            f"{label}: phase indices must be contiguous from 0, got {indices}"
        )

    phases: List[object] = []
    for index in indices:
        fields = grouped[index]
        kind = fields.pop("kind", None)
        if kind is None:
            raise ScenarioError(f"{label}: phase.{index} is missing 'kind'")
        kind = kind.lower()
        if kind not in _PHASE_FIELDS:
            raise ScenarioError(f"{label}: phase.{index}: unknown kind {kind!r}")
        extra = set(fields) - _PHASE_FIELDS[kind]
        if extra:
            raise ScenarioError(
                f"{label}: phase.{index}: unknown fields for {kind}: {sorted(extra)}"
            )
        err = ScenarioError
        try:
            if kind == "hold":
                if "duration" not in fields:
                    raise ScenarioError(f"{label}: phase.{index}: hold requires duration")
                phases.append(Hold(duration=_to_float("duration", fields["duration"], err)))
            elif kind == "attach_payload":
                for need in ("mass", "lever"):
                    if need not in fields:
                        raise ScenarioError(
                            f"{label}: phase.{index}: attach_payload requires {need}"
                        )
                phases.append(
                    AttachPayload(
                        mass=_to_float("mass", fields["mass"], err),
                        lever=_to_float("lever", fields["lever"], err),
                    )
                )
            elif kind == "detach_payload":
                phases.append(DetachPayload())
            elif kind == "change_equilibrium":
                if "target" not in fields:
                    raise ScenarioError(
                        f"{label}: phase.{index}: change_equilibrium requires target"
                    )
                kwargs = {"target": _to_float("target", fields["target"], err)}
                if "timeout" in fields:
                    kwargs["timeout"] = _to_float("timeout", fields["timeout"], err)
                phases.append(ChangeEquilibrium(**kwargs))
            else:
                kwargs = {}
                if "tolerance" in fields:
                    kwargs["tolerance"] = _to_float("tolerance", fields["tolerance"], err)
                if "timeout" in fields:
                    kwargs["timeout"] = _to_float("timeout", fields["timeout"], err)
                phases.append(SettleWait(**kwargs))
        except ValueError as exc:
            raise ScenarioError(f"{label}: phase.{index}: {exc}") from None
    return ScenarioScript(phases=tuple(phases))


def dump_config(cfg: RunConfig) -> str:
    """Render a RunConfig back to the flat text format.

    The output lists every field explicitly, so parsing it again yields
    an equivalent configuration regardless of future default changes.
    """
    lines: List[str] = []
    for name in _PARAM_FIELDS:
        lines.append(f"params.{name} = {getattr(cfg.params, name)!r}")
    load = cfg.base_load
    if load.kind is LoadKind.NONE:
        lines.append("load.kind = none")
    elif load.kind is LoadKind.GRAVITY_PENDULUM:
        lines.append("load.kind = gravity_pendulum")
        for name in ("m_bar", "l_bar", "m_payload", "l_payload", "g"):
            lines.append(f"load.{name} = {getattr(load, name)!r}")
    else:
        lines.append("load.kind = scripted")
        lines.append("load.table_t = " + ", ".join(repr(v) for v in load.table_t))
        lines.append("load.table_tau = " + ", ".join(repr(v) for v in load.table_tau))
    for name in _SUPERVISOR_FIELDS:
        lines.append(f"supervisor.{name} = {getattr(cfg.supervisor, name)!r}")
    for name in _RUN_FIELDS_FLOAT:
        lines.append(f"run.{name} = {getattr(cfg, name)!r}")
    for name in _RUN_FIELDS_INT:
        lines.append(f"run.{name} = {getattr(cfg, name)!r}")
    return "\n".join(lines) + "\n"


def dump_scenario(script: ScenarioScript) -> str:
    """Render a ScenarioScript back to the flat text format."""
    lines: List[str] = []
    for i, phase in enumerate(script.phases):
        if isinstance(phase, Hold):
            lines.append(f"phase.{i}.kind = hold")
            lines.append(f"phase.{i}.duration = {phase.duration!r}")
        elif isinstance(phase, AttachPayload):
            lines.append(f"phase.{i}.kind = attach_payload")
            lines.append(f"phase.{i}.mass = {phase.mass!r}")
            lines.append(f"phase.{i}.lever = {phase.lever!r}")
        elif isinstance(phase, DetachPayload):
            lines.append(f"phase.{i}.kind = detach_payload")
        elif isinstance(phase, ChangeEquilibrium):
            lines.append(f"phase.{i}.kind = change_equilibrium")
            lines.append(f"phase.{i}.target = {phase.target!r}")
            lines.append(f"phase.{i}.timeout = {phase.timeout!r}")
        elif isinstance(phase, SettleWait):
            lines.append(f"phase.{i}.kind = settle_wait")
            lines.append(f"phase.{i}.tolerance = {phase.tolerance!r}")
            lines.append(f"phase.{i}.timeout = {phase.timeout!r}")
        else:
            raise ScenarioError(f"cannot serialize phase {phase!r}")
    return "\n".join(lines) + ("\n" if lines else "")
