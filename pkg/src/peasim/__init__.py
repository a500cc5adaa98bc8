"""Simulator and controller library for an adjustable-equilibrium
parallel elastic actuator.

A large direct-drive motor works in parallel with a torsion spring whose
rest position is set by a small motor through a self-locking worm drive.
The package models the two operating modes (parallel-elastic with the
adjuster frozen, virtual direct drive with the spring actively nulled),
the supervisor that moves the equilibrium between set points, telemetry
and energy bookkeeping, and a scripted scenario harness with CSV output
and a command line front end.

The hot integration loop has a compiled backend with a pure-Python
fallback; set ``PEASIM_PURE_PYTHON=1`` to force the fallback.
"""

from .control import (
    SupervisorConfig,
    pd_position_command,
    pe_command,
    saturate,
    supervisor_step,
    vdd_command,
)
from .core import (
    ActuatorParams,
    ActuatorState,
    DesignRatioWarning,
    FORCE_RATIO_WARN_THRESHOLD,
    OperationMode,
    equilibrium_position,
    equivalent_inertia_adjuster,
    equivalent_inertia_load,
    spring_deflection,
    spring_energy,
    spring_torques,
    validate_design,
)
from .dynamics import MotorCommand, accelerations, mode_transition, step
from .engine import backend_name
from .errors import (
    ConfigError,
    NoStaticEquilibriumError,
    NonFiniteStateError,
    PeasimError,
    ScenarioError,
    ScriptedTorqueRangeError,
    SettleTimeoutError,
    SimulationFault,
    SpringOverdeflectionError,
)
from .loads import (
    LoadKind,
    LoadModel,
    STANDARD_GRAVITY,
    external_torque,
    gravity_moment,
    load_inertia,
    with_payload,
    without_payload,
)
from .telemetry import (
    CSV_COLUMNS,
    TelemetryRecord,
    accumulate,
    direct_drive_counterfactual,
    electrical_power,
    make_record,
    mechanical_power,
    motor_current,
)
from .scenario import (
    AttachPayload,
    ChangeEquilibrium,
    DetachPayload,
    Hold,
    PhaseSummary,
    RunConfig,
    RunResult,
    ScenarioScript,
    SettleWait,
    reference_experiment,
    run_scenario,
    static_equilibrium_solve,
    write_csv,
)
from .config_io import (
    dump_config,
    dump_scenario,
    load_config,
    load_scenario,
    parse_config,
    parse_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "ActuatorParams",
    "ActuatorState",
    "AttachPayload",
    "CSV_COLUMNS",
    "ChangeEquilibrium",
    "ConfigError",
    "DesignRatioWarning",
    "DetachPayload",
    "FORCE_RATIO_WARN_THRESHOLD",
    "Hold",
    "LoadKind",
    "LoadModel",
    "MotorCommand",
    "NoStaticEquilibriumError",
    "NonFiniteStateError",
    "OperationMode",
    "PeasimError",
    "PhaseSummary",
    "RunConfig",
    "RunResult",
    "STANDARD_GRAVITY",
    "ScenarioError",
    "ScenarioScript",
    "ScriptedTorqueRangeError",
    "SettleTimeoutError",
    "SettleWait",
    "SimulationFault",
    "SpringOverdeflectionError",
    "SupervisorConfig",
    "TelemetryRecord",
    "accelerations",
    "accumulate",
    "backend_name",
    "direct_drive_counterfactual",
    "dump_config",
    "dump_scenario",
    "electrical_power",
    "equilibrium_position",
    "equivalent_inertia_adjuster",
    "equivalent_inertia_load",
    "external_torque",
    "gravity_moment",
    "load_config",
    "load_inertia",
    "load_scenario",
    "make_record",
    "mechanical_power",
    "mode_transition",
    "motor_current",
    "parse_config",
    "parse_scenario",
    "pd_position_command",
    "pe_command",
    "reference_experiment",
    "run_scenario",
    "saturate",
    "spring_deflection",
    "spring_energy",
    "spring_torques",
    "static_equilibrium_solve",
    "step",
    "supervisor_step",
    "validate_design",
    "vdd_command",
    "with_payload",
    "without_payload",
    "write_csv",
    "__version__",
]
