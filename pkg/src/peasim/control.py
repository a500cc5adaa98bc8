"""Mode controllers and the equilibrium-change supervisor.

Spring-nulling law
------------------

The virtual direct-drive controller makes the adjuster motor cancel the
spring so the main motor sees a springless plant.  Its torque form is
derived from the two shaft equations (inertias M for the main shaft
including load, m for the adjuster shaft; worm ratio n; stiffness k;
external torque tau_ext on the main shaft only):

    M qdd_M = tau_M - k*dl + tau_ext
    m qdd_m = tau_m + k*dl / n          with  dl = q_M - q_m / n

Differentiating the deflection twice,

    dl'' = qdd_M - qdd_m / n
         = (tau_M - k*dl + tau_ext) / M - (tau_m + k*dl / n) / (n m).

Demanding the critically damped target dynamics dl'' = -2a dl' - a^2 dl
(pole -a, both roots) and solving for tau_m, with tau_ext dropped from
the law (see below):

    tau_m = n (m/M) tau_M - (1 + n^2 m/M) (k*dl / n) + n m (2a dl' + a^2 dl)

The first term is the feedforward share of the main torque (the
force-ratio term), the second cancels the spring reaction plus its
effect on the main shaft, the third is the stabilizing feedback.  With
tau_ext present the closed loop becomes dl'' = -2a dl' - a^2 dl +
tau_ext/M, so a constant external torque leaves a standing offset
dl = tau_ext / (M a^2).  The law deliberately omits a gravity
feedforward; the supervisor's deflection gate simply refuses to lock
until the offset is inside tolerance, which in practice means
equilibrium changes are made with the external torque near zero or with
a chosen large enough.

Supervisor
----------

The supervisor runs the equilibrium change as a three-part sequence:
unlock (enter virtual direct-drive) when the target differs from the
current equilibrium, drive the main shaft to the target with a
saturated PD while the adjuster tracks, and lock (back to parallel
elastic, adjuster velocity snapped to zero) once position, deflection
and deflection-rate gates all pass.  The adjuster command is computed
from the saturated, actually-applied main torque: feeding the raw PD
output into the law would push the adjuster into saturation whenever
the PD saturates and leave the spring visibly wound up during the
transition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    ActuatorParams,
    ActuatorState,
    OperationMode,
    equilibrium_position,
    equivalent_inertia_adjuster,
    equivalent_inertia_load,
    spring_deflection,
)
from .loads import LoadModel, load_inertia

__all__ = [
    "SupervisorConfig",
    "pe_command",
    "vdd_command",
    "pd_position_command",
    "saturate",
    "supervisor_step",
]


@dataclass(frozen=True)
class SupervisorConfig:
    """Targets, gates and gains for one equilibrium change.

    Attributes:
        q_eq_target: desired new equilibrium position [rad].
        pos_tol: arrival tolerance on the main-shaft angle [rad].
        defl_tol: |dl| required before locking [rad].
        vel_tol: |dl'| required before locking [rad/s].
        kp: main-motor PD position gain [Nm/rad].
        kd: main-motor PD velocity gain [Nm*s/rad].
    """

    q_eq_target: float
    pos_tol: float = 1e-3
    defl_tol: float = 1e-3
    vel_tol: float = 1e-2
    kp: float = 20.0
    kd: float = 4.0

    def __post_init__(self) -> None:
        if self.pos_tol <= 0.0 or self.defl_tol <= 0.0 or self.vel_tol <= 0.0:
            raise ValueError("tolerances must be > 0")
        if self.kp <= 0.0:
            raise ValueError("kp must be > 0")
        if self.kd < 0.0:
            raise ValueError("kd must be >= 0")


def pe_command() -> float:
    """Adjuster torque in parallel elastic mode: the motor is off."""
    return 0.0


def vdd_command(
    state: ActuatorState,
    tau_M: float,
    params: ActuatorParams,
    load: LoadModel | None = None,
) -> float:
    """Adjuster torque that nulls the spring (see module docstring).

    ``tau_M`` must be the main-motor torque actually applied alongside
    this command.  ``load`` contributes its inertia to the main-shaft
    total; omit it for a bare actuator.
    """
    n = params.n
    m_eq = equivalent_inertia_adjuster(params)
    M_total = equivalent_inertia_load(params)
    if load is not None:
        M_total = M_total + load_inertia(load)
    delta_l = spring_deflection(state.q_M, state.q_m, n)
    dd_l = state.qd_M - state.qd_m / n
    ratio = m_eq / M_total
    tau_spring_m = params.k * delta_l / n
    return (
        n * ratio * tau_M
        - (1.0 + n * n * ratio) * tau_spring_m
        + n * m_eq * (2.0 * params.alpha * dd_l + params.alpha * params.alpha * delta_l)
    )


def pd_position_command(state: ActuatorState, q_des: float, cfg: SupervisorConfig) -> float:
    """Unsaturated main-motor PD torque toward ``q_des`` [Nm]."""
    return cfg.kp * (q_des - state.q_M) - cfg.kd * state.qd_M


def saturate(tau: float, limit: float) -> float:
    """Clamp ``tau`` to [-limit, +limit]."""
    if tau > limit:
        return limit
    if tau < -limit:
        return -limit
    return tau


def supervisor_step(
    state: ActuatorState,
    cfg: SupervisorConfig,
    params: ActuatorParams,
    load: LoadModel | None = None,
) -> tuple[OperationMode, tuple[float, float]]:
    """One supervisor decision: next mode plus (tau_M, tau_m) to apply.

    The caller realizes a returned mode change with
    :func:`peasim.dynamics.mode_transition` before integrating.  In
    parallel elastic mode the adjuster command is exactly 0.
    """
    n = params.n
    if state.mode is OperationMode.PARALLEL_ELASTIC:
        q_eq = equilibrium_position(state.q_m, n)
        if abs(cfg.q_eq_target - q_eq) <= cfg.pos_tol:
            return OperationMode.PARALLEL_ELASTIC, (0.0, 0.0)
        # Target moved: unlock and fall through to the tracking branch.
    delta_l = spring_deflection(state.q_M, state.q_m, n)
    dd_l = state.qd_M - state.qd_m / n
    if (
        abs(state.q_M - cfg.q_eq_target) <= cfg.pos_tol
        and abs(delta_l) <= cfg.defl_tol
        and abs(dd_l) <= cfg.vel_tol
    ):
        return OperationMode.PARALLEL_ELASTIC, (0.0, 0.0)
    tau_M = saturate(pd_position_command(state, cfg.q_eq_target, cfg), params.tau_M_max)
    tau_m = saturate(vdd_command(state, tau_M, params, load), params.tau_m_max)
    return OperationMode.VIRTUAL_DIRECT_DRIVE, (tau_M, tau_m)
