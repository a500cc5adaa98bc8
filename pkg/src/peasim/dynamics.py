"""Mode-aware equations of motion and the fixed-step integrator.

The plant has two shafts coupled by the spring through the worm drive.
In virtual direct-drive mode both shafts integrate; in parallel elastic
mode the worm self-locks, which is realized exactly by freezing
(q_m, qd_m) instead of integrating a stiff constraint force.  Mode
changes never happen inside a step: the supervisor decides them from
sampled state at step boundaries and applies them with
:func:`mode_transition`.

The stepper is classical fourth-order Runge-Kutta at a fixed dt.  By
default the controller callback is re-evaluated at every substage, so a
state-feedback law is integrated as part of the continuous dynamics;
``command_update="hold"`` instead samples the command once per step and
holds it (a zero-order hold, modeling a discrete controller at the
integration rate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .core import (
    ActuatorParams,
    ActuatorState,
    OperationMode,
    equivalent_inertia_adjuster,
    equivalent_inertia_load,
    spring_deflection,
)
from .errors import NonFiniteStateError, SpringOverdeflectionError
from .loads import LoadModel, external_torque, load_inertia

__all__ = ["MotorCommand", "accelerations", "step", "mode_transition"]

Controller = Callable[[ActuatorState, float], "MotorCommand"]


@dataclass(frozen=True)
class MotorCommand:
    """Torques applied by the two motors at their own shafts [Nm].

    Saturation is the controller's job; the dynamics apply these as
    given.  In parallel elastic mode ``tau_m`` is ignored (the adjuster
    shaft is locked).
    """

    tau_M: float
    tau_m: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tau_M) and math.isfinite(self.tau_m)):
            raise ValueError("motor torques must be finite")


def accelerations(
    state: ActuatorState,
    cmd: MotorCommand,
    params: ActuatorParams,
    load: LoadModel | None = None,
) -> tuple[float, float]:
    """Shaft accelerations (qdd_M, qdd_m) [rad/s^2] for the current mode.

    Raises :class:`SpringOverdeflectionError` when |dl| exceeds the
    spring's range; the model is invalid beyond it, so this is a fault
    rather than a clamp.
    """
    n = params.n
    delta_l = spring_deflection(state.q_M, state.q_m, n)
    if abs(delta_l) > params.delta_l_max:
        raise SpringOverdeflectionError(
            f"|delta_l| = {abs(delta_l):.6g} rad exceeds delta_l_max = "
            f"{params.delta_l_max:.6g} rad"
        )
    M_total = equivalent_inertia_load(params)
    tau_ext = 0.0
    if load is not None:
        M_total = M_total + load_inertia(load)
        tau_ext = external_torque(load, state.q_M, state.t)
    tau_spring_M = -(params.k * delta_l)
    qdd_M = (cmd.tau_M + tau_spring_M + tau_ext) / M_total
    if state.mode is OperationMode.PARALLEL_ELASTIC:
        return qdd_M, 0.0
    m_eq = equivalent_inertia_adjuster(params)
    if m_eq <= 0.0:
        raise ValueError("adjuster inertia must be > 0 to integrate the adjuster shaft")
    tau_spring_m = params.k * delta_l / n
    qdd_m = (cmd.tau_m + tau_spring_m) / m_eq
    return qdd_M, qdd_m


def step(
    state: ActuatorState,
    controller: Controller,
    params: ActuatorParams,
    load: LoadModel | None = None,
    dt: float = 1e-4,
    command_update: str = "substage",
) -> ActuatorState:
    """Advance one RK4 step of length ``dt``.

    ``controller(state, t)`` must be a pure function returning the
    :class:`MotorCommand` for the given state; with
    ``command_update="substage"`` (default) it is called at each RK4
    substage, with ``"hold"`` once at the step start.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if command_update not in ("substage", "hold"):
        raise ValueError("command_update must be 'substage' or 'hold'")
    hold = command_update == "hold"
    pe = state.mode is OperationMode.PARALLEL_ELASTIC
    t = state.t
    q_M, qd_M, q_m, qd_m = state.q_M, state.qd_M, state.q_m, state.qd_m

    def eval_stage(qM, qdM, qm, qdm, ts, held):
        try:
            sub = ActuatorState(q_M=qM, qd_M=qdM, q_m=qm, qd_m=0.0 if pe else qdm,
                                mode=state.mode, t=ts)
        except ValueError as exc:
            raise NonFiniteStateError(f"state became non-finite at t = {ts:.6g} s") from exc
        cmd = held if held is not None else controller(sub, ts)
        aM, am = accelerations(sub, cmd, params, load)
        return cmd, aM, am

    cmd1, a1M, a1m = eval_stage(q_M, qd_M, q_m, qd_m, t, None)
    held = cmd1 if hold else None
    h2 = 0.5 * dt
    s2 = (q_M + h2 * qd_M, qd_M + h2 * a1M, q_m + h2 * qd_m, qd_m + h2 * a1m)
    _, a2M, a2m = eval_stage(s2[0], s2[1], q_m if pe else s2[2], s2[3], t + h2, held)
    qd2M, qd2m = s2[1], s2[3]
    s3 = (q_M + h2 * qd2M, qd_M + h2 * a2M, q_m + h2 * qd2m, qd_m + h2 * a2m)
    _, a3M, a3m = eval_stage(s3[0], s3[1], q_m if pe else s3[2], s3[3], t + h2, held)
    qd3M, qd3m = s3[1], s3[3]
    s4 = (q_M + dt * qd3M, qd_M + dt * a3M, q_m + dt * qd3m, qd_m + dt * a3m)
    _, a4M, a4m = eval_stage(s4[0], s4[1], q_m if pe else s4[2], s4[3], t + dt, held)
    qd4M, qd4m = s4[1], s4[3]

    sixth = dt / 6.0
    new_q_M = q_M + sixth * (qd_M + 2.0 * qd2M + 2.0 * qd3M + qd4M)
    new_qd_M = qd_M + sixth * (a1M + 2.0 * a2M + 2.0 * a3M + a4M)
    if pe:
        new_q_m, new_qd_m = q_m, qd_m
    else:
        new_q_m = q_m + sixth * (qd_m + 2.0 * qd2m + 2.0 * qd3m + qd4m)
        new_qd_m = qd_m + sixth * (a1m + 2.0 * a2m + 2.0 * a3m + a4m)
    new_t = t + dt
    for v in (new_q_M, new_qd_M, new_q_m, new_qd_m):
        if not math.isfinite(v):
            raise NonFiniteStateError(f"state became non-finite at t = {new_t:.6g} s")
    return ActuatorState(
        q_M=new_q_M, qd_M=new_qd_M, q_m=new_q_m, qd_m=new_qd_m, mode=state.mode, t=new_t
    )


def mode_transition(state: ActuatorState, new_mode: OperationMode) -> ActuatorState:
    """Switch operation mode; entering parallel elastic locks the worm.

    Locking snaps qd_m to exactly 0 (the transient of the adjuster shaft
    coming to rest against the self-locking worm is not modeled); all
    positions and the main-shaft velocity are preserved.
    """
    if new_mode is state.mode:
        return state
    if new_mode is OperationMode.PARALLEL_ELASTIC:
        return replace(state, mode=new_mode, qd_m=0.0)
    return replace(state, mode=new_mode)
