"""Current, power and energy estimation, and the telemetry record type.

Electrical power is estimated the way a current-commanded drive reports
it: I = tau / k_t and p = |I| * V.  That is an estimator, not a loss
model, and it is never negative.  A separate signed mechanical power
channel (tau * omega) feeds the energy-balance bookkeeping; the two
agree only in sign-definite motoring conditions.

Energy integrals are trapezoidal between consecutive samples.  Records
produced by the scenario runner integrate at the simulation rate and
are then decimated, so their E columns are finer than re-integrating
the decimated stream would give.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .core import (
    ActuatorParams,
    ActuatorState,
    OperationMode,
    equilibrium_position,
    equivalent_inertia_load,
    spring_deflection,
    spring_energy,
)
from .dynamics import MotorCommand
from .loads import LoadModel, gravity_moment, load_inertia

__all__ = [
    "CSV_COLUMNS",
    "TelemetryRecord",
    "motor_current",
    "electrical_power",
    "mechanical_power",
    "make_record",
    "accumulate",
    "direct_drive_counterfactual",
]

#: Column order of the telemetry CSV; a compatibility contract.
CSV_COLUMNS = (
    "t",
    "q_M",
    "q_eq",
    "delta_l",
    "qd_M",
    "qd_m",
    "tau_M_cmd",
    "tau_m_cmd",
    "tau_spring",
    "I_M",
    "I_m",
    "p_M_elec",
    "p_m_elec",
    "p_M_mech",
    "p_m_mech",
    "E_M",
    "E_m",
    "E_spring",
    "mode",
)


@dataclass(frozen=True)
class TelemetryRecord:
    """One telemetry sample; field order matches :data:`CSV_COLUMNS`.

    ``tau_spring`` is the holding torque k*delta_l (the torque the
    spring exerts on the adjuster side scaled back to the load shaft);
    the torque the spring applies to the load shaft is its negative.
    ``E_M``/``E_m`` are running integrals of electrical power;
    ``E_spring`` is the stored elastic energy at this instant.
    """

    t: float
    q_M: float
    q_eq: float
    delta_l: float
    qd_M: float
    qd_m: float
    tau_M_cmd: float
    tau_m_cmd: float
    tau_spring: float
    I_M: float
    I_m: float
    p_M_elec: float
    p_m_elec: float
    p_M_mech: float
    p_m_mech: float
    E_M: float
    E_m: float
    E_spring: float
    mode: OperationMode


def motor_current(tau: float, k_t: float) -> float:
    """Commanded current [A] for torque ``tau`` with constant ``k_t``."""
    if k_t <= 0.0:
        raise ValueError("k_t must be > 0")
    return tau / k_t


def electrical_power(I: float, V: float) -> float:
    """Estimated electrical power draw |I| * V [W]."""
    if V <= 0.0:
        raise ValueError("V must be > 0")
    return abs(I) * V


def mechanical_power(tau: float, omega: float) -> float:
    """Signed shaft power tau * omega [W]; negative when regenerating."""
    return tau * omega


def make_record(
    state: ActuatorState,
    cmd: MotorCommand,
    params: ActuatorParams,
    E_M: float = 0.0,
    E_m: float = 0.0,
) -> TelemetryRecord:
    """A fully derived record for one sample, with given energy totals."""
    delta_l = spring_deflection(state.q_M, state.q_m, params.n)
    I_M = motor_current(cmd.tau_M, params.k_t_M)
    I_m = motor_current(cmd.tau_m, params.k_t_m)
    return TelemetryRecord(
        t=state.t,
        q_M=state.q_M,
        q_eq=equilibrium_position(state.q_m, params.n),
        delta_l=delta_l,
        qd_M=state.qd_M,
        qd_m=state.qd_m,
        tau_M_cmd=cmd.tau_M,
        tau_m_cmd=cmd.tau_m,
        tau_spring=params.k * delta_l,
        I_M=I_M,
        I_m=I_m,
        p_M_elec=electrical_power(I_M, params.V_supply),
        p_m_elec=electrical_power(I_m, params.V_supply),
        p_M_mech=mechanical_power(cmd.tau_M, state.qd_M),
        p_m_mech=mechanical_power(cmd.tau_m, state.qd_m),
        E_M=E_M,
        E_m=E_m,
        E_spring=spring_energy(delta_l, params),
        mode=state.mode,
    )


def accumulate(
    prev: TelemetryRecord | None,
    state: ActuatorState,
    cmd: MotorCommand,
    params: ActuatorParams,
    dt: float,
) -> TelemetryRecord:
    """Next record after ``dt``, advancing the energy integrals.

    Trapezoidal rule between the previous sample's power and this one's;
    with ``prev=None`` the integrals start at zero.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if not math.isfinite(dt):
        raise ValueError("dt must be finite")
    rec = make_record(state, cmd, params)
    if prev is None:
        return rec
    E_M = prev.E_M + 0.5 * (prev.p_M_elec + rec.p_M_elec) * dt
    E_m = prev.E_m + 0.5 * (prev.p_m_elec + rec.p_m_elec) * dt
    return replace(rec, E_M=E_M, E_m=E_m)


def direct_drive_counterfactual(
    records: list[TelemetryRecord],
    params: ActuatorParams,
    load: LoadModel | None = None,
) -> list[float]:
    """Electrical power [W] a springless direct drive would need per sample.

    Reconstructs the main-shaft acceleration from the recorded velocity
    trace (central differences; one-sided at the ends), forms the torque
    the single motor would need (inertial plus gravity), and converts it
    through the electrical estimator.
    """
    count = len(records)
    if count == 0:
        return []
    M_total = equivalent_inertia_load(params)
    if load is not None:
        M_total = M_total + load_inertia(load)
    powers = []
    for i, rec in enumerate(records):
        if count == 1:
            qdd = 0.0
        elif i == 0:
            nxt = records[1]
            qdd = (nxt.qd_M - rec.qd_M) / (nxt.t - rec.t)
        elif i == count - 1:
            prv = records[i - 1]
            qdd = (rec.qd_M - prv.qd_M) / (rec.t - prv.t)
        else:
            prv, nxt = records[i - 1], records[i + 1]
            qdd = (nxt.qd_M - prv.qd_M) / (nxt.t - prv.t)
        tau_g = gravity_moment(load, rec.q_M) if load is not None else 0.0
        tau_cf = M_total * qdd - tau_g
        powers.append(electrical_power(motor_current(tau_cf, params.k_t_M), params.V_supply))
    return powers
