"""Scenario scripting, the experiment runner, and CSV telemetry output.

A scenario is a sequence of phases executed back to back on one
actuator: timed zero-torque holds, instantaneous payload attach/detach
events, supervised equilibrium changes, and settle-waits that apply a
velocity-damping trim on the main motor until the shaft is quiet.  The
runner integrates each phase through the selected simulation backend,
keeps full-rate energy accounting, and emits decimated telemetry
records plus a per-phase summary.

``reference_experiment`` builds the canned three-part protocol on the
desk-scale configuration: hold a 2.3 kg payload at a -45 deg
equilibrium, change the equilibrium to +45 deg unloaded, then hold a
4.5 kg payload there.  The bar on the output shaft is modeled as
balanced (counterweighted): it contributes inertia but no gravity
moment.  An unbalanced 1.9 kg x 0.61 m bar would need about 5.7 Nm at
horizontal, far beyond the 1.6 Nm main motor, so no controller could
move it through the equilibrium change with the spring nulled; the
lift energy over the stroke alone exceeds the motor's available work.
The payload lever arm is calibrated so the 2.3 kg payload's gravity
torque at the 45 deg design point is the 4.7 Nm the spring is sized to
hold; the 4.5 kg phase then predicts its own holding torque.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import engine
from ._kernel import (
    ACC_E_M,
    ACC_E_m,
    ACC_MAX_DL,
    ACC_MAX_TAU_M,
    ACC_MAX_TAU_m,
    ACC_W_EXT,
    ACC_W_M,
    ACC_W_m,
    IO_GSTEP,
    IO_ROWS,
    PP_ALPHA,
    PP_DL_MAX,
    PP_DT,
    PP_GRAV_C,
    PP_K,
    PP_KT_M,
    PP_KT_m,
    PP_M_EQ,
    PP_M_TOT,
    PP_N,
    PP_TAU_M_MAX,
    PP_TAU_m_MAX,
    PP_V,
    REGIME_HOLD,
    REGIME_PE_TRIM,
    REGIME_VDD_SUPER,
    RP_DEFL_TOL,
    RP_KD,
    RP_KD_TRIM,
    RP_KP,
    RP_POS_TOL,
    RP_SETTLE_TOL,
    RP_TARGET,
    RP_VEL_TOL,
    STATUS_ARRIVED,
    STATUS_NONFINITE,
    STATUS_OVERDEFLECT,
    STATUS_SCRIPT_RANGE,
    STATUS_SETTLED,
)
from .control import SupervisorConfig
from .core import (
    ActuatorParams,
    ActuatorState,
    OperationMode,
    equivalent_inertia_adjuster,
    equivalent_inertia_load,
)
from .errors import (
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
    STANDARD_GRAVITY,
    LoadKind,
    LoadModel,
    external_torque,
    gravity_moment,
    load_inertia,
    with_payload,
    without_payload,
)
from .telemetry import CSV_COLUMNS, TelemetryRecord

__all__ = [
    "Hold",
    "AttachPayload",
    "DetachPayload",
    "ChangeEquilibrium",
    "SettleWait",
    "ScenarioScript",
    "RunConfig",
    "PhaseSummary",
    "RunResult",
    "static_equilibrium_solve",
    "run_scenario",
    "reference_experiment",
    "write_csv",
    "BAR_MASS",
    "BAR_LENGTH",
    "PAYLOAD_SMALL_MASS",
    "PAYLOAD_LARGE_MASS",
    "DESIGN_HOLD_TORQUE",
    "DESIGN_ANGLE",
    "PAYLOAD_LEVER",
]


@dataclass(frozen=True)
class Hold:
    """Both motors off for ``duration`` seconds (parallel elastic hold)."""

    duration: float

    def __post_init__(self) -> None:
        if not (self.duration > 0.0 and math.isfinite(self.duration)):
            raise ScenarioError("hold duration must be a positive finite time")


@dataclass(frozen=True)
class AttachPayload:
    """Instantaneously place a point payload on the pendulum load."""

    mass: float
    lever: float

    def __post_init__(self) -> None:
        if self.mass < 0.0 or self.lever < 0.0:
            raise ScenarioError("payload mass and lever must be >= 0")


@dataclass(frozen=True)
class DetachPayload:
    """Instantaneously remove the attached payload."""


@dataclass(frozen=True)
class ChangeEquilibrium:
    """Move the spring equilibrium to ``target`` via the supervisor."""

    target: float
    timeout: float = 10.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.target):
            raise ScenarioError("equilibrium target must be finite")
        if self.timeout <= 0.0:
            raise ScenarioError("equilibrium-change timeout must be > 0")


@dataclass(frozen=True)
class SettleWait:
    """Damp the main shaft until |qd_M| stays below ``tolerance``.

    Uses the run config's PE-mode damping trim; with the trim gain at 0
    an oscillating load never settles and the phase times out.
    """

    tolerance: float = 1e-3
    timeout: float = 15.0

    def __post_init__(self) -> None:
        if self.tolerance <= 0.0:
            raise ScenarioError("settle tolerance must be > 0")
        if self.timeout <= 0.0:
            raise ScenarioError("settle timeout must be > 0")


Phase = Hold | AttachPayload | DetachPayload | ChangeEquilibrium | SettleWait


@dataclass(frozen=True)
class ScenarioScript:
    """Ordered phases; structural validity is checked at construction."""

    phases: tuple[Phase, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phases", tuple(self.phases))
        attached = False
        for i, ph in enumerate(self.phases):
            if isinstance(ph, AttachPayload):
                if attached:
                    raise ScenarioError(f"phase {i}: a payload is already attached")
                attached = True
            elif isinstance(ph, DetachPayload):
                if not attached:
                    raise ScenarioError(f"phase {i}: no payload to detach")
                attached = False


@dataclass(frozen=True)
class RunConfig:
    """Everything a scenario run needs besides the script itself.

    ``seed`` is reserved for future stochastic extensions; the
    simulation itself is deterministic and ignores it.
    ``control_hold_steps`` of 0 re-evaluates the control laws at the
    RK4 substages (continuous-controller idealization); N >= 1 holds
    each command for N integrator steps (zero-order hold).
    ``settle_trim_kd`` is the PE-mode damping trim gain used by
    settle-wait phases; 0 disables the trim.
    """

    params: ActuatorParams
    base_load: LoadModel
    supervisor: SupervisorConfig
    dt: float = 1e-4
    decimation: int = 10
    out_path: str | None = None
    seed: int = 0
    q_eq_initial: float = 0.0
    control_hold_steps: int = 0
    settle_trim_kd: float = 0.0
    settle_window: float = 0.5
    q_eq_limit: float = math.pi / 2

    def __post_init__(self) -> None:
        if not (0.0 < self.dt <= 1e-2):
            raise ScenarioError("dt must be in (0, 1e-2] s")
        if self.decimation < 1:
            raise ScenarioError("decimation must be >= 1")
        if self.control_hold_steps < 0:
            raise ScenarioError("control_hold_steps must be >= 0")
        if self.settle_trim_kd < 0.0:
            raise ScenarioError("settle_trim_kd must be >= 0")
        if self.settle_window <= 0.0:
            raise ScenarioError("settle_window must be > 0")
        if self.q_eq_limit <= 0.0:
            raise ScenarioError("q_eq_limit must be > 0")
        if abs(self.q_eq_initial) > self.q_eq_limit:
            raise ScenarioError("q_eq_initial outside the configured joint range")


@dataclass(frozen=True)
class PhaseSummary:
    """Per-phase digest; ``records[record_start:record_stop]`` are its rows."""

    index: int
    kind: str
    status: str
    t_start: float
    t_end: float
    max_abs_delta_l: float
    max_abs_tau_M: float
    max_abs_tau_m: float
    E_M_delta: float
    E_m_delta: float
    final_q_eq: float
    record_start: int
    record_stop: int
    transition_duration: float | None = None

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class RunResult:
    """Telemetry records plus per-phase and whole-run energy accounting.

    ``W_M``/``W_m``/``W_ext`` are trapezoidal work integrals of the
    signed mechanical powers at the full simulation rate.
    ``energy_residual`` is |W_total - delta_KE - delta_PE_spring| with
    the kinetic/potential deltas summed per contiguous dynamics segment
    (so instantaneous load swaps and worm-lock events, which happen
    between segments, do not contribute); for a frictionless model it
    is pure integration error.
    """

    records: list[TelemetryRecord]
    phases: tuple[PhaseSummary, ...]
    E_M: float
    E_m: float
    W_M: float
    W_m: float
    W_ext: float
    delta_KE: float
    delta_PE_spring: float
    energy_residual: float
    final_state: ActuatorState
    backend: str


BAR_MASS = 1.9
BAR_LENGTH = 0.61
PAYLOAD_SMALL_MASS = 2.3
PAYLOAD_LARGE_MASS = 4.5
DESIGN_HOLD_TORQUE = 4.7
DESIGN_ANGLE = math.pi / 4
#: Lever arm placing the small payload's design-point gravity torque at
#: DESIGN_HOLD_TORQUE.
PAYLOAD_LEVER = DESIGN_HOLD_TORQUE / (
    PAYLOAD_SMALL_MASS * STANDARD_GRAVITY * math.cos(DESIGN_ANGLE)
)


def static_equilibrium_solve(
    params: ActuatorParams, load: LoadModel | None, q_eq: float
) -> float:
    """Parallel-elastic rest angle: solves k (q - q_eq) = tau_ext(q).

    Bisection over the spring's deflection range around ``q_eq``; the
    returned angle satisfies the torque balance within 1e-10 Nm.  When
    the external torque exceeds the spring everywhere in range there is
    no sign change and :class:`NoStaticEquilibriumError` is raised.
    """
    k = params.k

    def f(q: float) -> float:
        tau_ext = external_torque(load, q, 0.0) if load is not None else 0.0
        return k * (q - q_eq) - tau_ext

    lo = q_eq - params.delta_l_max
    hi = q_eq + params.delta_l_max
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise NoStaticEquilibriumError(
            "no static equilibrium within the deflection range: the external "
            "torque exceeds the spring's capability around "
            f"q_eq = {q_eq:.6g} rad"
        )
    mid = 0.5 * (lo + hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= 1e-10 or mid == lo or mid == hi:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return mid


def reference_experiment() -> tuple[ScenarioScript, RunConfig]:
    """The canned three-part load-holding / equilibrium-change run.

    See the module docstring for the modeling choices (balanced bar,
    calibrated payload lever).  Torque constants and supply voltage are
    placeholders for a plausible drive, not measured values; analyses
    that depend on them are property-level only.
    """
    params = ActuatorParams(
        M_motor=0.01,
        M_load=BAR_MASS * BAR_LENGTH**2 / 3.0,
        m_motor=1.0e-5,
        m_worm=5.0e-6,
        m_wormwheel=3.6e-3,
        n=60.0,
        k=21.0,
        alpha=20.0,
        tau_M_max=1.6,
        tau_m_max=0.0303,
        k_t_M=0.2,
        k_t_m=0.0109,
        V_supply=24.0,
        delta_l_max=math.radians(150.0),
    )
    supervisor = SupervisorConfig(q_eq_target=0.0, kp=20.0, kd=4.0)
    cfg = RunConfig(
        params=params,
        base_load=LoadModel.gravity_pendulum(0.0, 0.0),
        supervisor=supervisor,
        dt=1e-4,
        decimation=10,
        q_eq_initial=0.0,
        settle_trim_kd=5.0,
        settle_window=0.5,
    )
    tol = 2e-7
    script = ScenarioScript(
        phases=(
            ChangeEquilibrium(-DESIGN_ANGLE),
            SettleWait(tol),
            Hold(2.0),
            AttachPayload(PAYLOAD_SMALL_MASS, PAYLOAD_LEVER),
            SettleWait(tol),
            Hold(5.0),
            DetachPayload(),
            SettleWait(tol),
            Hold(2.0),
            ChangeEquilibrium(DESIGN_ANGLE),
            SettleWait(tol),
            Hold(2.0),
            AttachPayload(PAYLOAD_LARGE_MASS, PAYLOAD_LEVER),
            SettleWait(tol),
            Hold(5.0),
            DetachPayload(),
            SettleWait(tol),
            Hold(2.0),
        )
    )
    return script, cfg


def _phase_budget(ph: Phase, dt: float, index: int) -> int:
    """Step budget for a phase; 0 for instantaneous events."""
    if isinstance(ph, Hold):
        steps = int(round(ph.duration / dt))
        if steps < 1:
            raise ScenarioError(f"phase {index}: hold duration shorter than dt")
        return steps
    if isinstance(ph, SettleWait) or isinstance(ph, ChangeEquilibrium):
        steps = int(round(ph.timeout / dt))
        if steps < 1:
            raise ScenarioError(f"phase {index}: timeout shorter than dt")
        return steps
    return 0


def _fill_pp(pp, cfg: RunConfig, load: LoadModel) -> int:
    """Parameter pack for the kernel; returns the script_kind flag."""
    params = cfg.params
    pp[PP_DT] = cfg.dt
    pp[PP_M_TOT] = equivalent_inertia_load(params) + load_inertia(load)
    pp[PP_M_EQ] = equivalent_inertia_adjuster(params)
    pp[PP_N] = params.n
    pp[PP_K] = params.k
    pp[PP_ALPHA] = params.alpha
    pp[PP_TAU_M_MAX] = params.tau_M_max
    pp[PP_TAU_m_MAX] = params.tau_m_max
    pp[PP_KT_M] = params.k_t_M
    pp[PP_KT_m] = params.k_t_m
    pp[PP_V] = params.V_supply
    pp[PP_DL_MAX] = params.delta_l_max
    if load.kind is LoadKind.SCRIPTED:
        pp[PP_GRAV_C] = 0.0
        return 1
    # cos(0) = 1, so this recovers the pendulum's moment coefficient
    # without duplicating the formula from the loads module.
    pp[PP_GRAV_C] = -gravity_moment(load, 0.0)
    return 0


_EMPTY = np.empty(0, dtype=np.float64)


def run_scenario(script: ScenarioScript, cfg: RunConfig) -> RunResult:
    """Execute ``script`` on ``cfg``'s actuator and return the full result.

    Faults raised by the physics (overdeflection, non-finite state,
    scripted-torque range, settle timeout, unfinished equilibrium
    change) carry the index of the offending phase.
    """
    params = cfg.params
    sup = cfg.supervisor
    n = params.n
    k = params.k
    dt = cfg.dt
    m_eq = equivalent_inertia_adjuster(params)
    if m_eq <= 0.0:
        raise ScenarioError("adjuster inertia must be > 0 to run scenarios")

    for i, ph in enumerate(script.phases):
        if isinstance(ph, ChangeEquilibrium) and abs(ph.target) > cfg.q_eq_limit:
            raise ScenarioError(
                f"phase {i}: target {ph.target:.6g} rad outside the joint range "
                f"+/-{cfg.q_eq_limit:.6g} rad"
            )

    q_m0 = n * cfg.q_eq_initial
    q_M0 = static_equilibrium_solve(params, cfg.base_load, cfg.q_eq_initial)
    state0 = ActuatorState(
        q_M=q_M0, qd_M=0.0, q_m=q_m0, qd_m=0.0,
        mode=OperationMode.PARALLEL_ELASTIC, t=0.0,
    )
    if not script.phases:
        return RunResult(
            records=[], phases=(), E_M=0.0, E_m=0.0, W_M=0.0, W_m=0.0,
            W_ext=0.0, delta_KE=0.0, delta_PE_spring=0.0, energy_residual=0.0,
            final_state=state0, backend=engine.backend_name(),
        )

    budgets = [_phase_budget(ph, dt, i) for i, ph in enumerate(script.phases)]
    capacity = sum(b // cfg.decimation + 1 for b in budgets) + 2
    rows = np.empty((capacity, 18), dtype=np.float64)
    row_modes = np.empty(capacity, dtype=np.int8)
    acc = np.zeros(15, dtype=np.float64)
    io = np.zeros(4, dtype=np.int64)
    pp = np.empty(13, dtype=np.float64)
    rp = np.zeros(9, dtype=np.float64)
    x = np.array([q_M0, 0.0, q_m0, 0.0], dtype=np.float64)

    mode_code = 0
    load = cfg.base_load
    window_steps = max(1, int(round(cfg.settle_window / dt)))
    phases_out: list[PhaseSummary] = []
    delta_KE = 0.0
    delta_PE = 0.0

    def seg_energy(M_tot: float) -> tuple[float, float]:
        dl = float(x[0]) - float(x[2]) / n
        ke = 0.5 * M_tot * float(x[1]) * float(x[1]) + 0.5 * m_eq * float(x[3]) * float(x[3])
        return ke, 0.5 * k * dl * dl

    def run_segment(kind: int, max_steps: int, phase_index: int) -> int:
        nonlocal delta_KE, delta_PE
        script_kind = _fill_pp(pp, cfg, load)
        M_tot = float(pp[PP_M_TOT])
        ke0, pe0 = seg_energy(M_tot)
        if load.kind is LoadKind.SCRIPTED:
            ts, taus = np.asarray(load.table_t), np.asarray(load.table_tau)
        else:
            ts, taus = _EMPTY, _EMPTY
        status = engine.simulate_segment(
            x, mode_code, kind, rp, window_steps, cfg.control_hold_steps, pp,
            script_kind, ts, taus, max_steps, cfg.decimation, rows, row_modes,
            acc, io,
        )
        ke1, pe1 = seg_energy(M_tot)
        delta_KE += ke1 - ke0
        delta_PE += pe1 - pe0
        t_fault = float(io[IO_GSTEP]) * dt
        if status == STATUS_OVERDEFLECT:
            raise SpringOverdeflectionError(
                f"spring deflection left its rated range at t = {t_fault:.6g} s",
                phase_index,
            )
        if status == STATUS_NONFINITE:
            raise NonFiniteStateError(
                f"state became non-finite at t = {t_fault:.6g} s", phase_index
            )
        if status == STATUS_SCRIPT_RANGE:
            raise ScriptedTorqueRangeError(
                f"scripted torque table does not cover t = {t_fault:.6g} s",
                phase_index,
            )
        return status

    for idx, ph in enumerate(script.phases):
        t_start = float(io[IO_GSTEP]) * dt
        rec_start = int(io[IO_ROWS])
        E_M0 = acc[ACC_E_M]
        E_m0 = acc[ACC_E_m]
        acc[ACC_MAX_DL] = 0.0
        acc[ACC_MAX_TAU_M] = 0.0
        acc[ACC_MAX_TAU_m] = 0.0
        transition: float | None = None

        if isinstance(ph, AttachPayload):
            if load.kind is not LoadKind.GRAVITY_PENDULUM:
                raise ScenarioError(f"phase {idx}: base load cannot carry a payload")
            if load.m_payload != 0.0:
                raise ScenarioError(f"phase {idx}: a payload is already attached")
            load = with_payload(load, ph.mass, ph.lever)
            status_str = "attached"
        elif isinstance(ph, DetachPayload):
            if load.kind is not LoadKind.GRAVITY_PENDULUM or load.m_payload == 0.0:
                raise ScenarioError(f"phase {idx}: no payload to detach")
            load = without_payload(load)
            status_str = "detached"
        elif isinstance(ph, Hold):
            run_segment(REGIME_HOLD, budgets[idx], idx)
            status_str = "done"
        elif isinstance(ph, SettleWait):
            rp[RP_KD_TRIM] = cfg.settle_trim_kd
            rp[RP_SETTLE_TOL] = ph.tolerance
            status = run_segment(REGIME_PE_TRIM, budgets[idx], idx)
            if status != STATUS_SETTLED:
                raise SettleTimeoutError(
                    f"|qd_M| did not stay below {ph.tolerance:.3g} rad/s within "
                    f"{ph.timeout:.6g} s",
                    idx,
                )
            status_str = "settled"
        else:  # ChangeEquilibrium
            q_eq_now = x[2] / n
            if abs(ph.target - q_eq_now) <= sup.pos_tol:
                status_str = "skipped"
                transition = 0.0
            else:
                rp[RP_TARGET] = ph.target
                rp[RP_POS_TOL] = sup.pos_tol
                rp[RP_DEFL_TOL] = sup.defl_tol
                rp[RP_VEL_TOL] = sup.vel_tol
                rp[RP_KP] = sup.kp
                rp[RP_KD] = sup.kd
                mode_code = 1
                status = run_segment(REGIME_VDD_SUPER, budgets[idx], idx)
                if status != STATUS_ARRIVED:
                    raise SimulationFault(
                        f"equilibrium change to {ph.target:.6g} rad did not "
                        f"complete within {ph.timeout:.6g} s",
                        idx,
                    )
                x[3] = 0.0  # the worm locks: adjuster velocity is discarded
                mode_code = 0
                transition = float(io[IO_GSTEP]) * dt - t_start
                status_str = "arrived"

        t_end = float(io[IO_GSTEP]) * dt
        phases_out.append(
            PhaseSummary(
                index=idx,
                kind=type(ph).__name__,
                status=status_str,
                t_start=t_start,
                t_end=t_end,
                max_abs_delta_l=float(acc[ACC_MAX_DL]),
                max_abs_tau_M=float(acc[ACC_MAX_TAU_M]),
                max_abs_tau_m=float(acc[ACC_MAX_TAU_m]),
                E_M_delta=float(acc[ACC_E_M] - E_M0),
                E_m_delta=float(acc[ACC_E_m] - E_m0),
                final_q_eq=float(x[2]) / n,
                record_start=rec_start,
                record_stop=int(io[IO_ROWS]),
                transition_duration=transition,
            )
        )

    # Final row: each kernel segment settles its own work integrals
    # through its last boundary, so nothing is pending here; the row just
    # reports the terminal state with the motors off.
    t_fin = float(io[IO_GSTEP]) * dt
    qM = float(x[0])
    vM = float(x[1])
    qm = float(x[2])
    vm = float(x[3])
    dl = qM - qm / n
    nrows = int(io[IO_ROWS])
    rows[nrows, 0] = t_fin
    rows[nrows, 1] = qM
    rows[nrows, 2] = qm / n
    rows[nrows, 3] = dl
    rows[nrows, 4] = vM
    rows[nrows, 5] = vm
    rows[nrows, 6] = 0.0
    rows[nrows, 7] = 0.0
    rows[nrows, 8] = k * dl
    rows[nrows, 9] = 0.0
    rows[nrows, 10] = 0.0
    rows[nrows, 11] = 0.0
    rows[nrows, 12] = 0.0
    rows[nrows, 13] = 0.0
    rows[nrows, 14] = 0.0
    rows[nrows, 15] = acc[ACC_E_M]
    rows[nrows, 16] = acc[ACC_E_m]
    rows[nrows, 17] = 0.5 * k * dl * dl
    row_modes[nrows] = mode_code
    nrows += 1

    records = _rows_to_records(rows, row_modes, nrows)
    W_total = float(acc[ACC_W_M] + acc[ACC_W_m] + acc[ACC_W_EXT])
    final_state = ActuatorState(
        q_M=qM, qd_M=vM, q_m=qm, qd_m=vm,
        mode=OperationMode.PARALLEL_ELASTIC if mode_code == 0
        else OperationMode.VIRTUAL_DIRECT_DRIVE,
        t=t_fin,
    )
    return RunResult(
        records=records,
        phases=tuple(phases_out),
        E_M=float(acc[ACC_E_M]),
        E_m=float(acc[ACC_E_m]),
        W_M=float(acc[ACC_W_M]),
        W_m=float(acc[ACC_W_m]),
        W_ext=float(acc[ACC_W_EXT]),
        delta_KE=delta_KE,
        delta_PE_spring=delta_PE,
        energy_residual=abs(W_total - delta_KE - delta_PE),
        final_state=final_state,
        backend=engine.backend_name(),
    )


def _rows_to_records(rows, row_modes, nrows: int) -> list[TelemetryRecord]:
    records = []
    for r in range(nrows):
        row = rows[r]
        records.append(
            TelemetryRecord(
                t=float(row[0]),
                q_M=float(row[1]),
                q_eq=float(row[2]),
                delta_l=float(row[3]),
                qd_M=float(row[4]),
                qd_m=float(row[5]),
                tau_M_cmd=float(row[6]),
                tau_m_cmd=float(row[7]),
                tau_spring=float(row[8]),
                I_M=float(row[9]),
                I_m=float(row[10]),
                p_M_elec=float(row[11]),
                p_m_elec=float(row[12]),
                p_M_mech=float(row[13]),
                p_m_mech=float(row[14]),
                E_M=float(row[15]),
                E_m=float(row[16]),
                E_spring=float(row[17]),
                mode=OperationMode.PARALLEL_ELASTIC if row_modes[r] == 0
                else OperationMode.VIRTUAL_DIRECT_DRIVE,
            )
        )
    return records


def write_csv(records: list[TelemetryRecord], path) -> None:
    """Write records as CSV: fixed column order, full-precision floats."""
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for rec in records:
                fh.write(
                    f"{rec.t:.17e},{rec.q_M:.17e},{rec.q_eq:.17e},"
                    f"{rec.delta_l:.17e},{rec.qd_M:.17e},{rec.qd_m:.17e},"
                    f"{rec.tau_M_cmd:.17e},{rec.tau_m_cmd:.17e},"
                    f"{rec.tau_spring:.17e},{rec.I_M:.17e},{rec.I_m:.17e},"
                    f"{rec.p_M_elec:.17e},{rec.p_m_elec:.17e},"
                    f"{rec.p_M_mech:.17e},{rec.p_m_mech:.17e},"
                    f"{rec.E_M:.17e},{rec.E_m:.17e},{rec.E_spring:.17e},"
                    f"{rec.mode.value}\n"
                )
    except OSError as exc:
        raise PeasimError(f"cannot write telemetry CSV to {path!r}: {exc}") from exc
