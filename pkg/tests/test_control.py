"""Controller and supervisor tests.

The two numeric anchor points for the spring-nulling law are checked
against values re-derived by hand from the torque balance (see the
comments), not against the implementation.
"""

import dataclasses
import math
import random

import pytest

from peasim.control import (
    SupervisorConfig,
    pd_position_command,
    pe_command,
    saturate,
    supervisor_step,
    vdd_command,
)
from peasim.core import (
    ActuatorParams,
    ActuatorState,
    OperationMode,
    equivalent_inertia_adjuster,
    equivalent_inertia_load,
)
from peasim.dynamics import MotorCommand, mode_transition, step
from peasim.loads import LoadModel

PARAMS = ActuatorParams(
    M_motor=0.01, M_load=0.2356633, m_motor=1e-5, m_worm=5e-6, m_wormwheel=3.6e-3,
    n=60.0, k=21.0, alpha=20.0, tau_M_max=1.6, tau_m_max=0.0303,
    k_t_M=0.2, k_t_m=0.0109, V_supply=24.0, delta_l_max=math.radians(150.0),
)

# M_eq = 1.10 puts the design at the bench-arm scale used by the anchors
ARM = dataclasses.replace(PARAMS, M_motor=0.01, M_load=1.09)


def vdd_state(q_M=0.0, qd_M=0.0, q_m=0.0, qd_m=0.0):
    return ActuatorState(q_M, qd_M, q_m, qd_m, OperationMode.VIRTUAL_DIRECT_DRIVE)


def test_pe_command_is_off():
    assert pe_command() == 0.0


def test_vdd_command_zero_state():
    assert vdd_command(vdd_state(), 0.0, ARM) == 0.0


def test_vdd_command_feedforward_share():
    # undeformed spring: only the force-ratio share of tau_M remains,
    # n*(m_eq/M_eq)*tau_M = 60*(1.6e-5/1.10)*1.6
    got = vdd_command(vdd_state(), 1.6, ARM)
    m_eq = equivalent_inertia_adjuster(ARM)
    assert got == pytest.approx(60.0 * (m_eq / 1.10) * 1.6, rel=1e-12)
    assert got == pytest.approx(1.40e-3, abs=5e-6)


def test_vdd_command_deflected():
    # hand sum: -(1 + 3600*1.6e-5/1.10)*(21*0.05/60) + 60*1.6e-5*400*0.05
    #         = -0.0184164 + 0.0192 = 7.8364e-4
    got = vdd_command(vdd_state(q_M=0.05), 0.0, ARM)
    expected = (
        -(1.0 + 3600.0 * 1.6e-5 / 1.10) * (21.0 * 0.05 / 60.0)
        + 60.0 * 1.6e-5 * 400.0 * 0.05
    )
    assert got == pytest.approx(expected, rel=1e-10)
    assert got == pytest.approx(7.8364e-4, abs=1e-7)


def test_vdd_command_rate_term():
    # pure deflection rate: only n*m_eq*2*alpha*dl' contributes
    st = vdd_state(qd_M=0.2)
    m_eq = equivalent_inertia_adjuster(ARM)
    assert vdd_command(st, 0.0, ARM) == pytest.approx(
        60.0 * m_eq * 2.0 * 20.0 * 0.2, rel=1e-12
    )


def test_vdd_command_load_inertia_enters_ratio():
    load = LoadModel.gravity_pendulum(1.9, 0.61)
    st = vdd_state()
    bare = vdd_command(st, 1.0, PARAMS)
    loaded = vdd_command(st, 1.0, PARAMS, load)
    # heavier main side -> smaller feedforward share
    assert 0.0 < loaded < bare


def test_pd_position_command():
    cfg = SupervisorConfig(q_eq_target=0.0, kp=20.0, kd=0.0)
    st = ActuatorState(0.5, 0.0, 0.0, 0.0, OperationMode.VIRTUAL_DIRECT_DRIVE)
    assert pd_position_command(st, 0.5, cfg) == 0.0
    assert pd_position_command(st, 0.6, cfg) == pytest.approx(2.0, rel=1e-12)
    cfg = SupervisorConfig(q_eq_target=0.0, kp=20.0, kd=4.0)
    st = ActuatorState(0.5, 1.5, 0.0, 0.0, OperationMode.VIRTUAL_DIRECT_DRIVE)
    assert pd_position_command(st, 0.5, cfg) == pytest.approx(-6.0, rel=1e-12)


def test_saturate():
    assert saturate(0.5, 1.6) == 0.5
    assert saturate(2.4, 1.6) == 1.6
    assert saturate(-0.05, 0.0303) == -0.0303
    rng = random.Random(3)
    for _ in range(200):
        x = rng.uniform(-10.0, 10.0)
        lim = rng.uniform(1e-3, 5.0)
        y = saturate(x, lim)
        assert abs(y) <= lim
        assert saturate(y, lim) == y


def test_supervisor_config_validation():
    with pytest.raises(ValueError):
        SupervisorConfig(q_eq_target=0.0, pos_tol=0.0)
    with pytest.raises(ValueError):
        SupervisorConfig(q_eq_target=0.0, vel_tol=-1.0)
    with pytest.raises(ValueError):
        SupervisorConfig(q_eq_target=0.0, kp=0.0)
    with pytest.raises(ValueError):
        SupervisorConfig(q_eq_target=0.0, kd=-0.1)
    SupervisorConfig(q_eq_target=0.0, kd=0.0)


def test_supervisor_stays_locked_at_target():
    cfg = SupervisorConfig(q_eq_target=0.3)
    st = ActuatorState(0.3, 0.0, 18.0, 0.0, OperationMode.PARALLEL_ELASTIC)
    mode, (tau_M, tau_m) = supervisor_step(st, cfg, PARAMS)
    assert mode is OperationMode.PARALLEL_ELASTIC
    assert (tau_M, tau_m) == (0.0, 0.0)


def test_supervisor_unlocks_on_new_target():
    cfg = SupervisorConfig(q_eq_target=math.pi / 4)
    st = ActuatorState(-math.pi / 4, 0.0, -60.0 * math.pi / 4, 0.0,
                       OperationMode.PARALLEL_ELASTIC)
    mode, (tau_M, tau_m) = supervisor_step(st, cfg, PARAMS)
    assert mode is OperationMode.VIRTUAL_DIRECT_DRIVE
    assert abs(tau_M) <= PARAMS.tau_M_max
    assert abs(tau_m) <= PARAMS.tau_m_max
    assert tau_M == PARAMS.tau_M_max  # far from target: PD saturates high


def test_supervisor_locks_inside_gates():
    cfg = SupervisorConfig(q_eq_target=0.3)
    st = ActuatorState(0.3 + 1e-4, 1e-3, 18.0, 0.0,
                       OperationMode.VIRTUAL_DIRECT_DRIVE)
    mode, (tau_M, tau_m) = supervisor_step(st, cfg, PARAMS)
    assert mode is OperationMode.PARALLEL_ELASTIC
    assert tau_m == 0.0


def test_supervisor_keeps_tracking_outside_gates():
    cfg = SupervisorConfig(q_eq_target=0.3)
    # position fine but the spring is still wound up
    st = ActuatorState(0.3, 0.0, (0.3 - 0.05) * 60.0, 0.0,
                       OperationMode.VIRTUAL_DIRECT_DRIVE)
    mode, _ = supervisor_step(st, cfg, PARAMS)
    assert mode is OperationMode.VIRTUAL_DIRECT_DRIVE


def test_closed_loop_reaches_target():
    """The supervised loop arrives and locks on the bare actuator."""
    cfg = SupervisorConfig(q_eq_target=0.3)
    st = ActuatorState(0.0, 0.0, 0.0, 0.0, OperationMode.PARALLEL_ELASTIC)
    dt = 1e-4
    locked_at = None
    for i in range(20000):
        mode, (tau_M, tau_m) = supervisor_step(st, cfg, PARAMS)
        st = mode_transition(st, mode)
        if mode is OperationMode.PARALLEL_ELASTIC and abs(st.q_M - 0.3) <= 1e-3:
            locked_at = i * dt
            break
        cmd = MotorCommand(tau_M, tau_m)
        st = step(st, lambda s, t: cmd, PARAMS, None, dt, command_update="hold")
    assert locked_at is not None and locked_at < 2.0
    assert st.mode is OperationMode.PARALLEL_ELASTIC
    assert st.qd_m == 0.0
    assert abs(st.q_M - st.q_m / 60.0) <= cfg.defl_tol
