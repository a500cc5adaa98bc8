"""Integrator and equations-of-motion tests.

The conservative PE plant has closed-form solutions, which makes the
integrator testable against analytic oracles rather than against
itself; the remaining checks are structural (mode semantics, fault
paths, determinism, reversibility, energy bookkeeping).
"""

import dataclasses
import math

import pytest

from peasim.core import (
    ActuatorParams,
    ActuatorState,
    OperationMode,
    equivalent_inertia_adjuster,
    equivalent_inertia_load,
    spring_deflection,
    spring_energy,
)
from peasim.dynamics import MotorCommand, accelerations, mode_transition, step
from peasim.errors import NonFiniteStateError, SpringOverdeflectionError
from peasim.loads import LoadModel, external_torque, load_inertia

PARAMS = ActuatorParams(
    M_motor=0.01, M_load=0.2356633, m_motor=1e-5, m_worm=5e-6, m_wormwheel=3.6e-3,
    n=60.0, k=21.0, alpha=20.0, tau_M_max=1.6, tau_m_max=0.0303,
    k_t_M=0.2, k_t_m=0.0109, V_supply=24.0, delta_l_max=math.radians(150.0),
)

ZERO = lambda s, t: MotorCommand(0.0, 0.0)


def pe_state(q_M=0.0, qd_M=0.0, q_m=0.0, t=0.0):
    return ActuatorState(q_M, qd_M, q_m, 0.0, OperationMode.PARALLEL_ELASTIC, t)


def vdd_state(q_M=0.0, qd_M=0.0, q_m=0.0, qd_m=0.0, t=0.0):
    return ActuatorState(q_M, qd_M, q_m, qd_m, OperationMode.VIRTUAL_DIRECT_DRIVE, t)


def test_accelerations_rest():
    assert accelerations(pe_state(), MotorCommand(0.0), PARAMS) == (0.0, 0.0)


def test_accelerations_pe_deflected():
    p = dataclasses.replace(PARAMS, M_motor=1.0, M_load=0.0)
    aM, am = accelerations(pe_state(q_M=0.1), MotorCommand(0.0), p)
    assert aM == pytest.approx(-2.1, rel=1e-12)
    assert am == 0.0


def test_accelerations_vdd_adjuster():
    p = dataclasses.replace(PARAMS, m_motor=1.6e-5, m_worm=0.0, m_wormwheel=0.0)
    aM, am = accelerations(vdd_state(), MotorCommand(0.0, 0.01), p)
    assert aM == 0.0
    assert am == pytest.approx(625.0, rel=1e-12)


def test_accelerations_gravity_enters_load_side_only():
    load = LoadModel.gravity_pendulum(1.0, 0.5)
    st = vdd_state()
    aM, am = accelerations(st, MotorCommand(0.0, 0.0), PARAMS, load)
    M_tot = equivalent_inertia_load(PARAMS) + load_inertia(load)
    assert aM == pytest.approx(external_torque(load, 0.0, 0.0) / M_tot, rel=1e-12)
    assert am == 0.0


def test_accelerations_overdeflection_fault():
    st = pe_state(q_M=PARAMS.delta_l_max + 0.01)
    with pytest.raises(SpringOverdeflectionError):
        accelerations(st, MotorCommand(0.0), PARAMS)


def test_step_fixed_point():
    st = pe_state(q_M=0.2, q_m=12.0)  # matched positions, no deflection
    out = step(st, ZERO, PARAMS, dt=1e-3)
    assert (out.q_M, out.qd_M, out.q_m, out.qd_m) == (0.2, 0.0, 12.0, 0.0)
    assert out.t == pytest.approx(1e-3)


def test_pe_freezes_adjuster():
    st = pe_state(q_M=0.4, q_m=6.0)
    big = lambda s, t: MotorCommand(1.6, 0.03)  # tau_m must be ignored
    for _ in range(50):
        st = step(st, big, PARAMS, dt=1e-3)
    assert st.q_m == 6.0 and st.qd_m == 0.0
    assert st.q_M != 0.4


def test_pe_oscillation_frequency():
    # another (k, M) point than the headline oracle: omega = sqrt(30/0.7)
    p = dataclasses.replace(PARAMS, M_motor=0.7, M_load=0.0, k=30.0)
    w = math.sqrt(30.0 / 0.7)
    st = pe_state(q_M=0.1)
    err = 0.0
    for _ in range(10000):
        st = step(st, ZERO, p, dt=1e-4)
        err = max(err, abs(st.q_M - 0.1 * math.cos(w * st.t)))
    assert err <= 1e-5


def test_vdd_integrates_both_shafts():
    st = vdd_state()
    push = lambda s, t: MotorCommand(0.0, 0.001)
    st = step(st, push, PARAMS, dt=1e-3)
    assert st.q_m != 0.0 and st.qd_m != 0.0


def test_time_reversibility():
    p = dataclasses.replace(PARAMS, M_motor=1.0, M_load=0.0)
    st = pe_state(q_M=0.25)
    for _ in range(10000):
        st = step(st, ZERO, p, dt=1e-4)
    back = ActuatorState(st.q_M, -st.qd_M, st.q_m, 0.0, st.mode, 0.0)
    for _ in range(10000):
        back = step(back, ZERO, p, dt=1e-4)
    assert abs(back.q_M - 0.25) <= 1e-8
    assert abs(back.qd_M) <= 1e-7


def test_determinism():
    load = LoadModel.gravity_pendulum(1.0, 0.3)
    ctrl = lambda s, t: MotorCommand(0.1 * math.sin(3.0 * t), 0.0)

    def run():
        st = pe_state(q_M=0.05)
        out = []
        for _ in range(2000):
            st = step(st, ctrl, PARAMS, load, dt=1e-4)
            out.append((st.q_M, st.qd_M))
        return out

    assert run() == run()


def energy_residual(states, commands, taus_ext, M_tot, p, dt):
    """Trapezoidal work minus energy delta for a boundary-sampled run."""
    W = 0.0
    for i in range(1, len(states)):
        p0 = commands[i - 1].tau_M * states[i - 1].qd_M + commands[i - 1].tau_m * states[i - 1].qd_m
        p1 = commands[i].tau_M * states[i].qd_M + commands[i].tau_m * states[i].qd_m
        e0 = taus_ext[i - 1] * states[i - 1].qd_M
        e1 = taus_ext[i] * states[i].qd_M
        W += 0.5 * (p0 + p1 + e0 + e1) * dt

    def energy(s):
        dl = spring_deflection(s.q_M, s.q_m, p.n)
        m_eq = equivalent_inertia_adjuster(p)
        return (0.5 * M_tot * s.qd_M**2 + 0.5 * m_eq * s.qd_m**2
                + spring_energy(dl, p))

    return abs(W - (energy(states[-1]) - energy(states[0])))


def test_energy_balance_pe_pendulum():
    load = LoadModel.gravity_pendulum(1.0, 0.2)
    M_tot = equivalent_inertia_load(PARAMS) + load_inertia(load)
    st = pe_state(q_M=0.3)
    dt = 1e-4
    states = [st]
    commands = [MotorCommand(0.0)]
    taus = [external_torque(load, st.q_M, st.t)]
    for _ in range(10000):
        st = step(st, ZERO, PARAMS, load, dt)
        states.append(st)
        commands.append(MotorCommand(0.0))
        taus.append(external_torque(load, st.q_M, st.t))
    res = energy_residual(states, commands, taus, M_tot, PARAMS, dt)
    assert res <= 1e-5  # per simulated second; the run is 1 s


def test_energy_balance_vdd_constant_torque():
    from peasim.control import vdd_command

    M_tot = equivalent_inertia_load(PARAMS)
    dt = 1e-4

    def ctrl(s, t):
        return MotorCommand(0.3, vdd_command(s, 0.3, PARAMS))

    st = vdd_state(q_M=0.02)
    states = [st]
    commands = [ctrl(st, 0.0)]
    taus = [0.0]
    for _ in range(10000):
        st = step(st, ctrl, PARAMS, None, dt)
        states.append(st)
        commands.append(ctrl(st, st.t))
        taus.append(0.0)
    res = energy_residual(states, commands, taus, M_tot, PARAMS, dt)
    assert res <= 1e-5


def test_step_command_update_modes():
    ctrl = lambda s, t: MotorCommand(-0.5 * s.qd_M, 0.0)
    st = pe_state(q_M=0.1, qd_M=1.0)
    sub = step(st, ctrl, PARAMS, dt=1e-2, command_update="substage")
    hold = step(st, ctrl, PARAMS, dt=1e-2, command_update="hold")
    # both advance, but the held command skips the substage re-evaluation
    assert sub.q_M != st.q_M and hold.q_M != st.q_M
    assert sub.qd_M != hold.qd_M
    with pytest.raises(ValueError):
        step(st, ctrl, PARAMS, dt=1e-2, command_update="midpoint")
    with pytest.raises(ValueError):
        step(st, ctrl, PARAMS, dt=0.0)


def test_step_nonfinite_fault():
    blow = lambda s, t: MotorCommand(1e308, 0.0)
    st = vdd_state()
    with pytest.raises(NonFiniteStateError):
        for _ in range(10):
            st = step(st, blow, PARAMS, dt=1e-4)


def test_mode_transition():
    st = vdd_state(q_M=0.1, qd_M=0.5, q_m=2.0, qd_m=3.0)
    locked = mode_transition(st, OperationMode.PARALLEL_ELASTIC)
    assert locked.qd_m == 0.0
    assert (locked.q_M, locked.qd_M, locked.q_m) == (0.1, 0.5, 2.0)
    assert locked.mode is OperationMode.PARALLEL_ELASTIC
    # PE -> VDD keeps everything
    back = mode_transition(locked, OperationMode.VIRTUAL_DIRECT_DRIVE)
    assert back.qd_m == 0.0 and back.mode is OperationMode.VIRTUAL_DIRECT_DRIVE
    # identity transition
    assert mode_transition(locked, OperationMode.PARALLEL_ELASTIC) is locked


def test_command_validation():
    with pytest.raises(ValueError):
        MotorCommand(math.nan, 0.0)
    with pytest.raises(ValueError):
        MotorCommand(0.0, math.inf)
