"""Acceptance gate for the actuator simulator.

Ten checks, each printing one PASS/FAIL line (run with -s to see them
all).  They pin the behaviors the package promises: zero-cost holding,
a sub-second-ish spring-nulled equilibrium change, agreement with the
closed-form oscillation and deflection-decay solutions, the force-ratio
bound on the adjuster motor, worm self-locking under an impulse, whole-
run energy balance, static-oracle equivalence on randomized setups,
the direct-drive counterfactual ordering, and byte-level determinism.
"""

import math
import random
import struct

import numpy as np

import peasim
from peasim import control, core, dynamics
from peasim._kernel import (
    ACC_MAX_DL,
    IO_GSTEP,
    IO_ROWS,
    REGIME_HOLD,
    REGIME_PE_TRIM,
    RP_KD_TRIM,
    RP_SETTLE_TOL,
    STATUS_DONE,
    STATUS_SETTLED,
)
from peasim import engine
from peasim.cli import cli_main
from peasim.loads import gravity_moment, with_payload
from peasim.scenario import PAYLOAD_LARGE_MASS, PAYLOAD_LEVER, PAYLOAD_SMALL_MASS
import dataclasses


def _verdict(ok, label, detail):
    print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
    assert ok, f"{label}: {detail}"


def test_01_zero_energy_holding(reference_run):
    """Hold phases draw exactly 0 W on both motors and keep q_eq bit-constant."""
    res = reference_run.result
    holds = [ph for ph in res.phases if ph.kind == "Hold"]
    assert len(holds) == 6
    samples = 0
    ok = True
    for ph in holds:
        recs = res.records[ph.record_start:ph.record_stop]
        assert recs
        for r in recs:
            if r.p_M_elec != 0.0 or r.p_m_elec != 0.0:
                ok = False
        if len({struct.pack("<d", r.q_eq) for r in recs}) != 1:
            ok = False
        if ph.E_M_delta != 0.0 or ph.E_m_delta != 0.0:
            ok = False
        samples += len(recs)
    ok = ok and reference_run.wall < 10.0
    _verdict(
        ok,
        " 1 zero-energy holding",
        f"{samples} hold samples at exactly 0 W, wall {reference_run.wall:.2f} s",
    )


def test_02_spring_nulling_transition(reference_run):
    """The -45 deg -> +45 deg change keeps |k*dl| <= 0.3 Nm and takes ~1 s."""
    res = reference_run.result
    cfg = reference_run.cfg
    ph = res.phases[9]
    assert ph.kind == "ChangeEquilibrium" and ph.status == "arrived"
    dur = ph.transition_duration
    max_tau_spring = cfg.params.k * ph.max_abs_delta_l
    ok = 0.7 <= dur <= 1.3 and max_tau_spring <= 0.3
    _verdict(
        ok,
        " 2 spring-nulling transition",
        f"duration {dur:.4f} s, max |k*dl| {max_tau_spring:.3e} Nm",
    )


def test_03_pe_oscillation_oracle():
    """Unforced PE oscillation matches 0.1*cos(sqrt(21)*t) to 1e-6 rad."""
    _, cfg = peasim.reference_experiment()
    p = dataclasses.replace(cfg.params, M_motor=1.0, M_load=0.0)
    st = peasim.ActuatorState(
        q_M=0.1, qd_M=0.0, q_m=0.0, qd_m=0.0,
        mode=peasim.OperationMode.PARALLEL_ELASTIC,
    )
    ctrl = lambda s, t: peasim.MotorCommand(0.0, 0.0)
    w = math.sqrt(21.0)
    err = 0.0
    for _ in range(10000):
        st = dynamics.step(st, ctrl, p, None, 1e-4)
        err = max(err, abs(st.q_M - 0.1 * math.cos(w * st.t)))
    _verdict(err <= 1e-6, " 3 PE oscillation oracle", f"max error {err:.3e} rad over 1 s")


def test_04_vdd_deflection_oracle():
    """Spring nulling decays dl as 0.05*(1+20t)*exp(-20t), no overshoot."""
    _, cfg = peasim.reference_experiment()
    p = cfg.params
    st = peasim.ActuatorState(
        q_M=0.05, qd_M=0.0, q_m=0.0, qd_m=0.0,
        mode=peasim.OperationMode.VIRTUAL_DIRECT_DRIVE,
    )
    ctrl = lambda s, t: peasim.MotorCommand(0.0, control.vdd_command(s, 0.0, p))
    err = 0.0
    sign_change = False
    for _ in range(10000):
        st = dynamics.step(st, ctrl, p, None, 1e-4)
        dl = core.spring_deflection(st.q_M, st.q_m, p.n)
        ref = 0.05 * (1.0 + 20.0 * st.t) * math.exp(-20.0 * st.t)
        err = max(err, abs(dl - ref))
        if dl < 0.0:
            sign_change = True
    ok = err <= 1e-5 and not sign_change
    _verdict(ok, " 4 VDD deflection oracle", f"max error {err:.3e} rad, overshoot {sign_change}")


def test_05_force_ratio_bound(reference_run):
    """Once dl and its rate are small, |tau_m| <= 1.05*n*(m_eq/M_eq)*|tau_M| + 1e-6."""
    res = reference_run.result
    p = reference_run.cfg.params
    ph = res.phases[9]
    recs = res.records[ph.record_start:ph.record_stop]
    n = p.n
    fr = n * (core.equivalent_inertia_adjuster(p) / core.equivalent_inertia_load(p))
    started = False
    worst = -math.inf
    checked = 0
    for r in recs:
        ddl = r.qd_M - r.qd_m / n
        if not started and abs(r.delta_l) < 1e-4 and abs(ddl) < 1e-3:
            started = True
        if started:
            bound = 1.05 * fr * abs(r.tau_M_cmd) + 1e-6
            worst = max(worst, abs(r.tau_m_cmd) - bound)
            checked += 1
    ok = started and checked > 0 and worst <= 0.0
    _verdict(
        ok,
        " 5 force-ratio bound",
        f"{checked}/{len(recs)} samples, worst margin {worst:.3e} Nm",
    )


def test_06_self_locking_impulse():
    """A 5 Nm*s load impulse cannot move the adjuster; trim recovers the rest point."""
    _, cfg = peasim.reference_experiment()
    p = cfg.params
    n = p.n
    dt = 1e-4
    M_tot = core.equivalent_inertia_load(p)
    m_eq = core.equivalent_inertia_adjuster(p)
    # At rest at q_eq = 0.3, the impulse becomes an instantaneous velocity.
    x = np.array([0.3, 5.0 / M_tot, 0.3 * n, 0.0])
    qm_before = x[2].tobytes()
    rows = np.empty((43000, 18))
    row_modes = np.empty(43000, np.int8)
    acc = np.zeros(15)
    io = np.zeros(4, np.int64)
    pp = np.empty(13)
    pp[:] = [dt, M_tot, m_eq, n, p.k, p.alpha, p.tau_M_max, p.tau_m_max,
             p.k_t_M, p.k_t_m, p.V_supply, p.delta_l_max, 0.0]
    rp = np.zeros(9)
    empty = np.empty(0)

    # Stage 1: one undamped second; the load must swing, the worm must not.
    status_a = engine.simulate_segment(
        x, 0, REGIME_HOLD, rp, 1, 0, pp, 0, empty, empty, 10000, 10,
        rows, row_modes, acc, io,
    )
    assert status_a == STATUS_DONE
    swing = float(acc[ACC_MAX_DL])
    dls = [d for d in rows[: int(io[IO_ROWS]), 3] if d != 0.0]
    flips = sum(1 for a, b in zip(dls, dls[1:]) if (a < 0.0) != (b < 0.0))
    locked_a = x[2].tobytes() == qm_before

    # Stage 2: enable the damping trim and wait for the shaft to go quiet.
    acc[ACC_MAX_DL] = 0.0
    rp[RP_KD_TRIM] = 5.0
    rp[RP_SETTLE_TOL] = 2e-7
    status_b = engine.simulate_segment(
        x, 0, REGIME_PE_TRIM, rp, 5000, 0, pp, 0, empty, empty, 400000, 10,
        rows, row_modes, acc, io,
    )
    locked_b = x[2].tobytes() == qm_before
    oracle = peasim.static_equilibrium_solve(p, None, 0.3)
    rest_err = abs(float(x[0]) - oracle)
    ok = (
        status_b == STATUS_SETTLED
        and locked_a
        and locked_b
        and flips >= 2
        and swing > 1.0
        and rest_err <= 1e-6
    )
    _verdict(
        ok,
        " 6 self-locking impulse",
        f"swing {swing:.3f} rad, {flips} sign flips, q_m bit-frozen "
        f"{locked_a and locked_b}, rest error {rest_err:.3e} rad "
        f"(settled at t={io[IO_GSTEP] * dt:.2f} s)",
    )


def test_07_energy_balance(reference_run):
    """|W_M + W_m + W_ext - dKE - dPE_spring| <= 1e-4 J over the whole run."""
    res = reference_run.result
    ok = res.energy_residual <= 1e-4
    _verdict(ok, " 7 energy balance", f"residual {res.energy_residual:.3e} J over {res.final_state.t:.1f} s")


def test_08_static_oracle_equivalence():
    """Settled simulations agree with the bisection oracle on 20 random setups."""
    _, cfg = peasim.reference_experiment()
    p = cfg.params
    n = p.n
    m_eq = core.equivalent_inertia_adjuster(p)
    rng = random.Random(20250823)
    rows = np.empty((13000, 18))
    row_modes = np.empty(13000, np.int8)
    pp = np.empty(13)
    empty = np.empty(0)
    worst = 0.0
    failures = 0
    for _ in range(20):
        k = rng.uniform(8.0, 40.0)
        m = rng.uniform(0.5, 4.0)
        lever = rng.uniform(0.1, 0.4)
        # Keep the gravity moment well inside the spring's static capability.
        if m * 9.81 * lever > 0.45 * k:
            lever = 0.45 * k / (m * 9.81)
        C = m * 9.81 * lever
        q_eq = rng.uniform(-1.2, 1.2)
        pc = dataclasses.replace(p, k=k)
        load = peasim.LoadModel.gravity_pendulum(0.0, 0.0, m, lever)
        oracle = peasim.static_equilibrium_solve(pc, load, q_eq)
        M_tot = core.equivalent_inertia_load(pc) + m * lever * lever
        x = np.array([q_eq, 0.0, q_eq * n, 0.0])
        acc = np.zeros(15)
        io = np.zeros(4, np.int64)
        dts = 5e-4
        pp[:] = [dts, M_tot, m_eq, n, k, p.alpha, p.tau_M_max, p.tau_m_max,
                 p.k_t_M, p.k_t_m, p.V_supply, p.delta_l_max, C]
        rp = np.zeros(9)
        rp[RP_KD_TRIM] = 2.2 * math.sqrt(k * M_tot)
        rp[RP_SETTLE_TOL] = 2e-7
        status = engine.simulate_segment(
            x, 0, REGIME_PE_TRIM, rp, 1000, 0, pp, 0, empty, empty,
            120000, 10, rows, row_modes, acc, io,
        )
        err = abs(float(x[0]) - oracle)
        worst = max(worst, err)
        if status != STATUS_SETTLED or err > 1e-6:
            failures += 1
    ok = failures == 0 and worst <= 1e-6
    _verdict(ok, " 8 static-oracle equivalence", f"20 cases, worst error {worst:.3e} rad")


def test_09_counterfactual_ordering(reference_run):
    """Direct drive would pay for both holds; its power tracks the gravity torque."""
    res = reference_run.result
    cfg = reference_run.cfg
    p = cfg.params
    lever = PAYLOAD_LEVER
    ratios = []
    means = []
    for idx, mass in ((5, PAYLOAD_SMALL_MASS), (14, PAYLOAD_LARGE_MASS)):
        ph = res.phases[idx]
        assert ph.kind == "Hold"
        recs = res.records[ph.record_start:ph.record_stop]
        assert all(r.p_M_elec == 0.0 and r.p_m_elec == 0.0 for r in recs)
        load = with_payload(cfg.base_load, mass, lever)
        p_cf = peasim.direct_drive_counterfactual(recs, p, load)
        assert min(p_cf) > 0.0
        means.append(sum(p_cf) / len(p_cf))
        ratios.append(sum(abs(gravity_moment(load, r.q_M)) for r in recs) / len(recs))
    power_ratio = means[1] / means[0]
    torque_ratio = ratios[1] / ratios[0]
    ok = (
        means[0] > 0.0
        and means[1] > means[0]
        and abs(power_ratio - torque_ratio) <= 1e-3 * torque_ratio
    )
    _verdict(
        ok,
        " 9 counterfactual ordering",
        f"hold power 0 W vs {means[0]:.0f} W (2.3 kg) and {means[1]:.0f} W (4.5 kg), "
        f"power ratio {power_ratio:.4f} vs torque ratio {torque_ratio:.4f}",
    )


def test_10_determinism(tmp_path):
    """Two CLI runs of the reference scenario write byte-identical CSV."""
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    rc1 = cli_main(["run", "--scenario", "reference", "--out", str(a)])
    rc2 = cli_main(["run", "--scenario", "reference", "--out", str(b)])
    assert rc1 == 0 and rc2 == 0
    da = a.read_bytes()
    db = b.read_bytes()
    ok = da == db and len(da) > 1_000_000
    _verdict(ok, "10 determinism", f"two runs, {len(da)} bytes, identical {da == db}")
