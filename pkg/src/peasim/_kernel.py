"""Pure-Python simulation kernel.

This is the reference hot loop: fixed-step RK4 over one scenario
segment with the regime's control law evaluated in-loop, plus energy
accumulation, extremum tracking and decimated row emission.  The
compiled extension ``peasim._speedup`` mirrors this file expression for
expression; the backend test asserts bit-identical output, so any
change here must keep every floating-point expression in the same
shape and order (and be copied into the .pyx file).

Calling convention (all packs are caller-owned arrays):

    x          float64[4]   state (q_M, qd_M, q_m, qd_m), in/out
    mode_code  int          0 = parallel elastic (adjuster frozen), 1 = VDD
    kind       int          regime: 0 hold, 1 PE trim, 2 VDD supervisor,
                            3 VDD constant main torque
    rp         float64[9]   regime pack, see RP_* indices
    window_steps int        consecutive quiet boundaries required to settle
    hold_steps int          0: re-evaluate commands at RK4 substages;
                            N>=1: zero-order hold over N steps
    pp         float64[13]  parameter pack, see PP_* indices
    script_kind int         0: gravity coefficient in pp; 1: torque table
    ts, taus   float64[m]   scripted torque table (empty when unused)
    max_steps  int          step budget for this segment
    decim      int          emit a row when global_step % decim == 0
    rows       float64[cap, 18]  emitted rows, CSV column order
    row_modes  int8[cap]    mode code per emitted row
    acc        float64[15]  accumulators, see ACC_* indices, in/out
    io         int64[4]     global step / rows written / steps done /
                            accumulator primed flag, in/out

Returns a STATUS_* code.  The segment stops *at* a boundary: on ARRIVED
(lock gates passed), SETTLED, or DONE (budget exhausted) the state is
the boundary state and ``io[IO_STEPS]`` is the number of steps actually
integrated.  A closing visit then settles the trapezoid of the final
step using this segment's own command (the limit from the left), so the
work and energy integrals never mix commands across a regime switch.
The final boundary's row and extrema are still owned by whatever runs
next (the following segment, or the scenario driver's terminal row);
fault statuses skip the closing visit entirely.
"""

from __future__ import annotations

import math

STATUS_DONE = 0
STATUS_ARRIVED = 1
STATUS_SETTLED = 2
STATUS_OVERDEFLECT = 3
STATUS_NONFINITE = 4
STATUS_SCRIPT_RANGE = 5

REGIME_HOLD = 0
REGIME_PE_TRIM = 1
REGIME_VDD_SUPER = 2
REGIME_VDD_CONST = 3

PP_DT = 0
PP_M_TOT = 1
PP_M_EQ = 2
PP_N = 3
PP_K = 4
PP_ALPHA = 5
PP_TAU_M_MAX = 6
PP_TAU_m_MAX = 7
PP_KT_M = 8
PP_KT_m = 9
PP_V = 10
PP_DL_MAX = 11
PP_GRAV_C = 12

RP_KD_TRIM = 0
RP_SETTLE_TOL = 1
RP_TAU_CONST = 2
RP_TARGET = 3
RP_POS_TOL = 4
RP_DEFL_TOL = 5
RP_VEL_TOL = 6
RP_KP = 7
RP_KD = 8

ACC_E_M = 0
ACC_E_m = 1
ACC_W_M = 2
ACC_W_m = 3
ACC_W_EXT = 4
ACC_PREV_P_M_ELEC = 5
ACC_PREV_P_m_ELEC = 6
ACC_PREV_P_M_MECH = 7
ACC_PREV_P_m_MECH = 8
ACC_PREV_P_EXT = 9
ACC_MAX_DL = 10
ACC_MAX_TAU_M = 11
ACC_MAX_TAU_m = 12
ACC_HELD_TAU_M = 13
ACC_HELD_TAU_m = 14

IO_GSTEP = 0
IO_ROWS = 1
IO_STEPS = 2
IO_PRIMED = 3


def simulate_segment(
    x,
    mode_code,
    kind,
    rp,
    window_steps,
    hold_steps,
    pp,
    script_kind,
    ts,
    taus,
    max_steps,
    decim,
    rows,
    row_modes,
    acc,
    io,
):
    cos = math.cos
    isfinite = math.isfinite

    # Unbox everything into native Python floats/ints; float() of a
    # float64 is exact, and native arithmetic is much faster here.
    dt = float(pp[PP_DT])
    M_tot = float(pp[PP_M_TOT])
    m_eq = float(pp[PP_M_EQ])
    n = float(pp[PP_N])
    k = float(pp[PP_K])
    alpha = float(pp[PP_ALPHA])
    tau_M_max = float(pp[PP_TAU_M_MAX])
    tau_m_max = float(pp[PP_TAU_m_MAX])
    kt_M = float(pp[PP_KT_M])
    kt_m = float(pp[PP_KT_m])
    V = float(pp[PP_V])
    dl_max = float(pp[PP_DL_MAX])
    grav_C = float(pp[PP_GRAV_C])

    kd_trim = float(rp[RP_KD_TRIM])
    settle_tol = float(rp[RP_SETTLE_TOL])
    tau_const = float(rp[RP_TAU_CONST])
    target = float(rp[RP_TARGET])
    pos_tol = float(rp[RP_POS_TOL])
    defl_tol = float(rp[RP_DEFL_TOL])
    vel_tol = float(rp[RP_VEL_TOL])
    kp = float(rp[RP_KP])
    kd = float(rp[RP_KD])

    qM = float(x[0])
    vM = float(x[1])
    qm = float(x[2])
    vm = float(x[3])

    E_M = float(acc[ACC_E_M])
    E_m = float(acc[ACC_E_m])
    W_M = float(acc[ACC_W_M])
    W_m = float(acc[ACC_W_m])
    W_ext = float(acc[ACC_W_EXT])
    pp_M_e = float(acc[ACC_PREV_P_M_ELEC])
    pp_m_e = float(acc[ACC_PREV_P_m_ELEC])
    pp_M_w = float(acc[ACC_PREV_P_M_MECH])
    pp_m_w = float(acc[ACC_PREV_P_m_MECH])
    pp_x_w = float(acc[ACC_PREV_P_EXT])
    max_dl = float(acc[ACC_MAX_DL])
    max_tM = float(acc[ACC_MAX_TAU_M])
    max_tm = float(acc[ACC_MAX_TAU_m])
    held_tM = float(acc[ACC_HELD_TAU_M])
    held_tm = float(acc[ACC_HELD_TAU_m])

    gstep = int(io[IO_GSTEP])
    nrows = int(io[IO_ROWS])
    primed = int(io[IO_PRIMED])

    if len(ts):
        ts = [float(v) for v in ts]
        taus = [float(v) for v in taus]

    pe = mode_code == 0
    ratio = m_eq / M_tot
    h2 = 0.5 * dt
    sixth = dt / 6.0
    nk = len(ts)
    si = 0
    streak = 0
    status = STATUS_DONE
    steps_done = max_steps
    i = 0

    while i < max_steps:
        t = gstep * dt
        # Boundary validity.
        if not (isfinite(qM) and isfinite(vM) and isfinite(qm) and isfinite(vm)):
            status = STATUS_NONFINITE
            steps_done = i
            break
        dl = qM - qm / n
        if abs(dl) > dl_max:
            status = STATUS_OVERDEFLECT
            steps_done = i
            break
        if script_kind == 1:
            # The whole step must stay inside the table.
            if t < ts[0] or t + dt > ts[nk - 1]:
                status = STATUS_SCRIPT_RANGE
                steps_done = i
                break
        # Regime stop conditions, evaluated on the boundary state.
        if kind == REGIME_VDD_SUPER:
            ddl = vM - vm / n
            if abs(qM - target) <= pos_tol and abs(dl) <= defl_tol and abs(ddl) <= vel_tol:
                status = STATUS_ARRIVED
                steps_done = i
                break
        elif kind == REGIME_PE_TRIM:
            if abs(vM) <= settle_tol:
                streak += 1
            else:
                streak = 0
            if streak >= window_steps:
                status = STATUS_SETTLED
                steps_done = i
                break
        # Boundary command (also stage-1 command of this step).
        if kind == REGIME_HOLD:
            tau_Mb = 0.0
            tau_mb = 0.0
        elif hold_steps >= 1 and not (i == 0 or gstep % hold_steps == 0):
            tau_Mb = held_tM
            tau_mb = held_tm
        else:
            if kind == REGIME_PE_TRIM:
                tau_Mb = -(kd_trim * vM)
                tau_mb = 0.0
            else:
                if kind == REGIME_VDD_SUPER:
                    tau_Mb = kp * (target - qM) - kd * vM
                    if tau_Mb > tau_M_max:
                        tau_Mb = tau_M_max
                    elif tau_Mb < -tau_M_max:
                        tau_Mb = -tau_M_max
                else:
                    tau_Mb = tau_const
                ddl = vM - vm / n
                tsm = k * dl / n
                tau_mb = (
                    n * ratio * tau_Mb
                    - (1.0 + n * n * ratio) * tsm
                    + n * m_eq * (2.0 * alpha * ddl + alpha * alpha * dl)
                )
                if tau_mb > tau_m_max:
                    tau_mb = tau_m_max
                elif tau_mb < -tau_m_max:
                    tau_mb = -tau_m_max
            held_tM = tau_Mb
            held_tm = tau_mb
        # External torque at the boundary.
        if script_kind == 1:
            while si < nk - 2 and t > ts[si + 1]:
                si += 1
            t0 = ts[si]
            t1 = ts[si + 1]
            v0 = taus[si]
            v1 = taus[si + 1]
            text = v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
        else:
            text = -(grav_C * cos(qM))
        # Power bookkeeping (trapezoid over the step that just ended).
        I_M = tau_Mb / kt_M
        I_m = tau_mb / kt_m
        p_M_e = abs(I_M) * V
        p_m_e = abs(I_m) * V
        p_M_w = tau_Mb * vM
        p_m_w = tau_mb * vm
        p_x_w = text * vM
        if primed != 0:
            E_M = E_M + 0.5 * (pp_M_e + p_M_e) * dt
            E_m = E_m + 0.5 * (pp_m_e + p_m_e) * dt
            W_M = W_M + 0.5 * (pp_M_w + p_M_w) * dt
            W_m = W_m + 0.5 * (pp_m_w + p_m_w) * dt
            W_ext = W_ext + 0.5 * (pp_x_w + p_x_w) * dt
        pp_M_e = p_M_e
        pp_m_e = p_m_e
        pp_M_w = p_M_w
        pp_m_w = p_m_w
        pp_x_w = p_x_w
        primed = 1
        if abs(dl) > max_dl:
            max_dl = abs(dl)
        if abs(tau_Mb) > max_tM:
            max_tM = abs(tau_Mb)
        if abs(tau_mb) > max_tm:
            max_tm = abs(tau_mb)
        # Row emission.
        if gstep % decim == 0:
            rows[nrows, 0] = t
            rows[nrows, 1] = qM
            rows[nrows, 2] = qm / n
            rows[nrows, 3] = dl
            rows[nrows, 4] = vM
            rows[nrows, 5] = vm
            rows[nrows, 6] = tau_Mb
            rows[nrows, 7] = tau_mb
            rows[nrows, 8] = k * dl
            rows[nrows, 9] = I_M
            rows[nrows, 10] = I_m
            rows[nrows, 11] = p_M_e
            rows[nrows, 12] = p_m_e
            rows[nrows, 13] = p_M_w
            rows[nrows, 14] = p_m_w
            rows[nrows, 15] = E_M
            rows[nrows, 16] = E_m
            rows[nrows, 17] = 0.5 * k * dl * dl
            row_modes[nrows] = mode_code
            nrows += 1
        # RK4 step; stage 1 uses the boundary command and deflection.
        tsM = -(k * dl)
        a1M = (tau_Mb + tsM + text) / M_tot
        if pe:
            a1m = 0.0
        else:
            a1m = (tau_mb + k * dl / n) / m_eq
        # Stage 2.
        q2 = qM + h2 * vM
        v2 = vM + h2 * a1M
        if pe:
            qm2 = qm
            vm2 = vm
        else:
            qm2 = qm + h2 * vm
            vm2 = vm + h2 * a1m
        t2 = t + h2
        if kind == REGIME_HOLD:
            tau2M = 0.0
            tau2m = 0.0
        elif hold_steps >= 1:
            tau2M = tau_Mb
            tau2m = tau_mb
        elif kind == REGIME_PE_TRIM:
            tau2M = -(kd_trim * v2)
            tau2m = 0.0
        else:
            dl2 = q2 - qm2 / n
            if kind == REGIME_VDD_SUPER:
                tau2M = kp * (target - q2) - kd * v2
                if tau2M > tau_M_max:
                    tau2M = tau_M_max
                elif tau2M < -tau_M_max:
                    tau2M = -tau_M_max
            else:
                tau2M = tau_const
            ddl2 = v2 - vm2 / n
            tsm2 = k * dl2 / n
            tau2m = (
                n * ratio * tau2M
                - (1.0 + n * n * ratio) * tsm2
                + n * m_eq * (2.0 * alpha * ddl2 + alpha * alpha * dl2)
            )
            if tau2m > tau_m_max:
                tau2m = tau_m_max
            elif tau2m < -tau_m_max:
                tau2m = -tau_m_max
        dl2 = q2 - qm2 / n
        if script_kind == 1:
            while si < nk - 2 and t2 > ts[si + 1]:
                si += 1
            t0 = ts[si]
            t1 = ts[si + 1]
            v0 = taus[si]
            v1 = taus[si + 1]
            text2 = v0 + (v1 - v0) * ((t2 - t0) / (t1 - t0))
        else:
            text2 = -(grav_C * cos(q2))
        a2M = (tau2M + -(k * dl2) + text2) / M_tot
        if pe:
            a2m = 0.0
        else:
            a2m = (tau2m + k * dl2 / n) / m_eq
        # Stage 3 (same time as stage 2).
        q3 = qM + h2 * v2
        v3 = vM + h2 * a2M
        if pe:
            qm3 = qm
            vm3 = vm
        else:
            qm3 = qm + h2 * vm2
            vm3 = vm + h2 * a2m
        if kind == REGIME_HOLD:
            tau3M = 0.0
            tau3m = 0.0
        elif hold_steps >= 1:
            tau3M = tau_Mb
            tau3m = tau_mb
        elif kind == REGIME_PE_TRIM:
            tau3M = -(kd_trim * v3)
            tau3m = 0.0
        else:
            dl3 = q3 - qm3 / n
            if kind == REGIME_VDD_SUPER:
                tau3M = kp * (target - q3) - kd * v3
                if tau3M > tau_M_max:
                    tau3M = tau_M_max
                elif tau3M < -tau_M_max:
                    tau3M = -tau_M_max
            else:
                tau3M = tau_const
            ddl3 = v3 - vm3 / n
            tsm3 = k * dl3 / n
            tau3m = (
                n * ratio * tau3M
                - (1.0 + n * n * ratio) * tsm3
                + n * m_eq * (2.0 * alpha * ddl3 + alpha * alpha * dl3)
            )
            if tau3m > tau_m_max:
                tau3m = tau_m_max
            elif tau3m < -tau_m_max:
                tau3m = -tau_m_max
        dl3 = q3 - qm3 / n
        if script_kind == 1:
            while si < nk - 2 and t2 > ts[si + 1]:
                si += 1
            t0 = ts[si]
            t1 = ts[si + 1]
            v0 = taus[si]
            v1 = taus[si + 1]
            text3 = v0 + (v1 - v0) * ((t2 - t0) / (t1 - t0))
        else:
            text3 = -(grav_C * cos(q3))
        a3M = (tau3M + -(k * dl3) + text3) / M_tot
        if pe:
            a3m = 0.0
        else:
            a3m = (tau3m + k * dl3 / n) / m_eq
        # Stage 4.
        q4 = qM + dt * v3
        v4 = vM + dt * a3M
        if pe:
            qm4 = qm
            vm4 = vm
        else:
            qm4 = qm + dt * vm3
            vm4 = vm + dt * a3m
        t4 = t + dt
        if kind == REGIME_HOLD:
            tau4M = 0.0
            tau4m = 0.0
        elif hold_steps >= 1:
            tau4M = tau_Mb
            tau4m = tau_mb
        elif kind == REGIME_PE_TRIM:
            tau4M = -(kd_trim * v4)
            tau4m = 0.0
        else:
            dl4 = q4 - qm4 / n
            if kind == REGIME_VDD_SUPER:
                tau4M = kp * (target - q4) - kd * v4
                if tau4M > tau_M_max:
                    tau4M = tau_M_max
                elif tau4M < -tau_M_max:
                    tau4M = -tau_M_max
            else:
                tau4M = tau_const
            ddl4 = v4 - vm4 / n
            tsm4 = k * dl4 / n
            tau4m = (
                n * ratio * tau4M
                - (1.0 + n * n * ratio) * tsm4
                + n * m_eq * (2.0 * alpha * ddl4 + alpha * alpha * dl4)
            )
            if tau4m > tau_m_max:
                tau4m = tau_m_max
            elif tau4m < -tau_m_max:
                tau4m = -tau_m_max
        dl4 = q4 - qm4 / n
        if script_kind == 1:
            while si < nk - 2 and t4 > ts[si + 1]:
                si += 1
            t0 = ts[si]
            t1 = ts[si + 1]
            v0 = taus[si]
            v1 = taus[si + 1]
            text4 = v0 + (v1 - v0) * ((t4 - t0) / (t1 - t0))
        else:
            text4 = -(grav_C * cos(q4))
        a4M = (tau4M + -(k * dl4) + text4) / M_tot
        if pe:
            a4m = 0.0
        else:
            a4m = (tau4m + k * dl4 / n) / m_eq
        # Combine.
        qM = qM + sixth * (vM + 2.0 * v2 + 2.0 * v3 + v4)
        vM = vM + sixth * (a1M + 2.0 * a2M + 2.0 * a3M + a4M)
        if not pe:
            qm = qm + sixth * (vm + 2.0 * vm2 + 2.0 * vm3 + vm4)
            vm = vm + sixth * (a1m + 2.0 * a2m + 2.0 * a3m + a4m)
        gstep += 1
        i += 1

    if status == STATUS_DONE or status == STATUS_ARRIVED or status == STATUS_SETTLED:
        # Closing visit: settle the trapezoid of the segment's final step
        # using this segment's own command, i.e. the limit from the left.
        # Without this, a regime switch at the boundary would charge the
        # last step with the next regime's power (badly wrong when the
        # supervisor locks the worm at speed and a damping trim follows).
        t = gstep * dt
        dl = qM - qm / n
        if kind == REGIME_HOLD:
            tau_Mb = 0.0
            tau_mb = 0.0
        elif hold_steps >= 1:
            tau_Mb = held_tM
            tau_mb = held_tm
        elif kind == REGIME_PE_TRIM:
            tau_Mb = -(kd_trim * vM)
            tau_mb = 0.0
        else:
            if kind == REGIME_VDD_SUPER:
                tau_Mb = kp * (target - qM) - kd * vM
                if tau_Mb > tau_M_max:
                    tau_Mb = tau_M_max
                elif tau_Mb < -tau_M_max:
                    tau_Mb = -tau_M_max
            else:
                tau_Mb = tau_const
            ddl = vM - vm / n
            tsm = k * dl / n
            tau_mb = (
                n * ratio * tau_Mb
                - (1.0 + n * n * ratio) * tsm
                + n * m_eq * (2.0 * alpha * ddl + alpha * alpha * dl)
            )
            if tau_mb > tau_m_max:
                tau_mb = tau_m_max
            elif tau_mb < -tau_m_max:
                tau_mb = -tau_m_max
        if script_kind == 1:
            while si < nk - 2 and t > ts[si + 1]:
                si += 1
            t0 = ts[si]
            t1 = ts[si + 1]
            v0 = taus[si]
            v1 = taus[si + 1]
            text = v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
        else:
            text = -(grav_C * cos(qM))
        if primed != 0:
            I_M = tau_Mb / kt_M
            I_m = tau_mb / kt_m
            p_M_e = abs(I_M) * V
            p_m_e = abs(I_m) * V
            p_M_w = tau_Mb * vM
            p_m_w = tau_mb * vm
            p_x_w = text * vM
            E_M = E_M + 0.5 * (pp_M_e + p_M_e) * dt
            E_m = E_m + 0.5 * (pp_m_e + p_m_e) * dt
            W_M = W_M + 0.5 * (pp_M_w + p_M_w) * dt
            W_m = W_m + 0.5 * (pp_m_w + p_m_w) * dt
            W_ext = W_ext + 0.5 * (pp_x_w + p_x_w) * dt
        primed = 0

    x[0] = qM
    x[1] = vM
    x[2] = qm
    x[3] = vm
    acc[ACC_E_M] = E_M
    acc[ACC_E_m] = E_m
    acc[ACC_W_M] = W_M
    acc[ACC_W_m] = W_m
    acc[ACC_W_EXT] = W_ext
    acc[ACC_PREV_P_M_ELEC] = pp_M_e
    acc[ACC_PREV_P_m_ELEC] = pp_m_e
    acc[ACC_PREV_P_M_MECH] = pp_M_w
    acc[ACC_PREV_P_m_MECH] = pp_m_w
    acc[ACC_PREV_P_EXT] = pp_x_w
    acc[ACC_MAX_DL] = max_dl
    acc[ACC_MAX_TAU_M] = max_tM
    acc[ACC_MAX_TAU_m] = max_tm
    acc[ACC_HELD_TAU_M] = held_tM
    acc[ACC_HELD_TAU_m] = held_tm
    io[IO_GSTEP] = gstep
    io[IO_ROWS] = nrows
    io[IO_STEPS] = steps_done
    io[IO_PRIMED] = primed
    return status
