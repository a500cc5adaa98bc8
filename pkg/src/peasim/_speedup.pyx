# cython: boundscheck=False, wraparound=False, initializedcheck=False
# cython: cdivision=True, language_level=3
"""Compiled simulation kernel.

Line-for-line mirror of ``peasim._kernel.simulate_segment``; every
floating-point expression keeps the same shape and evaluation order,
and the build disables FP contraction, so the two backends produce
bit-identical results.  See _kernel.py for the calling convention.
"""

from libc.math cimport cos, fabs, isfinite
from libc.stdint cimport int64_t

cdef enum:
    STATUS_DONE = 0
    STATUS_ARRIVED = 1
    STATUS_SETTLED = 2
    STATUS_OVERDEFLECT = 3
    STATUS_NONFINITE = 4
    STATUS_SCRIPT_RANGE = 5

cdef enum:
    REGIME_HOLD = 0
    REGIME_PE_TRIM = 1
    REGIME_VDD_SUPER = 2
    REGIME_VDD_CONST = 3


cpdef int simulate_segment(
    double[::1] x,
    int mode_code,
    int kind,
    double[::1] rp,
    long long window_steps,
    long long hold_steps,
    double[::1] pp,
    int script_kind,
    double[::1] ts,
    double[::1] taus,
    long long max_steps,
    long long decim,
    double[:, ::1] rows,
    signed char[::1] row_modes,
    double[::1] acc,
    int64_t[::1] io,
):
    cdef double dt = pp[0]
    cdef double M_tot = pp[1]
    cdef double m_eq = pp[2]
    cdef double n = pp[3]
    cdef double k = pp[4]
    cdef double alpha = pp[5]
    cdef double tau_M_max = pp[6]
    cdef double tau_m_max = pp[7]
    cdef double kt_M = pp[8]
    cdef double kt_m = pp[9]
    cdef double V = pp[10]
    cdef double dl_max = pp[11]
    cdef double grav_C = pp[12]

    cdef double kd_trim = rp[0]
    cdef double settle_tol = rp[1]
    cdef double tau_const = rp[2]
    cdef double target = rp[3]
    cdef double pos_tol = rp[4]
    cdef double defl_tol = rp[5]
    cdef double vel_tol = rp[6]
    cdef double kp = rp[7]
    cdef double kd = rp[8]

    cdef double qM = x[0]
    cdef double vM = x[1]
    cdef double qm = x[2]
    cdef double vm = x[3]

    cdef double E_M = acc[0]
    cdef double E_m = acc[1]
    cdef double W_M = acc[2]
    cdef double W_m = acc[3]
    cdef double W_ext = acc[4]
    cdef double pp_M_e = acc[5]
    cdef double pp_m_e = acc[6]
    cdef double pp_M_w = acc[7]
    cdef double pp_m_w = acc[8]
    cdef double pp_x_w = acc[9]
    cdef double max_dl = acc[10]
    cdef double max_tM = acc[11]
    cdef double max_tm = acc[12]
    cdef double held_tM = acc[13]
    cdef double held_tm = acc[14]

    cdef int64_t gstep = io[0]
    cdef int64_t nrows = io[1]
    cdef int64_t primed = io[3]

    cdef bint pe = mode_code == 0
    cdef double ratio = m_eq / M_tot
    cdef double h2 = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef Py_ssize_t nk = ts.shape[0]
    cdef Py_ssize_t si = 0
    cdef long long streak = 0
    cdef int status = STATUS_DONE
    cdef long long steps_done = max_steps
    cdef long long i = 0

    cdef double t, dl, ddl, tsm, text, t0, t1, v0, v1
    cdef double tau_Mb, tau_mb, I_M, I_m
    cdef double p_M_e, p_m_e, p_M_w, p_m_w, p_x_w
    cdef double tsM, a1M, a1m
    cdef double q2, v2, qm2, vm2, t2, tau2M, tau2m, dl2, ddl2, tsm2, text2, a2M, a2m
    cdef double q3, v3, qm3, vm3, tau3M, tau3m, dl3, ddl3, tsm3, text3, a3M, a3m
    cdef double q4, v4, qm4, vm4, t4, tau4M, tau4m, dl4, ddl4, tsm4, text4, a4M, a4m

    while i < max_steps:
        t = gstep * dt
        # Boundary validity.
        if not (isfinite(qM) and isfinite(vM) and isfinite(qm) and isfinite(vm)):
            status = STATUS_NONFINITE
            steps_done = i
            break
        dl = qM - qm / n
        if fabs(dl) > dl_max:
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
            if fabs(qM - target) <= pos_tol and fabs(dl) <= defl_tol and fabs(ddl) <= vel_tol:
                status = STATUS_ARRIVED
                steps_done = i
                break
        elif kind == REGIME_PE_TRIM:
            if fabs(vM) <= settle_tol:
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
        p_M_e = fabs(I_M) * V
        p_m_e = fabs(I_m) * V
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
        if fabs(dl) > max_dl:
            max_dl = fabs(dl)
        if fabs(tau_Mb) > max_tM:
            max_tM = fabs(tau_Mb)
        if fabs(tau_mb) > max_tm:
            max_tm = fabs(tau_mb)
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
            p_M_e = fabs(I_M) * V
            p_m_e = fabs(I_m) * V
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
    acc[0] = E_M
    acc[1] = E_m
    acc[2] = W_M
    acc[3] = W_m
    acc[4] = W_ext
    acc[5] = pp_M_e
    acc[6] = pp_m_e
    acc[7] = pp_M_w
    acc[8] = pp_m_w
    acc[9] = pp_x_w
    acc[10] = max_dl
    acc[11] = max_tM
    acc[12] = max_tm
    acc[13] = held_tM
    acc[14] = held_tm
    io[0] = gstep
    io[1] = nrows
    io[2] = steps_done
    io[3] = primed
    return status
