"""Hot numeric kernels.

Each kernel is written as a plain loop over float64 scalars/arrays so the
same source runs under numba's nopython mode and, when the JIT is disabled
(see ``accel``), as ordinary interpreted Python. The ``*_py`` names always
point at the uncompiled versions so the two paths can be benchmarked
against each other.
"""

import math

import numpy as np

from .accel import njit


def _rc_sense_trace(forces, gain, decay):
    # V[k] = decay*V[k-1] + gain*(F[k] - F[k-1]), V before the first sample
    # is 0 and F before the first sample equals F[0], so V[0] == 0.
    n = forces.shape[0]
    volts = np.empty(n, dtype=np.float64)
    v = 0.0
    f_prev = forces[0]
    for i in range(n):
        v = decay * v + gain * (forces[i] - f_prev)
        f_prev = forces[i]
        volts[i] = v
    return volts


def _raycast_min(px, py, cos_a, sin_a, segments):
    # Minimum ray-segment intersection parameter (meters) over all rays,
    # +inf when nothing is hit. Rays are unit-direction, t >= 0.
    best = math.inf
    n_rays = cos_a.shape[0]
    n_segs = segments.shape[0]
    for r in range(n_rays):
        dx = cos_a[r]
        dy = sin_a[r]
        for s in range(n_segs):
            ex = segments[s, 2] - segments[s, 0]
            ey = segments[s, 3] - segments[s, 1]
            denom = dx * ey - dy * ex
            if abs(denom) < 1e-300:
                continue
            qx = segments[s, 0] - px
            qy = segments[s, 1] - py
            t = (qx * ey - qy * ex) / denom
            u = (qx * dy - qy * dx) / denom
            if t >= 0.0 and 0.0 <= u <= 1.0 and t < best:
                best = t
    return best


def _servo_span(
    n,
    k0,
    dt,
    v_piezo,
    decay,
    ref_m,
    rate_m,
    ref_s,
    rate_s,
    prev_err,
    have_prev,
    kp,
    kd,
    pos,
    x,
    y,
    heading,
    turn_rate,
    vel,
    drive,
    v_max,
    tau,
    rec_every,
    rec_idx,
    rec_t,
    rec_ref,
    rec_pos,
    rec_drive,
    rec_dist,
    rec_hz,
    dist_mm,
    haptic_hz,
):
    # One simulation tick of the continuous dynamics, repeated n times:
    # reference integration on both nodes, PD servo, first-order motor,
    # kinematics, piezo leakage decay, and time-series recording.
    # Event handling (frames, pulses, timeouts) stays outside; callers
    # guarantee the span contains none.
    for i in range(n):
        k = k0 + i
        ref_m += rate_m * dt
        ref_s += rate_s * dt
        e = ref_s - pos
        if not have_prev:
            prev_err = e
            have_prev = True
        u = kp * e + kd * (e - prev_err) / dt
        if u > 1.0:
            u = 1.0
        elif u < -1.0:
            u = -1.0
        drive = u
        prev_err = e
        vel += dt * (drive * v_max - vel) / tau
        heading += turn_rate * dt
        pos += dt * vel
        x += dt * vel * math.cos(heading)
        y += dt * vel * math.sin(heading)
        v_piezo *= decay
        if rec_every > 0 and k % rec_every == 0:
            rec_t[rec_idx] = k * dt
            rec_ref[rec_idx] = ref_m
            rec_pos[rec_idx] = pos
            rec_drive[rec_idx] = drive
            rec_dist[rec_idx] = dist_mm
            rec_hz[rec_idx] = haptic_hz
            rec_idx += 1
    return (
        v_piezo,
        ref_m,
        ref_s,
        prev_err,
        have_prev,
        pos,
        x,
        y,
        heading,
        vel,
        drive,
        rec_idx,
    )


# Uncompiled references, kept for the backend benchmark.
rc_sense_trace_py = _rc_sense_trace
raycast_min_py = _raycast_min
servo_span_py = _servo_span

rc_sense_trace = njit(cache=True)(_rc_sense_trace)
raycast_min = njit(cache=True)(_raycast_min)
servo_span = njit(cache=True)(_servo_span)
