# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Twin of ``_kernels_py`` with identical signatures and semantics.  The
scalar kernels reproduce the reference bit-for-bit: same libm calls in
the same order, ``pow(x, 2.0)`` where the reference squares via ``**``,
and the interpreter's own ``math.hypot`` (which is not libm's hypot in
the last ulp).  The rollout kernel goes through numpy in the reference,
so it matches to rounding noise and uses plain libm (numpy's hypot and
square are libm hypot and ``x*x``).  Built without -ffast-math:
run-to-run determinism is part of the contract.
"""

from libc.math cimport INFINITY, NAN, atan2, cos, exp, fmod, hypot, isfinite
from libc.math cimport M_PI, pow, sin, sqrt
from libc.stdlib cimport free, malloc

from math import hypot as _py_hypot

BACKEND_NAME = "compiled"

cdef double _EPS = 1e-9
cdef double _TWO_PI = 2.0 * M_PI


cdef inline double _wrap_pi(double theta) nogil:
    """(theta + pi) % (2 pi) - pi with Python's floor-mod convention."""
    cdef double m = fmod(theta + M_PI, _TWO_PI)
    if m != 0.0 and m < 0.0:
        m += _TWO_PI
    return m - M_PI


def pair_social_forces(double px, double py, double vx, double vy,
                       double[:, :] others_pos, double[:, :] others_vel,
                       double lam, double gamma, double n, double n_prime,
                       double factor, double[:, :] out):
    """Social repulsion on one body from each of m neighbors.

    Writes one force vector per neighbor into ``out`` (shape (m, 2)) and
    returns the number of coincident-position neighbors that were skipped.
    """
    cdef Py_ssize_t m = others_pos.shape[0]
    cdef int degenerate = 0
    cdef Py_ssize_t j
    cdef double dx, dy, d, ex, ey, rvx, rvy, ix, iy, ilen, tx, ty
    cdef double b, theta, sign, f_along, f_across
    for j in range(m):
        dx = others_pos[j, 0] - px
        dy = others_pos[j, 1] - py
        d = _py_hypot(dx, dy)
        if d < _EPS:
            out[j, 0] = 0.0
            out[j, 1] = 0.0
            degenerate += 1
            continue
        ex = dx / d
        ey = dy / d
        rvx = vx - others_vel[j, 0]
        rvy = vy - others_vel[j, 1]
        ix = lam * rvx + ex
        iy = lam * rvy + ey
        ilen = _py_hypot(ix, iy)
        if ilen < _EPS:
            out[j, 0] = 0.0
            out[j, 1] = 0.0
            degenerate += 1
            continue
        tx = ix / ilen
        ty = iy / ilen
        b = gamma * ilen
        theta = _wrap_pi(atan2(ey, ex) - atan2(ty, tx))
        sign = 1.0 if theta > 0.0 else (-1.0 if theta < 0.0 else 0.0)
        f_along = -exp(-d / b - pow(n_prime * b * theta, 2.0))
        f_across = -sign * exp(-d / b - pow(n * b * theta, 2.0))
        # force = along-component on the interaction axis plus an
        # across-component on its left normal (-ty, tx)
        out[j, 0] = factor * (f_along * tx - f_across * ty)
        out[j, 1] = factor * (f_along * ty + f_across * tx)
    return degenerate


def nearest_segment_point(double px, double py, double[:, :] segments):
    """Closest point on any segment to (px, py) -> (qx, qy, distance).

    ``segments`` is a (k, 4) array of (x1, y1, x2, y2); with k == 0 the
    distance is +inf.
    """
    cdef double best = INFINITY
    cdef double qx = NAN
    cdef double qy = NAN
    cdef Py_ssize_t i
    cdef double ax, ay, bx, by, abx, aby, L2, t, cx, cy, d
    for i in range(segments.shape[0]):
        ax = segments[i, 0]
        ay = segments[i, 1]
        bx = segments[i, 2]
        by = segments[i, 3]
        abx = bx - ax
        aby = by - ay
        L2 = abx * abx + aby * aby
        if L2 < 1e-18:
            cx = ax
            cy = ay
        else:
            t = ((px - ax) * abx + (py - ay) * aby) / L2
            t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
            cx = ax + t * abx
            cy = ay + t * aby
        d = _py_hypot(px - cx, py - cy)
        if d < best:
            best = d
            qx = cx
            qy = cy
    return qx, qy, best


def obstacle_force(double px, double py, double radius,
                   double[:, :] segments, double factor, double decay):
    """Exponential repulsion from the nearest obstacle point.

    Returns (fx, fy, center_distance, degenerate); see the reference
    backend for the degenerate convention.
    """
    qx, qy, d = nearest_segment_point(px, py, segments)
    cdef double dd = d
    cdef double mag
    if not isfinite(dd):
        return 0.0, 0.0, INFINITY, 0
    if dd < _EPS:
        return 0.0, 0.0, dd, 1
    mag = factor * exp((radius - dd) / decay)
    return mag * (px - qx) / dd, mag * (py - qy) / dd, dd, 0


cdef inline void _pair_c(double px, double py, double vx, double vy,
                         double ox, double oy, double ovx, double ovy,
                         double lam, double gamma, double n, double n_prime,
                         double factor, double* fx, double* fy) nogil:
    """Rollout twin of the pair force.

    Matches the numpy reference to rounding noise, not bit-for-bit, which
    buys two shortcuts: plain sqrt for the norms and the interaction
    angle in one atan2 of cross/dot (the reference wraps a difference of
    two arctangents).  Both agree with the reference to ~1 ulp of the
    angle, far inside the documented 1e-12 rollout agreement band.
    """
    cdef double dx = ox - px
    cdef double dy = oy - py
    cdef double d = sqrt(dx * dx + dy * dy)
    cdef double ex, ey, ix, iy, ilen, tx, ty, b, theta, sign, c1, c2
    cdef double md_b, f_along, f_across
    if d < _EPS:
        fx[0] = 0.0
        fy[0] = 0.0
        return
    ex = dx / d
    ey = dy / d
    ix = lam * (vx - ovx) + ex
    iy = lam * (vy - ovy) + ey
    ilen = sqrt(ix * ix + iy * iy)
    if ilen < _EPS:
        fx[0] = 0.0
        fy[0] = 0.0
        return
    tx = ix / ilen
    ty = iy / ilen
    b = gamma * ilen
    theta = atan2(tx * ey - ty * ex, tx * ex + ty * ey)
    sign = 1.0 if theta > 0.0 else (-1.0 if theta < 0.0 else 0.0)
    c1 = n_prime * b * theta
    c2 = n * b * theta
    md_b = -d / b
    f_along = -exp(md_b - c1 * c1)
    f_across = -sign * exp(md_b - c2 * c2)
    fx[0] = factor * (f_along * tx - f_across * ty)
    fy[0] = factor * (f_along * ty + f_across * tx)


cdef inline void _obstacle_c(double px, double py, double radius,
                             double[:, :] segments, double factor,
                             double decay, double* ofx, double* ofy) nogil:
    cdef double best = INFINITY
    cdef double qx = 0.0
    cdef double qy = 0.0
    cdef Py_ssize_t k
    cdef double ax, ay, bx, by, abx, aby, L2, t, cx, cy, d, safe, mag
    for k in range(segments.shape[0]):
        ax = segments[k, 0]
        ay = segments[k, 1]
        bx = segments[k, 2]
        by = segments[k, 3]
        abx = bx - ax
        aby = by - ay
        L2 = abx * abx + aby * aby
        if L2 < 1e-18:
            cx = ax
            cy = ay
        else:
            t = ((px - ax) * abx + (py - ay) * aby) / L2
            t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
            cx = ax + t * abx
            cy = ay + t * aby
        d = hypot(px - cx, py - cy)
        if d < best:
            best = d
            qx = cx
            qy = cy
    safe = best if best > _EPS else _EPS
    mag = factor * exp((radius - best) / decay)
    ofx[0] = mag * (px - qx) / safe
    ofy[0] = mag * (py - qy) / safe


def social_work_rollouts(double[:, :, :] poses, double[:] cand_v,
                         double[:, :] agents_pos, double[:, :] agents_vel,
                         double[:] agents_radius, double[:, :] segments,
                         object params, double dt, double[:] out):
    """Predicted inter-personal cost of each candidate robot arc.

    Same contract as the reference backend: pedestrians are co-simulated
    over each arc with the social-force laws and the horizon mean of
    robot-attributable force magnitudes is written into ``out``.
    """
    cdef Py_ssize_t S = poses.shape[0]
    cdef Py_ssize_t T = poses.shape[1] - 1
    cdef Py_ssize_t N = agents_pos.shape[0]
    cdef Py_ssize_t s, t, i, j
    if N == 0:
        for s in range(S):
            out[s] = 0.0
        return
    cdef double max_speed = float(params[1])
    cdef double relax = float(params[2])
    cdef double lam = float(params[3])
    cdef double gamma = float(params[4])
    cdef double n = float(params[5])
    cdef double n_prime = float(params[6])
    cdef double social_factor = float(params[7])
    cdef double obs_factor = float(params[8])
    cdef double obs_decay = float(params[9])
    cdef Py_ssize_t K = segments.shape[0]

    cdef double* buf = <double*> malloc(6 * N * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* pos = buf
    cdef double* vel = buf + 2 * N
    cdef double* force = buf + 4 * N

    cdef double rx, ry, rth, rvx, rvy, work_s, rss, rob_fx, rob_fy
    cdef double fix, fiy, fx, fy, gx, gy, ofx, ofy, speed, scale
    try:
        for s in range(S):
            for i in range(N):
                pos[2 * i] = agents_pos[i, 0]
                pos[2 * i + 1] = agents_pos[i, 1]
                vel[2 * i] = agents_vel[i, 0]
                vel[2 * i + 1] = agents_vel[i, 1]
            work_s = 0.0
            for t in range(T):
                rx = poses[s, t, 0]
                ry = poses[s, t, 1]
                rth = poses[s, t, 2]
                rvx = cand_v[s] * cos(rth)
                rvy = cand_v[s] * sin(rth)
                rss = 0.0
                rob_fx = 0.0
                rob_fy = 0.0
                for i in range(N):
                    # pedestrian intent: keep walking at the start velocity
                    fix = (agents_vel[i, 0] - vel[2 * i]) / relax
                    fiy = (agents_vel[i, 1] - vel[2 * i + 1]) / relax
                    for j in range(N):
                        if j == i:
                            continue
                        _pair_c(pos[2 * i], pos[2 * i + 1],
                                vel[2 * i], vel[2 * i + 1],
                                pos[2 * j], pos[2 * j + 1],
                                vel[2 * j], vel[2 * j + 1],
                                lam, gamma, n, n_prime, social_factor,
                                &fx, &fy)
                        fix += fx
                        fiy += fy
                    _pair_c(pos[2 * i], pos[2 * i + 1],
                            vel[2 * i], vel[2 * i + 1],
                            rx, ry, rvx, rvy,
                            lam, gamma, n, n_prime, social_factor, &fx, &fy)
                    fix += fx
                    fiy += fy
                    rss += hypot(fx, fy)
                    # reciprocal: this agent's push on the robot
                    _pair_c(rx, ry, rvx, rvy,
                            pos[2 * i], pos[2 * i + 1],
                            vel[2 * i], vel[2 * i + 1],
                            lam, gamma, n, n_prime, social_factor, &gx, &gy)
                    rob_fx += gx
                    rob_fy += gy
                    if K:
                        _obstacle_c(pos[2 * i], pos[2 * i + 1],
                                    agents_radius[i], segments,
                                    obs_factor, obs_decay, &ofx, &ofy)
                        fix += ofx
                        fiy += ofy
                    force[2 * i] = fix
                    force[2 * i + 1] = fiy
                work_s += rss + hypot(rob_fx, rob_fy)
                for i in range(N):
                    vel[2 * i] += force[2 * i] * dt
                    vel[2 * i + 1] += force[2 * i + 1] * dt
                    speed = sqrt(vel[2 * i] * vel[2 * i]
                                 + vel[2 * i + 1] * vel[2 * i + 1])
                    if speed > max_speed:
                        scale = max_speed / speed
                        vel[2 * i] *= scale
                        vel[2 * i + 1] *= scale
                    pos[2 * i] += vel[2 * i] * dt
                    pos[2 * i + 1] += vel[2 * i + 1] * dt
            out[s] = work_s / T
    finally:
        free(buf)
