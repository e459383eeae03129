"""Pure-Python (numpy) kernel backend.

Reference twin of the compiled ``_kernels`` extension: identical function
signatures and semantics, numpy-vectorized where a loop would hurt.  The
compiled backend is preferred at import time when present; this module is
always available and is the ground truth the extension is tested against.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

_EPS = 1e-9


def pair_social_forces(px, py, vx, vy, others_pos, others_vel,
                       lam, gamma, n, n_prime, factor, out):
    """Social repulsion on one body from each of m neighbors.

    The interaction direction blends relative velocity and relative
    position; the force decays exponentially with distance (length scale
    proportional to the interaction strength) and is modulated across the
    interaction axis by two anisotropy exponents.

    Writes one force vector per neighbor into ``out`` (shape (m, 2)) and
    returns the number of coincident-position neighbors that were skipped.
    """
    m = others_pos.shape[0]
    degenerate = 0
    for j in range(m):
        dx = others_pos[j, 0] - px
        dy = others_pos[j, 1] - py
        d = math.hypot(dx, dy)
        if d < _EPS:
            out[j, 0] = 0.0
            out[j, 1] = 0.0
            degenerate += 1
            continue
        ex, ey = dx / d, dy / d
        rvx = vx - others_vel[j, 0]
        rvy = vy - others_vel[j, 1]
        ix = lam * rvx + ex
        iy = lam * rvy + ey
        ilen = math.hypot(ix, iy)
        if ilen < _EPS:
            out[j, 0] = 0.0
            out[j, 1] = 0.0
            degenerate += 1
            continue
        tx, ty = ix / ilen, iy / ilen
        b = gamma * ilen
        theta = math.atan2(ey, ex) - math.atan2(ty, tx)
        theta = (theta + math.pi) % (2.0 * math.pi) - math.pi
        sign = 0.0 if theta == 0.0 else math.copysign(1.0, theta)
        f_along = -math.exp(-d / b - (n_prime * b * theta) ** 2)
        f_across = -sign * math.exp(-d / b - (n * b * theta) ** 2)
        # force = along-component on the interaction axis plus an
        # across-component on its left normal (-ty, tx)
        out[j, 0] = factor * (f_along * tx - f_across * ty)
        out[j, 1] = factor * (f_along * ty + f_across * tx)
    return degenerate


def nearest_segment_point(px, py, segments):
    """Closest point on any segment to (px, py) -> (qx, qy, distance).

    ``segments`` is a (k, 4) array of (x1, y1, x2, y2); with k == 0 the
    distance is +inf.
    """
    best = math.inf
    qx = qy = math.nan
    for i in range(segments.shape[0]):
        ax, ay, bx, by = segments[i, 0], segments[i, 1], segments[i, 2], segments[i, 3]
        abx, aby = bx - ax, by - ay
        L2 = abx * abx + aby * aby
        if L2 < 1e-18:
            cx, cy = ax, ay
        else:
            t = ((px - ax) * abx + (py - ay) * aby) / L2
            t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
            cx, cy = ax + t * abx, ay + t * aby
        d = math.hypot(px - cx, py - cy)
        if d < best:
            best = d
            qx, qy = cx, cy
    return qx, qy, best


def obstacle_force(px, py, radius, segments, factor, decay):
    """Exponential repulsion from the nearest obstacle point.

    Returns (fx, fy, center_distance, degenerate).  ``degenerate`` is 1
    when the body sits exactly on an obstacle (direction undefined): the
    magnitude is still returned in the distance slot and the caller picks
    a direction.
    """
    qx, qy, d = nearest_segment_point(px, py, segments)
    if not math.isfinite(d):
        return 0.0, 0.0, math.inf, 0
    if d < _EPS:
        return 0.0, 0.0, d, 1
    mag = factor * math.exp((radius - d) / decay)
    return mag * (px - qx) / d, mag * (py - qy) / d, d, 0


def social_work_rollouts(poses, cand_v, agents_pos, agents_vel, agents_radius,
                         segments, params, dt, out):
    """Predicted inter-personal cost of each candidate robot arc.

    For every candidate, pedestrians are co-simulated over the arc horizon
    with the social-force laws (robot treated as one more pedestrian whose
    intent is the candidate command; pedestrian intent is their current
    velocity held constant).  The accumulated cost is the horizon mean of

        sum_i |robot-attributable force on agent i|  +  |social force on robot|

    Wall handling stays with the base clearance/pruning criteria, so this
    term is identically zero whenever no agents are observed.

    poses:    (S, T+1, 3) candidate arcs (x, y, heading)
    cand_v:   (S,) commanded speed per candidate
    params:   (desired_speed_cap, max_speed, relax, lam, gamma, n, n_prime,
               social_factor, obs_factor, obs_decay, agent_radius_default)
    out:      (S,) filled with the per-candidate cost
    """
    S = poses.shape[0]
    T = poses.shape[1] - 1
    N = agents_pos.shape[0]
    if N == 0:
        out[:] = 0.0
        return
    (_speed_cap, max_speed, relax, lam, gamma, n, n_prime,
     social_factor, obs_factor, obs_decay, _r_default) = params

    # state arrays replicated per candidate: (S, N, 2)
    pos = np.broadcast_to(agents_pos, (S, N, 2)).copy()
    vel = np.broadcast_to(agents_vel, (S, N, 2)).copy()
    # pedestrian intent: keep walking at the current velocity
    des_vel = np.broadcast_to(agents_vel, (S, N, 2)).copy()

    work = np.zeros(S)
    for t in range(T):
        rx = poses[:, t, 0]
        ry = poses[:, t, 1]
        rth = poses[:, t, 2]
        rvx = cand_v * np.cos(rth)
        rvy = cand_v * np.sin(rth)

        force = (des_vel - vel) / relax  # relaxation toward intent
        robot_social_sum = np.zeros(S)
        rob_fx = np.zeros(S)
        rob_fy = np.zeros(S)
        for i in range(N):
            pix = pos[:, i, 0]
            piy = pos[:, i, 1]
            vix = vel[:, i, 0]
            viy = vel[:, i, 1]
            # neighbors: every other pedestrian plus the robot
            for j in range(N):
                if j == i:
                    continue
                fx, fy = _pair_vec(pix, piy, vix, viy,
                                   pos[:, j, 0], pos[:, j, 1],
                                   vel[:, j, 0], vel[:, j, 1],
                                   lam, gamma, n, n_prime, social_factor)
                force[:, i, 0] += fx
                force[:, i, 1] += fy
            fx, fy = _pair_vec(pix, piy, vix, viy, rx, ry, rvx, rvy,
                               lam, gamma, n, n_prime, social_factor)
            force[:, i, 0] += fx
            force[:, i, 1] += fy
            robot_social_sum += np.hypot(fx, fy)
            # reciprocal: this agent's push on the robot
            gx, gy = _pair_vec(rx, ry, rvx, rvy, pix, piy, vix, viy,
                               lam, gamma, n, n_prime, social_factor)
            rob_fx += gx
            rob_fy += gy
            if segments.shape[0]:
                ofx, ofy = _obstacle_vec(pix, piy, agents_radius[i], segments,
                                         obs_factor, obs_decay)
                force[:, i, 0] += ofx
                force[:, i, 1] += ofy

        work += robot_social_sum + np.hypot(rob_fx, rob_fy)

        vel += force * dt
        speed = np.linalg.norm(vel, axis=2)
        over = speed > max_speed
        if over.any():
            scale = np.where(over, max_speed / np.maximum(speed, 1e-12), 1.0)
            vel *= scale[:, :, None]
        pos += vel * dt

    out[:] = work / T


def _pair_vec(px, py, vx, vy, ox, oy, ovx, ovy, lam, gamma, n, n_prime, factor):
    """Vectorized twin of the scalar pair force (arrays broadcast together)."""
    dx = ox - px
    dy = oy - py
    d = np.hypot(dx, dy)
    safe_d = np.maximum(d, _EPS)
    ex = dx / safe_d
    ey = dy / safe_d
    ix = lam * (vx - ovx) + ex
    iy = lam * (vy - ovy) + ey
    ilen = np.hypot(ix, iy)
    safe_ilen = np.maximum(ilen, _EPS)
    tx = ix / safe_ilen
    ty = iy / safe_ilen
    b = gamma * safe_ilen
    theta = np.arctan2(ey, ex) - np.arctan2(ty, tx)
    theta = (theta + np.pi) % (2.0 * np.pi) - np.pi
    sign = np.sign(theta)
    f_along = -np.exp(-d / b - (n_prime * b * theta) ** 2)
    f_across = -sign * np.exp(-d / b - (n * b * theta) ** 2)
    ok = (d >= _EPS) & (ilen >= _EPS)
    fx = np.where(ok, factor * (f_along * tx - f_across * ty), 0.0)
    fy = np.where(ok, factor * (f_along * ty + f_across * tx), 0.0)
    return fx, fy


def _obstacle_vec(px, py, radius, segments, factor, decay):
    """Vectorized nearest-wall repulsion for (S,) point arrays."""
    best = np.full(px.shape, np.inf)
    qx = np.zeros(px.shape)
    qy = np.zeros(px.shape)
    for i in range(segments.shape[0]):
        ax, ay, bx, by = segments[i]
        abx, aby = bx - ax, by - ay
        L2 = abx * abx + aby * aby
        if L2 < 1e-18:
            cx = np.full(px.shape, ax)
            cy = np.full(px.shape, ay)
        else:
            t = np.clip(((px - ax) * abx + (py - ay) * aby) / L2, 0.0, 1.0)
            cx = ax + t * abx
            cy = ay + t * aby
        d = np.hypot(px - cx, py - cy)
        closer = d < best
        best = np.where(closer, d, best)
        qx = np.where(closer, cx, qx)
        qy = np.where(closer, cy, qy)
    safe = np.maximum(best, _EPS)
    mag = factor * np.exp((radius - best) / decay)
    return mag * (px - qx) / safe, mag * (py - qy) / safe
