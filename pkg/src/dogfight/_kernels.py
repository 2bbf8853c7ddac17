"""Compiled playout kernels mirroring the pure-Python game model.

States are flat float64 arrays ``[x1, y1, v1, theta1, zeta1, x2, y2, v2,
theta2, zeta2]``. Every arithmetic step follows the reference functions in
``airframe``, ``engagement`` and ``matrix_game`` operation for operation so
both paths agree to rounding; ``tests/test_kernels.py`` checks this.
"""
import math

import numpy as np
from numba import njit

ONGOING, WIN1, WIN2, DRAW = 0, 1, 2, 3
RANDOM, GREEDY, EPSILON_GREEDY, MATRIX_GAME = 0, 1, 2, 3
EPS = 1e-12


@njit(cache=True)
def _acos(c):
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    return math.acos(c)


@njit(cache=True)
def evaluate(s, eng):
    """(outcome code, shaped reward 1, shaped reward 2); eng = [d_min, d_max, d_nom, r_d, bmax, amax, w, gamma]."""
    w = eng[6]
    dx = s[5] - s[0]
    dy = s[6] - s[1]
    d = math.hypot(dx, dy)
    if d < 1e-9:
        half = (1.0 - w) * 0.5
        return ONGOING, half, half
    ux = dx / d
    uy = dy / d
    c1 = math.cos(s[3]) * ux + math.sin(s[3]) * uy
    c2 = math.cos(s[8]) * ux + math.sin(s[8]) * uy
    b1 = _acos(c1)
    a1 = _acos(c2)
    b2 = _acos(-c2)
    a2 = _acos(-c1)
    in_range = eng[0] < d < eng[1]
    win1 = in_range and b1 < eng[4] and a1 < eng[5]
    win2 = in_range and b2 < eng[4] and a2 < eng[5]
    code = ONGOING
    t1 = 0.0
    if win1 and win2:
        code = DRAW
    elif win1:
        code = WIN1
        t1 = 1.0
    elif win2:
        code = WIN2
        t1 = -1.0
    e = math.exp(-abs(d - eng[2]) / eng[3])
    br1 = 1.0 - (1.0 - a1 / math.pi) - (1.0 - b1 / math.pi)
    br2 = 1.0 - (1.0 - a2 / math.pi) - (1.0 - b2 / math.pi)
    sh1 = 0.5 - 0.5 * br1 * e
    sh2 = 0.5 - 0.5 * br2 * e
    return code, w * t1 + (1.0 - w) * sh1, w * -t1 + (1.0 - w) * sh2


@njit(cache=True)
def _is_capture(s, eng):
    dx = s[5] - s[0]
    dy = s[6] - s[1]
    d2 = dx * dx + dy * dy
    if not (eng[0] * eng[0] < d2 < eng[1] * eng[1]):
        return False
    # Cheap cone prefilter with a generous margin; evaluate() has the final word.
    d = math.sqrt(d2)
    c1 = (math.cos(s[3]) * dx + math.sin(s[3]) * dy) / d
    c2 = (math.cos(s[8]) * dx + math.sin(s[8]) * dy) / d
    cb = math.cos(eng[4]) - 1e-6
    ca = math.cos(eng[5]) - 1e-6
    if not ((c1 > cb and c2 > ca) or (-c2 > cb and -c1 > ca)):
        return False
    return evaluate(s, eng)[0] != ONGOING


@njit(cache=True)
def path(x, y, v, theta, zeta, m, ac, out):
    """Fill ``out[n_s, 5]`` with the states after each inner step; ac = [zeta_dot, zeta_max, dt, n_s, g]."""
    dt = ac[2]
    dzeta = ac[0] * dt
    zmax = ac[1]
    k_turn = ac[4] / v * dt
    vdt = v * dt
    n_s = int(ac[3])
    dtheta = k_turn * math.tan(zeta)
    for i in range(n_s):
        # Once the bank is clamped tan(zeta) no longer changes; reuse it.
        if m == 0:
            nz = max(zeta - dzeta, -zmax)
            if nz != zeta:
                zeta = nz
                dtheta = k_turn * math.tan(zeta)
        elif m == 2:
            nz = min(zeta + dzeta, zmax)
            if nz != zeta:
                zeta = nz
                dtheta = k_turn * math.tan(zeta)
        theta += dtheta
        x += vdt * math.cos(theta)
        y += vdt * math.sin(theta)
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = v
        out[i, 3] = theta
        out[i, 4] = zeta


@njit(cache=True)
def _paths(s, ac1, ac2, p1, p2):
    for m in range(3):
        path(s[0], s[1], s[2], s[3], s[4], m, ac1, p1[m])
        path(s[5], s[6], s[7], s[8], s[9], m, ac2, p2[m])


@njit(cache=True)
def _join(a, b, out):
    for i in range(5):
        out[i] = a[i]
        out[5 + i] = b[i]


@njit(cache=True)
def _first_capture(pa, pb, eng, substep, out):
    n = pa.shape[0]
    if substep:
        lo2 = eng[0] * eng[0]
        hi2 = eng[1] * eng[1]
        for i in range(n):
            dx = pb[i, 0] - pa[i, 0]
            dy = pb[i, 1] - pa[i, 1]
            if not (lo2 < dx * dx + dy * dy < hi2):
                continue
            _join(pa[i], pb[i], out)
            if _is_capture(out, eng):
                return
    _join(pa[n - 1], pb[n - 1], out)


@njit(cache=True)
def successor_grid(s, ac1, ac2, eng, substep, grid, p1, p2):
    """Joint successors into ``grid[3, 3, 10]`` indexed [m1, m2]."""
    _paths(s, ac1, ac2, p1, p2)
    for j in range(3):
        for l in range(3):
            _first_capture(p1[j], p2[l], eng, substep, grid[j, l])


@njit(cache=True)
def payoff_tables(s, ac1, ac2, eng, substep, t1, t2, grid, p1, p2):
    successor_grid(s, ac1, ac2, eng, substep, grid, p1, p2)
    for j in range(3):
        for l in range(3):
            _, r1, r2 = evaluate(grid[j, l], eng)
            t1[j, l] = r1
            t2[l, j] = r2


@njit(cache=True)
def maxmin(rows, probs):
    """Row player's max-min strategy into ``probs``; returns the guaranteed value."""
    m, n = rows.shape
    lo = rows[0, 0]
    hi = rows[0, 0]
    for i in range(m):
        for j in range(n):
            lo = min(lo, rows[i, j])
            hi = max(hi, rows[i, j])
    if hi - lo <= EPS * max(1.0, abs(hi)):
        for i in range(m):
            probs[i] = 1.0 / m
        return hi
    shift = 1.0 - lo
    width = n + m + 1
    tab = np.zeros((m, width))
    for i in range(m):
        for j in range(n):
            tab[i, j] = rows[i, j] + shift
        tab[i, n + i] = 1.0
        tab[i, width - 1] = 1.0
    obj = np.zeros(width)
    for j in range(n):
        obj[j] = 1.0
    basis = np.empty(m, np.int64)
    for i in range(m):
        basis[i] = n + i
    while True:
        enter = -1
        for j in range(n + m):
            if obj[j] > EPS:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = math.inf
        for i in range(m):
            a = tab[i, enter]
            if a > EPS:
                ratio = tab[i, width - 1] / a
                if ratio < best - EPS or (ratio <= best + EPS and leave >= 0 and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        piv = tab[leave, enter]
        for c in range(width):
            tab[leave, c] = tab[leave, c] / piv
        for i in range(m):
            if i != leave:
                f = tab[i, enter]
                if f != 0.0:
                    for c in range(width):
                        tab[i, c] = tab[i, c] - f * tab[leave, c]
        f = obj[enter]
        for c in range(width):
            obj[c] = obj[c] - f * tab[leave, c]
        basis[leave] = enter
    total = 0.0
    for i in range(m):
        y = max(-obj[n + i], 0.0)
        probs[i] = y
        total += y
    if total > 0:
        for i in range(m):
            probs[i] = probs[i] / total
    else:
        for i in range(m):
            probs[i] = 1.0 / m
    value = math.inf
    for k in range(n):
        acc = 0.0
        for i in range(m):
            acc += probs[i] * rows[i, k]
        value = min(value, acc)
    return value


@njit(cache=True)
def sample(probs, u):
    acc = 0.0
    last = 0
    for j in range(probs.shape[0]):
        p = probs[j]
        if p > 0.0:
            acc += p
            last = j
            if u < acc:
                return j
    return last


@njit(cache=True)
def _uniform_move(u):
    return min(int(3.0 * u), 2)


@njit(cache=True)
def greedy(s, player, ac1, ac2, eng, substep, scratch_path, frozen, tmp):
    """Best single-aircraft maneuver with the opponent held still."""
    best = 0
    best_r = -math.inf
    n = scratch_path.shape[0]
    for m in range(3):
        if player == 1:
            path(s[0], s[1], s[2], s[3], s[4], m, ac1, scratch_path)
            for i in range(n):
                frozen[i] = s[5:10]
            _first_capture(scratch_path, frozen, eng, substep, tmp)
            r = evaluate(tmp, eng)[1]
        else:
            path(s[5], s[6], s[7], s[8], s[9], m, ac2, scratch_path)
            for i in range(n):
                frozen[i] = s[0:5]
            _first_capture(frozen, scratch_path, eng, substep, tmp)
            r = evaluate(tmp, eng)[2]
        if r > best_r:
            best = m
            best_r = r
    return best


@njit(cache=True)
def joint_playout_move(s, kind, epsilon, u, ac1, ac2, eng, substep, grid, p1, p2, t1, t2, probs, frozen, tmp):
    """Both players' playout maneuvers from one row of uniforms ``u[4]``; the rest is scratch space."""
    if kind == MATRIX_GAME:
        payoff_tables(s, ac1, ac2, eng, substep, t1, t2, grid, p1, p2)
        maxmin(t1, probs)
        a = sample(probs, u[0])
        maxmin(t2, probs)
        b = sample(probs, u[1])
        return a, b
    if kind == RANDOM:
        return _uniform_move(u[0]), _uniform_move(u[1])
    if kind == EPSILON_GREEDY and u[2] < epsilon:
        a = _uniform_move(u[0])
    else:
        a = greedy(s, 1, ac1, ac2, eng, substep, p1[0], frozen, tmp)
    if kind == EPSILON_GREEDY and u[3] < epsilon:
        b = _uniform_move(u[1])
    else:
        b = greedy(s, 2, ac1, ac2, eng, substep, p1[0], frozen, tmp)
    return a, b


@njit(cache=True)
def simulate(s0, kind, t_sim, epsilon, u, ac1, ac2, eng, substep, absorbing):
    """Discounted shaped returns of one truncated playout from ``s0``."""
    n_s = int(ac1[3])
    grid = np.empty((3, 3, 10))
    p1 = np.empty((3, n_s, 5))
    p2 = np.empty((3, n_s, 5))
    t1 = np.empty((3, 3))
    t2 = np.empty((3, 3))
    probs = np.empty(3)
    frozen = np.empty((n_s, 5))
    tmp = np.empty(10)
    gamma = eng[7]
    s = s0.copy()
    R1 = 0.0
    R2 = 0.0
    disc = 1.0
    for k in range(t_sim):
        code, r1, r2 = evaluate(s, eng)
        R1 += disc * r1
        R2 += disc * r2
        if code != ONGOING:
            if absorbing:
                for _ in range(k + 1, t_sim):
                    disc *= gamma
                    R1 += disc * r1
                    R2 += disc * r2
            break
        if k == t_sim - 1:
            break
        a, b = joint_playout_move(s, kind, epsilon, u[k], ac1, ac2, eng, substep,
                                  grid, p1, p2, t1, t2, probs, frozen, tmp)
        path(s[0], s[1], s[2], s[3], s[4], a, ac1, p1[0])
        path(s[5], s[6], s[7], s[8], s[9], b, ac2, p2[0])
        _first_capture(p1[0], p2[0], eng, substep, tmp)
        s[:] = tmp
        disc *= gamma
    return R1, R2


@njit(cache=True)
def simulate_many(states, kind, t_sim, epsilon, u, ac1, ac2, eng, substep, absorbing, out):
    for i in range(states.shape[0]):
        out[i, 0], out[i, 1] = simulate(states[i], kind, t_sim, epsilon, u[i], ac1, ac2, eng,
                                        substep, absorbing)
