"""Compiled inner loops: segment sweep, pair scans, and the flow integrator.

Everything here is deterministic (sequential reductions, no threading) so a
run with a fixed configuration is bitwise reproducible.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

# Forcing family codes shared with chordarc.forcing.
F_ZERO = 0
F_AREA = 1
F_LENGTH = 2
F_JIANPAN = 3
F_CONSTANT = 4

# Integrator status codes shared with chordarc.flow.
S_OK = 0
S_BLOWUP = 1
S_STIFF = 2
S_UNRESOLVED = 3
S_SPREAD = 4

DT_FLOOR = 1e-16
# Edge-length ratio (max/min - 1) past which the integrator hands control
# back for mesh maintenance.
SPREAD_CAP = 0.1


@nb.njit(cache=True, inline="always")
def _orient(ax, ay, bx, by, cx, cy, eps):
    """Sign of the area of (a, b, c); 0 when c is within eps of line ab."""
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    thr = eps * math.hypot(bx - ax, by - ay)
    if det > thr:
        return 1
    if det < -thr:
        return -1
    return 0


@nb.njit(cache=True, inline="always")
def _on_segment(ax, ay, bx, by, cx, cy, eps):
    return (
        min(ax, bx) - eps <= cx <= max(ax, bx) + eps
        and min(ay, by) - eps <= cy <= max(ay, by) + eps
    )


@nb.njit(cache=True)
def segments_hit(p1x, p1y, q1x, q1y, p2x, p2y, q2x, q2y, eps):
    """True when the closed segments meet; touching within eps counts."""
    o1 = _orient(p1x, p1y, q1x, q1y, p2x, p2y, eps)
    o2 = _orient(p1x, p1y, q1x, q1y, q2x, q2y, eps)
    o3 = _orient(p2x, p2y, q2x, q2y, p1x, p1y, eps)
    o4 = _orient(p2x, p2y, q2x, q2y, q1x, q1y, eps)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(p1x, p1y, q1x, q1y, p2x, p2y, eps):
        return True
    if o2 == 0 and _on_segment(p1x, p1y, q1x, q1y, q2x, q2y, eps):
        return True
    if o3 == 0 and _on_segment(p2x, p2y, q2x, q2y, p1x, p1y, eps):
        return True
    if o4 == 0 and _on_segment(p2x, p2y, q2x, q2y, q1x, q1y, eps):
        return True
    return False


@nb.njit(cache=True, nogil=True)
def embedded_sweep(V, eps):
    """Interval sweep over x for intersections among non-adjacent edges.

    Returns (ok, i, j); (i, j) is the first offending edge pair in sweep
    order, -1 when embedded.  Expected cost O(N log N) for curve-like input.
    """
    n = V.shape[0]
    xmin = np.empty(n)
    xmax = np.empty(n)
    ymin = np.empty(n)
    ymax = np.empty(n)
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        xmin[i] = min(V[i, 0], V[j, 0])
        xmax[i] = max(V[i, 0], V[j, 0])
        ymin[i] = min(V[i, 1], V[j, 1])
        ymax[i] = max(V[i, 1], V[j, 1])
    order = np.argsort(xmin)
    for a in range(n):
        i = order[a]
        i1 = i + 1 if i + 1 < n else 0
        for b in range(a + 1, n):
            j = order[b]
            if xmin[j] > xmax[i] + eps:
                break
            j1 = j + 1 if j + 1 < n else 0
            if i1 == j or j1 == i:
                continue
            if ymin[j] > ymax[i] + eps or ymax[j] < ymin[i] - eps:
                continue
            if segments_hit(
                V[i, 0], V[i, 1], V[i1, 0], V[i1, 1],
                V[j, 0], V[j, 1], V[j1, 0], V[j1, 1], eps,
            ):
                lo = i if i < j else j
                hi = j if i < j else i
                return False, lo, hi
    return True, -1, -1


@nb.njit(cache=True, nogil=True)
def chord_arc_scan(V, cum, L):
    """Global minimum of d/psi over unordered vertex pairs.

    Returns (ratio_min, i, j, touch) with touch = 1 when two distinct
    vertices coincide (d = 0), in which case (i, j) is the offending pair.
    Ties resolve to the smallest (i, j) because the scan order is fixed.
    """
    n = V.shape[0]
    lpi = L / math.pi
    pil = math.pi / L
    best = np.inf
    bi = -1
    bj = -1
    for i in range(n - 1):
        xi = V[i, 0]
        yi = V[i, 1]
        ci = cum[i]
        for j in range(i + 1, n):
            dx = V[j, 0] - xi
            dy = V[j, 1] - yi
            d = math.sqrt(dx * dx + dy * dy)
            if d == 0.0:
                return np.nan, i, j, 1
            lf = cum[j] - ci
            lm = lf if lf <= L - lf else L - lf
            r = d / (lpi * math.sin(pil * lm))
            if r < best:
                best = r
                bi = i
                bj = j
    return best, bi, bj, 0


@nb.njit(cache=True)
def _eval_velocity(X, fcode, h_const):
    """Velocity field V = (h - kappa) nu and step-control scalars.

    Returns (V, h, e_min, f_max, kres, ok) where kres = max|kappa| * e_min
    is the curvature-resolution indicator and ok is False when the forcing
    left its domain (non-positive area for the L/2A family).
    """
    n = X.shape[0]
    ex = np.empty(n)
    ey = np.empty(n)
    el = np.empty(n)
    area2 = 0.0
    e_min = np.inf
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        dx = X[j, 0] - X[i, 0]
        dy = X[j, 1] - X[i, 1]
        ex[i] = dx
        ey[i] = dy
        l = math.sqrt(dx * dx + dy * dy)
        el[i] = l
        if l < e_min:
            e_min = l
        area2 += X[i, 0] * X[j, 1] - X[j, 0] * X[i, 1]

    kap = np.empty(n)
    nx = np.empty(n)
    ny = np.empty(n)
    num = 0.0
    den = 0.0
    kmax = 0.0
    for i in range(n):
        ip = i - 1 if i > 0 else n - 1
        uix = ex[ip] / el[ip]
        uiy = ey[ip] / el[ip]
        uox = ex[i] / el[i]
        uoy = ey[i] / el[i]
        cross = uix * uoy - uiy * uox
        dot = uix * uox + uiy * uoy
        phi = math.atan2(cross, dot)
        k = phi / (0.5 * (el[ip] + el[i]))
        kap[i] = k
        if abs(k) > kmax:
            kmax = abs(k)
        cx = ex[i] + ex[ip]
        cy = ey[i] + ey[ip]
        cn = math.sqrt(cx * cx + cy * cy)
        tnx = cy / cn
        tny = -cx / cn
        nx[i] = tnx
        ny[i] = tny
        if fcode == F_AREA:
            w = 0.5 * cn
            num += k * w
            den += w
        elif fcode == F_LENGTH:
            w = (uix - uox) * tnx + (uiy - uoy) * tny
            num += k * w
            den += w

    ok = True
    if fcode == F_ZERO:
        h = 0.0
    elif fcode == F_CONSTANT:
        h = h_const
    elif fcode == F_JIANPAN:
        area = 0.5 * area2
        if area <= 0.0:
            ok = False
            h = np.nan
        else:
            total = 0.0
            for i in range(n):
                total += el[i]
            h = total / (2.0 * area)
    else:
        h = num / den

    V = np.empty((n, 2))
    f_max = 0.0
    for i in range(n):
        f = h - kap[i]
        if abs(f) > f_max:
            f_max = abs(f)
        V[i, 0] = f * nx[i]
        V[i, 1] = f * ny[i]
    return V, h, e_min, f_max, kmax * e_min, ok


@nb.njit(cache=True, nogil=True)
def integrate_chunk(X0, t0, t_end, max_steps, scheme, fcode, h_const, cfl):
    """Advance up to max_steps explicit steps, stopping at t_end.

    scheme: 0 = explicit Euler, 1 = two-stage midpoint (RK2); the global
    term is re-evaluated at the half step.  The step size is
    min(cfl * e_min^2, cfl * e_min / max|h - kappa|), clipped to t_end.

    Returns (X, t, steps_done, status, h_last, dt_last).
    """
    X = X0.copy()
    t = t0
    steps = 0
    status = S_OK
    h_last = 0.0
    dt_last = 0.0
    while steps < max_steps:
        remaining = t_end - t
        if remaining <= 0.0:
            break
        V1, h, e_min, f_max, kres, ok = _eval_velocity(X, fcode, h_const)
        if not ok or not math.isfinite(h):
            status = S_BLOWUP
            break
        if kres > 1.0:
            status = S_UNRESOLVED
            break
        dt = cfl * e_min * e_min
        cap = cfl * e_min / max(f_max, 1e-12)
        if cap < dt:
            dt = cap
        if dt < DT_FLOOR:
            status = S_STIFF
            break
        if dt > remaining:
            dt = remaining
        if scheme == 1:
            Xh = X + (0.5 * dt) * V1
            V2, h2, _, _, _, ok2 = _eval_velocity(Xh, fcode, h_const)
            if not ok2 or not math.isfinite(h2):
                status = S_BLOWUP
                break
            Xn = X + dt * V2
        else:
            Xn = X + dt * V1
        if not np.all(np.isfinite(Xn)):
            status = S_BLOWUP
            break
        X = Xn
        t += dt
        steps += 1
        h_last = h
        dt_last = dt
        lo = np.inf
        hi = 0.0
        for i in range(X.shape[0]):
            j = i + 1 if i + 1 < X.shape[0] else 0
            dx = X[j, 0] - X[i, 0]
            dy = X[j, 1] - X[i, 1]
            l = math.sqrt(dx * dx + dy * dy)
            if l < lo:
                lo = l
            if l > hi:
                hi = l
        if hi > (1.0 + SPREAD_CAP) * lo:
            status = S_SPREAD
            break
    return X, t, steps, status, h_last, dt_last
