"""Shared fixtures and the independent oracles the tests check against.

Every oracle here is written from the stated rules, not from the package
code: different rounding path, scalar loops instead of array slicing, and
literal enumeration where the package uses a smarter algorithm.  When a
test disagrees with the package, the oracle wins.
"""

import math

import numpy as np
import pytest

# --- grid partition oracle --------------------------------------------------


def oracle_bounds(extent, n):
    # round(k*extent/n) half-up, via floating floor(x + 0.5); the package
    # uses exact integer math, so agreement here is part of the check
    return [math.floor(k * extent / n + 0.5) for k in range(n + 1)]


# --- open path oracles -------------------------------------------------------


def oracle_floor_span(bits):
    ys, xs = np.nonzero(bits)
    if len(ys) == 0:
        return None
    return int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1


def oracle_raw_scores(bits):
    """Per-cell floor fraction over the tight floor span, counted cell by
    cell. Rows indexed bottom-up to match the neighbor notation."""
    span = oracle_floor_span(bits)
    assert span is not None, "oracle needs at least one floor pixel"
    x0, y0, x1, y1 = span
    xb = oracle_bounds(x1 - x0, 7)
    yb = oracle_bounds(y1 - y0, 3)
    raw = np.zeros((3, 7))
    for j in range(3):  # j=0 bottom
        yt = 3 - 1 - j
        ya, yz = y0 + yb[yt], y0 + yb[yt + 1]
        for i in range(7):
            xa, xz = x0 + xb[i], x0 + xb[i + 1]
            total = (yz - ya) * (xz - xa)
            if total == 0:
                raw[j, i] = 0.0
                continue
            count = 0
            for y in range(ya, yz):
                count += int(bits[y, xa:xz].sum())
            raw[j, i] = count / total
    return raw


def oracle_adjusted(raw, boost_gate=0.95, boost=1.05, center=1.05):
    adj = np.zeros((2, 5))
    for j in range(2):
        for b in range(1, 6):
            i = b
            s = (
                0.4 * raw[j][i]
                + 0.2 * raw[j + 1][i]
                + 0.1 * (raw[j][i - 1] + raw[j][i + 1] + raw[j + 1][i + 1] + raw[j + 1][i - 1])
            )
            if s > boost_gate:
                s = s * boost
            if b == 3:
                s = s * center
            adj[j, b - 1] = s
    return adj


# --- depth oracle ------------------------------------------------------------


def oracle_depth_command(closeness):
    """Per-pixel recount of the ten cells; intensity by the 30/40/50 rules."""
    h, w = closeness.shape
    xb = oracle_bounds(w, 5)
    yb = oracle_bounds(h, 2)
    slots = [0] * 10
    for col in range(5):
        for row in range(2):  # row 0 = image top = top motors
            n = close = medium = far = 0
            for y in range(yb[row], yb[row + 1]):
                for x in range(xb[col], xb[col + 1]):
                    d = closeness[y, x]
                    n += 1
                    if d > 0.80:
                        close += 1
                    elif d > 0.65:
                        medium += 1
                    elif d > 0.50:
                        far += 1
            if close / n > 0.30:
                v = 3
            elif medium / n > 0.40:
                v = 2
            elif far / n > 0.50:
                v = 1
            else:
                v = 0
            slots[2 * col + row] = v
    return slots


# --- wilcoxon enumeration oracle ----------------------------------------------


def oracle_wilcoxon(diffs):
    """Literal sign-pattern enumeration: rank |d| with midranks, then count
    the fraction of the 2^n assignments whose min rank-sum is <= observed."""
    d = [x for x in diffs if x != 0]
    n = len(d)
    assert n >= 1
    order = sorted(range(n), key=lambda k: abs(d[k]))
    ranks = [0.0] * n
    k = 0
    while k < n:
        j = k
        while j + 1 < n and abs(d[order[j + 1]]) == abs(d[order[k]]):
            j += 1
        mid = (k + j + 2) / 2  # average of 1-based positions k+1..j+1
        for t in range(k, j + 1):
            ranks[order[t]] = mid
        k = j + 1
    w_minus = sum(r for x, r in zip(d, ranks) if x < 0)
    w_plus = sum(r for x, r in zip(d, ranks) if x > 0)
    w_obs = min(w_minus, w_plus)
    total = sum(ranks)
    hits = 0
    for pattern in range(1 << n):
        s = 0.0
        for i in range(n):
            if pattern >> i & 1:
                s += ranks[i]
        if min(s, total - s) <= w_obs + 1e-12:
            hits += 1
    return w_obs, hits / (1 << n), n


# --- scene passability oracle --------------------------------------------------


def oracle_passable(scene, body_radius, step=0.02):
    """Flood fill over body-inflated occupancy from the start line strip to
    the goal line; True when any path exists."""
    from collections import deque

    w = scene.field_width
    length = scene.field_length
    nx = int(w / step) + 1
    ny = int(length / step) + 1
    free = np.zeros((ny, nx), dtype=bool)
    for iy in range(ny):
        y = iy * step
        for ix in range(nx):
            x = ix * step
            if x < body_radius or x > w - body_radius:
                continue
            if y < 0 or y > length:
                continue
            ok = True
            for ob in scene.obstacles:
                if (x - ob.cx) ** 2 + (y - ob.cy) ** 2 < (ob.radius + body_radius) ** 2:
                    ok = False
                    break
            free[iy, ix] = ok
    start_row = int(scene.start[1] / step)
    goal_row = int(scene.goal[1] / step)
    seen = np.zeros_like(free)
    q = deque()
    for ix in range(nx):
        if free[start_row, ix]:
            seen[start_row, ix] = True
            q.append((start_row, ix))
    while q:
        iy, ix = q.popleft()
        if iy == goal_row:
            return True
        for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            jy, jx = iy + dy, ix + dx
            if 0 <= jy < ny and 0 <= jx < nx and free[jy, jx] and not seen[jy, jx]:
                seen[jy, jx] = True
                q.append((jy, jx))
    return False


# --- fixtures -----------------------------------------------------------------


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_mask(rng, w, h, p=None):
    if p is None:
        p = rng.uniform(0.05, 0.95)
    bits = rng.random((h, w)) < p
    if not bits.any():
        bits[h // 2, w // 2] = True
    return bits
