"""Compiled inner loops. Every kernel consumes a numpy Generator directly."""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def kahan_cumsum(terms):
    out = np.empty(terms.shape[0])
    total = 0.0
    comp = 0.0
    for k in range(terms.shape[0]):
        y = terms[k] - comp
        s = total + y
        comp = (s - total) - y
        total = s
        out[k] = total
    return out


@numba.njit(inline="always")
def below(rng, n):
    """Exactly uniform integer in [0, n) for 0 < n < 2**31.

    The top 32 bits of a 53-bit uniform double are exactly uniform; Lemire's
    multiply-and-reject maps them to [0, n) without bias.
    """
    m = np.int64(rng.random() * 4294967296.0) * n
    low = m & 0xFFFFFFFF
    if low < n:
        threshold = (4294967296 - n) % n
        while low < threshold:
            m = np.int64(rng.random() * 4294967296.0) * n
            low = m & 0xFFFFFFFF
    return m >> 32


@numba.njit(inline="always")
def _advance(rng, f_next, t, endpoints, degree, birth, nv):
    """G_t -> G_{t+1}. Returns (vertex count, first endpoint, second endpoint)."""
    two_t = 2 * t
    vertex_step = rng.random() < f_next
    u = endpoints[below(rng, two_t)]
    if vertex_step:
        nv += 1
        v = nv
        birth[v] = t + 1
    else:
        v = endpoints[below(rng, two_t)]
    endpoints[two_t] = u
    endpoints[two_t + 1] = v
    degree[u] += 1
    degree[v] += 1
    return nv, u, v


@numba.njit(inline="always")
def _bump(w, dw, mx, leader, runner):
    # w just reached degree dw; runner is the max over non-leaders
    if w == leader:
        return dw, leader, runner
    if dw > mx:
        return dw, w, mx
    if dw > runner:
        runner = dw
    return mx, leader, runner


@numba.njit(cache=True)
def simulate(rng, fvals, t0, horizon, nv, endpoints, degree, birth,
             tracked, rec_times, gap_n, inv_phi,
             out_v, out_max, out_leader, out_gap, out_deg, sup_norm):
    """Advance from time t0 to ``horizon`` in place, recording at ``rec_times``.

    Returns (vertex count, last time at which the unique-leader-with-gap
    event failed, number of records written).
    """
    slot = np.full(degree.shape[0], -1, np.int64)
    for k in range(tracked.shape[0]):
        if tracked[k] < slot.shape[0]:
            slot[tracked[k]] = k
    with_sup = inv_phi.shape[0] > 0

    mx = 0
    leader = 0
    runner = 0
    for w in range(1, nv + 1):
        mx, leader, runner = _bump(w, degree[w], mx, leader, runner)
    last_fail = 0
    if mx - runner <= gap_n:
        last_fail = t0
    if with_sup:
        for k in range(tracked.shape[0]):
            w = tracked[k]
            if w <= nv:
                sup_norm[k] = max(sup_norm[k], degree[w] * inv_phi[t0])

    ri = 0
    while ri < rec_times.shape[0] and rec_times[ri] < t0:
        ri += 1
    t = t0
    while True:
        if ri < rec_times.shape[0] and rec_times[ri] == t:
            out_v[ri] = nv
            out_max[ri] = mx
            out_leader[ri] = leader
            out_gap[ri] = mx - runner
            for k in range(tracked.shape[0]):
                w = tracked[k]
                out_deg[k, ri] = degree[w] if w <= nv else 0
            ri += 1
        if t >= horizon:
            break
        nv, u, v = _advance(rng, fvals[t + 1], t, endpoints, degree, birth, nv)
        t += 1
        mx, leader, runner = _bump(u, degree[u], mx, leader, runner)
        mx, leader, runner = _bump(v, degree[v], mx, leader, runner)
        if mx - runner <= gap_n:
            last_fail = t
        if with_sup:
            if slot[u] >= 0:
                sup_norm[slot[u]] = max(sup_norm[slot[u]], degree[u] * inv_phi[t])
            if v != u and slot[v] >= 0:
                sup_norm[slot[v]] = max(sup_norm[slot[v]], degree[v] * inv_phi[t])
    return nv, last_fail, ri


@numba.njit(cache=True)
def degree_vectors(rng, fvals, t_end, n_runs):
    """Degree vectors (indexed by vertex id, column 0 unused) at t_end for many short runs."""
    out = np.zeros((n_runs, t_end + 1), np.int64)
    endpoints = np.zeros(2 * t_end, np.int64)
    degree = np.zeros(t_end + 2, np.int64)
    birth = np.zeros(t_end + 2, np.int64)
    for r in range(n_runs):
        degree[:] = 0
        endpoints[0] = 1
        endpoints[1] = 1
        degree[1] = 2
        nv = 1
        for t in range(1, t_end):
            nv, u, v = _advance(rng, fvals[t + 1], t, endpoints, degree, birth, nv)
        for w in range(1, nv + 1):
            out[r, w] = degree[w]
    return out


@numba.njit(cache=True)
def urn_path(rng, fvals, red, blue, t0, rec_times, sequential, out_red):
    """One urn trajectory; out_red[k] receives the red count at rec_times[k]."""
    ri = 0
    while ri < rec_times.shape[0] and rec_times[ri] < t0:
        ri += 1
    t = t0
    while True:
        if ri < rec_times.shape[0] and rec_times[ri] == t:
            out_red[ri] = red
            ri += 1
        if ri >= rec_times.shape[0]:
            break
        red, blue = _urn_advance(rng, fvals[t + 1], red, blue, sequential)
        t += 1
    return red, blue


@numba.njit(inline="always")
def _urn_advance(rng, f_next, red, blue, sequential):
    total = red + blue
    immigrate = rng.random() < f_next
    first_red = 1 if below(rng, total) < red else 0
    if immigrate:
        return red + first_red, blue + 2 - first_red
    if sequential:
        second_red = 1 if below(rng, total + 1) < red + first_red else 0
    else:
        second_red = 1 if below(rng, total) < red else 0
    n_red = first_red + second_red
    return red + n_red, blue + 2 - n_red


@numba.njit(cache=True)
def urn_final_red(rng, fvals, red, blue, t0, t_end, n_runs, sequential):
    out = np.empty(n_runs, np.int64)
    for r in range(n_runs):
        rr, bb = red, blue
        for t in range(t0, t_end):
            rr, bb = _urn_advance(rng, fvals[t + 1], rr, bb, sequential)
        out[r] = rr
    return out
