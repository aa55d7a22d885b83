"""The preferential-attachment process with edge-steps.

Starting from one vertex carrying a loop, the transition G_t -> G_{t+1}
performs, with probability f(t+1), a vertex-step (a new vertex attached to an
existing vertex chosen proportionally to degree) and otherwise an edge-step
(a new edge whose two endpoints are drawn independently, proportionally to
degree, from G_t; loops and parallel edges allowed).

Degree-proportional sampling is a uniform draw from the endpoint array, in
which edge k occupies slots 2k and 2k+1.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .edge_step import EdgeStepFunction
from .normalization import NormalizationTable
from .seeding import stream

NEVER = -1
ENDPOINT_DTYPE = np.int32


@dataclass
class Multigraph:
    """Growing multigraph; vertex ids start at 1 and follow birth order."""

    time: int
    n_vertices: int
    endpoints: np.ndarray  # capacity >= 2*time
    degree: np.ndarray  # degree[v], entry 0 unused
    birth_time: np.ndarray  # birth_time[v], entry 0 unused

    @property
    def capacity(self) -> int:
        return len(self.endpoints) // 2

    @property
    def edges(self) -> np.ndarray:
        """(time, 2) array of edge endpoints in insertion order."""
        return self.endpoints[: 2 * self.time].reshape(-1, 2)

    @property
    def degrees(self) -> np.ndarray:
        """Degrees of vertices 1..n_vertices."""
        return self.degree[1 : self.n_vertices + 1]

    def reserve(self, horizon: int) -> None:
        if horizon <= self.capacity:
            return
        cap = max(horizon, 2 * self.capacity)
        self.endpoints = _grown(self.endpoints, 2 * cap)
        self.degree = _grown(self.degree, cap + 2)
        self.birth_time = _grown(self.birth_time, cap + 2)

    def copy(self) -> "Multigraph":
        return Multigraph(self.time, self.n_vertices, self.endpoints.copy(),
                          self.degree.copy(), self.birth_time.copy())

    def check(self) -> None:
        """Assert the bookkeeping invariants (used in tests and debug runs)."""
        ends = self.endpoints[: 2 * self.time]
        assert self.degree.sum() == 2 * self.time
        recount = np.bincount(ends, minlength=self.n_vertices + 1)
        assert np.array_equal(recount[: self.n_vertices + 1], self.degree[: self.n_vertices + 1])
        births = self.birth_time[1 : self.n_vertices + 1]
        assert births[0] == 1 and np.all(np.diff(births) > 0)
        assert np.all(births >= np.arange(1, self.n_vertices + 1))


def _grown(arr: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size, dtype=arr.dtype)
    out[: len(arr)] = arr
    return out


def init(capacity: int = 16) -> Multigraph:
    """G_1: a single vertex with one loop."""
    capacity = max(capacity, 1)
    g = Multigraph(1, 1, np.zeros(2 * capacity, ENDPOINT_DTYPE),
                   np.zeros(capacity + 2, np.int64), np.zeros(capacity + 2, np.int64))
    g.endpoints[:2] = 1
    g.degree[1] = 2
    g.birth_time[1] = 1
    return g


def below(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n); same draws as the compiled kernels."""
    m = int(rng.random() * 4294967296.0) * n
    low = m & 0xFFFFFFFF
    if low < n:
        threshold = (4294967296 - n) % n
        while low < threshold:
            m = int(rng.random() * 4294967296.0) * n
            low = m & 0xFFFFFFFF
    return m >> 32


def sample_degree_proportional(G: Multigraph, rng: np.random.Generator, size=None):
    """Vertex u with probability degree(u) / (2 time): a uniform endpoint slot."""
    if size is None:
        return int(G.endpoints[below(rng, 2 * G.time)])
    return G.endpoints[rng.integers(0, 2 * G.time, size=size)].astype(np.int64)


def step(G: Multigraph, f: EdgeStepFunction, rng: np.random.Generator,
         vertex_step: Optional[bool] = None) -> Multigraph:
    """Advance G_t to G_{t+1} in place, driven by f(t+1).

    ``vertex_step`` forces the step type. The draws (step type, then
    endpoints) match the compiled kernels, so both paths produce identical
    graphs from identical streams.
    """
    t = G.time
    z = rng.random() < f.at(t + 1) if vertex_step is None else bool(vertex_step)
    if vertex_step is not None:
        rng.random()  # keep the stream aligned with unforced steps
    G.reserve(t + 1)
    u = sample_degree_proportional(G, rng)
    if z:
        G.n_vertices += 1
        v = G.n_vertices
        G.birth_time[v] = t + 1
    else:
        v = sample_degree_proportional(G, rng)
    G.endpoints[2 * t] = u
    G.endpoints[2 * t + 1] = v
    G.degree[u] += 1
    G.degree[v] += 1
    G.time = t + 1
    return G


_EMPTY_I = np.zeros(0, np.int64)
_EMPTY_F = np.zeros(0)


def grow(G: Multigraph, f: EdgeStepFunction, horizon: int, rng: np.random.Generator) -> Multigraph:
    """Advance G in place up to time ``horizon`` with the compiled kernel."""
    if horizon <= G.time:
        return G
    G.reserve(horizon)
    nv, _, _ = _kernels.simulate(
        rng, f.padded(horizon + 1), G.time, horizon, G.n_vertices, G.endpoints, G.degree,
        G.birth_time, _EMPTY_I, _EMPTY_I, 0, _EMPTY_F,
        _EMPTY_I, _EMPTY_I, _EMPTY_I, _EMPTY_I, np.zeros((0, 0), np.int64), _EMPTY_F)
    G.n_vertices = int(nv)
    G.time = horizon
    return G


def generate(f: EdgeStepFunction, horizon: int, rng: np.random.Generator) -> Multigraph:
    return grow(init(horizon), f, horizon, rng)


# -- recorded runs --------------------------------------------------------


@dataclass
class ProcessConfig:
    f: EdgeStepFunction
    horizon: int
    seed: int
    tracked_vertices: Sequence[int] = (1,)
    record_stride: Optional[int] = None  # default horizon // 10**4
    gap: int = 0  # N in the unique-leader-with-gap event
    table: Optional[NormalizationTable] = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if any(int(i) < 1 for i in self.tracked_vertices):
            raise ValueError("tracked vertex ids start at 1")
        if self.record_stride is not None and self.record_stride < 1:
            raise ValueError("record_stride must be positive")
        if self.table is not None and self.table.horizon < self.horizon:
            raise ValueError(
                f"normalization table covers t <= {self.table.horizon}, run needs {self.horizon}")


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    vertex_count: np.ndarray
    max_degree: np.ndarray
    leader: np.ndarray
    gap: np.ndarray  # leader degree minus runner-up degree
    tracked: np.ndarray
    tracked_degrees: np.ndarray  # (n_tracked, n_times), zero before birth
    tau: np.ndarray  # birth times of tracked vertices, NEVER if unborn
    last_gap_failure: int  # last t with (max - runner-up) <= gap
    gap_threshold: int
    sup_normalized: Optional[np.ndarray] = None  # sup_s d_s(i)/phi(s) per tracked vertex

    def degrees_of(self, i: int) -> np.ndarray:
        hits = np.flatnonzero(self.tracked == i)
        if len(hits) == 0:
            raise KeyError(f"vertex {i} is not tracked")
        return self.tracked_degrees[hits[0]]

    def at(self, t: int) -> int:
        """Row index of recorded time t."""
        k = int(np.searchsorted(self.times, t))
        if k >= len(self.times) or self.times[k] != t:
            raise KeyError(f"time {t} was not recorded")
        return k

    def __eq__(self, other):
        if not isinstance(other, TrajectoryRecord):
            return NotImplemented
        a, b = self.__dict__, other.__dict__
        for key in a:
            x, y = a[key], b[key]
            if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
                if x is None or y is None or not np.array_equal(x, y):
                    return False
            elif x != y:
                return False
        return True


def record_times(horizon: int, stride: Optional[int] = None, extra: Sequence[int] = ()) -> np.ndarray:
    """Stride multiples, powers of two, floor(T/2^j), 1 and T."""
    stride = stride or max(1, horizon // 10**4)
    ts = [np.arange(stride, horizon + 1, stride), [1, horizon], list(extra)]
    p = 1
    while p <= horizon:
        ts.append([p, horizon // p])
        p *= 2
    out = np.unique(np.concatenate([np.asarray(x, np.int64) for x in ts]))
    return out[(out >= 1) & (out <= horizon)]


def simulate(config: ProcessConfig, rng: Optional[np.random.Generator] = None,
             times: Optional[np.ndarray] = None) -> tuple[TrajectoryRecord, Multigraph]:
    """Run the process to the horizon; returns the record and the final graph."""
    T = config.horizon
    rng = stream(config.seed) if rng is None else rng
    times = record_times(T, config.record_stride) if times is None else np.asarray(times, np.int64)
    tracked = np.asarray(config.tracked_vertices, np.int64)
    G = init(T)
    n, m = len(tracked), len(times)
    out_v, out_max = np.zeros(m, np.int64), np.zeros(m, np.int64)
    out_leader, out_gap = np.zeros(m, np.int64), np.zeros(m, np.int64)
    out_deg = np.zeros((n, m), np.int64)
    inv_phi, sup = _EMPTY_F, _EMPTY_F
    if config.table is not None:
        inv_phi = 1.0 / config.table.phi_array()
        sup = np.zeros(n)
    nv, last_fail, _ = _kernels.simulate(
        rng, config.f.padded(T + 1), 1, T, 1, G.endpoints, G.degree, G.birth_time,
        tracked, times, config.gap, inv_phi, out_v, out_max, out_leader, out_gap, out_deg, sup)
    G.n_vertices, G.time = int(nv), T
    tau = np.where(tracked <= nv, G.birth_time[np.minimum(tracked, len(G.birth_time) - 1)], NEVER)
    record = TrajectoryRecord(times, out_v, out_max, out_leader, out_gap, tracked, out_deg,
                              tau.astype(np.int64), int(last_fail), config.gap,
                              sup if config.table is not None else None)
    return record, G


def run(config: ProcessConfig) -> TrajectoryRecord:
    return simulate(config)[0]


def degree_vectors(f: EdgeStepFunction, t: int, n_runs: int, rng: np.random.Generator) -> np.ndarray:
    """Degree vectors of G_t over many independent short runs, shape (n_runs, t)."""
    return _kernels.degree_vectors(rng, f.padded(t + 1), t, n_runs)[:, 1:]


# -- degree differences -----------------------------------------------------


@dataclass
class DegreeDifference:
    times: np.ndarray
    D: np.ndarray
    jump_times: np.ndarray  # sigma_0 = birth of j, then every change of d(i) or d(j)
    D_tilde: np.ndarray


def degree_history(G: Multigraph, v: int) -> np.ndarray:
    """d_s(v) for s = 1..G.time, recovered from the endpoint array."""
    hits = (G.edges == v).sum(axis=1)  # edge k is added at time k+1
    return np.cumsum(hits)


def degree_difference(source, i: int, j: int) -> DegreeDifference:
    """|d_s(i) - d_s(j)| from a graph (every step) or a record (recorded times)."""
    if isinstance(source, Multigraph):
        times = np.arange(1, source.time + 1)
        di, dj = degree_history(source, i), degree_history(source, j)
        born = source.birth_time[j] if j <= source.n_vertices else NEVER
    else:
        times = source.times
        di, dj = source.degrees_of(i), source.degrees_of(j)
        born = int(source.tau[np.flatnonzero(source.tracked == j)[0]])
    D = np.abs(di - dj)
    if born == NEVER:
        return DegreeDifference(times, D, times[:0], D[:0])
    keep = np.zeros(len(times), bool)
    keep[1:] = (np.diff(di) != 0) | (np.diff(dj) != 0)
    start = int(np.searchsorted(times, born))
    keep[:start] = False
    if start < len(times):
        keep[start] = True
    return DegreeDifference(times, D, times[keep], D[keep])


# -- serialization ----------------------------------------------------------

SNAPSHOT_MAGIC = b"PAEDGE01"


def write_snapshot(G: Multigraph, path) -> None:
    """Binary snapshot: magic, u64 time, u64 vertex count, int32 endpoint pairs."""
    with open(Path(path), "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<QQ", G.time, G.n_vertices))
        fh.write(np.ascontiguousarray(G.endpoints[: 2 * G.time], dtype="<i4").tobytes())


def read_snapshot(path) -> Multigraph:
    data = Path(path).read_bytes()
    if data[:8] != SNAPSHOT_MAGIC:
        raise ValueError(f"{path} is not a graph snapshot")
    time, nv = struct.unpack("<QQ", data[8:24])
    ends = np.frombuffer(data, dtype="<i4", offset=24, count=2 * time).astype(ENDPOINT_DTYPE)
    return from_edges(ends.reshape(-1, 2), nv)


def from_edges(edges, n_vertices: Optional[int] = None) -> Multigraph:
    """Multigraph from an edge list in insertion order (vertex ids from 1).

    Birth times are recovered as the first time each id appears.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    time = len(edges)
    nv = int(edges.max()) if n_vertices is None else int(n_vertices)
    G = Multigraph(time, nv, np.zeros(2 * max(time, 1), ENDPOINT_DTYPE),
                   np.zeros(max(time, nv) + 2, np.int64), np.zeros(max(time, nv) + 2, np.int64))
    flat = edges.ravel()
    G.endpoints[: 2 * time] = flat
    G.degree[: nv + 1] = np.bincount(flat, minlength=nv + 1)[: nv + 1]
    ids, first = np.unique(flat, return_index=True)
    G.birth_time[ids] = first // 2 + 1
    return G


def write_trajectory_csv(record: TrajectoryRecord, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "V_t", "max_deg", "leader_id", "gap"] + [f"d_{int(i)}" for i in record.tracked])
        for k, t in enumerate(record.times):
            w.writerow([int(t), int(record.vertex_count[k]), int(record.max_degree[k]),
                        int(record.leader[k]), int(record.gap[k])]
                       + [int(x) for x in record.tracked_degrees[:, k]])


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=np.int64).reshape(-1, len(rows[0]))
    return {name: body[:, k] for k, name in enumerate(header)}
