"""Threshold-r bootstrap percolation on a multigraph snapshot.

Round 0 infects each vertex independently with probability a/|V|. In round
s every uninfected vertex with at least r edges (counted with multiplicity)
into the round s-1 infected set becomes infected. Loops never count: a loop
only joins a vertex to itself, and an infected vertex needs no count.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .edge_step import EdgeStepFunction, Tri, classify
from .generator import Multigraph
from .normalization import build_table

ROUND_CAP = 1000


class ClassificationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BootstrapParams:
    a: float
    r: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("infection rate a must be nonnegative")
        if self.r < 2:
            raise ValueError("threshold r must be at least 2")


@dataclass(frozen=True)
class Neighbors:
    """CSR neighbour-multiplicity map, loops dropped."""

    n_vertices: int
    indptr: np.ndarray
    nbr: np.ndarray
    mult: np.ndarray

    @classmethod
    def of(cls, G: Multigraph) -> "Neighbors":
        e = G.edges.astype(np.int64)
        e = e[e[:, 0] != e[:, 1]]
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        n = G.n_vertices + 1
        pairs, mult = np.unique(src * n + dst, return_counts=True)
        src, dst = pairs // n, pairs % n
        indptr = np.zeros(n + 1, np.int64)
        np.add.at(indptr, src + 1, 1)
        return cls(G.n_vertices, np.cumsum(indptr), dst, mult)


@dataclass
class InfectionState:
    infected: np.ndarray  # bool mask indexed by vertex id, entry 0 unused
    counts: np.ndarray  # edges from each vertex into the infected set
    frontier: np.ndarray  # ids infected in the latest round
    round: int = 0
    newly_infected_per_round: list = field(default_factory=list)

    @property
    def infected_ids(self) -> frozenset:
        return frozenset(np.flatnonzero(self.infected).tolist())

    @property
    def size(self) -> int:
        return int(self.infected.sum())


def _neighbors(G) -> Neighbors:
    return G if isinstance(G, Neighbors) else Neighbors.of(G)


def _absorb(nb: Neighbors, counts: np.ndarray, ids: np.ndarray) -> None:
    if len(ids) == 0:
        return
    starts, stops = nb.indptr[ids], nb.indptr[ids + 1]
    lens = stops - starts
    idx = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(lens.sum())
    np.add.at(counts, nb.nbr[idx], nb.mult[idx])


def state_from_set(G, seed_ids) -> InfectionState:
    nb = _neighbors(G)
    mask = np.zeros(nb.n_vertices + 1, bool)
    ids = np.asarray(sorted(seed_ids), np.int64)
    mask[ids] = True
    counts = np.zeros(nb.n_vertices + 1, np.int64)
    _absorb(nb, counts, ids)
    return InfectionState(mask, counts, ids, 0, [len(ids)])


def seed_infection(G, params: BootstrapParams, rng: np.random.Generator) -> InfectionState:
    n = _neighbors(G).n_vertices
    if params.a > n:
        raise ValueError(f"infection rate a={params.a} exceeds |V|={n}")
    u = rng.random(n)
    return state_from_set(G, np.flatnonzero(u < params.a / n) + 1)


def infection_round(G, state: InfectionState, r: int) -> InfectionState:
    nb = _neighbors(G)
    new = np.flatnonzero((state.counts >= r) & ~state.infected)
    mask = state.infected.copy()
    mask[new] = True
    counts = state.counts.copy()
    _absorb(nb, counts, new)
    return InfectionState(mask, counts, new, state.round + 1,
                          state.newly_infected_per_round + [len(new)])


@dataclass
class BootstrapResult:
    final: InfectionState
    initial_size: int
    rounds: int  # rounds that infected someone
    fraction: float
    rounds_to_half: int  # first round with |I_s| >= |I_inf| / 2
    anomaly: Optional[str] = None


def run_to_stabilization(G, params: BootstrapParams, rng: Optional[np.random.Generator] = None,
                         state: Optional[InfectionState] = None) -> BootstrapResult:
    nb = _neighbors(G)
    if state is None:
        rng = np.random.default_rng(params.seed) if rng is None else rng
        state = seed_infection(nb, params, rng)
    initial = state.size
    anomaly = None
    while True:
        if state.round >= ROUND_CAP:
            anomaly = f"round cap {ROUND_CAP} reached"
            break
        nxt = infection_round(nb, state, params.r)
        if len(nxt.frontier) == 0:
            break
        state = nxt
    sizes = np.cumsum(state.newly_infected_per_round)
    final = int(sizes[-1])
    half = int(np.searchsorted(sizes, final / 2.0, side="left"))
    n = nb.n_vertices
    return BootstrapResult(state, initial, state.round, final / n if n else 0.0, half, anomaly)


@dataclass
class StructureReport:
    time: int
    star: int
    star_degree: int
    star_threshold: float
    is_star: bool
    core_threshold: float  # g(t) = 1/f(t)
    core_size: int
    core_degree_sum: int
    core_has_half: bool  # core degree sum >= t/2
    xi_lower: float  # C1 estimate, xi at the snapshot time
    condition_s: str


def structure_report(G: Multigraph, f: EdgeStepFunction, a: float, r: int = 2) -> StructureReport:
    """Star vertex and high-degree core of a snapshot.

    The star threshold is C1 t / (C2 h(a)) with h(x) = C1/(2 r^2 C2) g(x)/log x
    and g = 1/f. Here C2 = 1 (xi never exceeds xi(1) = 1) and C1 = xi(t).
    """
    report = classify(f)
    if report.condition_s is not Tri.HOLDS:
        warnings.warn(f"{f!r} does not satisfy the summability condition; "
                      "the star/core picture is not expected to hold", ClassificationWarning)
    t = G.time
    degrees = G.degrees
    star = int(np.argmax(degrees)) + 1
    c1 = float(build_table(f, max(t, 2), k_max=0).xi(max(t, 2))) if t >= 2 else 1.0
    c2 = 1.0
    if a > 1.0:
        h = c1 / (2 * r * r * c2) / (float(f.at(a)) * math.log(a))
        star_threshold = c1 * t / (c2 * h)
    else:
        star_threshold = math.inf
    g = 1.0 / float(f.at(t))
    core = degrees >= g
    core_sum = int(degrees[core].sum())
    return StructureReport(t, star, int(degrees[star - 1]), star_threshold,
                           bool(degrees[star - 1] >= star_threshold), g, int(core.sum()), core_sum,
                           bool(core_sum >= t / 2), c1, report.condition_s.value)


def write_runs_csv(rows: list[dict], path) -> None:
    cols = ["replica", "a", "r", "I0", "I_inf", "fraction", "rounds"]
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in cols])


def write_rounds_csv(results: list[BootstrapResult], path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["replica", "round", "newly_infected"])
        for k, res in enumerate(results):
            for s, n in enumerate(res.final.newly_infected_per_round):
                w.writerow([k, s, n])
