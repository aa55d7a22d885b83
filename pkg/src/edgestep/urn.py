"""Two-colour Polya urn with immigration.

Red balls stand for the degree of one vertex, blue balls for every other
half-edge. At time t -> t+1, with probability f(t+1) one Polya draw is made
and a blue immigrant is added; otherwise two independent Polya draws are made
against the pre-step composition. Red + blue always equals 2t, so the red
fraction is the vertex's share of the degree sum.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import _kernels
from .edge_step import EdgeStepFunction
from .generator import below
from .normalization import NormalizationTable
from .seeding import replica_stream


@dataclass(frozen=True)
class UrnState:
    red: int = 2
    blue: int = 0
    time: int = 1

    def __post_init__(self):
        if self.red < 1 or self.blue < 0:
            raise ValueError("need red >= 1 and blue >= 0")

    @property
    def proportion(self) -> float:
        return self.red / (self.red + self.blue)


def start_for_vertex(birth_time: int) -> UrnState:
    """Urn mirroring a vertex born at ``birth_time`` (degree 1 out of 2 tau)."""
    if birth_time == 1:
        return UrnState(2, 0, 1)
    return UrnState(1, 2 * birth_time - 1, birth_time)


def urn_step(state: UrnState, f: EdgeStepFunction, rng: np.random.Generator,
             immigrate: Optional[bool] = None, sequential: bool = False) -> UrnState:
    """One step; draws are made in the same order as the compiled kernel."""
    red, blue = state.red, state.blue
    total = red + blue
    z = rng.random() < f.at(state.time + 1)
    if immigrate is not None:
        z = bool(immigrate)
    first = int(below(rng, total) < red)
    if z:
        return UrnState(red + first, blue + 2 - first, state.time + 1)
    if sequential:
        second = int(below(rng, total + 1) < red + first)
    else:
        second = int(below(rng, total) < red)
    return UrnState(red + first + second, blue + 2 - first - second, state.time + 1)


def _fvals(f: Optional[EdgeStepFunction], t_end: int) -> np.ndarray:
    if f is None:  # no-immigration mode
        return np.zeros(t_end + 2)
    return f.padded(t_end + 1)


def exact_distribution(f: Optional[EdgeStepFunction], start: UrnState, t_end: int,
                       sequential: bool = False) -> dict[int, Fraction]:
    """Exact law of the red count at ``t_end`` (f values taken as exact fractions)."""
    law = {start.red: Fraction(1)}
    for t in range(start.time, t_end):
        total = 2 * t + (start.red + start.blue - 2 * start.time)
        p_imm = Fraction(0) if f is None else Fraction(float(f.at(t + 1)))
        nxt: dict[int, Fraction] = defaultdict(Fraction)
        for red, pr in law.items():
            q = Fraction(red, total)
            nxt[red + 1] += pr * p_imm * q
            nxt[red] += pr * p_imm * (1 - q)
            stay = pr * (1 - p_imm)
            if sequential:
                q2_hit = Fraction(red + 1, total + 1)
                q2_miss = Fraction(red, total + 1)
                nxt[red + 2] += stay * q * q2_hit
                nxt[red + 1] += stay * (q * (1 - q2_hit) + (1 - q) * q2_miss)
                nxt[red] += stay * (1 - q) * (1 - q2_miss)
            else:
                nxt[red + 2] += stay * q * q
                nxt[red + 1] += stay * 2 * q * (1 - q)
                nxt[red] += stay * (1 - q) * (1 - q)
        law = {k: v for k, v in nxt.items() if v}
    return law


def final_red_counts(f: Optional[EdgeStepFunction], start: UrnState, t_end: int, n_runs: int,
                     rng: np.random.Generator, sequential: bool = False) -> np.ndarray:
    """Red counts at ``t_end`` for many independent short runs from one stream."""
    return _kernels.urn_final_red(rng, _fvals(f, t_end), start.red, start.blue,
                                  start.time, t_end, n_runs, sequential)


@dataclass
class ProportionSummary:
    times: np.ndarray
    red: np.ndarray  # (replicas, len(times)) raw red counts
    proportion: dict  # mean, q05, q50, q95 arrays of red/(red+blue)
    normalized: Optional[dict]  # same statistics for red/phi(t)


def _stats(x: np.ndarray) -> dict:
    q = np.quantile(x, [0.05, 0.5, 0.95], axis=0)
    return {"mean": x.mean(axis=0), "var": x.var(axis=0, ddof=1) if len(x) > 1 else np.zeros(x.shape[1]),
            "q05": q[0], "q50": q[1], "q95": q[2]}


def red_proportion_trajectory(f: Optional[EdgeStepFunction], start: UrnState, T: int, replicas: int,
                              master_seed: int, times=None, table: Optional[NormalizationTable] = None,
                              sequential: bool = False) -> ProportionSummary:
    """Per-time statistics of the red fraction over independent replicas."""
    if T < start.time:
        raise ValueError("T must not precede the start time")
    if times is None:
        times = np.unique(np.concatenate([[start.time, T], 2 ** np.arange(int(np.log2(T)) + 1)]))
    times = np.asarray(times, np.int64)
    times = times[(times >= start.time) & (times <= T)]
    fvals = _fvals(f, T)
    red = np.zeros((replicas, len(times)), np.int64)
    for r in range(replicas):
        _kernels.urn_path(replica_stream(master_seed, r), fvals, start.red, start.blue,
                          start.time, times, sequential, red[r])
    totals = start.red + start.blue + 2 * (times - start.time)
    normalized = None
    if table is not None:
        normalized = _stats(red / table.phi(times))
    return ProportionSummary(times, red, _stats(red / totals), normalized)


def write_summary_csv(summary: ProportionSummary, path) -> None:
    cols = ["mean", "q05", "q50", "q95"]
    header = ["t"] + [f"prop_{c}" for c in cols]
    if summary.normalized is not None:
        header += [f"norm_{c}" for c in cols]
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, t in enumerate(summary.times):
            row = [int(t)] + [repr(float(summary.proportion[c][k])) for c in cols]
            if summary.normalized is not None:
                row += [repr(float(summary.normalized[c][k])) for c in cols]
            w.writerow(row)
