"""Normalizing products for the degree process, tabulated in log-space.

    phi(t)   = prod_{s<t} (1 + 1/s - f(s+1)/(2s))
    xi(t)    = phi(t)/t = prod_{r<t} (1 - f(r+1)/(2(r+1)))
    phi_k(t) = prod_{s<t} (1 + (k/s)(1 - f(s+1)/2) + k(k-1)/(4s^2) (1 - f(s+1)))

d_t(i)/phi(t) is a martingale after the birth of i, and phi_k controls the
k-th rising moment of the degree.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._kernels import kahan_cumsum
from .edge_step import EdgeStepFunction


@dataclass(frozen=True)
class NormalizationTable:
    """log phi, log xi, log phi_k for t = 1..horizon (entry t-1 holds time t)."""

    f: EdgeStepFunction
    horizon: int
    log_phi: np.ndarray
    log_xi: np.ndarray
    k_max: int
    log_phi_k: np.ndarray  # shape (k_max, horizon); row k-1 holds phi_k

    def _check(self, t):
        t = np.asarray(t)
        if np.any(t < 1) or np.any(t > self.horizon):
            raise IndexError(f"t outside the tabulated range [1, {self.horizon}]")
        return t - 1

    def phi(self, t):
        return np.exp(self.log_phi[self._check(t)])

    def xi(self, t):
        return np.exp(self.log_xi[self._check(t)])

    def phi_k(self, k: int, t):
        if k == 0:
            return np.ones(np.shape(t))
        if not 1 <= k <= self.k_max:
            raise IndexError(f"phi_k tabulated only for k <= {self.k_max}")
        return np.exp(self.log_phi_k[k - 1][self._check(t)])

    def phi_array(self) -> np.ndarray:
        """phi indexed directly by time: a[t] = phi(t), a[0] = NaN."""
        out = np.empty(self.horizon + 1)
        out[0] = np.nan
        out[1:] = np.exp(self.log_phi)
        return out


def _log_factors(fnext: np.ndarray, s: np.ndarray, k: int) -> np.ndarray:
    return np.log1p(k / s * (1.0 - fnext / 2.0) + k * (k - 1) / (4.0 * s * s) * (1.0 - fnext))


def build_table(f: EdgeStepFunction, horizon: int, k_max: int = 4) -> NormalizationTable:
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    if not 0 <= k_max <= 8:
        raise ValueError("k_max must lie in [0, 8]")
    s = np.arange(1, horizon, dtype=float)
    fnext = f.values(horizon)[1:]  # f(s+1) for s = 1..horizon-1

    def accumulate(log_terms):
        out = np.zeros(horizon)
        out[1:] = kahan_cumsum(log_terms)
        return out

    log_phi = accumulate(np.log1p(1.0 / s - fnext / (2.0 * s)))
    # rounding guard: factors of xi never exceed one
    log_xi = np.minimum.accumulate(accumulate(np.log1p(-fnext / (2.0 * (s + 1.0)))))
    log_phi_k = np.empty((k_max, horizon))
    if k_max >= 1:
        log_phi_k[0] = log_phi
    for k in range(2, k_max + 1):
        log_phi_k[k - 1] = accumulate(_log_factors(fnext, s, k))
    for arr in (log_phi, log_xi, log_phi_k):
        arr.setflags(write=False)
    return NormalizationTable(f, horizon, log_phi, log_xi, k_max, log_phi_k)


def phi(table: NormalizationTable, t: int) -> float:
    return float(table.phi(t))


@dataclass(frozen=True)
class XiLimit:
    value: float
    converged: bool


def xi_infinity(table: NormalizationTable, tolerance: float = 1e-3) -> XiLimit:
    """Estimate lim xi(t) by xi(horizon); converged compares against xi(horizon/2)."""
    T = table.horizon
    value = float(table.xi(T))
    half = float(table.xi(max(1, T // 2)))
    return XiLimit(value, abs(value - half) < tolerance)


def log_checkpoints(horizon: int, per_decade: int = 20) -> np.ndarray:
    n = max(2, int(np.ceil(np.log10(horizon) * per_decade)) + 1)
    return np.unique(np.geomspace(1, horizon, n).round().astype(np.int64))


def dump_csv(table: NormalizationTable, path, per_decade: int = 20) -> None:
    """(t, phi, xi, phi_1..phi_kmax) at logarithmically spaced t."""
    ts = log_checkpoints(table.horizon, per_decade)
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "phi", "xi"] + [f"phi_{k}" for k in range(1, table.k_max + 1)])
        for t in ts:
            row = [int(t), repr(float(table.phi(t))), repr(float(table.xi(t)))]
            row += [repr(float(table.phi_k(k, t))) for k in range(1, table.k_max + 1)]
            w.writerow(row)
