"""Edge-step functions: the probability of a vertex-step at each time.

Four families are supported:

* ``constant(p)``             f(t) = p
* ``power_law(c, gamma)``     f(t) = min(1, c t^-gamma)
* ``log_power(c, gamma, b)``  f(t) = min(1, c t^-gamma log(t+1)^-b)
* ``tabulated(values)``       f(t) = values[t-1], extended by a tail rule
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from ._kernels import kahan_cumsum

FAMILIES = ("constant", "power_law", "log_power", "tabulated")
TAIL_RULES = ("hold_last", "power_extrapolate")

# inverse_F never scans beyond this many terms
SEARCH_LIMIT = 1 << 26


class UnreachableTargetError(ValueError):
    """Raised when F(s) stays below the requested level for every s."""


class Tri(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConditionReport:
    v_infinity: Tri
    condition_s: Tri
    res_gamma: Optional[float] = None
    is_constant_p: Optional[float] = None


@dataclass(frozen=True, eq=False)
class EdgeStepFunction:
    """Immutable edge-step function. Build it with the factory functions."""

    family: str
    p: Optional[float] = None
    c: float = 1.0
    gamma: float = 0.0
    beta: float = 0.0
    table: Optional[np.ndarray] = None
    tail_rule: str = "hold_last"
    _prefix: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        errors = parameter_errors(self.family, self.params())
        if errors:
            raise ValueError("; ".join(errors))
        if self.table is not None:
            self.table.setflags(write=False)

    def params(self) -> dict:
        if self.family == "constant":
            return {"p": self.p}
        if self.family == "power_law":
            return {"c": self.c, "gamma": self.gamma}
        if self.family == "log_power":
            return {"c": self.c, "gamma": self.gamma, "beta": self.beta}
        return {"values": self.table, "tail_rule": self.tail_rule}

    def __eq__(self, other):
        if not isinstance(other, EdgeStepFunction) or other.family != self.family:
            return NotImplemented
        if self.family == "tabulated":
            return self.tail_rule == other.tail_rule and np.array_equal(self.table, other.table)
        return self.params() == other.params()

    def __hash__(self):
        if self.family == "tabulated":
            return hash((self.family, self.tail_rule, self.table.tobytes()))
        return hash((self.family, tuple(self.params().items())))

    def __repr__(self):
        if self.family == "tabulated":
            return f"tabulated(<{len(self.table)} values>, tail_rule={self.tail_rule!r})"
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{self.family}({args})"

    # -- evaluation -------------------------------------------------------

    def at(self, t: np.ndarray) -> np.ndarray:
        """Vectorized f(t) for real t >= 1 (no domain check)."""
        t = np.asarray(t, dtype=float)
        if self.family == "constant":
            return np.full(t.shape, self.p)
        if self.family == "power_law":
            return np.minimum(1.0, self.c * t ** (-self.gamma))
        if self.family == "log_power":
            return np.minimum(1.0, self.c * t ** (-self.gamma) * np.log1p(t) ** (-self.beta))
        n = len(self.table)
        idx = np.floor(t).astype(np.int64)
        out = self.table[np.minimum(idx, n) - 1]
        beyond = idx > n
        if self.tail_rule == "power_extrapolate" and np.any(beyond):
            out = np.where(beyond, np.minimum(1.0, self.table[-1] * (t / n) ** (-self._tail_index())), out)
        return out

    def values(self, n: int) -> np.ndarray:
        """Array of f(1), ..., f(n)."""
        return self.at(np.arange(1, n + 1))

    def padded(self, n: int) -> np.ndarray:
        """Array ``a`` of length n+1 with ``a[t] = f(t)``; ``a[0]`` is NaN."""
        out = np.empty(n + 1)
        out[0] = np.nan
        out[1:] = self.values(n)
        return out

    def _tail_index(self) -> float:
        # exponent fitted on the last octave of the table
        n = len(self.table)
        if n < 2:
            return 0.0
        half = max(1, n // 2)
        return -math.log(self.table[-1] / self.table[half - 1]) / math.log(n / half)

    # -- partial sums -----------------------------------------------------

    def _prefix_sums(self, upto: int) -> np.ndarray:
        """Prefix sums S[s] = F(s) for s = 0..N with N a power of two >= upto."""
        cached = self._prefix[0] if self._prefix else None
        if cached is not None and len(cached) - 1 >= upto:
            return cached
        n = 1
        while n < upto:
            n *= 2
        if n > SEARCH_LIMIT:
            raise UnreachableTargetError(f"partial sums requested beyond {SEARCH_LIMIT} terms")
        sums = np.empty(n + 1)
        sums[0] = 0.0
        sums[1:] = kahan_cumsum(self.values(n))
        sums.setflags(write=False)
        if self._prefix:
            self._prefix[0] = sums
        else:
            self._prefix.append(sums)
        return sums

    def total_mass(self) -> float:
        """sup_r F(r); infinite when the sum of f diverges."""
        if self.family != "tabulated" or self.tail_rule == "hold_last":
            return math.inf
        g = self._tail_index()
        if g <= 1.0:
            return math.inf
        n = len(self.table)
        return float(self.table.sum() + self.table[-1] * n**g * hurwitz_zeta(g, n + 1))


def parameter_errors(family: str, params: dict) -> list[str]:
    """All range violations for the given family parameters."""
    errors = []

    def num(name):
        v = params.get(name)
        if v is None or isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            errors.append(f"{name} must be a finite number")
            return None
        return float(v)

    if family == "constant":
        p = num("p")
        if p is not None and not 0.0 < p <= 1.0:
            errors.append("p must lie in (0,1]")
    elif family in ("power_law", "log_power"):
        c, gamma = num("c"), num("gamma")
        if c is not None and c <= 0.0:
            errors.append("c must be positive")
        if gamma is not None and not 0.0 <= gamma < 1.0:
            errors.append("gamma must lie in [0,1)")
        if family == "log_power":
            beta = num("beta")
            if beta is not None and beta < 0.0:
                errors.append("beta must be nonnegative")
    elif family == "tabulated":
        values = params.get("values")
        if values is None or len(values) == 0:
            errors.append("values must be a nonempty sequence")
        else:
            arr = np.asarray(values, dtype=float)
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                errors.append("values must be a 1-d sequence of finite numbers")
            elif np.any(arr <= 0.0) or np.any(arr > 1.0):
                errors.append("values must lie in (0,1]")
        if params.get("tail_rule", "hold_last") not in TAIL_RULES:
            errors.append(f"tail_rule must be one of {TAIL_RULES}")
    else:
        errors.append(f"family must be one of {FAMILIES}")
    return errors


def constant(p: float) -> EdgeStepFunction:
    return EdgeStepFunction("constant", p=float(p))


def power_law(c: float, gamma: float) -> EdgeStepFunction:
    return EdgeStepFunction("power_law", c=float(c), gamma=float(gamma))


def log_power(c: float, gamma: float, beta: float) -> EdgeStepFunction:
    return EdgeStepFunction("log_power", c=float(c), gamma=float(gamma), beta=float(beta))


def tabulated(values: Sequence[float], tail_rule: str = "hold_last") -> EdgeStepFunction:
    arr = np.array(values, dtype=float)
    return EdgeStepFunction("tabulated", table=arr, tail_rule=tail_rule)


def load_tabulated(path, tail_rule: str = "hold_last") -> EdgeStepFunction:
    """Read a one-column text file holding f(1), f(2), ..."""
    values = np.loadtxt(Path(path), dtype=float, ndmin=1)
    return tabulated(values, tail_rule)


def from_spec(family: str, params: dict) -> EdgeStepFunction:
    """Build from a ``{family, params}`` record as found in run configs."""
    params = dict(params)
    if family == "constant":
        return constant(params["p"])
    if family == "power_law":
        return power_law(params["c"], params["gamma"])
    if family == "log_power":
        return log_power(params["c"], params["gamma"], params["beta"])
    if family == "tabulated":
        tail = params.get("tail_rule", "hold_last")
        if "file" in params:
            return load_tabulated(params["file"], tail)
        return tabulated(params["values"], tail)
    raise ValueError(f"unknown family {family!r}")


def evaluate(f: EdgeStepFunction, t) -> float:
    if t < 1:
        raise ValueError(f"edge-step functions are defined for t >= 1, got {t}")
    return float(f.at(t))


def cumulative_F(f: EdgeStepFunction, r: float) -> float:
    """F(r) = sum of f(s) over integers 1 <= s <= r."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    n = int(math.floor(r))
    if n == 0:
        return 0.0
    return float(f._prefix_sums(n)[n])


def inverse_F(f: EdgeStepFunction, r: float) -> int:
    """Smallest positive integer s with F(s) >= r."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r >= f.total_mass():
        raise UnreachableTargetError(f"F is bounded by {f.total_mass():.6g} <= {r}")
    n = 1
    while True:
        sums = f._prefix_sums(n)
        if sums[-1] >= r:
            return max(1, int(np.searchsorted(sums, r, side="left")))
        n = 2 * (len(sums) - 1)


def classify(f: EdgeStepFunction, horizon: int = 10**5) -> ConditionReport:
    """Decide (V_inf), (S) and the RES index for ``f``.

    Analytic families are decided from their parameters. Tabulated functions
    are judged by the local decay exponent over the last decade before
    ``horizon`` and may come back inconclusive.
    """
    H, F_ = Tri.HOLDS, Tri.FAILS
    if f.family == "constant":
        return ConditionReport(H, F_, None, f.p)
    if f.family in ("power_law", "log_power"):
        beta = f.beta if f.family == "log_power" else 0.0
        if f.gamma == 0.0 and beta == 0.0:
            return ConditionReport(H, F_, None, min(1.0, f.c))
        s = H if (f.gamma > 0.0 or beta > 1.0) else F_
        return ConditionReport(H, s, f.gamma, None)
    if horizon < 1000:
        raise ValueError("tabulated classification needs horizon >= 1000")
    return _classify_tabulated(f, horizon)


def _classify_tabulated(f: EdgeStepFunction, horizon: int, margin: float = 0.05) -> ConditionReport:
    lo = horizon // 10
    ts = np.unique(np.geomspace(lo, horizon, 64).astype(np.int64))
    slope = -np.polyfit(np.log(ts), np.log(f.at(ts)), 1)[0]
    v_inf = Tri.HOLDS if slope < 1.0 - margin else Tri.FAILS if slope > 1.0 + margin else Tri.INCONCLUSIVE
    cond_s = Tri.HOLDS if slope > margin else Tri.FAILS if slope < margin / 5 else Tri.INCONCLUSIVE
    const_p = None
    if np.ptp(f.at(ts)) == 0.0 and np.ptp(f.values(min(horizon, 4096))) == 0.0:
        const_p = float(f.at(1))
    return ConditionReport(v_inf, cond_s, None, const_p)
