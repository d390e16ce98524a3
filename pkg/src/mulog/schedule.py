"""Per-block parameters derived from a rate function.

Indices are grouped into cube blocks [k³, (k+1)³).  Each active block k
carries two progression gaps q_k⁰ >= 2 and q_k¹ = q_k⁰ - 1, chosen as the
largest integers compatible with the rate threshold 1/(2q) > τ(k³) and
the growth cap q < k^α.  The spike sequence of component i places ones on
the progression k³ + j·q_k^i, 1 <= j <= L_k^i with
L_k^i = floor(((k+1)³-k³)/q_k^i) - 1, and M_k^i accumulates those counts
over earlier active blocks.  Blocks below the first feasible k are inert:
all zero, excluded from the cumulative counts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rates import RateFunction

# guard for float threshold comparisons (q < k^alpha and 1/(2q) > tau)
_EPS = 1e-9


class InfeasibleRateError(Exception):
    """No active block exists at or below the requested range."""

    def __init__(self, reason: str, first_feasible_k: int | None):
        super().__init__(reason)
        self.reason = reason
        self.first_feasible_k = first_feasible_k


def cube(k: int) -> int:
    return k * k * k


def block_span(k: int) -> int:
    """(k+1)³ - k³."""
    return 3 * k * k + 3 * k + 1


def icbrt(n: int) -> int:
    """Integer cube root (largest k with k³ <= n)."""
    if n < 0:
        raise ValueError("negative argument")
    k = round(n ** (1.0 / 3.0))
    while k * k * k > n:
        k -= 1
    while (k + 1) ** 3 <= n:
        k += 1
    return k


def growth_cap(k: int, alpha: float) -> int:
    """Largest integer q with q < k^alpha (0 if none)."""
    x = k ** alpha
    q = int(x) + 1
    while q + _EPS >= x:
        q -= 1
    return max(q, 0)


def rate_cap(rate: RateFunction, k: int, hi: int) -> int:
    """Largest q <= hi with 1/(2q) > τ(k³) strictly (0 if not even q=1).

    Table rates are compared exactly as fractions; families use a guarded
    float comparison.
    """
    n = cube(k)
    tau_frac = rate.value_fraction(n)
    if tau_frac is not None:
        q = 0
        while q < hi and Fraction(1, 2 * (q + 1)) > tau_frac:
            q += 1
        return q
    tau = rate(n)
    q = 0
    while q < hi and 1.0 / (2.0 * (q + 1)) > tau + _EPS:
        q += 1
    return q


def first_active_block(rate: RateFunction, alpha: float, k_cap: int) -> int | None:
    """Smallest k <= k_cap with k^alpha > 2 and τ(k³) < 1/4, or None."""
    for k in range(2, k_cap + 1):
        if growth_cap(k, alpha) >= 2 and rate_cap(rate, k, 2) >= 2:
            return k
    return None


@dataclass
class BlockSchedule:
    """Gaps, ones-counts and cumulative offsets for blocks k_min..k_max.

    Arrays are indexed by k - k_min.  m0/m1 have one extra entry so that
    m[i][k_max + 1 - k_min] is the total count over the whole range.
    """

    k_min: int
    k_max: int
    alpha: float
    q0: np.ndarray
    q1: np.ndarray
    l0: np.ndarray
    l1: np.ndarray
    m0: np.ndarray
    m1: np.ndarray

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise ValueError("empty schedule range")
        n = self.k_max - self.k_min + 1
        if not (len(self.q0) == len(self.q1) == len(self.l0) == len(self.l1) == n):
            raise ValueError("array lengths do not match the block range")
        if not (len(self.m0) == len(self.m1) == n + 1):
            raise ValueError("cumulative arrays need one extra entry")

    # -- access -----------------------------------------------------------

    def index(self, k: int) -> int:
        if not (self.k_min <= k <= self.k_max):
            raise ValueError(f"block {k} outside [{self.k_min}, {self.k_max}]")
        return k - self.k_min

    def q(self, i: int, k: int) -> int:
        _check_component(i)
        return int((self.q0 if i == 0 else self.q1)[self.index(k)])

    def ones_count(self, i: int, k: int) -> int:
        """L_k^i, the number of ones a block-k spike of component i carries."""
        _check_component(i)
        return int((self.l0 if i == 0 else self.l1)[self.index(k)])

    def cumulative(self, i: int, k: int) -> int:
        """M_k^i = Σ_{k_min <= j < k} L_j^i, defined for k_min <= k <= k_max+1."""
        _check_component(i)
        if not (self.k_min <= k <= self.k_max + 1):
            raise ValueError(f"block {k} outside [{self.k_min}, {self.k_max + 1}]")
        return int((self.m0 if i == 0 else self.m1)[k - self.k_min])

    def blocks(self) -> range:
        return range(self.k_min, self.k_max + 1)

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        rows = []
        for k in self.blocks():
            j = self.index(k)
            rows.append(
                {
                    "k": k,
                    "q0": int(self.q0[j]),
                    "q1": int(self.q1[j]),
                    "L0": int(self.l0[j]),
                    "L1": int(self.l1[j]),
                    "M0": int(self.m0[j]),
                    "M1": int(self.m1[j]),
                }
            )
        return {"kMin": self.k_min, "kMax": self.k_max, "alpha": self.alpha, "rows": rows}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "BlockSchedule":
        rows = obj["rows"]
        k_min, k_max = int(obj["kMin"]), int(obj["kMax"])
        n = k_max - k_min + 1
        if len(rows) != n:
            raise ValueError(f"expected {n} rows, found {len(rows)}")
        q0 = np.array([r["q0"] for r in rows], dtype=np.int64)
        q1 = np.array([r["q1"] for r in rows], dtype=np.int64)
        l0 = np.array([r["L0"] for r in rows], dtype=np.int64)
        l1 = np.array([r["L1"] for r in rows], dtype=np.int64)
        m0 = np.zeros(n + 1, dtype=np.int64)
        m1 = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(l0, out=m0[1:])
        np.cumsum(l1, out=m1[1:])
        for j, r in enumerate(rows):
            if int(m0[j]) != int(r["M0"]) or int(m1[j]) != int(r["M1"]):
                raise ValueError(f"inconsistent cumulative columns at k={r['k']}")
        return cls(k_min, k_max, float(obj["alpha"]), q0, q1, l0, l1, m0, m1)


def _check_component(i: int) -> None:
    if i not in (0, 1):
        raise ValueError(f"component must be 0 or 1, got {i}")


def build_schedule(rate: RateFunction, k_max: int, alpha: float = 0.125) -> BlockSchedule:
    """Schedule for all active blocks k_min..k_max.

    k_min is the smallest k with k^alpha > 2 and τ(k³) < 1/4.  Gaps are
    q0[k] = max(2, min(rate cap, growth cap)); both caps are nondecreasing
    (τ nonincreasing, k^alpha increasing), which keeps q0 nondecreasing.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")

    k_min = first_active_block(rate, alpha, k_max)
    if k_min is None:
        # determine whether a larger range would ever work, for diagnostics
        probe_cap = max(4 * k_max, 1 << 12)
        later = first_active_block(rate, alpha, probe_cap)
        if later is not None:
            raise InfeasibleRateError(
                f"first feasible block is k={later}, beyond k_max={k_max}",
                later,
            )
        g = growth_cap(k_max, alpha)
        reason = (
            f"growth cap k^alpha gives q<2 up to k={probe_cap}"
            if g < 2
            else f"rate stays >= 1/4 on cubes up to k={probe_cap}"
        )
        raise InfeasibleRateError(reason, None)

    ks = np.arange(k_min, k_max + 1, dtype=np.int64)
    n = len(ks)
    q0 = np.zeros(n, dtype=np.int64)
    prev = 2
    for j, k in enumerate(ks):
        g = growth_cap(int(k), alpha)
        r = rate_cap(rate, int(k), g)
        q = max(2, min(g, r))
        if q < prev:
            raise InfeasibleRateError(
                f"gap caps decreased at k={int(k)} (rate is not nonincreasing?)", None
            )
        prev = q
        q0[j] = q
    q1 = q0 - 1
    spans = 3 * ks * ks + 3 * ks + 1
    l0 = spans // q0 - 1
    l1 = spans // q1 - 1
    m0 = np.zeros(n + 1, dtype=np.int64)
    m1 = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(l0, out=m0[1:])
    np.cumsum(l1, out=m1[1:])
    return BlockSchedule(k_min, k_max, alpha, q0, q1, l0, l1, m0, m1)


def block_ones_count(sched: BlockSchedule, i: int, k: int) -> int:
    """L_k^i = floor(((k+1)³-k³)/q_k^i) - 1."""
    return sched.ones_count(i, k)


def cumulative_M(sched: BlockSchedule, i: int, k: int) -> int:
    """M_k^i, zero at k_min."""
    return sched.cumulative(i, k)


@dataclass(frozen=True)
class SpikePattern:
    """A block spike after a right shift by p with zero padding.

    The digit at n is 1 exactly when n - p = k³ + j·q for some
    1 <= j <= L; everything else, including the padded prefix, is 0.
    """

    k: int
    i: int
    q: int
    count: int
    shift: int

    def __post_init__(self):
        if not (0 <= self.shift <= self.q):
            raise ValueError(f"shift must lie in [0, {self.q}], got {self.shift}")


def make_spike(sched: BlockSchedule, k: int, i: int, shift: int = 0) -> SpikePattern:
    return SpikePattern(k, i, sched.q(i, k), sched.ones_count(i, k), shift)


def spike_digit(pat: SpikePattern, n: int) -> int:
    """Digit of the shifted spike at index n >= 1 (total function)."""
    if n < 1:
        raise ValueError(f"one-sided index must be >= 1, got {n}")
    t = n - pat.shift - cube(pat.k)
    if t < pat.q or t % pat.q:
        return 0
    return 1 if t // pat.q <= pat.count else 0


def spike_window_sum(pat: SpikePattern, lo: int, hi: int) -> int:
    """Number of ones of the shifted spike with lo <= n < hi (closed form)."""
    k3 = cube(pat.k)
    # ones sit at k3 + j*q + shift for j = 1..count
    j_lo = max(1, -(-(lo - k3 - pat.shift) // pat.q))
    j_hi = min(pat.count, (hi - 1 - k3 - pat.shift) // pat.q)
    return max(0, j_hi - j_lo + 1)


def schedule_to_json(sched: BlockSchedule) -> str:
    return json.dumps(sched.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def schedule_from_json(text: str) -> BlockSchedule:
    return BlockSchedule.from_json_dict(json.loads(text))
