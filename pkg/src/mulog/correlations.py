"""Correlation sums of λ against μ along block progressions.

For block k and component i with gap q = q_k^i and fiber offset M = M_k^i,

    S(r, c) = Σ_{b=r}^{q-1+r} Σ_{n=M}^{M_{k+1}} λ(q(n-M)+c+k³)·μ(q(n-M)+b+k³),

an exact integer.  The block scan compares the diagonal candidates
S(c, c) of component 0 against the negated off-diagonal candidates
-S(d+1, d) of component 1 and records the maximizer; the telescoping
check verifies that the signed candidate total reproduces the block's
squarefree count up to a small boundary residual.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .schedule import BlockSchedule, cube
from .sieve import SieveTable

CHOICES_CSV_HEADER = ["k", "ell", "r", "c", "sign", "value", "bound", "residual"]


@dataclass(frozen=True)
class CorrelationQuery:
    """Offsets (r, c) for one block and component.

    Offsets are allowed up to the component-0 gap: the telescoping
    identity evaluates component-1 sums at r = q0, one past that
    component's own gap.
    """

    k: int
    i: int
    r: int
    c: int


@dataclass(frozen=True)
class BlockChoice:
    """Winning candidate of one block scan.

    ell = 0 carries (r = c, sign = +1), ell = 1 carries (r = c+1,
    sign = -1); value is the signed correlation sum and bound the
    pigeonhole floor it must clear.
    """

    k: int
    ell: int
    r: int
    c: int
    sign: int
    value: int
    bound: float

    def __post_init__(self):
        if self.ell == 0 and (self.r != self.c or self.sign != 1):
            raise ValueError("component-0 choice must have r = c and sign = +1")
        if self.ell == 1 and (self.r != self.c + 1 or self.sign != -1):
            raise ValueError("component-1 choice must have r = c+1 and sign = -1")


def _required_limit(sched: BlockSchedule, k: int) -> int:
    return cube(k + 1) + 2 * sched.q(0, k) + 1


def _check_table(table: SieveTable, sched: BlockSchedule, k: int) -> None:
    need = _required_limit(sched, k)
    if table.limit < need:
        raise ValueError(
            f"sieve limit {table.limit} too small for block {k}; need at least {need}"
        )


def correlation_S(table: SieveTable, sched: BlockSchedule, query: CorrelationQuery) -> int:
    """Exact integer S(r, c) for the query's block and component."""
    k, i = query.k, query.i
    q_hi = sched.q(0, k)
    if not (0 <= query.r <= q_hi and 0 <= query.c <= q_hi):
        raise ValueError(f"offsets must lie in [0, {q_hi}], got r={query.r} c={query.c}")
    _check_table(table, sched, k)
    q = sched.q(i, k)
    count = sched.ones_count(i, k)
    base = q * np.arange(0, count + 1, dtype=np.int64) + cube(k)
    lam_vals = table.lam[base + query.c].astype(np.int64)
    inner = np.zeros(count + 1, dtype=np.int64)
    for b in range(query.r, q + query.r):
        inner += table.mu[base + b]
    return int(np.dot(lam_vals, inner))


def scan_block(
    table: SieveTable,
    sched: BlockSchedule,
    k: int,
    error_constant: float = 10.0,
) -> BlockChoice:
    """Maximizing candidate over {S(c,c) of component 0} ∪ {-S(d+1,d) of
    component 1}, with deterministic ties (smaller ell, then smaller c).

    The recorded bound is the pigeonhole floor
    (1/(2 q0)) Σ_{k³<=m<=(k+1)³} μ(m)² - error_constant·q0.
    """
    _check_table(table, sched, k)
    q0 = sched.q(0, k)
    q1 = sched.q(1, k)
    best: BlockChoice | None = None
    candidates = []
    for c in range(q0):
        value = correlation_S(table, sched, CorrelationQuery(k, 0, c, c))
        candidates.append((value, 0, c, c, 1))
    for d in range(q1):
        value = -correlation_S(table, sched, CorrelationQuery(k, 1, d + 1, d))
        candidates.append((value, 1, d + 1, d, -1))
    for value, ell, r, c, sign in candidates:
        if best is None or value > best.value:
            best = BlockChoice(k, ell, r, c, sign, value, 0.0)
    hi = min(cube(k + 1), table.limit)
    mu_sq = table.mu_squared_range_sum(cube(k), hi)
    bound = mu_sq / (2.0 * q0) - error_constant * q0
    return BlockChoice(best.k, best.ell, best.r, best.c, best.sign, best.value, bound)


def intermediate_identity_residual(table: SieveTable, sched: BlockSchedule, k: int) -> int:
    """Exact residual of the telescoping identity

        Σ_{c=0}^{q-1} S⁰(c,c) - Σ_{d=1}^{q-1} S¹(d+1,d) - Σ_{m=k³}^{(k+1)³} μ(m)²

    with q = q_k⁰ (for q = 2 the middle sum is the single term d = 1).
    """
    _check_table(table, sched, k)
    q0 = sched.q(0, k)
    total = 0
    for c in range(q0):
        total += correlation_S(table, sched, CorrelationQuery(k, 0, c, c))
    for d in range(1, q0):
        total -= correlation_S(table, sched, CorrelationQuery(k, 1, d + 1, d))
    return total - table.mu_squared_range_sum(cube(k), cube(k + 1))


def write_choices_csv(path, choices, residuals) -> None:
    """Choice table with the per-block identity residual column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CHOICES_CSV_HEADER)
        for ch, res in zip(choices, residuals):
            writer.writerow([ch.k, ch.ell, ch.r, ch.c, ch.sign, ch.value, repr(ch.bound), res])


def read_choices_csv(path) -> tuple[list[BlockChoice], list[int]]:
    choices: list[BlockChoice] = []
    residuals: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CHOICES_CSV_HEADER:
            raise ValueError(f"unexpected choices header {header}")
        for row in reader:
            k, ell, r, c, sign, value = (int(v) for v in row[:6])
            choices.append(BlockChoice(k, ell, r, c, sign, value, float(row[6])))
            residuals.append(int(row[7]))
    return choices, residuals
