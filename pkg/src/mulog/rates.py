"""Decreasing rate functions τ.

A rate is a strictly positive nonincreasing function of n; the schedule
builder turns 1/(2q) > τ(k³) style thresholds into progression gaps.
Three families are supported: 1/(a·log log(n+b)), 1/(a·log(n+b)), and a
step-interpolated table of (n, τ(n)) pairs.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

FAMILIES = ("inverse-log-log", "inverse-log", "table")


@dataclass(frozen=True)
class RateFunction:
    family: str
    params: tuple[float, ...] = ()
    table: tuple[tuple[int, float], ...] = ()

    def __call__(self, n: int | float) -> float:
        if n < 1:
            raise ValueError(f"rate defined for n >= 1, got {n}")
        if self.family == "inverse-log-log":
            a, b = self.params
            return 1.0 / (a * math.log(math.log(n + b)))
        if self.family == "inverse-log":
            a, b = self.params
            return 1.0 / (a * math.log(n + b))
        keys = self._table_keys()
        i = bisect.bisect_right(keys, n) - 1
        if i < 0:
            i = 0  # before the first breakpoint: first value
        return self.table[i][1]

    def value_fraction(self, n: int) -> Fraction | None:
        """Exact value as a fraction for the table family, else None.

        Table entries are binary floats, hence exact rationals; threshold
        comparisons against 1/(2q) can then avoid rounding entirely.
        """
        if self.family != "table":
            return None
        return Fraction(self(n))

    def _table_keys(self) -> list[int]:
        return [k for k, _ in self.table]


def make_rate(
    family: str,
    params: tuple[float, ...] | list[float] | None = None,
    table: list[tuple[int, float]] | None = None,
) -> RateFunction:
    """Validated rate function.

    Families take params (a, b); the table family takes strictly
    increasing breakpoints with positive nonincreasing values and
    interpolates by previous value.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown rate family {family!r}; expected one of {FAMILIES}")
    if family == "table":
        if not table:
            raise ValueError("table family needs at least one (n, value) pair")
        rows = [(int(n), float(v)) for n, v in table]
        for (n0, v0), (n1, v1) in zip(rows, rows[1:]):
            if n1 <= n0:
                raise ValueError(f"table breakpoints must increase: {n0} then {n1}")
            if v1 > v0:
                raise ValueError(f"table values must be nonincreasing: {v0} then {v1}")
        if min(v for _, v in rows) <= 0.0:
            raise ValueError("table values must be strictly positive")
        return RateFunction("table", (), tuple(rows))
    if params is None or len(params) != 2:
        raise ValueError(f"family {family!r} needs params (a, b)")
    a, b = float(params[0]), float(params[1])
    if a <= 0:
        raise ValueError(f"scale a must be positive, got {a}")
    rate = RateFunction(family, (a, b))
    probe = rate(1)
    if not (probe > 0 and math.isfinite(probe)):
        raise ValueError(f"rate is not positive and finite at n=1 (params {params})")
    return rate


def rate_from_json(obj: dict) -> RateFunction:
    """Rate from its JSON description {family, params | table}."""
    family = obj["family"]
    if family == "table":
        return make_rate("table", table=[(int(n), float(v)) for n, v in obj["table"]])
    return make_rate(family, params=tuple(obj["params"]))


def rate_to_json(rate: RateFunction) -> dict:
    if rate.family == "table":
        return {"family": "table", "table": [[n, v] for n, v in rate.table]}
    return {"family": rate.family, "params": list(rate.params)}
