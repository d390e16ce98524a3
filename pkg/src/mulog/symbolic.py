"""Shift spaces and the base-driven fiber skew.

Sequences are digit oracles (index -> symbol), never dense arrays, so
points with 10⁹ digits stay cheap.  One-sided sequences are 1-based; the
two-sided fiber is indexed over all integers with the observable read at
index 0.  The skew map advances the base by one shift and the fiber by
the current first base digit, so after n steps the fiber offset is the
base prefix sum Σ_{i<=n} y_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

Seq = Callable[[int], int]

_PREFIX_STRIDE = 1 << 16


def seq_from_array(values, start: int = 1) -> Seq:
    """One-sided oracle over a dense window; zero outside it."""
    arr = list(values)

    def digit(n: int) -> int:
        j = n - start
        return arr[j] if 0 <= j < len(arr) else 0

    return digit


def constant_seq(value: int) -> Seq:
    return lambda n: value


def shift_pad(x: Seq, p: int) -> Seq:
    """Right shift by p with zero padding: result(n) = x(n-p) for n > p."""
    if p < 0:
        raise ValueError(f"pad length must be >= 0, got {p}")
    if p == 0:
        return x
    return lambda n: x(n - p) if n > p else 0


@dataclass
class SkewPoint:
    """A point (y, z) of the skew system together with its orbit position.

    base_root/fiber_root are the original digit oracles; base_shift and
    fiber_shift describe the current position, so the current base digit
    at n is base_root(n + base_shift).  Prefix sums of the base root are
    cached at a fixed stride and shared across derived points.
    """

    base_root: Seq
    fiber_root: Seq
    base_shift: int = 0
    fiber_shift: int = 0
    _prefix_cache: list = field(default_factory=lambda: [0], repr=False)

    def base(self, n: int) -> int:
        if n < 1:
            raise ValueError(f"one-sided index must be >= 1, got {n}")
        return self.base_root(n + self.base_shift)

    def fiber(self, m: int) -> int:
        return self.fiber_root(m + self.fiber_shift)

    def base_prefix(self, n: int) -> int:
        """Σ_{i=1..n} base_root(i) via the stride cache."""
        if n < 0:
            raise ValueError(f"prefix length must be >= 0, got {n}")
        want = n // _PREFIX_STRIDE
        while len(self._prefix_cache) <= want:
            j = len(self._prefix_cache)
            lo = (j - 1) * _PREFIX_STRIDE + 1
            hi = j * _PREFIX_STRIDE
            total = self._prefix_cache[j - 1]
            for m in range(lo, hi + 1):
                total += self.base_root(m)
            self._prefix_cache.append(total)
        total = self._prefix_cache[n // _PREFIX_STRIDE]
        for m in range((n // _PREFIX_STRIDE) * _PREFIX_STRIDE + 1, n + 1):
            total += self.base_root(m)
        return total

    def spot_check_prefix_cache(self, indices) -> None:
        """Recompute cached prefixes directly; raise on mismatch."""
        for n in indices:
            direct = sum(self.base_root(m) for m in range(1, n + 1))
            if direct != self.base_prefix(n):
                raise AssertionError(f"prefix cache inconsistent at n={n}")


def skew_step(pt: SkewPoint) -> SkewPoint:
    """One application of the skew map: (y, z) -> (σy, σ^{y₁}z)."""
    return SkewPoint(
        pt.base_root,
        pt.fiber_root,
        pt.base_shift + 1,
        pt.fiber_shift + pt.base(1),
        pt._prefix_cache,
    )


def skew_iterate(pt: SkewPoint, n: int) -> SkewPoint:
    """n-th iterate in closed form: base shifted n, fiber shifted by the
    base prefix sum over the n consumed digits."""
    if n < 0:
        raise ValueError(f"iterate count must be >= 0, got {n}")
    moved = pt.base_prefix(pt.base_shift + n) - pt.base_prefix(pt.base_shift)
    return SkewPoint(
        pt.base_root,
        pt.fiber_root,
        pt.base_shift + n,
        pt.fiber_shift + moved,
        pt._prefix_cache,
    )


class CylinderDistance(NamedTuple):
    value: float
    separated: bool
    radius: int


def cylinder_metric(x: Seq, y: Seq, radius: int) -> CylinderDistance:
    """3^{-min{|n| <= radius : x_n != y_n}} over two-sided windows.

    Returns value 0 with separated=False when the windows agree on the
    whole range, in which case `radius` bounds the resolution.
    """
    if radius < 0:
        raise ValueError("windows must overlap on a symmetric range")
    for a in range(radius + 1):
        for n in (a, -a) if a else (0,):
            if x(n) != y(n):
                return CylinderDistance(3.0 ** (-a), True, radius)
    return CylinderDistance(0.0, False, radius)


def _digits_array(x, horizon: int) -> np.ndarray:
    if isinstance(x, np.ndarray):
        if len(x) < horizon:
            raise ValueError(f"array shorter than horizon {horizon}")
        return x[:horizon].astype(np.int8)
    return np.fromiter((x(n) for n in range(1, horizon + 1)), dtype=np.int8, count=horizon)


def distinct_factor_count(x, horizon: int, length: int) -> int:
    """Number of distinct length-`length` words among the first `horizon`
    digits (windows starting at 1..horizon-length+1).

    Windows are fingerprinted with a rolling hash; hash groups are then
    deduplicated by exact content comparison, so collisions cannot
    inflate or deflate the count.
    """
    if length < 1:
        raise ValueError(f"word length must be >= 1, got {length}")
    if horizon < length:
        raise ValueError(f"horizon {horizon} shorter than word length {length}")
    d = _digits_array(x, horizon)
    n_windows = horizon - length + 1
    base = np.uint64(1099511628211)
    h = np.zeros(n_windows, dtype=np.uint64)
    for j in range(length):
        h = h * base + d[j : j + n_windows].astype(np.uint64)
    order = np.argsort(h, kind="stable")
    hs = h[order]
    run_starts = np.nonzero(np.concatenate([[True], hs[1:] != hs[:-1]]))[0]
    run_ends = np.concatenate([run_starts[1:], [n_windows]])
    total = 0
    offs = np.arange(length)
    for a, b in zip(run_starts, run_ends):
        starts = order[a:b]
        if b - a == 1:
            total += 1
            continue
        distinct: set[bytes] = set()
        for lo in range(0, b - a, 1 << 14):
            chunk = starts[lo : lo + (1 << 14)]
            words = d[chunk[:, None] + offs[None, :]]
            uniq = np.unique(words, axis=0)
            for row in uniq:
                distinct.add(row.tobytes())
        total += len(distinct)
    return total


def window_profile(x, start: int, length: int, kind: str = "nonzero") -> int:
    """Nonzero count ("nonzero") or value-change count ("changes") of the
    window x|_start^{start+length-1}."""
    if start < 1 or length < 1:
        raise ValueError("window must start at >= 1 and have positive length")
    if isinstance(x, np.ndarray):
        win = x[start - 1 : start - 1 + length]
        if len(win) < length:
            raise ValueError("array shorter than requested window")
    else:
        win = np.fromiter((x(n) for n in range(start, start + length)), dtype=np.int64, count=length)
    if kind == "nonzero":
        return int(np.count_nonzero(win))
    if kind == "changes":
        return int(np.count_nonzero(win[1:] != win[:-1]))
    raise ValueError(f"kind must be 'nonzero' or 'changes', got {kind!r}")


_SYMBOLS = {-1: "-", 0: "0", 1: "+"}


def render_word(digits) -> str:
    """Word as text: -1, 0, 1 rendered as '-', '0', '+'."""
    return "".join(_SYMBOLS[int(v)] for v in digits)


def dump_words(words, fh) -> None:
    """One rendered word per line."""
    for w in words:
        fh.write(render_word(w) + "\n")
