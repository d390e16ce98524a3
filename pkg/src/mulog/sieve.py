"""Segmented sieves for the Möbius and Liouville functions.

Builds exact μ(n) and λ(n) tables on [1, N] with working memory bounded by
the segment size plus the primes below √N, keeps squarefree prefix counts
at fixed checkpoints, and provides the logarithmically weighted sums used
by the evaluation harness.  All integer results are exact; floating sums
are accumulated in a fixed order so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

CACHE_MAGIC = b"MLSV1"
CHECKPOINT_STRIDE = 1 << 16
MIN_SEGMENT_LENGTH = 1 << 10

# working arrays per segment: int64 accumulator + int64 values + flags
_SEGMENT_WORKING_BYTES = 18


class SieveMemoryError(MemoryError):
    """Raised when a build would exceed the configured memory budget."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"sieve build needs about {required} bytes but the budget is {budget}"
        )
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class SieveConfig:
    """Parameters of a table build."""

    limit: int
    segment_length: int = 1 << 20

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError(f"limit must be >= 1, got {self.limit}")
        if self.segment_length < MIN_SEGMENT_LENGTH:
            raise ValueError(
                f"segment_length must be >= {MIN_SEGMENT_LENGTH}, got {self.segment_length}"
            )


def small_primes(n: int) -> np.ndarray:
    """Primes up to n inclusive (plain Eratosthenes, used for p <= sqrt(N))."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.nonzero(flags)[0].astype(np.int64)


def _sieve_segment(primes: np.ndarray, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact (mu, lambda) for n in [lo, hi).

    Per prime power p^e < hi each multiple collects one more factor p, so
    `parity` ends up as Omega(n) mod 2 and `acc` as the product of all
    prime powers from primes <= sqrt(limit); a leftover cofactor > 1 is a
    single large prime.
    """
    n_vals = np.arange(lo, hi, dtype=np.int64)
    acc = np.ones(hi - lo, dtype=np.int64)
    parity = np.zeros(hi - lo, dtype=np.int8)
    sqfree = np.ones(hi - lo, dtype=bool)
    for p in primes:
        p = int(p)
        pe = p
        while pe < hi:
            start = ((lo + pe - 1) // pe) * pe
            if start >= hi:
                break
            sl = slice(start - lo, hi - lo, pe)
            acc[sl] *= p
            parity[sl] ^= 1
            if pe == p * p:
                sqfree[sl] = False
            pe *= p
    parity ^= acc != n_vals
    lam = np.where(parity & 1, -1, 1).astype(np.int8)
    mu = np.where(sqfree, lam, 0).astype(np.int8)
    if lo == 1:
        # n = 1: empty product
        mu[0] = 1
        lam[0] = 1
    return mu, lam


@dataclass
class SieveTable:
    """μ, λ and squarefree prefix checkpoints on [1, limit].

    `mu` and `lam` are 1-based int8 arrays (index 0 unused).  The prefix
    Σ_{n<=m} μ(n)² is stored as checkpoints every CHECKPOINT_STRIDE
    indices; range queries recount at most one stride with numpy.
    """

    limit: int
    mu: np.ndarray
    lam: np.ndarray
    mu_sq_checkpoints: np.ndarray = field(repr=False)

    @classmethod
    def from_arrays(cls, mu: np.ndarray, lam: np.ndarray) -> "SieveTable":
        """Table over 1-based arrays (used by tests and cache loading)."""
        if mu.shape != lam.shape or mu.ndim != 1 or mu.shape[0] < 2:
            raise ValueError("mu and lam must be equal-length 1-based arrays")
        limit = mu.shape[0] - 1
        return cls(limit, mu, lam, _build_checkpoints(mu, limit))

    def mu_sq_prefix(self, m: int) -> int:
        """Σ_{n<=m} μ(n)²."""
        if m < 0 or m > self.limit:
            raise ValueError(f"prefix index {m} outside [0, {self.limit}]")
        j = m // CHECKPOINT_STRIDE
        base = int(self.mu_sq_checkpoints[j])
        return base + int(np.count_nonzero(self.mu[j * CHECKPOINT_STRIDE + 1 : m + 1]))

    def mu_squared_range_sum(self, a: int, b: int) -> int:
        """Σ_{a<=n<=b} μ(n)² from the checkpoint array."""
        if not (1 <= a <= b <= self.limit):
            raise ValueError(f"range [{a}, {b}] outside [1, {self.limit}]")
        return self.mu_sq_prefix(b) - self.mu_sq_prefix(a - 1)

    def log_weighted_mu_squared(self, n: int) -> tuple[float, float]:
        """(Σ_{m<=n} μ(m)²/m, ratio of that sum to log n).

        Accumulated highest index first for floating stability; the ratio
        is +inf at n = 1 where log n = 0.
        """
        if n < 1 or n > self.limit:
            raise ValueError(f"n={n} outside [1, {self.limit}]")
        total = 0.0
        chunk = 1 << 20
        lo_first = ((n - 1) // chunk) * chunk + 1
        for lo in range(lo_first, 0, -chunk):
            hi = min(lo + chunk - 1, n)
            seg = np.arange(hi, lo - 1, -1, dtype=np.float64)
            mask = self.mu[lo : hi + 1][::-1] != 0
            total += float((mask / seg).sum())
        ratio = total / math.log(n) if n > 1 else math.inf
        return total, ratio


def _build_checkpoints(mu: np.ndarray, limit: int) -> np.ndarray:
    n_cp = limit // CHECKPOINT_STRIDE + 1
    cp = np.zeros(n_cp, dtype=np.int64)
    running = 0
    for j in range(1, n_cp):
        lo = (j - 1) * CHECKPOINT_STRIDE + 1
        hi = j * CHECKPOINT_STRIDE
        running += int(np.count_nonzero(mu[lo : hi + 1]))
        cp[j] = running
    return cp


def build_sieve(
    cfg: SieveConfig,
    threads: int = 1,
    max_bytes: int | None = None,
) -> SieveTable:
    """Exact μ and λ on [1, cfg.limit].

    Segments are sieved independently (optionally in parallel) and written
    into disjoint slices of the output arrays, so the result is identical
    for any segment length and any thread count.
    """
    limit = cfg.limit
    if max_bytes is not None:
        required = (
            2 * (limit + 1)
            + _SEGMENT_WORKING_BYTES * cfg.segment_length * max(1, threads)
            + 8 * (limit // CHECKPOINT_STRIDE + 1)
        )
        if required > max_bytes:
            raise SieveMemoryError(required, max_bytes)

    primes = small_primes(math.isqrt(limit))
    mu = np.zeros(limit + 1, dtype=np.int8)
    lam = np.zeros(limit + 1, dtype=np.int8)

    starts = list(range(1, limit + 1, cfg.segment_length))

    def work(lo: int) -> None:
        hi = min(lo + cfg.segment_length, limit + 1)
        mu_seg, lam_seg = _sieve_segment(primes, lo, hi)
        mu[lo:hi] = mu_seg
        lam[lo:hi] = lam_seg

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for lo in starts:
            work(lo)

    return SieveTable(limit, mu, lam, _build_checkpoints(mu, limit))


def abel_transform_residual(a) -> float:
    """Difference of the two sides of the exact partial-summation identity

        Σ_{n<=N} a_n/n  =  Σ_{M=1}^{N-1} A_M/(M(M+1)) + A_N/N,

    with A_M = Σ_{n<=M} a_n.  Expected to vanish up to rounding.
    """
    arr = np.asarray(a)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ValueError("need a non-empty one-dimensional sequence")
    n = arr.shape[0]
    idx = np.arange(1, n + 1, dtype=np.float64)
    lhs = float((arr.astype(np.float64) / idx).sum())
    partial = np.cumsum(arr.astype(np.float64))
    rhs = float((partial[:-1] / (idx[:-1] * (idx[:-1] + 1))).sum()) + float(partial[-1]) / n
    return lhs - rhs


def save_cache(table: SieveTable, path, segment_length: int = 1 << 20) -> None:
    """Binary (μ, λ) cache.

    Layout, all little-endian: magic "MLSV1", uint64 limit, uint64
    segment length, then μ packed 2 bits per element (00=0, 01=+1, 11=-1,
    element n at bit offset 2(n-1)), then λ packed 1 bit per element
    (bit set means λ = +1).
    """
    limit = table.limit
    codes = np.zeros(limit, dtype=np.uint8)
    mu_body = table.mu[1:]
    codes[mu_body == 1] = 0b01
    codes[mu_body == -1] = 0b11
    mu_packed = np.zeros((limit + 3) // 4, dtype=np.uint8)
    for shift in range(4):
        part = codes[shift::4]
        mu_packed[: part.shape[0]] |= part << (2 * shift)
    lam_bits = (table.lam[1:] == 1).astype(np.uint8)
    lam_packed = np.zeros((limit + 7) // 8, dtype=np.uint8)
    for shift in range(8):
        part = lam_bits[shift::8]
        lam_packed[: part.shape[0]] |= part << shift
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(limit.to_bytes(8, "little"))
        fh.write(int(segment_length).to_bytes(8, "little"))
        fh.write(mu_packed.tobytes())
        fh.write(lam_packed.tobytes())


def load_cache(path) -> SieveTable:
    """Rebuild a SieveTable from a cache written by save_cache."""
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != CACHE_MAGIC:
            raise ValueError(f"bad cache magic {magic!r}")
        limit = int.from_bytes(fh.read(8), "little")
        int.from_bytes(fh.read(8), "little")  # segment length, informational
        mu_packed = np.frombuffer(fh.read((limit + 3) // 4), dtype=np.uint8)
        lam_packed = np.frombuffer(fh.read((limit + 7) // 8), dtype=np.uint8)
    codes = np.zeros(limit, dtype=np.uint8)
    for shift in range(4):
        lane = (mu_packed >> (2 * shift)) & 0b11
        codes[shift::4] = lane[: codes[shift::4].shape[0]]
    mu = np.zeros(limit + 1, dtype=np.int8)
    mu[1:][codes == 0b01] = 1
    mu[1:][codes == 0b11] = -1
    bits = np.zeros(limit, dtype=np.uint8)
    for shift in range(8):
        lane = (lam_packed >> shift) & 1
        bits[shift::8] = lane[: bits[shift::8].shape[0]]
    lam = np.where(bits == 1, 1, -1).astype(np.int8)
    lam = np.concatenate([np.zeros(1, dtype=np.int8), lam])
    return SieveTable(limit, mu, lam, _build_checkpoints(mu, limit))
