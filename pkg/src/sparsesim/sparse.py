"""Sparse distributions and states over n-bit strings.

Entries are stored as parallel arrays (sorted uint64 integer views, weights),
so supports stay deduplicated and iteration order is deterministic.  The
truncation, thresholding, and distance helpers implement the bookkeeping that
relates a distribution to its best t-sparse approximation: keeping the top t
entries (ties broken toward the smaller integer view) maximizes retained
mass, and for states the squared l2 truncation error equals the l1 mass the
truncation removes from the Born distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import MAX_BITS


def _as_entries(values, weights, dtype) -> tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=np.uint64)
    weights = np.asarray(weights, dtype=dtype)
    if values.ndim != 1 or values.shape != weights.shape:
        raise ValueError("values and weights must be matching 1-d arrays")
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    if values.size and np.any(values[1:] == values[:-1]):
        raise ValueError("duplicate strings")
    return values, weights


@dataclass
class SparseDistribution:
    """A subnormalized distribution stored as (sorted values, probabilities)."""

    n: int
    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"n must be in [1, {MAX_BITS}], got {self.n}")
        self.values, self.probs = _as_entries(self.values, self.probs, np.float64)
        if np.any(self.probs < 0.0):
            raise ValueError("probabilities must be nonnegative")
        if self.values.size and int(self.values[-1]) >= (1 << self.n):
            raise ValueError("entry does not fit in the register")

    @classmethod
    def from_dict(cls, n: int, table: dict[int, float]) -> "SparseDistribution":
        items = sorted(table.items())
        return cls(n, [v for v, _ in items], [p for _, p in items])

    @classmethod
    def from_dense(cls, dense: np.ndarray, *, tol: float = 0.0) -> "SparseDistribution":
        dense = np.asarray(dense, dtype=np.float64)
        n = int(dense.size).bit_length() - 1
        if dense.size != (1 << n):
            raise ValueError("dense length must be a power of two")
        keep = np.nonzero(dense > tol)[0]
        return cls(n, keep.astype(np.uint64), dense[keep])

    def __len__(self) -> int:
        return int(self.values.size)

    def total(self) -> float:
        return float(self.probs.sum())

    def prob_of(self, value: int) -> float:
        idx = int(np.searchsorted(self.values, np.uint64(value)))
        if idx < len(self) and int(self.values[idx]) == int(value):
            return float(self.probs[idx])
        return 0.0

    def to_dense(self) -> np.ndarray:
        out = np.zeros(1 << self.n, dtype=np.float64)
        out[self.values.astype(np.int64)] = self.probs
        return out

    def items(self) -> list[tuple[int, float]]:
        return [(int(v), float(p)) for v, p in zip(self.values, self.probs)]


@dataclass
class SparseState:
    """A vector over n-bit strings stored as (sorted values, amplitudes)."""

    n: int
    values: np.ndarray
    amps: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"n must be in [1, {MAX_BITS}], got {self.n}")
        self.values, self.amps = _as_entries(self.values, self.amps, np.complex128)
        if self.values.size and int(self.values[-1]) >= (1 << self.n):
            raise ValueError("entry does not fit in the register")

    def __len__(self) -> int:
        return int(self.values.size)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def probabilities(self) -> SparseDistribution:
        return SparseDistribution(self.n, self.values.copy(), np.abs(self.amps) ** 2)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(1 << self.n, dtype=np.complex128)
        out[self.values.astype(np.int64)] = self.amps
        return out

    def items(self) -> list[tuple[int, complex]]:
        return [(int(v), complex(a)) for v, a in zip(self.values, self.amps)]


def _top_order(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # Sort by descending weight; ties go to the smaller integer view.
    return np.lexsort((values, -weights))


def truncate_top(dist: SparseDistribution, t: int) -> SparseDistribution:
    """Keep the t most probable entries (unnormalized)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    keep = _top_order(dist.values, dist.probs)[:t]
    return SparseDistribution(dist.n, dist.values[keep], dist.probs[keep])


def truncate_top_state(state: SparseState, t: int) -> SparseState:
    """Keep the t entries of largest squared amplitude (ties by integer view)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    keep = _top_order(state.values, np.abs(state.amps) ** 2)[:t]
    return SparseState(state.n, state.values[keep], state.amps[keep])


def threshold_restrict(dist: SparseDistribution, epsilon: float, t: int) -> SparseDistribution:
    """Keep entries with probability >= epsilon/t (unnormalized)."""
    if t < 1:
        raise ValueError("t must be positive")
    keep = dist.probs >= (epsilon / t)
    return SparseDistribution(dist.n, dist.values[keep], dist.probs[keep])


def normalize(dist: SparseDistribution) -> tuple[SparseDistribution, float]:
    """Scale to total mass 1; returns (normalized, original mass)."""
    mass = dist.total()
    if mass <= 0.0:
        raise ValueError("cannot normalize an empty distribution")
    return SparseDistribution(dist.n, dist.values.copy(), dist.probs / mass), mass


def _merged_weights(a_values, a_weights, b_values, b_weights, dtype):
    union = np.union1d(a_values, b_values)
    wa = np.zeros(union.size, dtype=dtype)
    wb = np.zeros(union.size, dtype=dtype)
    ia = np.searchsorted(union, a_values)
    ib = np.searchsorted(union, b_values)
    wa[ia] = a_weights
    wb[ib] = b_weights
    return wa, wb


def _coerce_dist(obj) -> SparseDistribution:
    if isinstance(obj, SparseDistribution):
        return obj
    return SparseDistribution.from_dense(np.asarray(obj, dtype=np.float64))


def l1_distance(a, b) -> float:
    """sum_x |p_x - q_x| over the union support; accepts dense arrays too."""
    a, b = _coerce_dist(a), _coerce_dist(b)
    if a.n != b.n:
        raise ValueError("distributions live on different registers")
    wa, wb = _merged_weights(a.values, a.probs, b.values, b.probs, np.float64)
    return float(np.abs(wa - wb).sum())


def _coerce_state(obj) -> SparseState:
    if isinstance(obj, SparseState):
        return obj
    vec = np.asarray(obj, dtype=np.complex128)
    n = int(vec.size).bit_length() - 1
    if vec.size != (1 << n):
        raise ValueError("dense length must be a power of two")
    keep = np.nonzero(vec)[0]
    return SparseState(n, keep.astype(np.uint64), vec[keep])


def l2_distance(a, b) -> float:
    """sqrt(sum_x |a_x - b_x|^2); accepts dense arrays too."""
    a, b = _coerce_state(a), _coerce_state(b)
    if a.n != b.n:
        raise ValueError("states live on different registers")
    wa, wb = _merged_weights(a.values, a.amps, b.values, b.amps, np.complex128)
    return float(np.sqrt(np.sum(np.abs(wa - wb) ** 2)))


def tail_after_top(dist: SparseDistribution, t: int) -> float:
    """l1 mass removed by the best t-sparse truncation: ||P - P[t]||_1."""
    order = _top_order(dist.values, dist.probs)
    return float(dist.probs[order[t:]].sum())


def sample_sparse(dist: SparseDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw strings by cumulative-sum inversion (O(log s) per draw)."""
    if len(dist) == 0:
        raise ValueError("cannot sample an empty distribution")
    cum = np.cumsum(dist.probs)
    if cum[-1] <= 0.0:
        raise ValueError("cannot sample a zero-mass distribution")
    rs = rng.random(size) * cum[-1]
    idx = np.searchsorted(cum, rs, side="right")
    return dist.values[np.minimum(idx, len(dist) - 1)]
