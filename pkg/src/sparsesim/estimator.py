"""Monte Carlo mean and overlap estimators with explicit (epsilon, delta) budgets.

All estimators draw the sample count dictated by a complex-valued Chernoff
bound for |values| <= 1: T(e, d) = ceil((4/e^2) ln(4/d)) puts the empirical
mean within e of the truth except with probability d.  Overlaps <phi|psi>
split into two bounded partial means, one over psi-samples and one over
phi-samples, each run at (e/2, d/2); the split by which state has the larger
pointwise probability is what keeps both integrands inside the unit disk.

Sampling is chunked with a fixed chunk size and one RNG substream per chunk
index, and partial sums are reduced in chunk order, so results are identical
for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rng import RngStream
from .states import CTState, OpImageState, TensorPair
from .ops import BasisPreservingOp

_CHUNK = 1 << 16


@dataclass(frozen=True)
class EstimationParams:
    """Additive accuracy epsilon and failure probability delta."""

    epsilon: float
    delta: float

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class Estimate:
    """An estimated value plus the budget that produced it.

    `samples_used` is the formula-determined draw count (for two-stream
    overlap estimates, the total over both streams).  `anomalies` counts
    events that should almost surely never happen, such as drawing a string
    whose recomputed probability is zero.
    """

    value: complex
    samples_used: int
    epsilon: float
    delta: float
    anomalies: int = 0

    @property
    def probability(self) -> float:
        """The real part clamped to [0, 1], for estimates of probabilities."""
        return min(1.0, max(0.0, float(self.value.real)))


def chernoff_count(epsilon: float, delta: float) -> int:
    """Samples needed for additive accuracy epsilon at failure delta."""
    return math.ceil((4.0 / epsilon**2) * math.log(4.0 / delta))


def overlap_count(epsilon: float, delta: float) -> int:
    """Per-stream samples for the two-stream overlap estimator."""
    return chernoff_count(epsilon / 2.0, delta / 2.0)


def _chunks(total: int) -> list[tuple[int, int]]:
    return [(i, min(_CHUNK, total - i * _CHUNK)) for i in range((total + _CHUNK - 1) // _CHUNK)]


def _chunked_sum(value_fn, total: int, stream: RngStream, threads: int) -> tuple[complex, int]:
    """Sum value_fn(rng, count) over fixed chunks; reduction order is fixed.

    value_fn returns (values array, anomaly count).
    """
    tasks = _chunks(total)

    def run(task: tuple[int, int]) -> tuple[complex, int]:
        idx, count = task
        vals, anomalies = value_fn(stream.child(idx).generator(), count)
        return complex(vals.sum()), int(anomalies)

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(run, tasks))
    else:
        partials = [run(t) for t in tasks]
    total_sum = sum((s for s, _ in partials), start=0j)
    total_anomalies = sum(a for _, a in partials)
    return total_sum, total_anomalies


def chernoff_mean(value_fn, params: EstimationParams, stream: RngStream, *, threads: int = 1) -> Estimate:
    """Estimate E[value_fn] for a complex function with |value| <= 1.

    value_fn(rng, size) must return `size` independent draws of the value.
    """
    t = chernoff_count(params.epsilon, params.delta)
    total, anomalies = _chunked_sum(lambda rng, c: (value_fn(rng, c), 0), t, stream, threads)
    return Estimate(total / t, t, params.epsilon, params.delta, anomalies)


def _overlap_side(phi: CTState, psi: CTState, *, from_psi: bool):
    """Integrand of one side of the two-stream overlap decomposition.

    The psi-stream keeps strings with p(x) >= q(x) (ties included), the
    phi-stream the strict complement, so each integrand has modulus <= 1.
    """

    def value_fn(rng: np.random.Generator, count: int) -> tuple[np.ndarray, int]:
        source = psi if from_psi else phi
        xs = source.sample_batch(rng, count)
        a_psi = psi.amplitude_batch(xs)
        a_phi = phi.amplitude_batch(xs)
        p = np.abs(a_psi) ** 2
        q = np.abs(a_phi) ** 2
        denom = p if from_psi else q
        keep = (p >= q) if from_psi else (q > p)
        safe = denom > 0.0
        anomalies = int(count - int(safe.sum()))
        vals = np.where(keep & safe, np.conj(a_phi) * a_psi / np.where(safe, denom, 1.0), 0.0 + 0.0j)
        return vals, anomalies

    return value_fn


def overlap(
    phi: CTState,
    psi: CTState,
    params: EstimationParams,
    stream: RngStream,
    *,
    threads: int = 1,
) -> Estimate:
    """Estimate <phi|psi> within epsilon except with probability delta."""
    if phi.n != psi.n:
        raise ValueError(f"state widths differ: {phi.n} vs {psi.n}")
    t = overlap_count(params.epsilon, params.delta)
    sum_f, anom_f = _chunked_sum(_overlap_side(phi, psi, from_psi=True), t, stream.child(0), threads)
    sum_g, anom_g = _chunked_sum(_overlap_side(phi, psi, from_psi=False), t, stream.child(1), threads)
    value = sum_f / t + sum_g / t
    return Estimate(value, 2 * t, params.epsilon, params.delta, anom_f + anom_g)


def overlap_with_op(
    phi: CTState,
    op: BasisPreservingOp,
    psi: CTState,
    params: EstimationParams,
    stream: RngStream,
    *,
    threads: int = 1,
) -> Estimate:
    """Estimate <phi|A|psi> for a basis-preserving operator A."""
    return overlap(phi, OpImageState(op, psi), params, stream, threads=threads)


def lift_partial_overlap(
    phi: CTState,
    xi: CTState,
    chi: CTState,
    psi: CTState,
) -> tuple[CTState, CTState]:
    """The (n+k)-qubit pair whose plain overlap is <phi|(|xi><chi| tensor I)|psi>.

    Phi1 = phi tensor chi on a trailing ancilla register, and Phi2 places xi
    on the first k output qubits while psi's own first k qubits are routed to
    the ancilla register.  Then <Phi1|Phi2> equals the target, and both lifts
    sample exactly.
    """
    if phi.n != psi.n:
        raise ValueError(f"state widths differ: {phi.n} vs {psi.n}")
    if xi.n != chi.n:
        raise ValueError(f"window widths differ: {xi.n} vs {chi.n}")
    n, k = psi.n, xi.n
    if k > n:
        raise ValueError(f"window width {k} exceeds state width {n}")
    phi1 = TensorPair(phi, chi, tuple(range(n)), tuple(range(n, n + k)))
    psi_positions = tuple(n + j if j < k else j for j in range(n))
    phi2 = TensorPair(xi, psi, tuple(range(k)), psi_positions)
    return phi1, phi2


def partial_overlap(
    phi: CTState,
    xi: CTState,
    chi: CTState,
    psi: CTState,
    params: EstimationParams,
    stream: RngStream,
    *,
    threads: int = 1,
) -> Estimate:
    """Estimate <phi| (|xi><chi| tensor I) |psi>, the rank-one op on the first k qubits."""
    phi1, phi2 = lift_partial_overlap(phi, xi, chi, psi)
    return overlap(phi1, phi2, params, stream, threads=threads)
