"""Estimators for prefix marginals of measured output distributions.

The measured string is bit j = outcome of qubit measure[j]; a length-m prefix
is the string's value mod 2**m.  For Fourier measurements the prefix
probability expands into an average of shift-operator expectation values,
estimated by a two-level Monte Carlo scheme: an outer Chernoff average over
uniform shift powers u and an inner overlap estimate per distinct u.  For
product measurements it reduces to a single rank-one partial overlap.

The module also provides marginal oracles with a shared calling convention
`estimate(value, m, epsilon, delta, stream) -> float in [0, 1]`: the Monte
Carlo oracles above, an exact oracle, and a sampling oracle over a known
distribution (it counts prefix hits among T exact samples; the hit count is
drawn as one binomial variate, which has identical distribution).
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .circuits import MeasurementBlock, ProductBlock, QftBlock
from .estimator import (
    EstimationParams,
    Estimate,
    chernoff_count,
    overlap_count,
    overlap_with_op,
    partial_overlap,
)
from .ops import EmbeddedOp, weyl_shift_op
from .rng import RngStream
from .states import CTState, PermutedState, ProductState


class MarginalOracle(Protocol):
    k: int

    def estimate(self, value: int, m: int, epsilon: float, delta: float, stream: RngStream) -> float:
        ...


def _check_prefix(value: int, m: int, k: int) -> None:
    if not 1 <= m <= k:
        raise ValueError(f"prefix length must be in [1, {k}], got {m}")
    if not 0 <= value < (1 << m):
        raise ValueError(f"prefix value {value} does not fit in {m} bits")


def fourier_marginal(
    ct: CTState,
    targets: tuple[int, ...],
    inverse: bool,
    value: int,
    m: int,
    params: EstimationParams,
    stream: RngStream,
    *,
    threads: int = 1,
) -> Estimate:
    """Prefix marginal of measuring the modular Fourier transform on `targets`.

    p = E_u[ alpha^(value*u) <psi| shift(u)^(+-1) |psi> ] over uniform
    u in Z_{2**m}; the outer mean runs at (epsilon/2, delta/2) and each inner
    overlap at (epsilon/2, delta/(2K)), so repeated u values can share one
    inner estimate without weakening the union bound.
    """
    k = len(targets)
    _check_prefix(value, m, k)
    outer = overlap_count(params.epsilon, params.delta)
    inner_params = EstimationParams(params.epsilon / 2.0, params.delta / (2.0 * outer))
    shift = weyl_shift_op(value, m, k, subtract=inverse)

    us = stream.child(0).generator().integers(0, 1 << m, size=outer, dtype=np.uint64)
    uniq, counts = np.unique(us, return_counts=True)

    total = 0j
    anomalies = 0
    samples = 0
    for u, count in zip(uniq.tolist(), counts.tolist()):
        if u == 0:
            # Identity power: every overlap integrand is 1 up to rounding, so
            # contribute the exact value without sampling.
            total += count * 1.0
            continue
        op = EmbeddedOp(shift.power(int(u)), tuple(targets), ct.n)
        est = overlap_with_op(ct, op, ct, inner_params, stream.child(1, int(u)), threads=threads)
        total += count * est.value
        anomalies += est.anomalies
        samples += est.samples_used
    mean = total / outer
    if abs(mean.imag) > params.epsilon:
        anomalies += 1
    return Estimate(mean, samples, params.epsilon, params.delta, anomalies)


def _front_permutation(n: int, measure: tuple[int, ...]) -> tuple[int, ...]:
    """positions[q] = new home of qubit q: measured qubits first, rest ascending."""
    positions = [0] * n
    rest = [q for q in range(n) if q not in set(measure)]
    for i, q in enumerate(tuple(measure) + tuple(rest)):
        positions[q] = i
    return tuple(positions)


def product_marginal(
    ct: CTState,
    unitaries,
    measure: tuple[int, ...],
    value: int,
    m: int,
    params: EstimationParams,
    stream: RngStream,
    *,
    threads: int = 1,
) -> Estimate:
    """Prefix marginal of measuring qubits `measure` after per-qubit unitaries.

    Unitaries on unmeasured qubits cancel, so the probability is the rank-one
    partial overlap <psi'|(|a><a| tensor I)|psi'> where psi' is the state with
    its measured qubits permuted to the front and a = tensor_i u_i^dag |y_i>
    over the m prefix qubits.
    """
    _check_prefix(value, m, len(measure))
    perm_ct = PermutedState(ct, _front_permutation(ct.n, tuple(measure)))
    rows = np.stack(
        [np.conj(unitaries[measure[i]][(value >> i) & 1, :]) for i in range(m)]
    )
    alpha = ProductState(rows)
    est = partial_overlap(perm_ct, alpha, alpha, perm_ct, params, stream, threads=threads)
    anomalies = est.anomalies + (1 if abs(est.value.imag) > params.epsilon else 0)
    return Estimate(est.value, est.samples_used, params.epsilon, params.delta, anomalies)


def measured_marginal(
    ct: CTState,
    u2: MeasurementBlock,
    measure: tuple[int, ...],
    value: int,
    m: int,
    params: EstimationParams,
    stream: RngStream,
    *,
    threads: int = 1,
) -> Estimate:
    """Dispatch to the Fourier or product prefix-marginal estimator."""
    if isinstance(u2, QftBlock):
        if tuple(u2.targets) != tuple(measure):
            raise ValueError("Fourier measurements require measure == targets")
        return fourier_marginal(ct, tuple(u2.targets), u2.inverse, value, m, params, stream, threads=threads)
    return product_marginal(ct, u2.unitaries, tuple(measure), value, m, params, stream, threads=threads)


def point_probability(
    ct: CTState,
    u2: MeasurementBlock,
    measure: tuple[int, ...],
    value: int,
    params: EstimationParams,
    stream: RngStream,
    *,
    threads: int = 1,
) -> Estimate:
    """Probability of one full measured string (the full-length prefix)."""
    return measured_marginal(ct, u2, measure, value, len(measure), params, stream, threads=threads)


def _check_dist(dist: np.ndarray) -> int:
    dist = np.asarray(dist, dtype=np.float64)
    k = int(dist.size).bit_length() - 1
    if dist.size != (1 << k):
        raise ValueError("distribution length must be a power of two")
    return k


class ExactMarginalOracle:
    """Exact prefix marginals of a known measured distribution."""

    def __init__(self, dist: np.ndarray):
        self.dist = np.asarray(dist, dtype=np.float64)
        self.k = _check_dist(self.dist)
        self._tables: dict[int, np.ndarray] = {}
        self.calls = 0
        self.samples_drawn = 0

    def _table(self, m: int) -> np.ndarray:
        if m not in self._tables:
            idx = np.arange(self.dist.size, dtype=np.uint64)
            codes = (idx & np.uint64((1 << m) - 1)).astype(np.int64)
            self._tables[m] = np.bincount(codes, weights=self.dist, minlength=1 << m)
        return self._tables[m]

    def exact(self, value: int, m: int) -> float:
        _check_prefix(value, m, self.k)
        return float(self._table(m)[value])

    def estimate(self, value: int, m: int, epsilon: float, delta: float, stream: RngStream) -> float:
        self.calls += 1
        return self.exact(value, m)

    def point_estimator(self):
        def estimate(value: int, epsilon: float, delta: float, stream: RngStream) -> float:
            return self.exact(value, self.k)

        return estimate


class SamplingMarginalOracle(ExactMarginalOracle):
    """Prefix marginals estimated by sampling the known distribution.

    The honest estimator draws T = ceil((4/e^2) ln(4/d)) strings and returns
    the fraction whose prefix matches; that fraction is Binomial(T, p)/T, so
    the hit count is drawn as a single binomial variate.
    """

    def estimate(self, value: int, m: int, epsilon: float, delta: float, stream: RngStream) -> float:
        self.calls += 1
        t = chernoff_count(epsilon, delta)
        self.samples_drawn += t
        # Rounding in the marginal tables can leave p a few ulps outside [0, 1].
        p = min(1.0, max(0.0, self.exact(value, m)))
        hits = int(stream.generator().binomial(t, p))
        return hits / t

    def point_estimator(self):
        def estimate(value: int, epsilon: float, delta: float, stream: RngStream) -> float:
            return self.estimate(value, self.k, epsilon, delta, stream)

        return estimate


class CTMarginalOracle:
    """Monte Carlo prefix marginals of a circuit's measured distribution."""

    def __init__(self, ct: CTState, u2: MeasurementBlock, measure: tuple[int, ...], *, threads: int = 1):
        if isinstance(u2, QftBlock) and tuple(u2.targets) != tuple(measure):
            raise ValueError("Fourier measurements require measure == targets")
        self.ct = ct
        self.u2 = u2
        self.measure = tuple(measure)
        self.k = len(self.measure)
        self.threads = threads
        self.calls = 0
        self.samples_drawn = 0
        self.anomalies = 0

    def estimate(self, value: int, m: int, epsilon: float, delta: float, stream: RngStream) -> float:
        est = measured_marginal(
            self.ct,
            self.u2,
            self.measure,
            value,
            m,
            EstimationParams(epsilon, delta),
            stream,
            threads=self.threads,
        )
        self.calls += 1
        self.samples_drawn += est.samples_used
        self.anomalies += est.anomalies
        return est.probability

    def point_estimator(self):
        def estimate(value: int, epsilon: float, delta: float, stream: RngStream) -> float:
            return self.estimate(value, self.k, epsilon, delta, stream)

        return estimate
