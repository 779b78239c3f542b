"""Reconstruction of approximately sparse output distributions and states.

Distribution reconstruction: search for strings of probability >= theta
(theta = epsilon/t) with per-stage failure pi = delta/(2t/epsilon + 1),
re-estimate each listed probability at accuracy min(epsilon/|L|, epsilon/4t),
drop entries below epsilon/4t (a no-op when everything succeeded), and
normalize.  When the target is epsilon-close to t-sparse the result is within
12*epsilon in l1 except with probability delta, its support has at most
2t/epsilon strings, and every reported probability is at least
epsilon/(8t).

State reconstruction spends delta/2 on the distribution stage, then estimates
each listed amplitude <x|psi_out> = <U2^dag x|prepared> by a Monte Carlo
overlap at accuracy sqrt(epsilon^3/(8t)), keeps only its phase, and attaches
the phase to the square root of the reconstructed probability; the output has
unit 2-norm by construction and is within 5*sqrt(epsilon) in 2-norm except
with probability delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import MeasurementBlock, basis_preimage_state, basis_vector_state, dual_measurement_block
from .estimator import EstimationParams, overlap
from .kmsearch import HeavyHitterList, km_search
from .marginals import CTMarginalOracle, MarginalOracle
from .rng import RngStream
from .sparse import SparseDistribution, SparseState
from .states import CTState


@dataclass(frozen=True)
class ReconstructionParams:
    """Sparsity budget t, accuracy epsilon <= 1/6, failure delta."""

    t: int
    epsilon: float
    delta: float

    def __post_init__(self) -> None:
        if not (isinstance(self.t, int) and self.t >= 1):
            raise ValueError(f"t must be a positive int, got {self.t!r}")
        if not 0.0 < self.epsilon <= 1.0 / 6.0:
            raise ValueError(f"epsilon must lie in (0, 1/6], got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def theta(self) -> float:
        return self.epsilon / self.t

    @property
    def pi(self) -> float:
        return self.delta / (2.0 * self.t / self.epsilon + 1.0)


@dataclass
class DistributionResult:
    distribution: SparseDistribution
    heavy: HeavyHitterList
    refined: list[float]
    dropped: list[int]
    mass: float
    theta: float
    pi: float
    eps_refine: float
    point_calls: int
    promise_violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.promise_violations


def reconstruct_distribution(
    oracle: MarginalOracle,
    point_estimator,
    params: ReconstructionParams,
    stream: RngStream,
) -> DistributionResult:
    """Reconstruct the measured distribution from a marginal oracle.

    point_estimator(value, epsilon, delta, stream) -> float estimates the
    probability of one full measured string.
    """
    theta, pi = params.theta, params.pi
    eps, t = params.epsilon, params.t
    k = oracle.k
    heavy = km_search(oracle, theta, pi, stream.child(0))

    violations: list[str] = []
    if heavy.halted:
        violations.append("heavy-hitter search halted: sparsity promise violated or estimates failed")
    if not heavy.values and not heavy.halted:
        violations.append("no string reached the search threshold")

    empty = SparseDistribution(k, [], [])
    if not heavy.values:
        return DistributionResult(
            empty, heavy, [], [], 0.0, theta, pi, eps, 0, violations
        )

    eps_refine = min(eps / len(heavy.values), eps / (4.0 * t))
    refined: list[float] = []
    for i, value in enumerate(heavy.values):
        est = point_estimator(value, eps_refine, pi, stream.child(1, i))
        refined.append(min(1.0, max(0.0, float(est))))

    floor = eps / (4.0 * t)
    kept = [(v, c) for v, c in zip(heavy.values, refined) if c >= floor]
    dropped = [v for v, c in zip(heavy.values, refined) if c < floor]
    if dropped:
        violations.append(f"{len(dropped)} refined estimates fell below epsilon/4t")
    if not kept:
        return DistributionResult(
            empty, heavy, refined, dropped, 0.0, theta, pi, eps_refine, len(refined), violations
        )

    mass = float(sum(c for _, c in kept))
    if not (1.0 - 3.0 * eps <= mass <= 1.0 + 3.0 * eps):
        violations.append(f"refined mass {mass:.6f} outside [1 - 3*eps, 1 + 3*eps]")

    dist = SparseDistribution(k, [v for v, _ in kept], [c / mass for _, c in kept])
    assert len(dist) <= 2.0 * t / eps + 1e-9, "support bound exceeded"
    if mass <= 2.0:
        # Kept entries are >= eps/4t, so normalizing by at most 2 keeps eps/8t.
        assert float(dist.probs.min()) >= eps / (8.0 * t) * (1.0 - 1e-12), "probability floor violated"
    return DistributionResult(
        dist, heavy, refined, dropped, mass, theta, pi, eps_refine, len(refined), violations
    )


def extract_phase(value: complex, floor: float = 0.0) -> tuple[complex, bool]:
    """Unit-modulus phase of an estimate; flags magnitudes below the floor.

    A phase read off an estimate of magnitude below the floor carries no
    accuracy guarantee (the phase error of an alpha-accurate estimate is at
    most 2*alpha/|true value|), so callers count those as anomalies.
    """
    mag = abs(value)
    if mag == 0.0:
        return 1.0 + 0.0j, True
    return value / mag, mag < floor


@dataclass
class StateResult:
    state: SparseState | None
    distribution: DistributionResult
    amplitudes: list[complex]
    phase_floor: float
    phase_anomalies: int
    samples_used: int
    promise_violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.promise_violations


def reconstruct_state(
    ct: CTState,
    u2: MeasurementBlock,
    measure: tuple[int, ...],
    params: ReconstructionParams,
    stream: RngStream,
    *,
    marginal_oracle: MarginalOracle | None = None,
    point_estimator=None,
    threads: int = 1,
) -> StateResult:
    """Reconstruct U2 * prepared as a sparse state (full-width measurement).

    The distribution stage may be run against injected oracles (for example
    exact or sampling oracles over a known distribution); the amplitude stage
    always queries the prepared state itself.
    """
    n = ct.n
    measure = tuple(measure)
    if len(measure) != n:
        raise ValueError("state reconstruction requires measuring every qubit")
    if marginal_oracle is None:
        marginal_oracle = CTMarginalOracle(ct, u2, measure, threads=threads)
    if point_estimator is None:
        point_estimator = marginal_oracle.point_estimator()

    half = ReconstructionParams(params.t, params.epsilon, params.delta / 2.0)
    dist_result = reconstruct_distribution(marginal_oracle, point_estimator, half, stream.child(0))
    violations = list(dist_result.promise_violations)
    if len(dist_result.distribution) == 0:
        return StateResult(None, dist_result, [], 0.0, 0, 0, violations)

    support = [int(v) for v in dist_result.distribution.values]
    amp_accuracy = math.sqrt(params.epsilon**3 / (8.0 * params.t))
    amp_delta = (params.delta / 2.0) / len(support)
    phase_floor = 0.5 * math.sqrt(params.epsilon / (2.0 * params.t))

    amplitudes: list[complex] = []
    phases = np.zeros(len(support), dtype=np.complex128)
    phase_anomalies = 0
    samples = 0
    for i, value in enumerate(support):
        probe = basis_preimage_state(n, u2, measure, value)
        est = overlap(probe, ct, EstimationParams(amp_accuracy, amp_delta), stream.child(1, i), threads=threads)
        amplitudes.append(complex(est.value))
        samples += est.samples_used
        phase, low = extract_phase(est.value, phase_floor)
        phases[i] = phase
        phase_anomalies += int(low)

    amps = phases * np.sqrt(dist_result.distribution.probs)
    norm = float(np.sqrt(np.sum(np.abs(amps) ** 2)))
    amps = amps / norm
    state = SparseState(n, np.asarray(support, dtype=np.uint64), amps)
    return StateResult(state, dist_result, amplitudes, phase_floor, phase_anomalies, samples, violations)


@dataclass
class WeightReport:
    """Significant basis weights of a state: values, weights, coefficients."""

    basis: MeasurementBlock
    heavy: HeavyHitterList
    values: list[int]
    weights: list[float]
    coefficients: list[complex]
    samples_used: int

    @property
    def halted(self) -> bool:
        return self.heavy.halted


def significant_weights(
    ct: CTState,
    basis: MeasurementBlock,
    theta: float,
    pi: float,
    coeff_params: EstimationParams,
    stream: RngStream,
    *,
    marginal_oracle: MarginalOracle | None = None,
    threads: int = 1,
) -> WeightReport:
    """List basis vectors with squared weight >= theta and their coefficients.

    The weights of psi in the basis {U|x>} are the measured distribution of
    U^dag psi, so the search runs against the dual measurement block; each
    listed coefficient <U x|psi> is then estimated at coeff_params.
    """
    n = ct.n
    measure = tuple(range(n)) if not hasattr(basis, "targets") else tuple(basis.targets)
    if len(measure) != n:
        raise ValueError("weight analysis requires a full-width basis")
    if marginal_oracle is None:
        marginal_oracle = CTMarginalOracle(ct, dual_measurement_block(basis), measure, threads=threads)
    heavy = km_search(marginal_oracle, theta, pi, stream.child(0))

    values: list[int] = []
    weights: list[float] = []
    coefficients: list[complex] = []
    samples = 0
    for i, (value, weight) in enumerate(zip(heavy.values, heavy.estimates)):
        probe = basis_vector_state(n, basis, measure, value)
        est = overlap(probe, ct, coeff_params, stream.child(1, i), threads=threads)
        values.append(int(value))
        weights.append(float(weight))
        coefficients.append(complex(est.value))
        samples += est.samples_used
    return WeightReport(basis, heavy, values, weights, coefficients, samples)
