"""Prefix-tree search for heavy strings of a distribution.

Grows candidate prefixes one bit at a time, keeping a prefix when its
estimated marginal is at least 3*theta/4; estimates run at accuracy theta/4
with per-call failure theta*pi/(2k).  Under the success event every survivor
has true marginal >= theta/2 (soundness) and every string of probability
>= theta survives to the end (completeness), each level then holds at most
2/theta prefixes, and the whole search fits in the probe budget below.

Two halting rules protect the budget: the search aborts with an empty result
if a level collects strictly more than 2/theta survivors, or if the next
probe would exceed probe_count(k, theta) oracle calls.  Either means the
sparsity promise was violated or estimates failed en masse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .marginals import MarginalOracle
from .rng import RngStream


@dataclass
class HeavyHitterList:
    """Result of a prefix search: surviving strings with their estimates."""

    k: int
    theta: float
    values: list[int] = field(default_factory=list)
    estimates: list[float] = field(default_factory=list)
    halted: bool = False
    probes: int = 0
    level_sizes: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.values)


def probe_count(k: int, theta: float) -> int:
    """Hard cap on marginal-oracle invocations for a k-level search."""
    return math.ceil(2.0 * k / theta)


def km_search(oracle: MarginalOracle, theta: float, pi: float, stream: RngStream) -> HeavyHitterList:
    """List all strings of probability >= theta (and none below theta/2).

    The guarantee holds except with probability pi, provided the searched
    distribution keeps every level's survivor count within the budget.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    if not 0.0 < pi < 1.0:
        raise ValueError(f"pi must lie in (0, 1), got {pi}")
    k = oracle.k
    eps_call = theta / 4.0
    delta_call = theta * pi / (2.0 * k)
    budget = probe_count(k, theta)
    accept = 3.0 * theta / 4.0
    max_level = 2.0 / theta

    result = HeavyHitterList(k=k, theta=theta)
    survivors: list[tuple[int, float]] = [(0, 1.0)]
    for m in range(1, k + 1):
        level: list[tuple[int, float]] = []
        for parent, _ in survivors:
            for bit in (0, 1):
                if result.probes >= budget:
                    result.halted = True
                    return result
                candidate = parent | (bit << (m - 1))
                est = oracle.estimate(candidate, m, eps_call, delta_call, stream.child(m, candidate))
                result.probes += 1
                if est >= accept:
                    level.append((candidate, est))
        if len(level) > max_level:
            result.halted = True
            return result
        level.sort()
        result.level_sizes.append(len(level))
        survivors = level
        if not survivors:
            break
    assert result.probes <= budget, "probe budget exceeded"
    result.values = [v for v, _ in survivors] if len(result.level_sizes) == k else []
    result.estimates = [e for _, e in survivors] if len(result.level_sizes) == k else []
    return result
