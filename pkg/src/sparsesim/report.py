"""Deterministic run reports.

A report has three top-level blocks: `params` echoes the request, `result`
holds everything the algorithms computed, and `timing` holds execution
details (wall-clock time and the worker-thread count).  For a fixed request
(circuit, parameters, seed) everything outside `timing` is byte-for-byte
reproducible regardless of thread count; thread count is therefore echoed
under `timing`, not `params`.
"""

from __future__ import annotations

import json
from typing import Iterable

import numpy as np

from .bits import bits_to_str
from .sparse import SparseDistribution, SparseState


def _round_trip(x: float) -> float:
    # repr round-trips doubles exactly, so float JSON output is canonical.
    return float(x)


def canonical_json(obj) -> str:
    """Serialize with sorted keys and no whitespace variation."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def pretty_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def distribution_entries(dist: SparseDistribution) -> list[dict]:
    return [
        {"x": bits_to_str(int(v), dist.n), "value": int(v), "p": _round_trip(p)}
        for v, p in dist.items()
    ]


def state_entries(state: SparseState) -> list[dict]:
    return [
        {
            "x": bits_to_str(int(v), state.n),
            "value": int(v),
            "re": _round_trip(a.real),
            "im": _round_trip(a.imag),
        }
        for v, a in state.items()
    ]


def heavy_entries(n: int, values: Iterable[int], estimates: Iterable[float]) -> list[dict]:
    return [
        {"x": bits_to_str(int(v), n), "value": int(v), "estimate": _round_trip(e)}
        for v, e in zip(values, estimates)
    ]


def amplitude_entries(n: int, values: Iterable[int], amps: Iterable[complex]) -> list[dict]:
    return [
        {
            "x": bits_to_str(int(v), n),
            "value": int(v),
            "re": _round_trip(np.real(a)),
            "im": _round_trip(np.imag(a)),
        }
        for v, a in zip(values, amps)
    ]


def build_report(
    command: str, params: dict, result: dict, wall_seconds: float, threads: int | None = None
) -> dict:
    timing: dict = {"wall_seconds": _round_trip(wall_seconds)}
    if threads is not None:
        timing["threads"] = int(threads)
    return {
        "command": command,
        "params": params,
        "result": result,
        "timing": timing,
    }
