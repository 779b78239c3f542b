"""Request models, command dispatch, and the HTTP service.

Every command is a pure function from a validated request to a report dict
(see report.py for the block layout).  The CLI calls these functions in
process; the FastAPI app exposes the same functions over HTTP, so both
frontends produce identical reports for identical requests.
"""

from __future__ import annotations

import time
from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from ._version import VERSION
from .bits import bits_to_str
from .circuits import CircuitSpec, build_ct_state, dual_measurement_block
from .estimator import EstimationParams
from .kmsearch import HeavyHitterList, probe_count
from .marginals import (
    CTMarginalOracle,
    ExactMarginalOracle,
    MarginalOracle,
    SamplingMarginalOracle,
)
from .oracle import apply_measurement_block, ct_dense_vector, dense_output, exact_distribution
from .reconstruct import (
    DistributionResult,
    ReconstructionParams,
    reconstruct_distribution,
    reconstruct_state,
    significant_weights,
)
from .report import (
    amplitude_entries,
    build_report,
    distribution_entries,
    heavy_entries,
    state_entries,
)
from .rng import RngStream
from .schema import CircuitModel, CircuitParseError, to_spec
from .sparse import SparseDistribution, l1_distance, tail_after_top, truncate_top

# The dense oracle is the reference for the exact and sampling estimator
# backends and for the oracle/compare commands.
MAX_ORACLE_QUBITS = 16

EstimatorName = Literal["auto", "ct", "sampling", "exact"]


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    circuit: CircuitModel
    t: int = Field(ge=1)
    epsilon: float = Field(gt=0.0, le=1.0 / 6.0)
    delta: float = Field(gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)
    estimator: EstimatorName = "auto"
    threads: int = Field(default=1, ge=1)


class StateRequest(SimulateRequest):
    pass


class WeightsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    circuit: CircuitModel
    theta: float = Field(gt=0.0, le=1.0)
    pi: float = Field(gt=0.0, lt=1.0)
    epsilon: float = Field(gt=0.0, le=1.0)
    delta: float = Field(gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)
    estimator: EstimatorName = "auto"
    threads: int = Field(default=1, ge=1)


class OracleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    circuit: CircuitModel
    top: int | None = Field(default=None, ge=1)


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    circuit: CircuitModel
    t: int = Field(ge=1)
    epsilon: float = Field(gt=0.0, le=1.0 / 6.0)
    delta: float = Field(gt=0.0, lt=1.0)
    trials: int = Field(default=20, ge=1)
    seed: int = Field(default=0, ge=0)
    estimator: EstimatorName = "auto"
    threads: int = Field(default=1, ge=1)


def resolve_estimator(name: EstimatorName, n: int) -> str:
    """Pick a backend: sampling against the dense oracle when it fits, else CT."""
    if name == "auto":
        return "sampling" if n <= MAX_ORACLE_QUBITS else "ct"
    return name


def _params_echo(req: BaseModel) -> dict:
    # Thread count cannot change results, so it is echoed under `timing`;
    # everything outside `timing` is then reproducible byte for byte.
    return req.model_dump(mode="json", exclude={"threads"})


def _dense_measured_distribution(spec: CircuitSpec) -> np.ndarray:
    if spec.n > MAX_ORACLE_QUBITS:
        raise ValueError(
            f"the dense oracle handles at most {MAX_ORACLE_QUBITS} qubits, got {spec.n}"
        )
    return exact_distribution(dense_output(spec), spec.measure)


def _build_marginal_oracle(spec: CircuitSpec, backend: str, threads: int) -> MarginalOracle:
    if backend == "ct":
        return CTMarginalOracle(build_ct_state(spec), spec.u2, spec.measure, threads=threads)
    if backend in ("exact", "sampling"):
        dist = _dense_measured_distribution(spec)
        return ExactMarginalOracle(dist) if backend == "exact" else SamplingMarginalOracle(dist)
    raise ValueError(f"unknown estimator backend '{backend}'")


def _search_block(heavy: HeavyHitterList) -> dict:
    return {
        "probes": int(heavy.probes),
        "budget": int(probe_count(heavy.k, heavy.theta)),
        "halted": bool(heavy.halted),
        "level_sizes": [int(s) for s in heavy.level_sizes],
    }


def _distribution_block(res: DistributionResult, k: int) -> dict:
    return {
        "support": distribution_entries(res.distribution),
        "support_size": len(res.distribution),
        "mass": float(res.mass),
        "theta": float(res.theta),
        "pi": float(res.pi),
        "epsilon_refine": float(res.eps_refine),
        "heavy": heavy_entries(k, res.heavy.values, res.heavy.estimates),
        "search": _search_block(res.heavy),
        "point_calls": int(res.point_calls),
        "dropped": [bits_to_str(int(v), k) for v in res.dropped],
    }


def _oracle_block(oracle: MarginalOracle) -> dict:
    return {
        "calls": int(getattr(oracle, "calls", 0)),
        "samples_drawn": int(getattr(oracle, "samples_drawn", 0)),
        "anomalies": int(getattr(oracle, "anomalies", 0)),
    }


def run_simulate(req: SimulateRequest) -> dict:
    t0 = time.perf_counter()
    spec = to_spec(req.circuit)
    backend = resolve_estimator(req.estimator, spec.n)
    params = ReconstructionParams(req.t, req.epsilon, req.delta)
    oracle = _build_marginal_oracle(spec, backend, req.threads)
    res = reconstruct_distribution(
        oracle, oracle.point_estimator(), params, RngStream(req.seed).child(0)
    )
    result = {
        "n": spec.n,
        "k": spec.k,
        "estimator": backend,
        "distribution": _distribution_block(res, spec.k),
        "oracle": _oracle_block(oracle),
        "promise_violations": list(res.promise_violations),
        "ok": res.ok,
    }
    return build_report(
        "simulate", _params_echo(req), result, time.perf_counter() - t0, req.threads
    )


def run_reconstruct_state(req: StateRequest) -> dict:
    t0 = time.perf_counter()
    spec = to_spec(req.circuit)
    backend = resolve_estimator(req.estimator, spec.n)
    params = ReconstructionParams(req.t, req.epsilon, req.delta)
    ct = build_ct_state(spec)
    oracle = _build_marginal_oracle(spec, backend, req.threads)
    res = reconstruct_state(
        ct,
        spec.u2,
        spec.measure,
        params,
        RngStream(req.seed).child(0),
        marginal_oracle=oracle,
        point_estimator=oracle.point_estimator(),
        threads=req.threads,
    )
    state = res.state
    support = [] if state is None else [int(v) for v in state.values]
    result = {
        "n": spec.n,
        "k": spec.k,
        "estimator": backend,
        "distribution": _distribution_block(res.distribution, spec.k),
        "state": [] if state is None else state_entries(state),
        "norm": 0.0 if state is None else float(np.sqrt(np.sum(np.abs(state.amps) ** 2))),
        "amplitude_estimates": amplitude_entries(spec.n, support, res.amplitudes),
        "phase_floor": float(res.phase_floor),
        "phase_anomalies": int(res.phase_anomalies),
        "amplitude_samples": int(res.samples_used),
        "error_bound": float(5.0 * np.sqrt(req.epsilon)),
        "oracle": _oracle_block(oracle),
        "promise_violations": list(res.promise_violations),
        "ok": res.ok,
    }
    return build_report(
        "reconstruct-state", _params_echo(req), result, time.perf_counter() - t0, req.threads
    )


def run_weights(req: WeightsRequest) -> dict:
    t0 = time.perf_counter()
    spec = to_spec(req.circuit)
    if len(spec.measure) != spec.n:
        raise ValueError("weights require measuring every qubit")
    backend = resolve_estimator(req.estimator, spec.n)
    ct = build_ct_state(spec)
    oracle: MarginalOracle | None = None
    if backend in ("exact", "sampling"):
        if spec.n > MAX_ORACLE_QUBITS:
            raise ValueError(
                f"the dense oracle handles at most {MAX_ORACLE_QUBITS} qubits, got {spec.n}"
            )
        dual = apply_measurement_block(ct_dense_vector(ct), spec.n, dual_measurement_block(spec.u2))
        dist = exact_distribution(dual, spec.measure)
        oracle = ExactMarginalOracle(dist) if backend == "exact" else SamplingMarginalOracle(dist)
    rep = significant_weights(
        ct,
        spec.u2,
        req.theta,
        req.pi,
        EstimationParams(req.epsilon, req.delta),
        RngStream(req.seed).child(0),
        marginal_oracle=oracle,
        threads=req.threads,
    )
    entries = [
        {
            "x": bits_to_str(int(v), spec.n),
            "value": int(v),
            "weight": float(w),
            "re": float(np.real(c)),
            "im": float(np.imag(c)),
        }
        for v, w, c in zip(rep.values, rep.weights, rep.coefficients)
    ]
    result = {
        "n": spec.n,
        "estimator": backend,
        "entries": entries,
        "search": _search_block(rep.heavy),
        "coefficient_samples": int(rep.samples_used),
        "promise_violations": (
            ["heavy-hitter search halted: weights are not approximately sparse"]
            if rep.halted
            else []
        ),
        "ok": not rep.halted,
    }
    return build_report(
        "weights", _params_echo(req), result, time.perf_counter() - t0, req.threads
    )


def run_oracle(req: OracleRequest) -> dict:
    t0 = time.perf_counter()
    spec = to_spec(req.circuit)
    # Rounding in the dense transforms leaves probability dust of order 1e-30;
    # drop it so the listed support is the true support.
    dist = SparseDistribution.from_dense(_dense_measured_distribution(spec), tol=1e-14)
    tail = 0.0
    if req.top is not None and req.top < len(dist):
        tail = tail_after_top(dist, req.top)
        dist = truncate_top(dist, req.top)
    result = {
        "n": spec.n,
        "k": spec.k,
        "support": distribution_entries(dist),
        "support_size": len(dist),
        "mass": dist.total(),
        "tail": float(tail),
        "promise_violations": [],
        "ok": True,
    }
    return build_report("oracle", _params_echo(req), result, time.perf_counter() - t0)


def run_compare(req: CompareRequest) -> dict:
    t0 = time.perf_counter()
    spec = to_spec(req.circuit)
    backend = resolve_estimator(req.estimator, spec.n)
    params = ReconstructionParams(req.t, req.epsilon, req.delta)
    exact = _dense_measured_distribution(spec)
    root = RngStream(req.seed)

    bound = 12.0 * req.epsilon
    errors: list[float] = []
    violations: list[str] = []
    successes = 0
    for trial in range(req.trials):
        oracle = _build_marginal_oracle(spec, backend, req.threads)
        res = reconstruct_distribution(
            oracle, oracle.point_estimator(), params, root.child(trial)
        )
        err = float(l1_distance(res.distribution, exact))
        errors.append(err)
        if res.ok and err <= bound:
            successes += 1
        for msg in res.promise_violations:
            violations.append(f"trial {trial}: {msg}")
    result = {
        "n": spec.n,
        "k": spec.k,
        "estimator": backend,
        "trials": int(req.trials),
        "bound": float(bound),
        "target_rate": float(1.0 - req.delta),
        "successes": int(successes),
        "success_rate": float(successes / req.trials),
        "l1_errors": [float(e) for e in errors],
        "promise_violations": violations,
        "ok": not violations,
    }
    return build_report(
        "compare", _params_echo(req), result, time.perf_counter() - t0, req.threads
    )


app = FastAPI(title="sparsesim", version=VERSION)


def _run_endpoint(runner, req) -> dict:
    try:
        return runner(req)
    except (CircuitParseError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok", "version": VERSION}


@app.post("/simulate")
def simulate_endpoint(req: SimulateRequest) -> dict:
    return _run_endpoint(run_simulate, req)


@app.post("/reconstruct-state")
def reconstruct_state_endpoint(req: StateRequest) -> dict:
    return _run_endpoint(run_reconstruct_state, req)


@app.post("/weights")
def weights_endpoint(req: WeightsRequest) -> dict:
    return _run_endpoint(run_weights, req)


@app.post("/oracle")
def oracle_endpoint(req: OracleRequest) -> dict:
    return _run_endpoint(run_oracle, req)


@app.post("/compare")
def compare_endpoint(req: CompareRequest) -> dict:
    return _run_endpoint(run_compare, req)
