"""Brute-force dense reference simulator.

Everything here materializes full 2**n statevectors, so it is only meant for
small registers (default cap 20 qubits).  It exists to provide exact answers
the randomized estimators are tested against: exact output distributions,
exact prefix marginals, and independent dense constructions of every state
family.
"""

from __future__ import annotations

import math

import numpy as np

from .bits import gather_bits, parity
from .circuits import (
    CircuitSpec,
    FunctionRecipe,
    IqpRecipe,
    ProductBlock,
    ProductRecipe,
    QftBlock,
    QftThenReversible,
    iqp_gate_masks,
)
from .ops import ReversibleCircuit
from .states import (
    BasisState,
    CTState,
    ExplicitState,
    FunctionState,
    IqpState,
    OpImageState,
    PermutedState,
    ProductState,
    QftImageState,
    TensorPair,
    FUNCTION_REGISTRY,
)

MAX_DENSE_QUBITS = 20


def _check_dense_width(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense oracle is capped at {MAX_DENSE_QUBITS} qubits, got {n}")


def qft_matrix(k: int, *, inverse: bool = False) -> np.ndarray:
    """F[y, x] = exp(+-2*pi*i*x*y/2**k) / sqrt(2**k)."""
    _check_dense_width(k)
    dim = 1 << k
    grid = np.outer(np.arange(dim, dtype=np.float64), np.arange(dim, dtype=np.float64))
    sign = -1.0 if inverse else 1.0
    return np.exp(sign * 2j * math.pi * np.mod(grid, dim) / dim) / math.sqrt(dim)


def apply_qft(vec: np.ndarray, n: int, targets: tuple[int, ...], *, inverse: bool = False) -> np.ndarray:
    """Apply the modular Fourier transform on an ordered qubit subset."""
    k = len(targets)
    rest = tuple(q for q in range(n) if q not in set(targets))
    idx = np.arange(1 << n, dtype=np.uint64)
    sub = gather_bits(idx, tuple(targets)).astype(np.int64)
    env = gather_bits(idx, rest).astype(np.int64)
    mat = np.zeros((1 << k, 1 << len(rest)), dtype=np.complex128)
    mat[sub, env] = vec
    mat = qft_matrix(k, inverse=inverse) @ mat
    return mat[sub, env]


def apply_reversible(vec: np.ndarray, circuit: ReversibleCircuit) -> np.ndarray:
    idx = np.arange(vec.size, dtype=np.uint64)
    out = np.zeros_like(vec)
    out[circuit.apply(idx)] = vec
    return out


def apply_product(vec: np.ndarray, n: int, unitaries) -> np.ndarray:
    out = vec.copy()
    idx = np.arange(1 << n, dtype=np.uint64)
    for i, u in enumerate(unitaries):
        lo = np.asarray(idx[((idx >> i) & 1) == 0], dtype=np.int64)
        hi = lo + (1 << i)
        a, b = out[lo].copy(), out[hi].copy()
        out[lo] = u[0, 0] * a + u[0, 1] * b
        out[hi] = u[1, 0] * a + u[1, 1] * b
    return out


def apply_diagonal_phases(vec: np.ndarray, n: int, gates: tuple[tuple[float, int], ...]) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.uint64)
    out = vec.copy()
    for theta, mask in gates:
        signs = (1 - 2 * parity(idx & np.uint64(mask))).astype(np.float64)
        out = out * np.exp(1j * theta * signs)
    return out


def _one_hot(n: int, value: int) -> np.ndarray:
    vec = np.zeros(1 << n, dtype=np.complex128)
    vec[value] = 1.0
    return vec


def dense_prepared(spec: CircuitSpec) -> np.ndarray:
    """Dense statevector of U1|input>, built gate by gate."""
    _check_dense_width(spec.n)
    u1 = spec.u1
    if isinstance(u1, QftThenReversible):
        vec = _one_hot(spec.n, spec.input)
        vec = apply_qft(vec, spec.n, tuple(u1.qft_targets), inverse=u1.inverse)
        if u1.gates:
            vec = apply_reversible(vec, ReversibleCircuit(spec.n, u1.gates))
        return vec
    if isinstance(u1, IqpRecipe):
        vec = _one_hot(spec.n, spec.input)
        hadamards = [np.full((2, 2), 1.0 / math.sqrt(2.0), dtype=np.complex128) for _ in range(spec.n)]
        for h in hadamards:
            h[1, 1] = -h[1, 1]
        vec = apply_product(vec, spec.n, hadamards)
        return apply_diagonal_phases(vec, spec.n, iqp_gate_masks(spec.n, u1.gates))
    if isinstance(u1, FunctionRecipe):
        idx = np.arange(1 << spec.n, dtype=np.uint64)
        signs = FUNCTION_REGISTRY[u1.name](idx, spec.n).astype(np.complex128)
        return signs / math.sqrt(1 << spec.n)
    vec = _one_hot(spec.n, spec.input)
    return apply_product(vec, spec.n, u1.unitaries)


def dense_output(spec: CircuitSpec) -> np.ndarray:
    """Dense statevector of U2 U1|input>."""
    vec = dense_prepared(spec)
    if isinstance(spec.u2, QftBlock):
        vec = apply_qft(vec, spec.n, tuple(spec.u2.targets), inverse=spec.u2.inverse)
    else:
        vec = apply_product(vec, spec.n, spec.u2.unitaries)
    norm = float(np.sum(np.abs(vec) ** 2))
    assert abs(norm - 1.0) < 1e-9, "statevector norm drifted"
    return vec


def apply_measurement_block(vec: np.ndarray, n: int, u2) -> np.ndarray:
    if isinstance(u2, QftBlock):
        return apply_qft(vec, n, tuple(u2.targets), inverse=u2.inverse)
    return apply_product(vec, n, u2.unitaries)


def exact_distribution(vec: np.ndarray, measure: tuple[int, ...]) -> np.ndarray:
    """Probabilities of measured substrings, indexed in measure order."""
    idx = np.arange(vec.size, dtype=np.uint64)
    codes = gather_bits(idx, tuple(measure)).astype(np.int64)
    return np.bincount(codes, weights=np.abs(vec) ** 2, minlength=1 << len(measure))


def exact_prefix_marginal(dist: np.ndarray, value: int, m: int) -> float:
    """Probability that the measured string's first m bits equal `value`."""
    k = int(dist.size).bit_length() - 1
    if not 1 <= m <= k:
        raise ValueError(f"prefix length must be in [1, {k}], got {m}")
    idx = np.arange(dist.size, dtype=np.uint64)
    sel = (idx & np.uint64((1 << m) - 1)) == np.uint64(value)
    return float(dist[sel].sum())


def prefix_marginal_table(dist: np.ndarray, m: int) -> np.ndarray:
    """All 2**m prefix marginals of a measured distribution at once."""
    idx = np.arange(dist.size, dtype=np.uint64)
    codes = (idx & np.uint64((1 << m) - 1)).astype(np.int64)
    return np.bincount(codes, weights=dist, minlength=1 << m)


def ct_dense_vector(state: CTState) -> np.ndarray:
    """Independent dense construction of a state family instance.

    Circuit-image families are rebuilt by dense gate application; composite
    wrappers recurse into their parts.  Only the sign-function family falls
    back to its defining formula, since that formula is the family.
    """
    _check_dense_width(state.n)
    n = state.n
    if isinstance(state, BasisState):
        return _one_hot(n, state.value) * state.phase
    if isinstance(state, FunctionState):
        idx = np.arange(1 << n, dtype=np.uint64)
        return state.amplitude_batch(idx)
    if isinstance(state, QftImageState):
        vec = _one_hot(n, state.base)
        vec = apply_qft(vec, n, state.targets, inverse=state.inverse)
        if state.circuit is not None:
            vec = apply_reversible(vec, state.circuit)
        return vec
    if isinstance(state, IqpState):
        vec = _one_hot(n, state.base)
        hadamards = [np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)] * n
        vec = apply_product(vec, n, hadamards)
        return apply_diagonal_phases(vec, n, state.gates)
    if isinstance(state, ProductState):
        vec = np.ones(1, dtype=np.complex128)
        for i in range(n):
            vec = np.kron(state.amps[i], vec)
        return vec
    if isinstance(state, TensorPair):
        vl = ct_dense_vector(state.left)
        vr = ct_dense_vector(state.right)
        idx = np.arange(1 << n, dtype=np.uint64)
        li = gather_bits(idx, state.left_positions).astype(np.int64)
        ri = gather_bits(idx, state.right_positions).astype(np.int64)
        return vl[li] * vr[ri]
    if isinstance(state, PermutedState):
        vin = ct_dense_vector(state.inner)
        idx = np.arange(1 << n, dtype=np.uint64)
        return vin[gather_bits(idx, state.positions).astype(np.int64)]
    if isinstance(state, ExplicitState):
        vec = np.zeros(1 << n, dtype=np.complex128)
        vec[state.values.astype(np.int64)] = state.amps
        return vec
    if isinstance(state, OpImageState):
        vin = ct_dense_vector(state.inner)
        idx = np.arange(1 << n, dtype=np.uint64)
        ys, phases = state.op.forward(idx)
        out = np.zeros_like(vin)
        out[ys.astype(np.int64)] = phases * vin
        return out
    raise TypeError(f"no dense construction for {type(state).__name__}")


def verify_fourier_conjugation(k: int) -> tuple[float, float]:
    """Max deviations of (F^dag Z F - X) and (F Z F^dag - X^dag).

    Z is the clock phase diag(omega^z) with omega = exp(2*pi*i/2**k) and X is
    the cyclic shift |z> -> |z+1 mod 2**k>.
    """
    dim = 1 << k
    f = qft_matrix(k)
    z = np.diag(np.exp(2j * math.pi * np.arange(dim) / dim))
    x = np.roll(np.eye(dim, dtype=np.complex128), 1, axis=0)
    dev_forward = float(np.max(np.abs(f.conj().T @ z @ f - x)))
    dev_inverse = float(np.max(np.abs(f @ z @ f.conj().T - x.conj().T)))
    return dev_forward, dev_inverse
