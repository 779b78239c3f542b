"""Shared instance generators for the test suite.

The exactly sparse circuit families built here come with their output
distributions known in closed form, so reconstruction results can be checked
against frozen ground truth rather than against the code under test.
"""

from __future__ import annotations

import numpy as np

from sparsesim import (
    CircuitSpec,
    ExplicitState,
    FunctionRecipe,
    FunctionState,
    IqpRecipe,
    IqpState,
    BasisState,
    ProductBlock,
    ProductRecipe,
    ProductState,
    QftBlock,
    QftImageState,
    QftThenReversible,
    SparseDistribution,
)


def rand_unitary2(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_product_rows(rng: np.random.Generator, n: int) -> np.ndarray:
    amps = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return amps / np.linalg.norm(amps, axis=1, keepdims=True)


def random_reversible_gates(rng: np.random.Generator, n: int, count: int) -> tuple:
    gates = []
    for _ in range(count):
        kind = rng.integers(0, 3 if n >= 3 else (2 if n >= 2 else 1))
        qubits = rng.choice(n, size=kind + 1, replace=False).tolist()
        if kind == 0:
            gates.append(("not", qubits[0]))
        elif kind == 1:
            gates.append(("cnot", qubits[0], qubits[1]))
        else:
            gates.append(("toffoli", qubits[0], qubits[1], qubits[2]))
    return tuple(gates)


def random_iqp_gates(rng: np.random.Generator, n: int, count: int) -> tuple:
    gates = []
    for _ in range(count):
        size = int(rng.integers(1, min(n, 3) + 1))
        qubits = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        gates.append((float(rng.uniform(0.0, 2.0 * np.pi)), qubits))
    return tuple(gates)


FAMILIES = ("basis", "function", "qft", "iqp", "product", "explicit")


def random_ct_state(rng: np.random.Generator, family: str, n: int):
    if family == "basis":
        return BasisState(n, int(rng.integers(0, 1 << n)))
    if family == "function":
        name = ("one", "parity", "first-bit", "majority")[int(rng.integers(0, 4))]
        return FunctionState.builtin(n, name)
    if family == "qft":
        size = int(rng.integers(1, n + 1))
        targets = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        from sparsesim.ops import ReversibleCircuit

        circuit = None
        if rng.integers(0, 2):
            circuit = ReversibleCircuit(n, random_reversible_gates(rng, n, 3))
        return QftImageState(
            n,
            int(rng.integers(0, 1 << n)),
            targets,
            inverse=bool(rng.integers(0, 2)),
            circuit=circuit,
        )
    if family == "iqp":
        return IqpState(
            n,
            tuple(
                (float(rng.uniform(0.0, 2.0 * np.pi)), int(rng.integers(1, 1 << n)))
                for _ in range(4)
            ),
            base=int(rng.integers(0, 1 << n)),
        )
    if family == "product":
        return ProductState(random_product_rows(rng, n))
    if family == "explicit":
        size = int(rng.integers(1, min(8, 1 << n) + 1))
        values = rng.choice(1 << n, size=size, replace=False).astype(np.uint64)
        amps = rng.normal(size=size) + 1j * rng.normal(size=size)
        amps /= np.linalg.norm(amps)
        return ExplicitState(n, values, amps)
    raise ValueError(f"unknown family {family}")


def random_sparse_distribution(
    rng: np.random.Generator, k: int, t: int
) -> SparseDistribution:
    values = rng.choice(1 << k, size=t, replace=False).astype(np.uint64)
    return SparseDistribution(k, values, rng.dirichlet(np.ones(t)))


def _subgroup_safe_gates(rng: np.random.Generator, n: int, j: int, count: int) -> tuple:
    """Gates that fix the uniform superposition over a coset of 2^j * Z.

    Any gate whose target is a high qubit permutes the subgroup; gates acting
    wholly on the low (frozen) qubits shift the coset representative.  Both
    leave the measured Fourier distribution unchanged.
    """
    gates = []
    for _ in range(count):
        if j > 0 and rng.integers(0, 2):
            low = rng.choice(j, size=min(j, 3), replace=False).tolist()
            if len(low) >= 2 and rng.integers(0, 2):
                gates.append(("cnot", low[0], low[1]))
            else:
                gates.append(("not", low[0]))
        else:
            target = int(rng.integers(j, n))
            others = [q for q in range(n) if q != target]
            kind = int(rng.integers(0, 3 if len(others) >= 2 else 2))
            if kind == 0:
                gates.append(("not", target))
            elif kind == 1:
                gates.append(("cnot", int(rng.choice(others)), target))
            else:
                c1, c2 = rng.choice(others, size=2, replace=False).tolist()
                gates.append(("toffoli", c1, c2, target))
    return tuple(gates)


def subgroup_fourier_instance(
    rng: np.random.Generator, n: int, max_t: int = 8
) -> tuple[CircuitSpec, SparseDistribution]:
    """Fourier transform of a subgroup coset: support {q * 2^(n-j)}, all 2^-j.

    u1 spreads the input over the multiples of 2^j (qft on the high qubits),
    optionally scrambled by structure-preserving reversible gates; u2 is a
    full-width transform, so the output support is the dual subgroup.
    """
    max_j = min(n - 1, max(0, int(max_t).bit_length() - 1))
    j = int(rng.integers(0, max_j + 1))
    gates = _subgroup_safe_gates(rng, n, j, int(rng.integers(0, 4)))
    spec = CircuitSpec(
        n,
        0,
        QftThenReversible(tuple(range(j, n)), gates, bool(rng.integers(0, 2))),
        QftBlock(tuple(range(n)), bool(rng.integers(0, 2))),
        tuple(range(n)),
    )
    t = 1 << j
    values = (np.arange(t, dtype=np.uint64) << np.uint64(n - j)).astype(np.uint64)
    return spec, SparseDistribution(n, values, np.full(t, 1.0 / t))


def product_spread_instance(
    rng: np.random.Generator, n: int, max_spread: int = 3
) -> tuple[CircuitSpec, SparseDistribution]:
    """Per-qubit circuit whose output is uniform over an affine cube.

    Each u2 factor either undoes its u1 factor up to a bit flip (the measured
    bit is deterministic) or rotates the qubit to an unbiased superposition
    (the bit is uniform), so the support size is 2^spread exactly.
    """
    spread = sorted(
        rng.choice(n, size=int(rng.integers(0, min(n, max_spread) + 1)), replace=False).tolist()
    )
    input_bits = rng.integers(0, 2, size=n)
    input_value = int(sum(int(b) << q for q, b in enumerate(input_bits)))
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)

    factors_u1 = []
    factors_u2 = []
    fixed_bits = {}
    for q in range(n):
        v = rand_unitary2(rng)
        factors_u1.append(v)
        phase = np.diag(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=2)))
        if q in spread:
            factors_u2.append(h @ phase @ v.conj().T)
        else:
            flip = int(rng.integers(0, 2))
            factors_u2.append((x if flip else np.eye(2)) @ phase @ v.conj().T)
            fixed_bits[q] = int(input_bits[q]) ^ flip
    spec = CircuitSpec(
        n,
        input_value,
        ProductRecipe(factors_u1),
        ProductBlock(factors_u2),
        tuple(range(n)),
    )
    base = sum(b << q for q, b in fixed_bits.items())
    values = np.array(
        sorted(
            base + sum(((combo >> i) & 1) << q for i, q in enumerate(spread))
            for combo in range(1 << len(spread))
        ),
        dtype=np.uint64,
    )
    t = 1 << len(spread)
    return spec, SparseDistribution(n, values, np.full(t, 1.0 / t))


def parity_function_instance(n: int) -> tuple[CircuitSpec, SparseDistribution]:
    """The parity sign state is |-> on every qubit, so H^n maps it to |1...1>."""
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
    spec = CircuitSpec(
        n,
        0,
        FunctionRecipe("parity"),
        ProductBlock([h] * n),
        tuple(range(n)),
    )
    top = (1 << n) - 1
    return spec, SparseDistribution(n, [top], [1.0])


def exactly_sparse_instance(
    rng: np.random.Generator, n: int, max_t: int = 8
) -> tuple[CircuitSpec, SparseDistribution]:
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return subgroup_fourier_instance(rng, n, max_t)
    if kind == 1:
        return product_spread_instance(rng, n, max_spread=max(0, int(max_t).bit_length() - 1))
    return parity_function_instance(n)


def ghz_state(n: int = 3) -> ExplicitState:
    amp = 1.0 / np.sqrt(2.0)
    return ExplicitState(n, [0, (1 << n) - 1], [amp, amp])


def period_two_spec(n: int = 4) -> CircuitSpec:
    """Uniform over multiples of 2 then a full transform: support {0, 2^(n-1)}."""
    return CircuitSpec(
        n,
        0,
        QftThenReversible(tuple(range(1, n)), (), False),
        QftBlock(tuple(range(n)), False),
        tuple(range(n)),
    )


def unitary_json(u: np.ndarray) -> list:
    return [[[float(np.real(e)), float(np.imag(e))] for e in row] for row in u]
