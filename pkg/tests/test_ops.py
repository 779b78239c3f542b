import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsesim.ops import (
    EmbeddedOp,
    IdentityOp,
    ReversibleCircuit,
    ReversibleOp,
    ShiftPhaseOp,
    weyl_shift_op,
)

from helpers import random_reversible_gates


def test_gate_semantics() -> None:
    c = ReversibleCircuit(3, (("not", 0),))
    assert c.apply(np.array([0b000], dtype=np.uint64))[0] == 0b001
    c = ReversibleCircuit(3, (("cnot", 0, 2),))
    assert c.apply(np.array([0b001], dtype=np.uint64))[0] == 0b101
    assert c.apply(np.array([0b010], dtype=np.uint64))[0] == 0b010
    c = ReversibleCircuit(3, (("toffoli", 0, 1, 2),))
    assert c.apply(np.array([0b011], dtype=np.uint64))[0] == 0b111
    assert c.apply(np.array([0b001], dtype=np.uint64))[0] == 0b001


def test_gate_validation() -> None:
    with pytest.raises(ValueError):
        ReversibleCircuit(2, (("cnot", 0, 0),))
    with pytest.raises(ValueError):
        ReversibleCircuit(2, (("not", 2),))
    with pytest.raises(ValueError):
        ReversibleCircuit(3, (("hadamard", 0),))


@given(seed=st.integers(0, 2**32 - 1))
@settings(deadline=None, max_examples=30)
def test_reversible_round_trip(seed: int) -> None:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    c = ReversibleCircuit(n, random_reversible_gates(rng, n, 8))
    xs = rng.integers(0, 1 << n, size=64, dtype=np.uint64)
    assert np.array_equal(c.invert(c.apply(xs)), xs)
    assert np.array_equal(c.apply(c.invert(xs)), xs)
    # circuits are permutations
    assert np.unique(c.apply(np.arange(1 << n, dtype=np.uint64))).size == 1 << n


def test_shift_phase_op_is_modular() -> None:
    op = ShiftPhaseOp(3, 5, -1.0 + 0.0j)
    xs = np.array([0, 3, 7], dtype=np.uint64)
    ys, phases = op.forward(xs)
    assert ys.tolist() == [5, 0, 4]
    assert np.allclose(phases, -1.0)
    back, inv_phases = op.inverse(ys)
    assert np.array_equal(back, xs)
    assert np.allclose(phases * np.conj(inv_phases), np.abs(phases) ** 2)


def test_weyl_power_example() -> None:
    # prefix 1 of 1 bit on a 2-bit transform: power 1 shifts by 2 with phase -1
    shift = weyl_shift_op(1, 1, 2)
    op = shift.power(1)
    ys, phases = op.forward(np.array([3], dtype=np.uint64))
    assert ys[0] == 1
    assert np.allclose(phases[0], -1.0)


def test_weyl_power_zero_is_identity() -> None:
    shift = weyl_shift_op(2, 2, 3)
    op = shift.power(0)
    xs = np.arange(8, dtype=np.uint64)
    ys, phases = op.forward(xs)
    assert np.array_equal(ys, xs)
    assert np.allclose(phases, 1.0)


@given(
    k=st.integers(1, 6),
    data=st.data(),
)
@settings(deadline=None, max_examples=40)
def test_weyl_power_composes(k: int, data) -> None:
    m = data.draw(st.integers(1, k))
    yhat = data.draw(st.integers(0, (1 << m) - 1))
    u1 = data.draw(st.integers(0, (1 << m) - 1))
    u2 = data.draw(st.integers(0, (1 << m) - 1))
    subtract = data.draw(st.booleans())
    shift = weyl_shift_op(yhat, m, k, subtract=subtract)
    xs = np.arange(1 << k, dtype=np.uint64)

    ya, pa = shift.power(u1).forward(xs)
    yb, pb = shift.power(u2).forward(ya)
    yc, pc = shift.power((u1 + u2) % (1 << m)).forward(xs)
    assert np.array_equal(yb, yc)
    assert np.allclose(pa * pb, pc)


def test_embedded_op_acts_on_targets() -> None:
    inner = ShiftPhaseOp(2, 1, 1j)
    op = EmbeddedOp(inner, (2, 0), 4)
    # bits (q2, q0) form the 2-bit register: x=0b0100 has register value 1
    ys, phases = op.forward(np.array([0b0100], dtype=np.uint64))
    # register 1 + 1 = 2 -> bit of q0 set, q2 clear
    assert ys[0] == 0b0001
    assert np.allclose(phases[0], 1j)
    back, _ = op.inverse(ys)
    assert back[0] == 0b0100


def test_identity_and_reversible_ops() -> None:
    xs = np.arange(8, dtype=np.uint64)
    ys, phases = IdentityOp(3).forward(xs)
    assert np.array_equal(ys, xs) and np.allclose(phases, 1.0)
    circuit = ReversibleCircuit(3, (("not", 1),))
    op = ReversibleOp(circuit)
    ys, phases = op.forward(xs)
    assert np.array_equal(ys, circuit.apply(xs)) and np.allclose(phases, 1.0)
    back, _ = op.inverse(ys)
    assert np.array_equal(back, xs)
