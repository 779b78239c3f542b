import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsesim import (
    BasisState,
    ExplicitState,
    FunctionState,
    IqpState,
    OpImageState,
    PermutedState,
    ProductState,
    QftImageState,
    RngStream,
    TensorPair,
    tensor,
)
from sparsesim.oracle import ct_dense_vector
from sparsesim.ops import ReversibleCircuit, weyl_shift_op, EmbeddedOp

from helpers import FAMILIES, random_ct_state, random_product_rows


def dense_of(state) -> np.ndarray:
    xs = np.arange(1 << state.n, dtype=np.uint64)
    return state.amplitude_batch(xs)


def empirical_tv(state, draws: int, seed: int) -> float:
    rng = RngStream(seed).generator()
    samples = state.sample_batch(rng, draws)
    counts = np.bincount(samples.astype(np.int64), minlength=1 << state.n)
    exact = np.abs(dense_of(state)) ** 2
    return 0.5 * float(np.sum(np.abs(counts / draws - exact)))


@pytest.mark.parametrize("family", FAMILIES)
def test_family_amplitudes_match_dense(family: str) -> None:
    rng = np.random.default_rng(hash(family) % (2**32))
    for trial in range(10):
        n = int(rng.integers(2, 9))
        state = random_ct_state(rng, family, n)
        vec = ct_dense_vector(state)
        assert np.max(np.abs(dense_of(state) - vec)) <= 1e-12
        assert abs(np.linalg.norm(vec) - 1.0) <= 1e-9


@pytest.mark.parametrize("family", FAMILIES)
def test_family_sampling_matches_born_rule(family: str) -> None:
    rng = np.random.default_rng(1000 + hash(family) % (2**16))
    for trial in range(3):
        n = int(rng.integers(2, 6))
        state = random_ct_state(rng, family, n)
        # noise floor for 5e4 draws at n <= 5 is well under 0.02
        assert empirical_tv(state, 50_000, seed=trial) <= 0.02


def test_basis_state_is_point_mass() -> None:
    state = BasisState(3, 5, phase=1j)
    vec = dense_of(state)
    assert vec[5] == 1j
    assert np.count_nonzero(vec) == 1
    rng = RngStream(0).generator()
    assert np.all(state.sample_batch(rng, 100) == 5)


def test_function_state_signs() -> None:
    state = FunctionState.builtin(3, "parity")
    vec = dense_of(state)
    expected = np.array([(-1) ** bin(x).count("1") for x in range(8)]) / np.sqrt(8)
    assert np.allclose(vec, expected)


def test_function_state_rejects_non_sign_values() -> None:
    state = FunctionState(2, lambda xs: np.zeros(xs.size, dtype=np.int8))
    with pytest.raises(ValueError):
        state.amplitude_batch(np.arange(4, dtype=np.uint64))
    with pytest.raises(ValueError):
        FunctionState.builtin(2, "no-such-function")


def test_qft_image_state_plain_transform() -> None:
    # F|base> on all qubits: amplitude 2^(-n/2) omega^(base * y)
    n, base = 3, 5
    state = QftImageState(n, base, tuple(range(n)))
    ys = np.arange(8, dtype=np.uint64)
    expected = np.exp(2j * np.pi * base * ys.astype(np.float64) / 8.0) / np.sqrt(8.0)
    assert np.allclose(dense_of(state), expected)
    inv = QftImageState(n, base, tuple(range(n)), inverse=True)
    assert np.allclose(dense_of(inv), np.conj(expected))


def test_qft_image_state_partial_targets_keep_rest_bits() -> None:
    # transform on qubit 1 only of base 0b101: qubits 0 and 2 stay fixed
    state = QftImageState(3, 0b101, (1,))
    vec = dense_of(state)
    assert abs(vec[0b101]) == pytest.approx(1 / np.sqrt(2))
    assert abs(vec[0b111]) == pytest.approx(1 / np.sqrt(2))
    assert np.sum(np.abs(vec) > 1e-12) == 2


def test_iqp_state_phases() -> None:
    theta = 0.7
    state = IqpState(2, ((theta, 0b11),), base=0)
    vec = dense_of(state)
    # gate phase is exp(i*theta*(1 - 2*parity(z & mask)))
    expected = np.exp(1j * theta * np.array([1, -1, -1, 1])) / 2.0
    assert np.allclose(vec, expected)


def test_product_state_factors() -> None:
    rows = random_product_rows(np.random.default_rng(7), 3)
    state = ProductState(rows)
    vec = dense_of(state)
    full = np.array([1.0 + 0j])
    for q in range(3):
        full = np.concatenate([full * rows[q, 0], full * rows[q, 1]])
    assert np.allclose(vec, full)


def test_explicit_state_lookup_and_sampling() -> None:
    state = ExplicitState.from_dict(3, {1: 0.6, 6: 0.8j})
    assert state.amplitude(1) == pytest.approx(0.6)
    assert state.amplitude(6) == pytest.approx(0.8j)
    assert state.amplitude(0) == 0.0
    rng = RngStream(3).generator()
    samples = state.sample_batch(rng, 20_000)
    assert set(np.unique(samples).tolist()) == {1, 6}
    assert abs(np.mean(samples == 1) - 0.36) < 0.02


def test_explicit_state_validation() -> None:
    with pytest.raises(ValueError):
        ExplicitState(2, [0, 0], [0.7, 0.7])  # duplicate strings
    with pytest.raises(ValueError):
        ExplicitState(2, [0], [0.9])  # not normalized
    with pytest.raises(ValueError):
        ExplicitState(2, [4], [1.0])  # out of range


def test_permuted_state_moves_qubits() -> None:
    inner = BasisState(3, 0b001)
    # qubit 0 -> position 2
    state = PermutedState(inner, (2, 0, 1))
    vec = dense_of(state)
    assert np.count_nonzero(vec) == 1
    assert vec[0b100] == 1.0


def test_permuted_sampling_matches_amplitudes() -> None:
    rng = np.random.default_rng(11)
    inner = ProductState(random_product_rows(rng, 3))
    state = PermutedState(inner, (1, 2, 0))
    assert empirical_tv(state, 50_000, seed=5) <= 0.02


def test_tensor_pair_interleaves() -> None:
    left = BasisState(2, 0b10)
    right = BasisState(1, 0b1)
    state = TensorPair(left, right, (0, 2), (1,))
    vec = dense_of(state)
    # left bits at positions 0,2 = (0,1); right bit at position 1 = 1
    assert vec[0b110] == 1.0
    assert np.count_nonzero(vec) == 1


def test_tensor_helper_appends() -> None:
    state = tensor(BasisState(1, 1), BasisState(2, 0b01))
    vec = dense_of(state)
    assert vec[0b011] == 1.0


def test_tensor_pair_requires_partition() -> None:
    with pytest.raises(ValueError):
        TensorPair(BasisState(1, 0), BasisState(1, 0), (0,), (0,))
    with pytest.raises(ValueError):
        TensorPair(BasisState(1, 0), BasisState(1, 0), (0,), (2,))


def test_op_image_state_shift() -> None:
    op = EmbeddedOp(weyl_shift_op(1, 1, 2).power(1), (0, 1), 2)
    inner = ProductState(random_product_rows(np.random.default_rng(2), 2))
    state = OpImageState(op, inner)
    xs = np.arange(4, dtype=np.uint64)
    ys, phases = op.forward(xs)
    expected = np.zeros(4, dtype=np.complex128)
    expected[ys] = phases * inner.amplitude_batch(xs)
    assert np.allclose(dense_of(state), expected)
    assert empirical_tv(state, 50_000, seed=9) <= 0.02


@given(seed=st.integers(0, 2**32 - 1))
@settings(deadline=None, max_examples=20)
def test_random_states_are_normalized(seed: int) -> None:
    rng = np.random.default_rng(seed)
    family = FAMILIES[seed % len(FAMILIES)]
    state = random_ct_state(rng, family, int(rng.integers(2, 8)))
    vec = dense_of(state)
    assert abs(float(np.sum(np.abs(vec) ** 2)) - 1.0) <= 1e-9
