"""State families with classically computable amplitudes and samplers.

Every family exposes exact amplitude queries and exact Born-rule sampling on
integer-coded bit strings (bit i of the integer is qubit i).  These two
queries are all the Monte Carlo estimators need, so anything built from the
constructors here can be fed to them, including tensor products, qubit
permutations, and images under basis-preserving operators.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

from .bits import (
    MAX_BITS,
    BitString,
    check_positions,
    gather_bits,
    gather_bits_int,
    mask_of,
    parity,
    scatter_bits,
)
from .ops import BasisPreservingOp, ReversibleCircuit

_NORM_TOL = 1e-9


class CTState(ABC):
    """A normalized n-qubit state with amplitude queries and exact sampling."""

    n: int

    @abstractmethod
    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        """Amplitudes <x|psi> for a uint64 batch of integer-coded strings."""

    @abstractmethod
    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw `size` strings from the Born distribution of the state."""

    def amplitude(self, x: "int | BitString") -> complex:
        value = int(x)
        if not 0 <= value < (1 << self.n):
            raise ValueError(f"string {value} does not fit in {self.n} bits")
        return complex(self.amplitude_batch(np.asarray([value], dtype=np.uint64))[0])

    def _check_width(self, n: int) -> None:
        if not 1 <= n <= MAX_BITS:
            raise ValueError(f"qubit count must be in [1, {MAX_BITS}], got {n}")


def _uniform_samples(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    return rng.integers(0, 1 << n, size=size, dtype=np.uint64)


class BasisState(CTState):
    """|x0> with an optional global phase."""

    def __init__(self, n: int, value: int, phase: complex = 1.0 + 0.0j):
        self._check_width(n)
        if not 0 <= value < (1 << n):
            raise ValueError(f"basis value {value} does not fit in {n} bits")
        if abs(abs(phase) - 1.0) > _NORM_TOL:
            raise ValueError("phase must have unit modulus")
        self.n = n
        self.value = value
        self.phase = complex(phase)

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        return np.where(xs == np.uint64(self.value), self.phase, 0.0 + 0.0j)

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.value, dtype=np.uint64)


def _builtin_one(xs: np.ndarray, n: int) -> np.ndarray:
    return np.ones(xs.shape, dtype=np.int8)


def _builtin_parity(xs: np.ndarray, n: int) -> np.ndarray:
    return (1 - 2 * parity(xs)).astype(np.int8)


def _builtin_first_bit(xs: np.ndarray, n: int) -> np.ndarray:
    return (1 - 2 * (np.asarray(xs, dtype=np.uint64) & 1).astype(np.int8)).astype(np.int8)


def _builtin_majority(xs: np.ndarray, n: int) -> np.ndarray:
    heavy = np.bitwise_count(np.asarray(xs, dtype=np.uint64)) > (n // 2)
    return np.where(heavy, -1, 1).astype(np.int8)


FUNCTION_REGISTRY = {
    "one": _builtin_one,
    "parity": _builtin_parity,
    "first-bit": _builtin_first_bit,
    "majority": _builtin_majority,
}


class FunctionState(CTState):
    """2**(-n/2) * sum_x f(x)|x> for a sign function f: strings -> {-1, +1}."""

    def __init__(self, n: int, fn, name: str | None = None):
        self._check_width(n)
        self.n = n
        self._fn = fn
        self.name = name

    @classmethod
    def builtin(cls, n: int, name: str) -> "FunctionState":
        if name not in FUNCTION_REGISTRY:
            raise ValueError(f"unknown sign function {name!r}; known: {sorted(FUNCTION_REGISTRY)}")
        raw = FUNCTION_REGISTRY[name]
        return cls(n, lambda xs, _n=n: raw(xs, _n), name=name)

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        vals = np.asarray(self._fn(xs))
        if not np.all(np.abs(vals) == 1):
            raise ValueError("sign function must take values in {-1, +1}")
        return vals.astype(np.complex128) / math.sqrt(1 << self.n)

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # |amplitude| is constant, so the Born distribution is uniform.
        return _uniform_samples(rng, self.n, size)


class QftImageState(CTState):
    """T * F^(+-1)|base> with F the modular Fourier transform on an ordered
    subset of qubits and T an optional phase-free reversible circuit."""

    def __init__(
        self,
        n: int,
        base: int,
        targets: tuple[int, ...],
        *,
        inverse: bool = False,
        circuit: ReversibleCircuit | None = None,
    ):
        self._check_width(n)
        targets = tuple(targets)
        check_positions(targets, n, what="transform targets")
        if not targets:
            raise ValueError("transform needs at least one target qubit")
        if not 0 <= base < (1 << n):
            raise ValueError(f"base value {base} does not fit in {n} bits")
        if circuit is not None and circuit.n != n:
            raise ValueError("reversible circuit width must match the state")
        self.n = n
        self.base = base
        self.targets = targets
        self.inverse = inverse
        self.circuit = circuit
        self._k = len(targets)
        self._tmask = mask_of(targets)
        self._rest_mask = ((1 << n) - 1) ^ self._tmask
        self._base_sub = gather_bits_int(base, targets)

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        ws = self.circuit.invert(xs) if self.circuit is not None else xs
        ok = (ws & np.uint64(self._rest_mask)) == np.uint64(self.base & self._rest_mask)
        sub = gather_bits(ws, self.targets)
        # (sub * base_sub) mod 2**k is exact under uint64 wraparound for k <= 64.
        red = (sub * np.uint64(self._base_sub)) & np.uint64((1 << self._k) - 1)
        sign = -1.0 if self.inverse else 1.0
        angles = sign * 2.0 * math.pi * red.astype(np.float64) / (1 << self._k)
        amps = np.exp(1j * angles) / math.sqrt(1 << self._k)
        return np.where(ok, amps, 0.0 + 0.0j)

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        ys = rng.integers(0, 1 << self._k, size=size, dtype=np.uint64)
        ws = scatter_bits(ys, self.targets) | np.uint64(self.base & self._rest_mask)
        return self.circuit.apply(ws) if self.circuit is not None else ws


class IqpState(CTState):
    """D * H^(tensor n)|base> for a diagonal D of commuting many-body phases.

    Each gate is (theta, mask): D multiplies |z> by exp(i*theta*(-1)^parity(z & mask)).
    """

    def __init__(self, n: int, gates: tuple[tuple[float, int], ...], base: int = 0):
        self._check_width(n)
        if not 0 <= base < (1 << n):
            raise ValueError(f"base value {base} does not fit in {n} bits")
        for theta, mask in gates:
            if not 0 < mask < (1 << n):
                raise ValueError(f"gate mask {mask} must select at least one qubit in range")
            float(theta)
        self.n = n
        self.gates = tuple((float(theta), int(mask)) for theta, mask in gates)
        self.base = base

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        signs = (1 - 2 * parity(xs & np.uint64(self.base))).astype(np.float64)
        angles = np.zeros(xs.shape, dtype=np.float64)
        for theta, mask in self.gates:
            angles += theta * (1 - 2 * parity(xs & np.uint64(mask))).astype(np.float64)
        return signs * np.exp(1j * angles) / math.sqrt(1 << self.n)

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return _uniform_samples(rng, self.n, size)


class ProductState(CTState):
    """Tensor product of single-qubit states."""

    def __init__(self, amps: np.ndarray):
        amps = np.asarray(amps, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise ValueError("amps must have shape (n, 2)")
        n = amps.shape[0]
        self._check_width(n)
        norms = np.abs(amps[:, 0]) ** 2 + np.abs(amps[:, 1]) ** 2
        if np.any(np.abs(norms - 1.0) > _NORM_TOL):
            raise ValueError("every qubit state must be normalized")
        self.n = n
        self.amps = amps
        self._p1 = np.abs(amps[:, 1]) ** 2

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        out = np.ones(xs.shape, dtype=np.complex128)
        for i in range(self.n):
            bit = ((xs >> i) & 1).astype(bool)
            out *= np.where(bit, self.amps[i, 1], self.amps[i, 0])
        return out

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.zeros(size, dtype=np.uint64)
        for i in range(self.n):
            draws = rng.random(size) < self._p1[i]
            out |= draws.astype(np.uint64) << np.uint64(i)
        return out


class TensorPair(CTState):
    """Tensor product of two states with explicit output qubit positions.

    left_positions[i] is the output position of the left state's qubit i, and
    likewise for the right; together they must partition the output register.
    """

    def __init__(
        self,
        left: CTState,
        right: CTState,
        left_positions: tuple[int, ...] | None = None,
        right_positions: tuple[int, ...] | None = None,
    ):
        n = left.n + right.n
        self._check_width(n)
        if left_positions is None:
            left_positions = tuple(range(left.n))
        if right_positions is None:
            right_positions = tuple(range(left.n, n))
        left_positions = tuple(left_positions)
        right_positions = tuple(right_positions)
        if sorted(left_positions + right_positions) != list(range(n)):
            raise ValueError("positions must partition the output register")
        if len(left_positions) != left.n or len(right_positions) != right.n:
            raise ValueError("position counts must match the component widths")
        self.n = n
        self.left = left
        self.right = right
        self.left_positions = left_positions
        self.right_positions = right_positions

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        la = self.left.amplitude_batch(gather_bits(xs, self.left_positions))
        ra = self.right.amplitude_batch(gather_bits(xs, self.right_positions))
        return la * ra

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        ls = self.left.sample_batch(rng, size)
        rs = self.right.sample_batch(rng, size)
        return scatter_bits(ls, self.left_positions) | scatter_bits(rs, self.right_positions)


def tensor(left: CTState, right: CTState) -> TensorPair:
    return TensorPair(left, right)


class PermutedState(CTState):
    """A state with its qubits relabeled: positions[i] is the new home of qubit i."""

    def __init__(self, inner: CTState, positions: tuple[int, ...]):
        positions = tuple(positions)
        check_positions(positions, inner.n, what="permutation")
        if len(positions) != inner.n:
            raise ValueError("permutation must cover every qubit")
        self.n = inner.n
        self.inner = inner
        self.positions = positions

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        return self.inner.amplitude_batch(gather_bits(xs, self.positions))

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return scatter_bits(self.inner.sample_batch(rng, size), self.positions)


class ExplicitState(CTState):
    """A state given by an explicit sparse amplitude table."""

    def __init__(self, n: int, values, amps):
        self._check_width(n)
        values = np.asarray(values, dtype=np.uint64)
        amps = np.asarray(amps, dtype=np.complex128)
        if values.ndim != 1 or values.shape != amps.shape:
            raise ValueError("values and amps must be matching 1-d arrays")
        if values.size == 0:
            raise ValueError("explicit state needs at least one entry")
        order = np.argsort(values, kind="stable")
        values, amps = values[order], amps[order]
        if np.any(values[1:] == values[:-1]):
            raise ValueError("duplicate strings in explicit state")
        if int(values[-1]) >= (1 << n):
            raise ValueError("entry does not fit in the register")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"explicit state must be normalized, got norm^2 = {norm}")
        self.n = n
        self.values = values
        self.amps = amps
        self._cum = np.cumsum(np.abs(amps) ** 2)

    @classmethod
    def from_dict(cls, n: int, table: dict[int, complex]) -> "ExplicitState":
        items = sorted(table.items())
        return cls(n, [v for v, _ in items], [a for _, a in items])

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        idx = np.searchsorted(self.values, xs)
        idx_c = np.minimum(idx, self.values.size - 1)
        hit = self.values[idx_c] == xs
        out = np.where(hit, self.amps[idx_c], 0.0 + 0.0j)
        return out

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        rs = rng.random(size) * self._cum[-1]
        idx = np.searchsorted(self._cum, rs, side="right")
        return self.values[np.minimum(idx, self.values.size - 1)]


class OpImageState(CTState):
    """A|psi> for a basis-preserving operator A."""

    def __init__(self, op: BasisPreservingOp, inner: CTState):
        if op.n != inner.n:
            raise ValueError("operator and state widths must match")
        self.n = inner.n
        self.op = op
        self.inner = inner

    def amplitude_batch(self, xs: np.ndarray) -> np.ndarray:
        # <y|A|psi> = conj(g'(y)) * psi(f^-1(y)).
        pre, phases = self.op.inverse(np.asarray(xs, dtype=np.uint64))
        return np.conj(phases) * self.inner.amplitude_batch(pre)

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        ys, _ = self.op.forward(self.inner.sample_batch(rng, size))
        return ys
