"""Reversible circuits and basis-preserving operators.

A basis-preserving operator A maps |x> to g(x)|f(x)| with f a permutation of
bit strings and |g(x)| = 1, and supports evaluation of both directions, so
A|psi> is again a state with classically computable amplitudes.  The shift
operator families here are the ones produced by conjugating a diagonal phase
through the transform that defines the measurement basis: for the modular
Fourier transform on k bits, the conjugate of the clock phase is the cyclic
shift x -> x + 2**(k-m) (mod 2**k), and prefix projectors expand into powers
of that shift times the phase alpha**(y*u) with alpha = exp(-2*pi*i/2**m).
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .bits import check_positions, gather_bits, scatter_bits, mask_of

GateSpec = tuple  # ("not", t) | ("cnot", c, t) | ("toffoli", c1, c2, t)


@dataclass(frozen=True)
class ReversibleCircuit:
    """A sequence of NOT/CNOT/TOFFOLI gates acting on integer-coded strings."""

    n: int
    gates: tuple[GateSpec, ...]

    def __post_init__(self) -> None:
        for g in self.gates:
            kind = g[0]
            if kind == "not":
                _, t = g
                check_positions((t,), self.n, what="not target")
            elif kind == "cnot":
                _, c, t = g
                check_positions((c, t), self.n, what="cnot qubits")
            elif kind == "toffoli":
                _, c1, c2, t = g
                check_positions((c1, c2, t), self.n, what="toffoli qubits")
            else:
                raise ValueError(f"unknown gate kind {kind!r}")

    def _apply_gate(self, g: GateSpec, xs: np.ndarray) -> np.ndarray:
        if g[0] == "not":
            return xs ^ np.uint64(1 << g[1])
        if g[0] == "cnot":
            _, c, t = g
            return xs ^ (((xs >> c) & 1) << t)
        _, c1, c2, t = g
        return xs ^ ((((xs >> c1) & (xs >> c2)) & 1) << t)

    def apply(self, xs: np.ndarray) -> np.ndarray:
        out = np.asarray(xs, dtype=np.uint64).copy()
        for g in self.gates:
            out = self._apply_gate(g, out)
        return out

    def invert(self, xs: np.ndarray) -> np.ndarray:
        # Every gate is an involution, so the inverse is the reversed list.
        out = np.asarray(xs, dtype=np.uint64).copy()
        for g in reversed(self.gates):
            out = self._apply_gate(g, out)
        return out


class BasisPreservingOp(ABC):
    """Operator with A|x> = g(x)|f(x)>, evaluable in both directions."""

    n: int

    @abstractmethod
    def forward(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (f(x), g(x)) for a batch of integer-coded strings."""

    @abstractmethod
    def inverse(self, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (f^-1(y), g'(y)) where A^dag|y> = g'(y)|f^-1(y)>."""


@dataclass(frozen=True)
class IdentityOp(BasisPreservingOp):
    n: int

    def forward(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        xs = np.asarray(xs, dtype=np.uint64)
        return xs, np.ones(xs.shape, dtype=np.complex128)

    def inverse(self, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.forward(ys)


@dataclass(frozen=True)
class ReversibleOp(BasisPreservingOp):
    """A phase-free reversible circuit viewed as a basis-preserving operator."""

    circuit: ReversibleCircuit

    @property
    def n(self) -> int:  # type: ignore[override]
        return self.circuit.n

    def forward(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ys = self.circuit.apply(xs)
        return ys, np.ones(ys.shape, dtype=np.complex128)

    def inverse(self, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        xs = self.circuit.invert(ys)
        return xs, np.ones(xs.shape, dtype=np.complex128)


@dataclass(frozen=True)
class ShiftPhaseOp(BasisPreservingOp):
    """Cyclic shift on k bits with a constant global phase.

    forward: |x> -> phase * |(x + offset) mod 2**k>.
    """

    n: int
    offset: int
    phase: complex

    def __post_init__(self) -> None:
        if not 0 <= self.offset < (1 << self.n):
            raise ValueError("offset must be reduced mod 2**k")

    def forward(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        xs = np.asarray(xs, dtype=np.uint64)
        mask = np.uint64((1 << self.n) - 1)
        ys = (xs + np.uint64(self.offset)) & mask
        return ys, np.full(ys.shape, self.phase, dtype=np.complex128)

    def inverse(self, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ys = np.asarray(ys, dtype=np.uint64)
        mask = np.uint64((1 << self.n) - 1)
        back = ((1 << self.n) - self.offset) % (1 << self.n)
        xs = (ys + np.uint64(back)) & mask
        return xs, np.full(xs.shape, np.conj(self.phase), dtype=np.complex128)


@dataclass(frozen=True)
class WeylShift:
    """Prefix-projector expansion operator for modular-Fourier measurements.

    For a k-bit transform, an m-bit prefix value yhat, and u in Z_{2**m}, the
    u-th power acts as alpha**(yhat*u) times the shift by u * 2**(k-m)
    (mod 2**k), with alpha = exp(-2*pi*i/2**m).  When the measured transform
    is the inverse Fourier transform the shift subtracts instead of adding.
    """

    yhat: int
    m: int
    k: int
    subtract: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.m <= self.k:
            raise ValueError(f"need 1 <= m <= k, got m={self.m}, k={self.k}")
        if not 0 <= self.yhat < (1 << self.m):
            raise ValueError(f"prefix value must fit in {self.m} bits")

    def power(self, u: int) -> ShiftPhaseOp:
        u = int(u) % (1 << self.m)
        step = (u * (1 << (self.k - self.m))) % (1 << self.k)
        if self.subtract:
            step = ((1 << self.k) - step) % (1 << self.k)
        # alpha**(yhat*u) with alpha = exp(-2*pi*i/2**m); reduce mod 2**m first.
        exponent = (self.yhat * u) % (1 << self.m)
        phase = complex(np.exp(-2j * math.pi * exponent / (1 << self.m)))
        return ShiftPhaseOp(self.k, step, phase)


def weyl_shift_op(yhat: int, m: int, k: int, *, subtract: bool = False) -> WeylShift:
    return WeylShift(yhat, m, k, subtract)


@dataclass(frozen=True)
class EmbeddedOp(BasisPreservingOp):
    """Apply a k-bit operator to an ordered subset of an n-bit register."""

    inner: BasisPreservingOp
    targets: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        check_positions(self.targets, self.n, what="embedding targets")
        if len(self.targets) != self.inner.n:
            raise ValueError("target count must match the inner operator width")

    def _move(self, xs: np.ndarray, direction: str) -> tuple[np.ndarray, np.ndarray]:
        xs = np.asarray(xs, dtype=np.uint64)
        sub = gather_bits(xs, self.targets)
        if direction == "forward":
            sub2, phases = self.inner.forward(sub)
        else:
            sub2, phases = self.inner.inverse(sub)
        rest = xs & np.uint64(~mask_of(self.targets) & ((1 << self.n) - 1))
        return rest | scatter_bits(sub2, self.targets), phases

    def forward(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self._move(xs, "forward")

    def inverse(self, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self._move(ys, "inverse")
