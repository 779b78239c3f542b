"""Bit-string utilities shared across the package.

A string of n bits is stored as an unsigned integer: bit i carries weight
2**i, so the first character of a rendered string is the least significant
bit of the integer view.  Batch helpers work on uint64 numpy arrays, which
keeps every operation exact for n <= 63.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_BITS = 63


def _check_width(n: int) -> None:
    if not isinstance(n, int) or not 1 <= n <= MAX_BITS:
        raise ValueError(f"bit width must be an int in [1, {MAX_BITS}], got {n!r}")


def _check_value(value: int, n: int) -> None:
    if not isinstance(value, int) or not 0 <= value < (1 << n):
        raise ValueError(f"value {value!r} does not fit in {n} bits")


@dataclass(frozen=True)
class BitString:
    """An n-bit string together with its integer view."""

    n: int
    value: int

    def __post_init__(self) -> None:
        _check_width(self.n)
        _check_value(self.value, self.n)

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        """Parse a string whose first character is bit 0."""
        if not text or any(c not in "01" for c in text):
            raise ValueError(f"bit string must be nonempty over {{0,1}}, got {text!r}")
        value = sum(1 << i for i, c in enumerate(text) if c == "1")
        return cls(len(text), value)

    @classmethod
    def from_bits(cls, bits: "list[int] | tuple[int, ...]") -> "BitString":
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be a nonempty sequence of 0/1")
        value = sum(1 << i for i, b in enumerate(bits) if b)
        return cls(len(bits), value)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.n))

    def __str__(self) -> str:
        return "".join("1" if (self.value >> i) & 1 else "0" for i in range(self.n))

    def __index__(self) -> int:
        return self.value


def bits_to_str(value: int, n: int) -> str:
    _check_width(n)
    _check_value(value, n)
    return str(BitString(n, value))


def mask_of(positions: tuple[int, ...]) -> int:
    return sum(1 << p for p in positions)


def check_positions(positions: tuple[int, ...], n: int, *, what: str = "positions") -> None:
    """Require distinct qubit indices inside [0, n)."""
    if len(set(positions)) != len(positions):
        raise ValueError(f"{what} must be distinct, got {positions}")
    if any(not isinstance(p, int) or not 0 <= p < n for p in positions):
        raise ValueError(f"{what} must lie in [0, {n}), got {positions}")


def gather_bits(xs: np.ndarray, positions: tuple[int, ...]) -> np.ndarray:
    """Pack the bits of xs at the given positions: output bit i = input bit positions[i]."""
    xs = np.asarray(xs, dtype=np.uint64)
    out = np.zeros_like(xs)
    for i, p in enumerate(positions):
        out |= ((xs >> p) & 1) << i
    return out


def scatter_bits(vals: np.ndarray, positions: tuple[int, ...]) -> np.ndarray:
    """Inverse of gather_bits: place bit i of vals at output bit positions[i]."""
    vals = np.asarray(vals, dtype=np.uint64)
    out = np.zeros_like(vals)
    for i, p in enumerate(positions):
        out |= ((vals >> i) & 1) << p
    return out


def gather_bits_int(x: int, positions: tuple[int, ...]) -> int:
    return sum(((x >> p) & 1) << i for i, p in enumerate(positions))


def scatter_bits_int(v: int, positions: tuple[int, ...]) -> int:
    return sum(((v >> i) & 1) << p for i, p in enumerate(positions))


def popcount(xs: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(xs, dtype=np.uint64))


def parity(xs: np.ndarray) -> np.ndarray:
    """0/1 parity of the set bits of each entry."""
    return (popcount(xs) & np.uint8(1)).astype(np.int8)
