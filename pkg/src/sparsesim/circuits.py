"""Circuit descriptions: preparation recipes and measurement bases.

A circuit is (n, input string, U1, U2, measured qubits).  U1 prepares the
state from the input basis string via one of four recipes; U2 fixes the
measurement basis and is either a modular Fourier transform on an ordered
qubit subset or a tensor product of single-qubit unitaries.  The measured
string is read in `measure` order: its bit j is the outcome on qubit
measure[j], so for Fourier measurements `measure` must equal the transform's
target list and prefixes of the measured string are residues mod 2**m.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bits import MAX_BITS, check_positions, gather_bits_int, scatter_bits_int
from .ops import ReversibleCircuit
from .states import (
    CTState,
    FunctionState,
    IqpState,
    ProductState,
    QftImageState,
    FUNCTION_REGISTRY,
)

_UNITARY_TOL = 1e-9

_S2 = 1.0 / np.sqrt(2.0)
NAMED_UNITARIES = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
}


def as_unitary(u: "str | np.ndarray | list") -> np.ndarray:
    """Resolve a named or explicit 2x2 unitary and verify unitarity."""
    if isinstance(u, str):
        if u not in NAMED_UNITARIES:
            raise ValueError(f"unknown unitary name {u!r}; known: {sorted(NAMED_UNITARIES)}")
        return NAMED_UNITARIES[u].copy()
    mat = np.asarray(u, dtype=np.complex128)
    if mat.shape != (2, 2):
        raise ValueError(f"unitary must be 2x2, got shape {mat.shape}")
    if np.max(np.abs(mat @ mat.conj().T - np.eye(2))) > _UNITARY_TOL:
        raise ValueError("matrix is not unitary")
    return mat


@dataclass(frozen=True)
class QftBlock:
    """Modular Fourier transform (or its inverse) on an ordered qubit subset."""

    targets: tuple[int, ...]
    inverse: bool = False


@dataclass
class ProductBlock:
    """Tensor product of single-qubit unitaries, one per qubit."""

    unitaries: list[np.ndarray]


MeasurementBlock = QftBlock | ProductBlock


@dataclass(frozen=True)
class QftThenReversible:
    """U1 = T * F^(+-1) with F on qft_targets and T phase-free reversible."""

    qft_targets: tuple[int, ...]
    gates: tuple[tuple, ...] = field(default=())
    inverse: bool = False


@dataclass(frozen=True)
class IqpRecipe:
    """U1 = D * H^(tensor n): gates are (theta, qubit tuple) diagonal phases."""

    gates: tuple[tuple[float, tuple[int, ...]], ...]


@dataclass(frozen=True)
class FunctionRecipe:
    """U1 maps |0...0> to the uniform-magnitude state with signs f(x)."""

    name: str


@dataclass
class ProductRecipe:
    """U1 = tensor product of single-qubit unitaries applied to the input."""

    unitaries: list[np.ndarray]


U1Recipe = QftThenReversible | IqpRecipe | FunctionRecipe | ProductRecipe


@dataclass
class CircuitSpec:
    n: int
    input: int
    u1: U1Recipe
    u2: MeasurementBlock
    measure: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"n must be in [1, {MAX_BITS}], got {self.n}")
        if not 0 <= self.input < (1 << self.n):
            raise ValueError("input string does not fit in the register")
        self.measure = tuple(self.measure)
        if not self.measure:
            raise ValueError("measure list must be nonempty")
        check_positions(self.measure, self.n, what="measure")
        self._check_u1()
        self._check_u2()

    def _check_u1(self) -> None:
        u1 = self.u1
        if isinstance(u1, QftThenReversible):
            check_positions(u1.qft_targets, self.n, what="u1.qft_targets")
            if not u1.qft_targets:
                raise ValueError("u1.qft_targets must be nonempty")
            ReversibleCircuit(self.n, u1.gates)  # validates the gate list
        elif isinstance(u1, IqpRecipe):
            for theta, qubits in u1.gates:
                check_positions(tuple(qubits), self.n, what="iqp gate qubits")
                if not qubits:
                    raise ValueError("iqp gate needs at least one qubit")
        elif isinstance(u1, FunctionRecipe):
            if u1.name not in FUNCTION_REGISTRY:
                raise ValueError(f"unknown sign function {u1.name!r}")
            if self.input != 0:
                raise ValueError("u1 recipe 'function' requires the all-zeros input")
        elif isinstance(u1, ProductRecipe):
            if len(u1.unitaries) != self.n:
                raise ValueError("u1.unitaries must list one unitary per qubit")
            u1.unitaries = [as_unitary(u) for u in u1.unitaries]
        else:
            raise ValueError(f"unknown u1 recipe {type(u1).__name__}")

    def _check_u2(self) -> None:
        u2 = self.u2
        if isinstance(u2, QftBlock):
            check_positions(u2.targets, self.n, what="u2.targets")
            if tuple(u2.targets) != self.measure:
                raise ValueError("for a Fourier measurement, measure must equal u2.targets")
        elif isinstance(u2, ProductBlock):
            if len(u2.unitaries) != self.n:
                raise ValueError("u2.unitaries must list one unitary per qubit")
            u2.unitaries = [as_unitary(u) for u in u2.unitaries]
        else:
            raise ValueError(f"unknown u2 block {type(u2).__name__}")

    @property
    def k(self) -> int:
        return len(self.measure)


def iqp_gate_masks(n: int, gates) -> tuple[tuple[float, int], ...]:
    return tuple((float(theta), sum(1 << q for q in qubits)) for theta, qubits in gates)


def build_ct_state(spec: CircuitSpec) -> CTState:
    """Construct the prepared state U1|input> as an amplitude/sampling oracle."""
    u1 = spec.u1
    if isinstance(u1, QftThenReversible):
        circuit = ReversibleCircuit(spec.n, u1.gates) if u1.gates else None
        return QftImageState(
            spec.n, spec.input, tuple(u1.qft_targets), inverse=u1.inverse, circuit=circuit
        )
    if isinstance(u1, IqpRecipe):
        return IqpState(spec.n, iqp_gate_masks(spec.n, u1.gates), base=spec.input)
    if isinstance(u1, FunctionRecipe):
        return FunctionState.builtin(spec.n, u1.name)
    amps = np.stack([u1.unitaries[i][:, (spec.input >> i) & 1] for i in range(spec.n)])
    return ProductState(amps)


def _full_width_value(spec_n: int, measure: tuple[int, ...], xhat: int) -> int:
    if len(measure) != spec_n:
        raise ValueError("state-level operations need a full-width measurement")
    return scatter_bits_int(xhat, measure)


def basis_preimage_state(n: int, u2: MeasurementBlock, measure: tuple[int, ...], xhat: int) -> CTState:
    """U2^dag |x> for a measured string x (integer view in measure order)."""
    full = _full_width_value(n, measure, xhat)
    if isinstance(u2, QftBlock):
        return QftImageState(n, full, tuple(u2.targets), inverse=not u2.inverse)
    amps = np.stack(
        [np.conj(u2.unitaries[i][(full >> i) & 1, :]) for i in range(n)]
    )
    return ProductState(amps)


def basis_vector_state(n: int, u2: MeasurementBlock, measure: tuple[int, ...], xhat: int) -> CTState:
    """U2 |x>: the x-th vector of the measurement basis."""
    full = _full_width_value(n, measure, xhat)
    if isinstance(u2, QftBlock):
        return QftImageState(n, full, tuple(u2.targets), inverse=u2.inverse)
    amps = np.stack([u2.unitaries[i][:, (full >> i) & 1] for i in range(n)])
    return ProductState(amps)


def dual_measurement_block(u2: MeasurementBlock) -> MeasurementBlock:
    """The block whose measurement distribution is |<basis_x|psi>|^2.

    Measuring in the basis {U|x>} is measuring U^dag psi in the computational
    basis, so the dual of a transform block flips its inverse flag and the
    dual of a product block conjugate-transposes each factor.
    """
    if isinstance(u2, QftBlock):
        return QftBlock(u2.targets, not u2.inverse)
    return ProductBlock([u.conj().T for u in u2.unitaries])


def measured_value(z: int, measure: tuple[int, ...]) -> int:
    """Integer view, in measure order, of the measured bits of a full string z."""
    return gather_bits_int(z, measure)
