"""Gate and circuit representation for parameterized quantum circuits.

A circuit is an ordered list of gate specs over N qubits with K independent
trainable rotation angles. Multi-qubit rotations are taken around Pauli
tensor-product generators; identity letters are allowed inside a generator
so a rotation can couple non-adjacent qubits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .qstate import PAULIS, DimensionMismatchError, embed_on_qubits
from .tolerances import TOL

_VALID_LETTERS = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. "ZZ" or "ZIZ"."""

    letters: str

    def __post_init__(self):
        if not self.letters or set(self.letters) - _VALID_LETTERS:
            raise ValueError(f"invalid Pauli string {self.letters!r}")

    @property
    def width(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for c in self.letters if c != "I")

    def matrix(self) -> np.ndarray:
        out = PAULIS[self.letters[0]]
        for c in self.letters[1:]:
            out = np.kron(out, PAULIS[c])
        return out

    def support(self, start_qubit: int = 0) -> tuple[int, ...]:
        """Qubits the string acts on non-trivially."""
        return tuple(start_qubit + i for i, c in enumerate(self.letters) if c != "I")


def pauli_rotation_matrix(pauli: PauliString, angle: float) -> np.ndarray:
    """exp(-i angle/2 P) = cos(angle/2) I - i sin(angle/2) P."""
    if pauli.weight == 0:
        raise ValueError("rotation generator must have at least one non-identity letter")
    dim = 2 ** pauli.width
    return np.cos(angle / 2) * np.eye(dim, dtype=complex) - 1j * np.sin(angle / 2) * pauli.matrix()


def rotation_spectral_distance(pauli: PauliString, theta: float, theta_prime: float) -> float:
    """Spectral-norm distance ||R(theta) - R(theta')||, computed by SVD."""
    diff = pauli_rotation_matrix(pauli, theta) - pauli_rotation_matrix(pauli, theta_prime)
    return float(np.linalg.svd(diff, compute_uv=False)[0])


@dataclass(frozen=True)
class TrainableRotation:
    pauli: PauliString
    start_qubit: int
    param_index: int


@dataclass(frozen=True)
class FixedRotation:
    pauli: PauliString
    start_qubit: int
    angle: float


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int


@dataclass(frozen=True)
class FixedUnitary:
    matrix: np.ndarray
    start_qubit: int

    def __post_init__(self):
        mat = np.ascontiguousarray(np.asarray(self.matrix, dtype=complex))
        object.__setattr__(self, "matrix", mat)
        dim = mat.shape[0]
        if mat.shape != (dim, dim) or dim & (dim - 1):
            raise DimensionMismatchError(f"unitary shape {mat.shape} is not 2^w x 2^w")
        if np.abs(mat @ mat.conj().T - np.eye(dim)).max() > TOL.unitary:
            raise ValueError("matrix is not unitary")
        mat.setflags(write=False)

    @property
    def width(self) -> int:
        return int(round(np.log2(self.matrix.shape[0])))


@dataclass(frozen=True)
class PoolingUnit:
    """Measure one qubit; conditioned on the outcome, rotate the kept qubit.

    Realized as the CPTP channel rho -> sum_m K_m rho K_m^dag with
    K_m = RY(phi_m) on the kept qubit (x) |m><m| on the measured qubit,
    so the measured qubit decoheres in place and is discarded only at
    readout via partial trace. Two trainable angles, one per branch.
    """

    measured_qubit: int
    kept_qubit: int
    param_indices: tuple[int, int]


GateSpec = Union[TrainableRotation, FixedRotation, CNOT, FixedUnitary, PoolingUnit]


def gate_qubits(gate: GateSpec) -> tuple[int, ...]:
    """Qubits a gate touches non-trivially (identity letters excluded)."""
    if isinstance(gate, (TrainableRotation, FixedRotation)):
        return gate.pauli.support(gate.start_qubit)
    if isinstance(gate, CNOT):
        return (gate.control, gate.target)
    if isinstance(gate, FixedUnitary):
        return tuple(range(gate.start_qubit, gate.start_qubit + gate.width))
    if isinstance(gate, PoolingUnit):
        return (gate.measured_qubit, gate.kept_qubit)
    raise TypeError(f"unknown gate spec {gate!r}")


def gate_param_indices(gate: GateSpec) -> tuple[int, ...]:
    if isinstance(gate, TrainableRotation):
        return (gate.param_index,)
    if isinstance(gate, PoolingUnit):
        return tuple(gate.param_indices)
    return ()


@dataclass(frozen=True)
class ParamCircuit:
    """Ordered gate list over `num_qubits` qubits with `num_params` angles."""

    num_qubits: int
    gates: tuple[GateSpec, ...]
    num_params: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        seen: list[int] = []
        for gate in self.gates:
            qubits = gate_qubits(gate)
            if len(set(qubits)) != len(qubits):
                raise ValueError(f"gate {gate!r} repeats a qubit")
            if min(qubits) < 0 or max(qubits) >= self.num_qubits:
                raise ValueError(f"gate {gate!r} outside circuit of {self.num_qubits} qubits")
            seen.extend(gate_param_indices(gate))
        if sorted(seen) != list(range(self.num_params)):
            raise ValueError(
                f"parameter indices {sorted(seen)} must be exactly 0..{self.num_params - 1},"
                " each used once")


@dataclass(frozen=True)
class MeasurementSpec:
    """Readout definition: projectors over the measured qubits.

    `measured_qubits[0]` is the most significant bit of the class index.
    mode "argmax" picks the class of largest projector probability; mode
    "sign_of_z" reads the sign of <Z> on the first measured qubit and maps
    classes to the labels +1 / -1.
    """

    measured_qubits: tuple[int, ...]
    projectors: tuple[np.ndarray, ...]
    mode: str = "argmax"

    def __post_init__(self):
        object.__setattr__(self, "measured_qubits", tuple(int(q) for q in self.measured_qubits))
        projs = tuple(np.ascontiguousarray(np.asarray(p, dtype=complex)) for p in self.projectors)
        for p in projs:
            p.setflags(write=False)
        object.__setattr__(self, "projectors", projs)
        if self.mode not in ("argmax", "sign_of_z"):
            raise ValueError(f"unknown measurement mode {self.mode!r}")
        dim = 2 ** len(self.measured_qubits)
        for p in projs:
            if p.shape != (dim, dim):
                raise DimensionMismatchError(
                    f"projector shape {p.shape} does not match {len(self.measured_qubits)} qubits")
        for a in range(len(projs)):
            for b in range(a + 1, len(projs)):
                if np.abs(projs[a] @ projs[b]).max() > TOL.projector_orthogonal:
                    raise ValueError(f"projectors {a} and {b} are not orthogonal")
        resolves = np.abs(sum(projs) - np.eye(dim)).max() <= TOL.projector_orthogonal
        object.__setattr__(self, "resolves_identity", resolves)
        if self.mode == "argmax" and len(projs) == dim and not resolves:
            raise ValueError("projectors do not resolve the identity")

    @property
    def num_classes(self) -> int:
        return len(self.projectors)

    def full_projectors(self, num_qubits: int) -> np.ndarray:
        """Projectors embedded in the full space, stacked (D, dim, dim)."""
        return np.stack([embed_on_qubits(p, self.measured_qubits, num_qubits)
                         for p in self.projectors])


def computational_measurement(measured_qubits: Sequence[int], num_classes: int,
                              mode: str = "argmax") -> MeasurementSpec:
    """Computational-basis projectors |d><d| on the measured qubits."""
    m = len(measured_qubits)
    dim = 2 ** m
    if num_classes > dim:
        raise ValueError(f"{num_classes} classes need more than {m} measured qubits")
    projs = []
    for d in range(num_classes):
        p = np.zeros((dim, dim), dtype=complex)
        p[d, d] = 1.0
        projs.append(p)
    return MeasurementSpec(tuple(measured_qubits), tuple(projs), mode)


def decompose_rotation(gate: Union[TrainableRotation, FixedRotation]) -> list[GateSpec]:
    """CNOT ladder + single-qubit RZ + reversed ladder for Z-string rotations.

    The product of the returned gates equals the original rotation exactly
    (no relative phase).
    """
    if any(c not in "IZ" for c in gate.pauli.letters):
        raise ValueError(f"only Z-string rotations decompose this way, got {gate.pauli.letters}")
    support = gate.pauli.support(gate.start_qubit)
    if not support:
        raise ValueError("rotation generator must have at least one Z")
    ladder = [CNOT(a, b) for a, b in zip(support[:-1], support[1:])]
    z_last = PauliString("Z")
    if isinstance(gate, TrainableRotation):
        core: GateSpec = TrainableRotation(z_last, support[-1], gate.param_index)
    else:
        core = FixedRotation(z_last, support[-1], gate.angle)
    return ladder + [core] + ladder[::-1]


def dump_circuit(circuit: ParamCircuit, meas: Optional[MeasurementSpec] = None) -> str:
    """Line-oriented text form: one gate per line, fields
    `kind pauli qubits param_index|angle` (see README for the grammar)."""
    lines = [f"qubits {circuit.num_qubits}", f"params {circuit.num_params}"]
    for gate in circuit.gates:
        if isinstance(gate, TrainableRotation):
            qubits = ",".join(str(q) for q in gate.pauli.support(gate.start_qubit))
            lines.append(f"trot {gate.pauli.letters} {qubits} p{gate.param_index}")
        elif isinstance(gate, FixedRotation):
            qubits = ",".join(str(q) for q in gate.pauli.support(gate.start_qubit))
            lines.append(f"frot {gate.pauli.letters} {qubits} a{float(gate.angle)!r}")
        elif isinstance(gate, CNOT):
            lines.append(f"cnot . {gate.control},{gate.target} .")
        elif isinstance(gate, FixedUnitary):
            span = ",".join(str(q) for q in gate_qubits(gate))
            flat = ";".join(f"{float(v.real)!r},{float(v.imag)!r}"
                            for v in gate.matrix.ravel())
            lines.append(f"unitary . {span} m{flat}")
        elif isinstance(gate, PoolingUnit):
            lines.append(f"pool . {gate.measured_qubit},{gate.kept_qubit} "
                         f"p{gate.param_indices[0]},p{gate.param_indices[1]}")
    if meas is not None:
        qubits = ",".join(str(q) for q in meas.measured_qubits)
        lines.append(f"measure {meas.mode} {qubits} classes={meas.num_classes}")
    return "\n".join(lines) + "\n"
