"""States, operators, embeddings, expectations, partial trace, and a dense
ground-state solver.

Convention used everywhere: qubit 0 is the most significant bit of the
computational-basis index, so an operator on qubit 0 of two appears on the
left of the Kronecker product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import TOL

# single-qubit constants
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


class DimensionMismatchError(ValueError):
    """Operands act on different qubit counts or have inconsistent shapes."""


def _as_complex_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    """Pure state on `num_qubits` qubits; amplitudes indexed with qubit 0 as MSB."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_complex_array(self.amplitudes, "amplitudes")
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (2 ** self.num_qubits,):
            raise DimensionMismatchError(
                f"expected 2^{self.num_qubits} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOL.unit_norm:
            raise ValueError(f"state vector norm {norm} deviates from 1")

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.num_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state: Hermitian, unit-trace, PSD up to numerical tolerance."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = _as_complex_array(self.matrix, "matrix")
        object.__setattr__(self, "matrix", mat)
        dim = 2 ** self.num_qubits
        if mat.shape != (dim, dim):
            raise DimensionMismatchError(f"expected {dim}x{dim} matrix, got {mat.shape}")
        if np.abs(mat - mat.conj().T).max() > TOL.hermitian:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TOL.trace_one:
            raise ValueError(f"density matrix trace {tr} deviates from 1")
        if np.linalg.eigvalsh(mat).min() < TOL.psd_floor:
            raise ValueError("density matrix has a significantly negative eigenvalue")

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True)
class HermitianOperator:
    """Observable or Hamiltonian on `num_qubits` qubits."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = _as_complex_array(self.matrix, "matrix")
        object.__setattr__(self, "matrix", mat)
        dim = 2 ** self.num_qubits
        if mat.shape != (dim, dim):
            raise DimensionMismatchError(f"expected {dim}x{dim} matrix, got {mat.shape}")
        if np.abs(mat - mat.conj().T).max() > TOL.hermitian:
            raise ValueError("operator is not Hermitian")


def expectation(op: HermitianOperator, state: DensityMatrix) -> float:
    """Tr[O rho]; the imaginary residue is asserted small and discarded."""
    if op.num_qubits != state.num_qubits:
        raise DimensionMismatchError(
            f"operator on {op.num_qubits} qubits, state on {state.num_qubits}")
    value = np.trace(op.matrix @ state.matrix)
    if abs(value.imag) > TOL.imag_residue:
        raise ValueError(f"expectation has imaginary residue {value.imag}")
    return float(value.real)


def partial_trace(state: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all qubits not in `keep`; kept qubits stay in ascending order."""
    keep = sorted(set(int(q) for q in keep))
    n = state.num_qubits
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} qubits")
    if len(keep) == n:
        return state
    reduced = partial_trace_matrix(state.matrix, keep, n)
    return DensityMatrix(len(keep), reduced)


def partial_trace_matrix(matrix: np.ndarray, keep, n: int) -> np.ndarray:
    """Partial trace on a raw 2^n x 2^n array (no state validation)."""
    keep = sorted(set(int(q) for q in keep))
    traced = [q for q in range(n) if q not in keep]
    t = matrix.reshape((2,) * (2 * n))
    for offset, q in enumerate(traced):
        # axes shrink as we trace; kept-axis positions shift accordingly
        ax = q - sum(1 for p in traced[:offset] if p < q)
        live = n - offset
        t = np.trace(t, axis1=ax, axis2=ax + live)
    dim = 2 ** len(keep)
    return t.reshape(dim, dim)


def embed_local_operator(local, start_qubit: int, total_qubits: int) -> np.ndarray:
    """I^(start) (x) local (x) I^(rest) for a contiguous block of qubits.

    `local` may be a HermitianOperator or any square 2^w x 2^w array
    (e.g. a unitary gate matrix).
    """
    if isinstance(local, HermitianOperator):
        local = local.matrix
    local = np.asarray(local, dtype=complex)
    width = int(round(np.log2(local.shape[0])))
    if local.shape != (2 ** width, 2 ** width):
        raise DimensionMismatchError(f"local operator shape {local.shape} is not 2^w x 2^w")
    if start_qubit < 0 or start_qubit + width > total_qubits:
        raise ValueError(
            f"operator on {width} qubits at {start_qubit} exceeds {total_qubits} qubits")
    out = local
    if start_qubit > 0:
        out = np.kron(np.eye(2 ** start_qubit, dtype=complex), out)
    rest = total_qubits - start_qubit - width
    if rest > 0:
        out = np.kron(out, np.eye(2 ** rest, dtype=complex))
    return out


def embed_on_qubits(local: np.ndarray, qubits, total_qubits: int) -> np.ndarray:
    """Embed a 2^w x 2^w operator acting on an arbitrary ordered qubit tuple."""
    qubits = [int(q) for q in qubits]
    w = len(qubits)
    local = np.asarray(local, dtype=complex)
    if local.shape != (2 ** w, 2 ** w):
        raise DimensionMismatchError(f"operator shape {local.shape} does not match {w} qubits")
    if len(set(qubits)) != w or min(qubits) < 0 or max(qubits) >= total_qubits:
        raise ValueError(f"invalid qubit tuple {qubits} for {total_qubits} qubits")
    others = [q for q in range(total_qubits) if q not in qubits]
    full = np.kron(local, np.eye(2 ** len(others), dtype=complex))
    # full acts on qubit order qubits + others; permute axes to natural order
    order = qubits + others
    perm = [order.index(q) for q in range(total_qubits)]
    t = full.reshape((2,) * (2 * total_qubits))
    t = t.transpose(perm + [total_qubits + p for p in perm])
    dim = 2 ** total_qubits
    return np.ascontiguousarray(t.reshape(dim, dim))


def ground_state(h) -> tuple[float, StateVector]:
    """Minimal eigenvalue and eigenvector of a dense Hamiltonian (dim <= 2^8).

    Accepts a HermitianOperator or a raw square array. The eigenvector's
    global phase is fixed by making its largest-magnitude amplitude real
    and positive.
    """
    mat = h.matrix if isinstance(h, HermitianOperator) else np.asarray(h, dtype=complex)
    num_qubits = int(round(np.log2(mat.shape[0])))
    if mat.shape != (2 ** num_qubits, 2 ** num_qubits):
        raise DimensionMismatchError(f"Hamiltonian shape {mat.shape} is not 2^n x 2^n")
    if mat.shape[0] > 2 ** 8:
        raise ValueError("dense solve limited to 8 qubits")
    if np.abs(mat - mat.conj().T).max() > TOL.eigen_residual:
        raise ValueError("Hamiltonian is not Hermitian")
    energies, vectors = np.linalg.eigh(mat)
    energy = float(energies[0])
    vec = vectors[:, 0]
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    vec = vec / phase
    vec = vec / np.linalg.norm(vec)
    residual = np.linalg.norm(mat @ vec - energy * vec)
    if residual > TOL.eigen_residual:
        raise ValueError(f"eigen residual {residual} above tolerance")
    return energy, StateVector(num_qubits, vec)


def basis_state(num_qubits: int, index: int) -> StateVector:
    """Computational basis state |index> (qubit 0 is the MSB of index)."""
    amps = np.zeros(2 ** num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def maximally_mixed(num_qubits: int) -> DensityMatrix:
    dim = 2 ** num_qubits
    return DensityMatrix(num_qubits, np.eye(dim, dtype=complex) / dim)
