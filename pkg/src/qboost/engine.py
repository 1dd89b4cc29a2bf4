"""Circuit execution and parameter-shift evaluation.

States are evolved as batches of density matrices. For training, the
engine works in the adjoint picture: measurement projectors are propagated
backward through the circuit once per evaluation (sample-independent), and
per-sample quantities reduce to one trace contraction against the encoded
input states. The parameter-shift difference for a rotation with generator
P obeys

    [p(theta_k + pi/2) - p(theta_k - pi/2)] / 2 = Tr[(i/2)[P, S] rho]

where S is the suffix-adjointed observable including the gate itself; the
same identity holds per branch for pooling units. This is an exact operator
identity, so the values equal the literal two-point shift evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .circuit import (CNOT, FixedRotation, FixedUnitary, MeasurementSpec,
                      ParamCircuit, PoolingUnit, TrainableRotation, gate_qubits)
from .qstate import (DensityMatrix, PAULIS, StateVector, embed_on_qubits)
from .tolerances import TOL

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_Y = PAULIS["Y"]
_CNOT2 = np.array([[1, 0, 0, 0],
                   [0, 1, 0, 0],
                   [0, 0, 0, 1],
                   [0, 0, 1, 0]], dtype=complex)


def _apply_ket(stack: np.ndarray, a: np.ndarray, start: int, width: int, n: int) -> np.ndarray:
    """a acting on row (ket) bits [start, start+width) of a (B, dim, dim) stack."""
    b = stack.shape[0]
    dim = 1 << n
    m = 1 << width
    pre = 1 << start
    rest = (dim >> (start + width)) * dim
    t = stack.reshape(b * pre, m, rest)
    return np.matmul(a, t).reshape(b, dim, dim)


def _apply_bra_dag(stack: np.ndarray, a: np.ndarray, start: int, width: int, n: int) -> np.ndarray:
    """stack @ a^dag, acting on column (bra) bits."""
    b = stack.shape[0]
    dim = 1 << n
    m = 1 << width
    pre = 1 << start
    post = dim >> (start + width)
    t = stack.reshape(b * dim * pre, m, post)
    return np.matmul(a.conj(), t).reshape(b, dim, dim)


def sandwich(stack: np.ndarray, a: np.ndarray, start: int, width: int, n: int) -> np.ndarray:
    """a @ rho @ a^dag for every matrix in the stack."""
    return _apply_bra_dag(_apply_ket(stack, a, start, width, n), a, start, width, n)


def apply_channel_matrix(stack: np.ndarray, kraus_ops: Sequence[np.ndarray],
                         qubit: int, n: int) -> np.ndarray:
    """Single-qubit Kraus channel applied to one qubit of a matrix stack."""
    out = sandwich(stack, kraus_ops[0], qubit, 1, n)
    for e in kraus_ops[1:]:
        out += sandwich(stack, e, qubit, 1, n)
    return out


# ---------------------------------------------------------------------------
# compilation

@dataclass
class _RotOp:
    start: int
    width: int
    generator: np.ndarray          # Pauli matrix on the span, identity letters included
    param: Optional[int]           # None for fixed rotations
    angle: float = 0.0             # used when param is None

    def matrix(self, theta: np.ndarray) -> np.ndarray:
        angle = self.angle if self.param is None else float(theta[self.param])
        dim = self.generator.shape[0]
        return np.cos(angle / 2) * np.eye(dim, dtype=complex) \
            - 1j * np.sin(angle / 2) * self.generator


@dataclass
class _UnitaryOp:
    start: int
    width: int
    matrix: np.ndarray


@dataclass
class _ChannelOp:
    qubit: int
    kraus: tuple[np.ndarray, ...]


@dataclass
class _PoolOp:
    start: int
    width: int
    kept_rel: int                  # positions within the span
    measured_rel: int
    params: tuple[int, int]
    generator: np.ndarray          # Y on the kept qubit, embedded in the span

    def branch_matrix(self, branch: int, angle: float) -> np.ndarray:
        rot = np.cos(angle / 2) * np.eye(2, dtype=complex) - 1j * np.sin(angle / 2) * _Y
        factors = []
        for pos in range(self.width):
            if pos == self.kept_rel:
                factors.append(rot)
            elif pos == self.measured_rel:
                factors.append(_P0 if branch == 0 else _P1)
            else:
                factors.append(np.eye(2, dtype=complex))
        out = factors[0]
        for f in factors[1:]:
            out = np.kron(out, f)
        return out


_Op = Union[_RotOp, _UnitaryOp, _ChannelOp, _PoolOp]


@dataclass
class CompiledCircuit:
    num_qubits: int
    num_params: int
    ops: list


def _span(qubits: Sequence[int]) -> tuple[int, int]:
    lo, hi = min(qubits), max(qubits)
    return lo, hi - lo + 1


def _embed_in_span(local: np.ndarray, qubits: Sequence[int], start: int, width: int) -> np.ndarray:
    return embed_on_qubits(local, [q - start for q in qubits], width)


def compile_circuit(circuit: ParamCircuit, noise=None) -> CompiledCircuit:
    """Lower gate specs to span-contiguous ops, inserting noise channels.

    With a noise model present and enabled, every gate touching two or more
    qubits is followed by the model's channel on each touched qubit.
    """
    noisy = noise is not None and noise.enabled
    ops: list[_Op] = []
    for gate in circuit.gates:
        touched = gate_qubits(gate)
        pool_gate = isinstance(gate, PoolingUnit)
        if isinstance(gate, (TrainableRotation, FixedRotation)):
            start = gate.start_qubit
            width = gate.pauli.width
            if isinstance(gate, TrainableRotation):
                ops.append(_RotOp(start, width, gate.pauli.matrix(), gate.param_index))
            else:
                ops.append(_RotOp(start, width, gate.pauli.matrix(), None, gate.angle))
        elif isinstance(gate, CNOT):
            start, width = _span(touched)
            ops.append(_UnitaryOp(start, width,
                                  _embed_in_span(_CNOT2, touched, start, width)))
        elif isinstance(gate, FixedUnitary):
            ops.append(_UnitaryOp(gate.start_qubit, gate.width, gate.matrix))
        elif isinstance(gate, PoolingUnit):
            start, width = _span(touched)
            gen = _embed_in_span(_Y, [gate.kept_qubit], start, width)
            ops.append(_PoolOp(start, width, gate.kept_qubit - start,
                               gate.measured_qubit - start, tuple(gate.param_indices), gen))
        else:
            raise TypeError(f"unknown gate spec {gate!r}")
        if noisy and len(touched) >= 2 and (not pool_gate or noise.include_pooling):
            for q in sorted(touched):
                ops.append(_ChannelOp(q, tuple(noise.two_qubit_gate_channel.kraus_ops)))
    return CompiledCircuit(circuit.num_qubits, circuit.num_params, ops)


# ---------------------------------------------------------------------------
# forward (state side)

def run_batch(compiled: CompiledCircuit, theta: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Evolve a (B, dim, dim) density stack through the compiled ops."""
    n = compiled.num_qubits
    for op in compiled.ops:
        if isinstance(op, _RotOp):
            rho = sandwich(rho, op.matrix(theta), op.start, op.width, n)
        elif isinstance(op, _UnitaryOp):
            rho = sandwich(rho, op.matrix, op.start, op.width, n)
        elif isinstance(op, _ChannelOp):
            rho = apply_channel_matrix(rho, op.kraus, op.qubit, n)
        elif isinstance(op, _PoolOp):
            theta0 = float(theta[op.params[0]])
            theta1 = float(theta[op.params[1]])
            out = sandwich(rho, op.branch_matrix(0, theta0), op.start, op.width, n)
            out += sandwich(rho, op.branch_matrix(1, theta1), op.start, op.width, n)
            rho = out
    return rho


# ---------------------------------------------------------------------------
# adjoint (observable side)

def adjoint_observables(compiled: CompiledCircuit, theta: np.ndarray,
                        meas_full: np.ndarray) -> np.ndarray:
    """Propagate a (D, dim, dim) observable stack backward through the circuit."""
    n = compiled.num_qubits
    s = meas_full.astype(complex, copy=True)
    for op in reversed(compiled.ops):
        s = _adjoint_step(s, op, theta, n)
    return s


def _adjoint_step(stack: np.ndarray, op: _Op, theta: np.ndarray, n: int) -> np.ndarray:
    if isinstance(op, _RotOp):
        return sandwich(stack, op.matrix(theta).conj().T, op.start, op.width, n)
    if isinstance(op, _UnitaryOp):
        return sandwich(stack, op.matrix.conj().T, op.start, op.width, n)
    if isinstance(op, _ChannelOp):
        return apply_channel_matrix(stack, tuple(e.conj().T for e in op.kraus), op.qubit, n)
    if isinstance(op, _PoolOp):
        out = sandwich(stack, op.branch_matrix(0, float(theta[op.params[0]])).conj().T,
                       op.start, op.width, n)
        out += sandwich(stack, op.branch_matrix(1, float(theta[op.params[1]])).conj().T,
                        op.start, op.width, n)
        return out
    raise TypeError(f"unknown op {op!r}")


def _commutator_observable(s: np.ndarray, gen: np.ndarray, start: int, width: int,
                           n: int) -> np.ndarray:
    """(i/2) [P, S] for a generator P local to a span; equals the shift difference."""
    return 0.5j * (_apply_ket(s, gen, start, width, n)
                   - _apply_bra_dag(s, gen, start, width, n))


def gradient_observables(compiled: CompiledCircuit, theta: np.ndarray,
                         meas_full: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Observables for probabilities and their parameter-shift differences.

    Returns (w, g): w has shape (D, dim, dim) with p_d = Tr[w_d rho];
    g has shape (K, D, dim, dim) with
    g[k] giving [p_d(theta_k + pi/2) - p_d(theta_k - pi/2)] / 2 = Tr[g_kd rho].
    """
    n = compiled.num_qubits
    dim = 1 << n
    d = meas_full.shape[0]
    k = compiled.num_params
    buf = np.empty(((k + 1) * d, dim, dim), dtype=complex)
    buf[:d] = meas_full
    fill = d
    row_of_param = [-1] * k
    for op in reversed(compiled.ops):
        if isinstance(op, _PoolOp):
            # observables pushed at later positions see the plain channel adjoint
            if fill > d:
                buf[d:fill] = _adjoint_step(buf[d:fill], op, theta, n)
            # the suffix rows need per-branch terms K_m^dag S K_m before summing
            branches = []
            for m in (0, 1):
                km = op.branch_matrix(m, float(theta[op.params[m]]))
                t = sandwich(buf[:d], km.conj().T, op.start, op.width, n)
                branches.append(t)
                buf[fill:fill + d] = _commutator_observable(
                    t, op.generator, op.start, op.width, n)
                row_of_param[op.params[m]] = fill
                fill += d
            buf[:d] = branches[0] + branches[1]
        else:
            buf[:fill] = _adjoint_step(buf[:fill], op, theta, n)
            if isinstance(op, _RotOp) and op.param is not None:
                buf[fill:fill + d] = _commutator_observable(
                    buf[:d], op.generator, op.start, op.width, n)
                row_of_param[op.param] = fill
                fill += d
    w = buf[:d].copy()
    g = np.empty((k, d, dim, dim), dtype=complex)
    for param, row in enumerate(row_of_param):
        if row < 0:
            raise ValueError(f"parameter {param} does not appear in the circuit")
        g[param] = buf[row:row + d]
    return w, g


# ---------------------------------------------------------------------------
# traces and batching helpers

def trace_against(rho: np.ndarray, observables: np.ndarray) -> np.ndarray:
    """Tr[W_j rho_i] for a (B, dim, dim) state stack and (J, dim, dim) observables.

    Returns the real part, shape (B, J); used where the observables are
    Hermitian so the imaginary part is rounding noise.
    """
    b, dim = rho.shape[0], rho.shape[1]
    j = observables.shape[0]
    wt = observables.transpose(0, 2, 1).reshape(j, dim * dim)
    vals = rho.reshape(b, dim * dim) @ wt.T
    return vals.real


def stack_states(states, num_qubits: int) -> np.ndarray:
    """Stack StateVector/DensityMatrix inputs into a (B, dim, dim) array."""
    dim = 2 ** num_qubits
    out = np.empty((len(states), dim, dim), dtype=complex)
    for i, state in enumerate(states):
        if isinstance(state, StateVector):
            if state.num_qubits != num_qubits:
                raise ValueError(f"state {i} has {state.num_qubits} qubits, expected {num_qubits}")
            out[i] = np.outer(state.amplitudes, state.amplitudes.conj())
        elif isinstance(state, DensityMatrix):
            if state.num_qubits != num_qubits:
                raise ValueError(f"state {i} has {state.num_qubits} qubits, expected {num_qubits}")
            out[i] = state.matrix
        else:
            arr = np.asarray(state, dtype=complex)
            if arr.shape == (dim,):
                out[i] = np.outer(arr, arr.conj())
            elif arr.shape == (dim, dim):
                out[i] = arr
            else:
                raise ValueError(f"state {i} has shape {arr.shape}")
    return out


def _check_theta(circuit: ParamCircuit, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.num_params,):
        raise ValueError(
            f"expected {circuit.num_params} parameters, got shape {theta.shape}")
    return theta


# ---------------------------------------------------------------------------
# public single-state operations

def execute(circuit: ParamCircuit, theta, state: DensityMatrix,
            noise=None) -> DensityMatrix:
    """Run the circuit on one input state and return the output state."""
    theta = _check_theta(circuit, theta)
    if state.num_qubits != circuit.num_qubits:
        raise ValueError(f"input on {state.num_qubits} qubits, circuit on "
                         f"{circuit.num_qubits}")
    compiled = compile_circuit(circuit, noise)
    out = run_batch(compiled, theta, state.matrix[np.newaxis])[0]
    out = 0.5 * (out + out.conj().T)  # scrub rounding asymmetry
    return DensityMatrix(circuit.num_qubits, out)


def class_probabilities(circuit: ParamCircuit, theta, state: DensityMatrix,
                        meas: MeasurementSpec, noise=None) -> np.ndarray:
    """Projector probabilities Tr[Pi_d U rho U^dag] for an argmax readout."""
    if meas.mode != "argmax":
        raise ValueError(f"class probabilities need argmax mode, got {meas.mode!r}")
    theta = _check_theta(circuit, theta)
    compiled = compile_circuit(circuit, noise)
    meas_full = meas.full_projectors(circuit.num_qubits)
    w = adjoint_observables(compiled, theta, meas_full)
    probs = trace_against(state.matrix[np.newaxis], w)[0]
    probs = np.clip(probs, 0.0, 1.0)
    if meas.resolves_identity:
        total = probs.sum()
        if abs(total - 1.0) > TOL.prob_sum:
            raise ValueError(f"probabilities sum to {total}")
    return probs


def z_expectation_on(circuit: ParamCircuit, theta, state: DensityMatrix,
                     qubit: int, noise=None) -> float:
    """Tr[Z_qubit . output state]."""
    if not 0 <= qubit < circuit.num_qubits:
        raise ValueError(f"qubit {qubit} out of range")
    theta = _check_theta(circuit, theta)
    compiled = compile_circuit(circuit, noise)
    z_full = embed_on_qubits(PAULIS["Z"], [qubit], circuit.num_qubits)
    w = adjoint_observables(compiled, theta, z_full[np.newaxis])
    return float(trace_against(state.matrix[np.newaxis], w)[0, 0])
