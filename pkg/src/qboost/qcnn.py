"""Quantum convolutional network builders.

Layout: optional single-qubit rotation prelayer, then `blocks` repetitions
of a convolution layer (two-qubit trainable units on neighboring active
pairs, brick pattern) and a pooling layer that measures away one qubit of
each pair. Readout happens on the first active qubits after the last block.

The convolution unit is RY(a) (x) RY(b) -> RZZ(c) -> RY(d) (x) RY(e), five
angles per unit; the exact per-unit gate content of published QCNN figures
is not standardized, so the unit is a configuration choice.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import (MeasurementSpec, ParamCircuit, PauliString, PoolingUnit,
                      TrainableRotation, computational_measurement)


@dataclass(frozen=True)
class QcnnArchitecture:
    num_qubits: int
    blocks: int
    num_classes: int = 2
    prelayer: bool = False

    def describe(self) -> str:
        pre = "prelayer+" if self.prelayer else ""
        return f"{pre}{self.blocks}block-qcnn-{self.num_qubits}q-{self.num_classes}c"


def _conv_pair(gates, a: int, b: int, k: int) -> int:
    """Five-parameter convolution unit on qubits a < b; returns next param index."""
    y = PauliString("Y")
    zz = PauliString("Z" + "I" * (b - a - 1) + "Z")
    gates.append(TrainableRotation(y, a, k))
    gates.append(TrainableRotation(y, b, k + 1))
    gates.append(TrainableRotation(zz, a, k + 2))
    gates.append(TrainableRotation(y, a, k + 3))
    gates.append(TrainableRotation(y, b, k + 4))
    return k + 5


def build_qcnn(num_qubits: int, blocks: int, num_classes: int = 2,
               prelayer: bool = False) -> tuple[ParamCircuit, MeasurementSpec]:
    """Build the circuit and its readout for a QCNN classifier.

    Binary classifiers read the sign of <Z> on the first active qubit;
    multiclass classifiers measure ceil(log2 D) active qubits in the
    computational basis.
    """
    if num_qubits not in (4, 6, 8):
        raise ValueError(f"unsupported width {num_qubits}; expected 4, 6 or 8")
    if blocks < 1:
        raise ValueError("need at least one block")
    gates: list = []
    k = 0
    if prelayer:
        for q in range(num_qubits):
            gates.append(TrainableRotation(PauliString("Y"), q, k))
            k += 1
    active = list(range(num_qubits))
    for _ in range(blocks):
        if len(active) < 2:
            break
        # brick-pattern convolution on neighboring active pairs
        for i in range(0, len(active) - 1, 2):
            k = _conv_pair(gates, active[i], active[i + 1], k)
        for i in range(1, len(active) - 1, 2):
            k = _conv_pair(gates, active[i], active[i + 1], k)
        # pooling: measure the second qubit of each pair, keep the first
        next_active = []
        for i in range(0, len(active) - 1, 2):
            kept, measured = active[i], active[i + 1]
            gates.append(PoolingUnit(measured, kept, (k, k + 1)))
            k += 2
            next_active.append(kept)
        if len(active) % 2 == 1:
            next_active.append(active[-1])
        active = next_active
    needed = max(1, (num_classes - 1).bit_length())
    if len(active) < needed:
        raise ValueError(f"{num_classes} classes need {needed} readout qubits, "
                         f"only {len(active)} active after pooling")
    circuit = ParamCircuit(num_qubits, tuple(gates), k)
    mode = "sign_of_z" if num_classes == 2 else "argmax"
    meas = computational_measurement(tuple(active[:needed]), num_classes, mode=mode)
    return circuit, meas
