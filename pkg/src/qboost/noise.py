"""Single-qubit Kraus channels and their attachment policy.

All three channels are stored in Kraus form so one application path covers
them. A noise model attaches its channel to every multi-qubit gate: after
the ideal gate, the channel acts on each touched qubit. Pooling units count
as two-qubit operations by default (toggle `include_pooling`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import DensityMatrix, I2, X, Y, Z
from .tolerances import TOL


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map rho -> sum_m E_m rho E_m^dag on a single qubit."""

    kraus_ops: tuple[np.ndarray, ...]
    name: str = "channel"

    def __post_init__(self):
        ops = tuple(np.ascontiguousarray(np.asarray(e, dtype=complex)) for e in self.kraus_ops)
        for e in ops:
            if e.shape != (2, 2):
                raise ValueError(f"single-qubit Kraus operator must be 2x2, got {e.shape}")
            e.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        total = sum(e.conj().T @ e for e in ops)
        if np.abs(total - np.eye(2)).max() > TOL.kraus_completeness:
            raise ValueError("Kraus operators do not satisfy sum E^dag E = I")


@dataclass(frozen=True)
class NoiseModel:
    two_qubit_gate_channel: KrausChannel
    enabled: bool = True
    include_pooling: bool = True


def depolarizing(p: float) -> KrausChannel:
    """rho -> (p/2) I + (1-p) rho."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing rate {p} outside [0, 1]")
    ops = (np.sqrt(1 - 3 * p / 4) * I2,
           np.sqrt(p / 4) * X,
           np.sqrt(p / 4) * Y,
           np.sqrt(p / 4) * Z)
    return KrausChannel(ops, f"depolarizing(p={p})")


def amplitude_damping(gamma: float) -> KrausChannel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping rate {gamma} outside [0, 1]")
    e0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    e1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel((e0, e1), f"amplitude_damping(gamma={gamma})")


def phase_damping(lam: float) -> KrausChannel:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"damping rate {lam} outside [0, 1]")
    e0 = np.array([[1, 0], [0, np.sqrt(1 - lam)]], dtype=complex)
    e1 = np.array([[0, 0], [0, np.sqrt(lam)]], dtype=complex)
    return KrausChannel((e0, e1), f"phase_damping(lambda={lam})")


CHANNEL_BUILDERS = {
    "depolarizing": depolarizing,
    "amp-damp": amplitude_damping,
    "phase-damp": phase_damping,
}


def make_noise_model(kind: str, rate: float, include_pooling: bool = True) -> NoiseModel | None:
    """Build the noise model selected by CLI-style `kind` ("none" disables)."""
    if kind == "none":
        return None
    try:
        builder = CHANNEL_BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown noise kind {kind!r}; expected one of "
                         f"none, {', '.join(CHANNEL_BUILDERS)}") from None
    return NoiseModel(builder(rate), enabled=True, include_pooling=include_pooling)


def apply_channel(ch: KrausChannel, state: DensityMatrix, qubit: int) -> DensityMatrix:
    """Apply a single-qubit channel to one qubit of a density matrix."""
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    from .engine import apply_channel_matrix  # local import to avoid a cycle
    out = apply_channel_matrix(state.matrix[np.newaxis], ch.kraus_ops, qubit, n)[0]
    return DensityMatrix(n, out)
