"""ANNNI-model dataset construction.

H = -J ( sum_i X_i X_{i+1} - kappa sum_i X_i X_{i+2} + h sum_i Z_i ) with
open boundary conditions and J = 1. Ground states drawn uniformly over
(kappa, h) in (0,1) x (0,2) are labeled +1 in the paramagnetic phase
(above the critical line) and -1 otherwise (ferromagnetic or antiphase).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .qstate import HermitianOperator, StateVector, embed_local_operator, ground_state, X, Z
from .seeding import DATA, substream


@dataclass(frozen=True)
class AnnniPoint:
    kappa: float
    h: float
    label: int
    state: StateVector


def annni_hamiltonian(num_spins: int, kappa: float, h: float,
                      j: float = 1.0) -> HermitianOperator:
    """Dense ANNNI Hamiltonian on `num_spins` qubits."""
    if not 2 <= num_spins <= 8:
        raise ValueError(f"num_spins {num_spins} outside the dense range 2..8")
    dim = 2 ** num_spins
    mat = np.zeros((dim, dim), dtype=complex)
    xx = np.kron(X, X)
    xix = np.kron(np.kron(X, np.eye(2)), X)
    for i in range(num_spins - 1):
        mat += embed_local_operator(xx, i, num_spins)
    for i in range(num_spins - 2):
        mat -= kappa * embed_local_operator(xix, i, num_spins)
    for i in range(num_spins):
        mat += h * embed_local_operator(Z, i, num_spins)
    return HermitianOperator(num_spins, -j * mat)


def critical_field(kappa: float) -> float:
    """Critical line value at a given frustration parameter.

    kappa < 0.5: Ising-like line h_I separating paramagnetic from
    ferromagnetic; kappa >= 0.5: commensurate-incommensurate line h_C
    separating paramagnetic from the antiphase (kappa = 0.5 itself is
    measure-zero and handled by the h_C branch, which vanishes there).
    """
    if not 0 < kappa < 1:
        raise ValueError(f"kappa {kappa} outside (0, 1)")
    if kappa < 0.5:
        return (1 - kappa) / kappa * (1 - np.sqrt((1 - 3 * kappa + 4 * kappa ** 2)
                                                  / (1 - kappa)))
    return 1.05 * np.sqrt((kappa - 0.5) * (kappa - 0.1))


def annni_label(kappa: float, h: float) -> int:
    """+1 above the critical line (paramagnetic), -1 below (ordered)."""
    if not 0 < h < 2:
        raise ValueError(f"h {h} outside (0, 2)")
    return 1 if h > critical_field(kappa) else -1


def generate_annni_dataset(num_spins: int, n: int, seed: int) -> list[AnnniPoint]:
    """n i.i.d. uniform (kappa, h) draws with their labeled ground states.

    Duplicate (kappa, h) pairs are rejected and redrawn so all sample
    points differ. Deterministic per seed.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    rng = substream(seed, DATA)
    points = []
    seen = set()
    while len(points) < n:
        kappa = float(rng.uniform(0.0, 1.0))
        h = float(rng.uniform(0.0, 2.0))
        if kappa <= 0.0 or h <= 0.0 or (kappa, h) in seen:
            continue
        seen.add((kappa, h))
        _, state = ground_state(annni_hamiltonian(num_spins, kappa, h))
        points.append(AnnniPoint(kappa, h, annni_label(kappa, h), state))
    return points


# ---------------------------------------------------------------------------
# binary container for generated datasets
#
# layout (little-endian): magic b"QBDS", u32 version = 1, u32 N, u64 n,
# u32 label scheme (0 = binary labels in {-1,+1}), then per sample:
# f64 kappa, f64 h, i32 label, 2^N amplitudes as f64 (re, im) pairs.

_MAGIC = b"QBDS"
_HEADER = struct.Struct("<4sIIQI")
LABEL_SCHEME_BINARY = 0


def save_annni_dataset(points: list[AnnniPoint], path) -> None:
    if not points:
        raise ValueError("nothing to save")
    num_spins = points[0].state.num_qubits
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, 1, num_spins, len(points), LABEL_SCHEME_BINARY))
        rec = struct.Struct(f"<ddi{2 ** (num_spins + 1)}d")
        for p in points:
            amps = np.empty(2 ** (num_spins + 1))
            amps[0::2] = p.state.amplitudes.real
            amps[1::2] = p.state.amplitudes.imag
            fh.write(rec.pack(p.kappa, p.h, p.label, *amps))


def load_annni_dataset(path) -> list[AnnniPoint]:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise ValueError("truncated dataset header")
        magic, version, num_spins, count, scheme = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise ValueError(f"bad dataset magic {magic!r}")
        if version != 1 or scheme != LABEL_SCHEME_BINARY:
            raise ValueError(f"unsupported version {version} / scheme {scheme}")
        rec = struct.Struct(f"<ddi{2 ** (num_spins + 1)}d")
        points = []
        for _ in range(count):
            blob = fh.read(rec.size)
            if len(blob) < rec.size:
                raise ValueError("truncated dataset record")
            values = rec.unpack(blob)
            kappa, h, label = values[0], values[1], values[2]
            flat = np.array(values[3:])
            amps = np.empty(2 ** num_spins, dtype=complex)
            amps.real = flat[0::2]   # assignment keeps signed zeros intact
            amps.imag = flat[1::2]
            points.append(AnnniPoint(kappa, h, int(label),
                                     StateVector(num_spins, amps)))
        if fh.read(1):
            raise ValueError("trailing data after the last record")
    return points
