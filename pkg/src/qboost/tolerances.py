"""Numerical tolerances used across the package, centralized in one record."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    unit_norm: float = 1e-10          # state-vector normalization
    hermitian: float = 1e-10          # elementwise Hermiticity of states/operators
    trace_one: float = 1e-10          # density-matrix trace
    psd_floor: float = -1e-9          # smallest admissible density-matrix eigenvalue
    eigen_residual: float = 1e-8      # ||Hv - Ev|| for ground-state solves
    imag_residue: float = 1e-9        # imaginary part tolerated in real expectations
    unitary: float = 1e-12            # unitarity of constructed gate matrices
    kraus_completeness: float = 1e-12 # sum E^dag E = I for channels
    projector_orthogonal: float = 1e-12
    prob_sum: float = 1e-9            # class probabilities summing to one
    decompose_match: float = 1e-10    # gate decomposition vs original unitary
    gradient_fd: float = 1e-6         # parameter-shift vs finite differences
    redistribution: float = 1e-9      # post-update weighted-error identities
    weight_sum: float = 1e-12         # boosting weights summing to one


TOL = Tolerances()
