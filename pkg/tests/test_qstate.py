import numpy as np
import pytest

from qboost.qstate import (DensityMatrix, HermitianOperator, StateVector,
                           DimensionMismatchError, basis_state, embed_local_operator,
                           embed_on_qubits, expectation, ground_state,
                           maximally_mixed, partial_trace, I2, X, Y, Z)


def random_density(rng, n):
    dim = 2 ** n
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(n, rho / np.trace(rho))


def test_state_vector_invariants():
    sv = basis_state(2, 0)
    assert sv.amplitudes.shape == (4,)
    with pytest.raises(ValueError):
        StateVector(1, [1.0, 1.0])  # norm sqrt(2)
    with pytest.raises(DimensionMismatchError):
        StateVector(2, [1.0, 0.0])


def test_density_matrix_invariants():
    with pytest.raises(ValueError):
        DensityMatrix(1, [[0.5, 0.5j], [0.5j, 0.5]])  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(1, [[1.0, 0.0], [0.0, 1.0]])  # trace 2
    with pytest.raises(ValueError):
        DensityMatrix(1, [[1.5, 0.0], [0.0, -0.5]])  # negative eigenvalue


def test_expectation_z_eigenstate():
    z = HermitianOperator(1, Z)
    assert expectation(z, basis_state(1, 0).density()) == pytest.approx(1.0)
    assert expectation(z, maximally_mixed(1)) == pytest.approx(0.0)


def test_expectation_zz_basis_state():
    # direct matrix trace oracle
    zz = np.kron(Z, Z)
    rho = basis_state(2, 0b01).density()
    oracle = np.trace(zz @ rho.matrix).real
    assert expectation(HermitianOperator(2, zz), rho) == pytest.approx(oracle)
    assert oracle == pytest.approx(-1.0)


def test_expectation_linear_and_real():
    rng = np.random.default_rng(7)
    rho = random_density(rng, 2)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = HermitianOperator(2, a + a.conj().T)
    b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    b = HermitianOperator(2, b + b.conj().T)
    combined = HermitianOperator(2, 2.0 * a.matrix + 3.0 * b.matrix)
    assert expectation(combined, rho) == pytest.approx(
        2.0 * expectation(a, rho) + 3.0 * expectation(b, rho))


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        expectation(HermitianOperator(1, Z), maximally_mixed(2))


def test_partial_trace_product_state():
    rho = basis_state(2, 0).density()
    reduced = partial_trace(rho, {0})
    assert np.allclose(reduced.matrix, basis_state(1, 0).density().matrix)


def test_partial_trace_bell_state():
    bell = StateVector(2, np.array([1, 0, 0, 1]) / np.sqrt(2))
    for keep in ({0}, {1}):
        reduced = partial_trace(bell.density(), keep)
        # direct summation oracle: rho_A[a,b] = sum_c rho[ac, bc]
        assert np.allclose(reduced.matrix, I2 / 2, atol=1e-12)


def test_partial_trace_direct_summation_oracle():
    rng = np.random.default_rng(3)
    rho = random_density(rng, 3)
    reduced = partial_trace(rho, {0, 2})
    oracle = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    for k in range(2):  # summed qubit 1
                        i = (a << 2) | (k << 1) | b
                        j = (c << 2) | (k << 1) | d
                        oracle[(a << 1) | b, (c << 1) | d] += rho.matrix[i, j]
    assert np.allclose(reduced.matrix, oracle, atol=1e-12)


def test_partial_trace_keep_all_and_trace_preserved():
    rng = np.random.default_rng(5)
    rho = random_density(rng, 3)
    assert partial_trace(rho, {0, 1, 2}) is rho
    for keep in ({0}, {1, 2}, {0, 2}):
        assert np.trace(partial_trace(rho, keep).matrix) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        partial_trace(rho, set())
    with pytest.raises(ValueError):
        partial_trace(rho, {3})


def test_embed_local_operator():
    assert np.allclose(embed_local_operator(Z, 0, 1), Z)
    assert np.allclose(embed_local_operator(Z, 1, 2), np.kron(I2, Z))
    xx = np.kron(X, X)
    oracle = np.kron(np.kron(np.eye(4), X), X)
    assert np.allclose(embed_local_operator(xx, 2, 4), oracle)
    with pytest.raises(ValueError):
        embed_local_operator(xx, 3, 4)


def test_embed_on_qubits_permuted():
    # X on qubit 1 of 2 regardless of tuple form
    assert np.allclose(embed_on_qubits(X, [1], 2), np.kron(I2, X))
    # CNOT with control 1, target 0 (swapped order) vs known matrix
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    got = embed_on_qubits(cnot, [1, 0], 2)
    want = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
    assert np.allclose(got, want)
    # Kronecker oracle on a 4-qubit register
    zx = np.kron(Z, X)
    assert np.allclose(embed_on_qubits(zx, [1, 2], 4),
                       np.kron(np.kron(I2, zx), I2))


def test_ground_state_diagonal():
    energy, state = ground_state(HermitianOperator(1, Z))
    assert energy == pytest.approx(-1.0)
    assert np.allclose(state.amplitudes, [0, 1])


def test_ground_state_minus_x():
    energy, state = ground_state(HermitianOperator(1, -X))
    assert energy == pytest.approx(-1.0)
    # phase fixed: largest amplitude real positive
    assert np.allclose(state.amplitudes, [1, 1] / np.sqrt(2))


def test_ground_state_residual_and_rayleigh():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    h = HermitianOperator(4, a + a.conj().T)
    energy, state = ground_state(h)
    assert np.linalg.norm(h.matrix @ state.amplitudes - energy * state.amplitudes) < 1e-8
    for _ in range(100):
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        v /= np.linalg.norm(v)
        assert energy <= (v.conj() @ h.matrix @ v).real + 1e-9


def test_ground_state_degenerate_residual():
    # Z (x) I has a twofold-degenerate ground space; any returned vector passes
    h = HermitianOperator(2, np.kron(Z, I2))
    energy, state = ground_state(h)
    assert energy == pytest.approx(-1.0)
    assert np.linalg.norm(h.matrix @ state.amplitudes - energy * state.amplitudes) < 1e-8


def test_ground_state_rejects_non_hermitian():
    bad = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValueError):
        ground_state(bad)
