import numpy as np
import pytest

from qboost.noise import (KrausChannel, amplitude_damping, apply_channel,
                          depolarizing, make_noise_model, phase_damping)
from qboost.qstate import DensityMatrix, StateVector, basis_state, embed_on_qubits, I2


PLUS = StateVector(1, np.array([1, 1]) / np.sqrt(2)).density()


def random_density(rng, n):
    dim = 2 ** n
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(n, rho / np.trace(rho))


def test_channels_complete():
    for ch in (depolarizing(0.03), amplitude_damping(0.03), phase_damping(0.03),
               depolarizing(0.7), amplitude_damping(1.0), phase_damping(0.0)):
        total = sum(e.conj().T @ e for e in ch.kraus_ops)
        assert np.abs(total - I2).max() < 1e-12


def test_depolarizing_formula():
    rng = np.random.default_rng(1)
    for p in (0.0, 0.03, 0.5, 1.0):
        ch = depolarizing(p)
        for _ in range(10):
            rho = random_density(rng, 1)
            out = apply_channel(ch, rho, 0)
            want = p / 2 * I2 + (1 - p) * rho.matrix
            assert np.abs(out.matrix - want).max() < 1e-12
    with pytest.raises(ValueError):
        depolarizing(-0.1)
    with pytest.raises(ValueError):
        depolarizing(1.1)


def test_depolarizing_examples():
    out = apply_channel(depolarizing(0.0), PLUS, 0)
    assert np.abs(out.matrix - PLUS.matrix).max() < 1e-15
    out = apply_channel(depolarizing(1.0), PLUS, 0)
    assert np.allclose(out.matrix, I2 / 2, atol=1e-12)
    out = apply_channel(depolarizing(0.03), PLUS, 0)
    assert out.matrix[0, 1] == pytest.approx(0.485, abs=1e-12)
    assert out.matrix[0, 0] == pytest.approx(0.5, abs=1e-12)


def test_amplitude_damping_examples():
    gamma = 0.37
    out = apply_channel(amplitude_damping(gamma), basis_state(1, 1).density(), 0)
    assert np.allclose(out.matrix, np.diag([gamma, 1 - gamma]), atol=1e-15)
    out = apply_channel(amplitude_damping(0.0), PLUS, 0)
    assert np.abs(out.matrix - PLUS.matrix).max() < 1e-15
    rng = np.random.default_rng(2)
    out = apply_channel(amplitude_damping(1.0), random_density(rng, 1), 0)
    assert np.allclose(out.matrix, np.diag([1.0, 0.0]), atol=1e-12)


def test_phase_damping_examples():
    out = apply_channel(phase_damping(0.0), PLUS, 0)
    assert np.abs(out.matrix - PLUS.matrix).max() < 1e-15
    diag = DensityMatrix(1, np.diag([0.3, 0.7]))
    for lam in (0.1, 0.5, 0.99):
        out = apply_channel(phase_damping(lam), diag, 0)
        assert np.allclose(out.matrix, diag.matrix, atol=1e-15)
    out = apply_channel(phase_damping(0.03), PLUS, 0)
    assert out.matrix[0, 1] == pytest.approx(0.5 * np.sqrt(0.97), abs=1e-15)


def test_apply_channel_embedding_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        # random valid channel from a random isometry
        a = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        q, _ = np.linalg.qr(a)
        ch = KrausChannel((q[:2], q[2:]))
        rho = random_density(rng, 3)
        qubit = int(rng.integers(0, 3))
        out = apply_channel(ch, rho, qubit)
        want = np.zeros_like(rho.matrix)
        for e in ch.kraus_ops:
            ef = embed_on_qubits(e, [qubit], 3)
            want += ef @ rho.matrix @ ef.conj().T
        assert np.abs(out.matrix - want).max() < 1e-12


def test_apply_channel_identity_and_full_depolarizing():
    ident = KrausChannel((I2,))
    rho = basis_state(2, 0).density()
    out = apply_channel(ident, rho, 1)
    assert np.abs(out.matrix - rho.matrix).max() < 1e-15
    out = apply_channel(depolarizing(1.0), rho, 0)
    want = np.kron(I2 / 2, np.diag([1.0, 0.0]))
    assert np.allclose(out.matrix, want, atol=1e-12)
    with pytest.raises(ValueError):
        apply_channel(ident, rho, 2)


def test_trace_and_psd_preserved_on_random_states():
    rng = np.random.default_rng(4)
    channels = [depolarizing(0.03), amplitude_damping(0.03), phase_damping(0.03)]
    for _ in range(200):
        rho = random_density(rng, 2)
        ch = channels[int(rng.integers(0, 3))]
        out = apply_channel(ch, rho, int(rng.integers(0, 2)))
        assert abs(np.trace(out.matrix) - 1.0) < 1e-12
        assert np.linalg.eigvalsh(out.matrix).min() > -1e-10
        assert np.abs(out.matrix - out.matrix.conj().T).max() < 1e-12


def test_composition_stays_valid():
    rng = np.random.default_rng(5)
    rho = random_density(rng, 1)
    out = apply_channel(depolarizing(0.2), apply_channel(depolarizing(0.2), rho, 0), 0)
    assert abs(np.trace(out.matrix) - 1.0) < 1e-12
    assert np.linalg.eigvalsh(out.matrix).min() > -1e-12


def test_incomplete_kraus_rejected():
    with pytest.raises(ValueError):
        KrausChannel((0.5 * I2,))


def test_make_noise_model():
    assert make_noise_model("none", 0.03) is None
    model = make_noise_model("amp-damp", 0.03)
    assert model.enabled and model.include_pooling
    with pytest.raises(ValueError):
        make_noise_model("bogus", 0.03)
