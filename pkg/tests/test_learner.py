import numpy as np
import pytest

from qboost.circuit import (ParamCircuit, PauliString, TrainableRotation,
                            computational_measurement)
from qboost.learner import (AdamState, BaseClassifier, TrainConfig,
                            WeightedDataset, adam_step, cross_entropy_loss,
                            param_shift_gradient, predict, predict_batch,
                            train_base, weighted_error)
from qboost.noise import NoiseModel, depolarizing
from qboost.qstate import DensityMatrix, basis_state, maximally_mixed

from test_engine import random_circuit, random_density_array


def make_dataset(rng, n, num_qubits, labels):
    samples = [(DensityMatrix(num_qubits, random_density_array(rng, num_qubits)), y)
               for y in labels]
    return WeightedDataset.uniform(samples)


def test_weighted_dataset_normalizes():
    rng = np.random.default_rng(0)
    data = make_dataset(rng, 4, 1, [1, -1, 1, -1])
    assert data.weights.sum() == pytest.approx(1.0)
    scaled = data.with_weights(np.array([2.0, 2.0, 2.0, 2.0]))
    assert np.allclose(scaled.weights, 0.25)
    with pytest.raises(ValueError):
        data.with_weights(np.array([1.0, -0.5, 0.3, 0.2]))


def test_loss_perfect_and_uniform():
    # identity circuit on 2 qubits, 4 classes
    circ = ParamCircuit(2, (), 0)
    meas = computational_measurement([0, 1], 4)
    perfect = WeightedDataset.uniform([(basis_state(2, 0), 1), (basis_state(2, 3), 4)])
    assert cross_entropy_loss([], circ, meas, perfect) == pytest.approx(0.0, abs=1e-9)
    rng = np.random.default_rng(1)
    uniform = WeightedDataset(
        tuple((maximally_mixed(2), int(rng.integers(1, 5))) for _ in range(6)),
        rng.uniform(0.1, 1.0, size=6))
    assert cross_entropy_loss([], circ, meas, uniform) == pytest.approx(np.log(4))


def test_loss_matches_independent_summation():
    rng = np.random.default_rng(2)
    circ = random_circuit(rng, 2)
    meas = computational_measurement([0, 1], 4)
    labels = [int(rng.integers(1, 5)) for _ in range(5)]
    data = make_dataset(rng, 5, 2, labels)
    theta = rng.standard_normal(circ.num_params)
    got = cross_entropy_loss(theta, circ, meas, data)
    # independent summation oracle over single-sample evaluations
    from qboost.engine import class_probabilities
    total = 0.0
    for (state, label), w in zip(data.samples, data.weights):
        p = class_probabilities(circ, theta, state, meas)
        total -= w * np.log(max(p[label - 1], 1e-10))
    assert got == pytest.approx(total, abs=1e-12)


def test_loss_invariant_under_sample_permutation():
    rng = np.random.default_rng(3)
    circ = random_circuit(rng, 2)
    meas = computational_measurement([0, 1], 4)
    labels = [1, 2, 3, 4, 2]
    states = [DensityMatrix(2, random_density_array(rng, 2)) for _ in range(5)]
    weights = rng.uniform(0.1, 1.0, size=5)
    theta = rng.standard_normal(circ.num_params)
    data = WeightedDataset(tuple(zip(states, labels)), weights)
    perm = [3, 1, 4, 0, 2]
    permuted = WeightedDataset(tuple((states[i], labels[i]) for i in perm), weights[perm])
    assert cross_entropy_loss(theta, circ, meas, data) == pytest.approx(
        cross_entropy_loss(theta, circ, meas, permuted), abs=1e-12)


def finite_difference(theta, circ, meas, data, noise=None, step=1e-4):
    grad = np.zeros_like(theta)
    for k in range(len(theta)):
        plus, minus = theta.copy(), theta.copy()
        plus[k] += step
        minus[k] -= step
        grad[k] = (cross_entropy_loss(plus, circ, meas, data, noise)
                   - cross_entropy_loss(minus, circ, meas, data, noise)) / (2 * step)
    return grad


def test_single_ry_gradient_closed_form():
    circ = ParamCircuit(1, (TrainableRotation(PauliString("Y"), 0, 0),), 1)
    meas = computational_measurement([0], 2, mode="sign_of_z")
    data = WeightedDataset.uniform([(basis_state(1, 0), 1)])
    # p_+1(theta) = cos^2(theta/2); dL/dtheta = -p'/p = sin(theta)/ (1+cos(theta))
    grad0 = param_shift_gradient(np.array([0.0]), circ, meas, data)
    assert grad0[0] == pytest.approx(0.0, abs=1e-12)
    theta = np.array([np.pi / 2])
    grad = param_shift_gradient(theta, circ, meas, data)
    # dp/dtheta at pi/2 is -sin(pi/2)/2 = -1/2; p = 1/2 -> gradient = -(-1/2)/(1/2) = 1
    assert grad[0] == pytest.approx(1.0, abs=1e-12)


def test_probability_shift_derivative_closed_form():
    # p_0(theta) = cos^2(theta/2) for RY on |0>: dp/dtheta(pi/2) = -sin(pi/2)/2
    from qboost.engine import compile_circuit, gradient_observables, trace_against
    circ = ParamCircuit(1, (TrainableRotation(PauliString("Y"), 0, 0),), 1)
    meas = computational_measurement([0], 2)
    compiled = compile_circuit(circ, None)
    meas_full = meas.full_projectors(1)
    rho = basis_state(1, 0).density().matrix[np.newaxis]
    for theta, want in [(0.0, 0.0), (np.pi / 2, -0.5), (np.pi / 3, -np.sin(np.pi / 3) / 2)]:
        _, g = gradient_observables(compiled, np.array([theta]), meas_full)
        dp0 = trace_against(rho, g[0])[0, 0]
        assert dp0 == pytest.approx(want, abs=1e-12)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    for trial in range(6):
        n = int(rng.integers(2, 5))
        noise = NoiseModel(depolarizing(0.03)) if trial % 2 else None
        circ = random_circuit(rng, n, with_pooling=(trial % 3 == 0))
        if circ.num_params == 0:
            continue
        meas = computational_measurement([0], 2, mode="sign_of_z")
        labels = [int(rng.choice([-1, 1])) for _ in range(4)]
        data = make_dataset(rng, 4, n, labels)
        theta = rng.standard_normal(circ.num_params)
        got = param_shift_gradient(theta, circ, meas, data, noise)
        want = finite_difference(theta, circ, meas, data, noise)
        assert np.abs(got - want).max() < 1e-6


def test_gradient_matches_finite_differences_on_qcnn():
    # the production circuit family, binary and 4-class, noisy and noiseless
    from qboost.qcnn import build_qcnn
    rng = np.random.default_rng(14)
    cases = [
        (build_qcnn(4, 1, num_classes=2), [1, -1, 1], None),
        (build_qcnn(4, 1, num_classes=4, prelayer=True), [1, 2, 4],
         NoiseModel(depolarizing(0.03))),
    ]
    for (circ, meas), labels, noise in cases:
        data = make_dataset(rng, len(labels), 4, labels)
        theta = rng.standard_normal(circ.num_params)
        got = param_shift_gradient(theta, circ, meas, data, noise)
        want = finite_difference(theta, circ, meas, data, noise)
        assert np.abs(got - want).max() < 1e-6


def test_adam_zero_gradient_fixed_point():
    config = TrainConfig(learning_rate=0.05)
    theta = np.array([0.3, -0.7])
    out, state = adam_step(theta, np.zeros(2), AdamState.zeros(2), config)
    assert np.allclose(out, theta)
    assert state.step == 1


def test_adam_first_step_is_signlike():
    config = TrainConfig(learning_rate=0.05)
    grad = np.array([3.0, -0.004])
    out, _ = adam_step(np.zeros(2), grad, AdamState.zeros(2), config)
    # bias correction makes m_hat/(sqrt(v_hat)+eps) ~ sign(g)
    assert out[0] == pytest.approx(-0.05, rel=1e-6)
    assert out[1] == pytest.approx(0.05, rel=1e-4)


def test_adam_two_steps_match_scripted_oracle():
    config = TrainConfig(learning_rate=0.1, adam_beta1=0.9, adam_beta2=0.999,
                         adam_eps=1e-8)
    theta = np.array([1.0, -2.0])
    grads = [np.array([0.5, 0.25]), np.array([-1.0, 2.0])]
    got = theta
    state = AdamState.zeros(2)
    for g in grads:
        got, state = adam_step(got, g, state, config)
    # independent scripted reimplementation
    m = np.zeros(2)
    v = np.zeros(2)
    want = theta.copy()
    for t, g in enumerate(grads, start=1):
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        want = want - 0.1 * (m / (1 - 0.9 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
    assert np.abs(got - want).max() < 1e-12


def test_train_zero_parameter_circuit():
    circ = ParamCircuit(1, (), 0)
    meas = computational_measurement([0], 2, mode="sign_of_z")
    data = WeightedDataset.uniform([(basis_state(1, 0), 1), (basis_state(1, 1), 1)])
    clf, history = train_base(circ, meas, data, TrainConfig(iterations=50))
    assert len(history) == 1
    assert history[0].weighted_error == pytest.approx(0.5)


def test_train_separable_single_qubit_task():
    # |0> labeled +1 and |1> labeled -1 are separated by the identity readout;
    # a single RY must reach zero error (theta = 0 achieves it, so it exists)
    circ = ParamCircuit(1, (TrainableRotation(PauliString("Y"), 0, 0),), 1)
    meas = computational_measurement([0], 2, mode="sign_of_z")
    data = WeightedDataset.uniform([(basis_state(1, 0), 1), (basis_state(1, 1), -1)])
    clf, history = train_base(circ, meas, data, TrainConfig(iterations=120, init_seed=5))
    assert weighted_error(clf, data) == 0.0


def test_train_deterministic_and_never_worse_than_init():
    rng = np.random.default_rng(6)
    circ = random_circuit(rng, 2, with_pooling=True)
    meas = computational_measurement([0], 2, mode="sign_of_z")
    labels = [int(rng.choice([-1, 1])) for _ in range(6)]
    data = make_dataset(rng, 6, 2, labels)
    config = TrainConfig(iterations=15, init_seed=123)
    clf1, hist1 = train_base(circ, meas, data, config)
    clf2, hist2 = train_base(circ, meas, data, config)
    assert np.array_equal(clf1.theta, clf2.theta)
    assert all(a == b for a, b in zip(hist1, hist2))
    best = min(row.weighted_error for row in hist1)
    assert weighted_error(clf1, data) == pytest.approx(best, abs=1e-12)
    assert best <= hist1[0].weighted_error


def test_weight_scaling_leaves_everything_unchanged():
    rng = np.random.default_rng(7)
    circ = random_circuit(rng, 2)
    meas = computational_measurement([0], 2, mode="sign_of_z")
    labels = [int(rng.choice([-1, 1])) for _ in range(5)]
    states = [DensityMatrix(2, random_density_array(rng, 2)) for _ in range(5)]
    w = rng.uniform(0.5, 2.0, size=5)
    theta = rng.standard_normal(circ.num_params)
    d1 = WeightedDataset(tuple(zip(states, labels)), w)
    d2 = WeightedDataset(tuple(zip(states, labels)), 7.3 * w)
    assert cross_entropy_loss(theta, circ, meas, d1) == pytest.approx(
        cross_entropy_loss(theta, circ, meas, d2), abs=1e-12)
    g1 = param_shift_gradient(theta, circ, meas, d1)
    g2 = param_shift_gradient(theta, circ, meas, d2)
    assert np.abs(g1 - g2).max() < 1e-12


def test_predict_rules():
    circ = ParamCircuit(1, (), 0)
    meas = computational_measurement([0], 2, mode="sign_of_z")
    clf = BaseClassifier(circ, np.zeros(0), meas)
    assert predict(clf, basis_state(1, 0)) == 1
    assert predict(clf, basis_state(1, 1)) == -1
    # zero expectation ties to +1
    assert predict(clf, maximally_mixed(1)) == 1
    # multiclass argmax with tie to the smallest index
    circ2 = ParamCircuit(2, (), 0)
    meas2 = computational_measurement([0, 1], 4)
    clf2 = BaseClassifier(circ2, np.zeros(0), meas2)
    assert predict(clf2, maximally_mixed(2)) == 1
    assert predict(clf2, basis_state(2, 2)) == 3
