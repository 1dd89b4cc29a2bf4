"""Base-classifier training: weighted cross-entropy, parameter-shift
gradients, Adam, and best-checkpoint selection.

Training follows the protocol of the experiments this package reproduces:
parameters start from the standard normal distribution, Adam runs at a
fixed learning rate, the weighted training error is recorded at every
iteration (including iteration 0), and the checkpoint with the smallest
weighted error wins (earliest on ties).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circuit import MeasurementSpec, ParamCircuit
from .engine import (compile_circuit, gradient_observables, adjoint_observables,
                     stack_states, trace_against)
from .seeding import INIT, substream
from .tolerances import TOL


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    iterations: int = 120
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    init_seed: int = 0
    prob_floor: float = 1e-10

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")


@dataclass(frozen=True)
class WeightedDataset:
    """Samples with the current boosting distribution over them.

    Weights are renormalized to sum to one at construction, so scaling all
    weights by a positive constant changes nothing downstream.
    """

    samples: tuple
    weights: np.ndarray
    _stack_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.samples),):
            raise ValueError(f"{len(self.samples)} samples but weight shape {w.shape}")
        if (w < 0).any():
            raise ValueError("weights must be nonnegative")
        total = w.sum()
        if total <= 0:
            raise ValueError("weights sum to zero")
        w = w / total
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        labels = np.array([int(label) for _, label in self.samples])
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def states(self):
        return [state for state, _ in self.samples]

    def density_stack(self, num_qubits: int) -> np.ndarray:
        if num_qubits not in self._stack_cache:
            self._stack_cache[num_qubits] = stack_states(self.states, num_qubits)
        return self._stack_cache[num_qubits]

    def with_weights(self, weights) -> "WeightedDataset":
        """New dataset over the same samples; the encoded stack is shared."""
        out = WeightedDataset(self.samples, weights, self._stack_cache)
        return out

    @staticmethod
    def uniform(samples) -> "WeightedDataset":
        n = len(samples)
        return WeightedDataset(tuple(samples), np.full(n, 1.0 / n))


@dataclass(frozen=True)
class BaseClassifier:
    circuit: ParamCircuit
    theta: np.ndarray
    meas: MeasurementSpec
    noise: Optional[object] = None

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float).copy()
        if theta.shape != (self.circuit.num_params,):
            raise ValueError(f"theta shape {theta.shape} does not match "
                             f"{self.circuit.num_params} parameters")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)


def _class_indices(labels: np.ndarray, meas: MeasurementSpec) -> np.ndarray:
    """Map dataset labels to projector indices."""
    if meas.mode == "sign_of_z":
        if not set(np.unique(labels)) <= {-1, 1}:
            raise ValueError("binary readout expects labels in {-1, +1}")
        return np.where(labels == 1, 0, 1)
    d = meas.num_classes
    if labels.min() < 1 or labels.max() > d:
        raise ValueError(f"multiclass labels must lie in 1..{d}")
    return labels - 1


def _classes_to_labels(classes: np.ndarray, meas: MeasurementSpec) -> np.ndarray:
    if meas.mode == "sign_of_z":
        return np.where(classes == 0, 1, -1)
    return classes + 1


def _check_weight_sum(data: WeightedDataset):
    if abs(data.weights.sum() - 1.0) > TOL.weight_sum:
        raise ValueError("dataset weights do not sum to one")


def probabilities_for(clf: BaseClassifier, states_stack: np.ndarray) -> np.ndarray:
    """Class probabilities for a stack of encoded states, shape (n, D)."""
    compiled = compile_circuit(clf.circuit, clf.noise)
    meas_full = clf.meas.full_projectors(clf.circuit.num_qubits)
    w = adjoint_observables(compiled, clf.theta, meas_full)
    return trace_against(states_stack, w)


def predict_batch(clf: BaseClassifier, states) -> np.ndarray:
    """Predicted labels for a sequence of states (argmax, ties to the
    smallest class; zero Z-expectation maps to +1)."""
    stack = states if isinstance(states, np.ndarray) else \
        stack_states(states, clf.circuit.num_qubits)
    probs = probabilities_for(clf, stack)
    return _classes_to_labels(np.argmax(probs, axis=1), clf.meas)


def predict(clf: BaseClassifier, state) -> int:
    return int(predict_batch(clf, [state])[0])


def weighted_error(clf: BaseClassifier, data: WeightedDataset) -> float:
    """Misclassification mass under the dataset's distribution."""
    _check_weight_sum(data)
    preds = predict_batch(clf, data.density_stack(clf.circuit.num_qubits))
    return float(data.weights @ (preds != data.labels))


def cross_entropy_loss(theta, circuit: ParamCircuit, meas: MeasurementSpec,
                       data: WeightedDataset, noise=None,
                       prob_floor: float = 1e-10) -> float:
    """-sum_i w_i log p_i,true with probabilities clamped to [floor, 1]."""
    _check_weight_sum(data)
    compiled = compile_circuit(circuit, noise)
    theta = np.asarray(theta, dtype=float)
    meas_full = meas.full_projectors(circuit.num_qubits)
    w = adjoint_observables(compiled, theta, meas_full)
    probs = trace_against(data.density_stack(circuit.num_qubits), w)
    idx = _class_indices(data.labels, meas)
    clipped = np.clip(probs[np.arange(len(data)), idx], prob_floor, 1.0)
    return float(-(data.weights @ np.log(clipped)))


def param_shift_gradient(theta, circuit: ParamCircuit, meas: MeasurementSpec,
                         data: WeightedDataset, noise=None,
                         prob_floor: float = 1e-10) -> np.ndarray:
    """Gradient of the weighted cross-entropy via the parameter-shift rule.

    Coordinate k is sum_i w_i sum_d (-y_id / p_id) [p_id(theta_k + pi/2)
    - p_id(theta_k - pi/2)] / 2 with the probability clamped before the
    division; the shift differences are evaluated exactly in the adjoint
    picture.
    """
    _check_weight_sum(data)
    theta = np.asarray(theta, dtype=float)
    stack = data.density_stack(circuit.num_qubits)
    idx = _class_indices(data.labels, meas)
    _, _, grad, _ = _evaluate(circuit, meas, noise, theta, stack, idx,
                              data.weights, prob_floor)
    return grad


def _evaluate(circuit, meas, noise, theta, stack, class_idx, weights, prob_floor):
    """One training evaluation: loss, weighted error, gradient, probabilities.

    When the projectors resolve the identity, the last class row is
    reconstructed as 1 - sum(others) (the adjoint of a trace-preserving
    channel is unital, so this is exact), shrinking the backward pass.
    """
    compiled = compile_circuit(circuit, noise)
    meas_full = meas.full_projectors(circuit.num_qubits)
    n = stack.shape[0]
    rows = np.arange(n)
    reduce_last = meas.resolves_identity and meas.num_classes >= 2
    if circuit.num_params == 0:
        w = adjoint_observables(compiled, theta, meas_full)
        probs = trace_against(stack, w)
        grad = np.zeros(0)
    else:
        rows_full = meas_full[:-1] if reduce_last else meas_full
        w, g = gradient_observables(compiled, theta, rows_full)
        k, d, dim = g.shape[0], g.shape[1], g.shape[2]
        combined = np.concatenate([w, g.reshape(k * d, dim, dim)])
        vals = trace_against(stack, combined)
        probs = vals[:, :d]
        shifts = vals[:, d:].reshape(n, k, d)
        if reduce_last:
            probs = np.concatenate([probs, 1.0 - probs.sum(axis=1, keepdims=True)],
                                   axis=1)
            shifts = np.concatenate([shifts, -shifts.sum(axis=2, keepdims=True)],
                                    axis=2)
        clipped = np.clip(probs[rows, class_idx], prob_floor, 1.0)
        coef = -weights / clipped
        grad = shifts[rows, :, class_idx].T @ coef
    clipped = np.clip(probs[rows, class_idx], prob_floor, 1.0)
    loss = float(-(weights @ np.log(clipped)))
    mistakes = np.argmax(probs, axis=1) != class_idx
    eps = float(weights @ mistakes)
    return loss, eps, grad, probs


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @staticmethod
    def zeros(k: int) -> "AdamState":
        return AdamState(np.zeros(k), np.zeros(k), 0)


def adam_step(theta: np.ndarray, grad: np.ndarray, state: AdamState,
              config: TrainConfig) -> tuple[np.ndarray, AdamState]:
    """Standard bias-corrected Adam update."""
    if theta.shape != grad.shape:
        raise ValueError("theta and gradient shapes differ")
    t = state.step + 1
    m = config.adam_beta1 * state.m + (1 - config.adam_beta1) * grad
    v = config.adam_beta2 * state.v + (1 - config.adam_beta2) * grad * grad
    m_hat = m / (1 - config.adam_beta1 ** t)
    v_hat = v / (1 - config.adam_beta2 ** t)
    theta_next = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return theta_next, AdamState(m, v, t)


@dataclass(frozen=True)
class HistoryRow:
    iteration: int
    loss: float
    weighted_error: float


def history_csv(history: Sequence[HistoryRow]) -> str:
    lines = ["iteration,loss,weighted_error"]
    lines += [f"{row.iteration},{row.loss!r},{row.weighted_error!r}" for row in history]
    return "\n".join(lines) + "\n"


def train_base(circuit: ParamCircuit, meas: MeasurementSpec, data: WeightedDataset,
               config: TrainConfig, noise=None) -> tuple[BaseClassifier, list[HistoryRow]]:
    """Adam on the weighted cross-entropy; returns the minimum-error checkpoint.

    Iteration 0 is the freshly initialized circuit; every subsequent row is
    the state after one more Adam step. Same config (seed included) gives
    bit-identical results.
    """
    if len(data) == 0:
        raise ValueError("dataset is empty")
    _check_weight_sum(data)
    stack = data.density_stack(circuit.num_qubits)
    class_idx = _class_indices(data.labels, meas)
    rng = substream(config.init_seed, INIT)
    theta = rng.standard_normal(circuit.num_params)

    history: list[HistoryRow] = []
    best_eps = np.inf
    best_theta = theta.copy()
    state = AdamState.zeros(circuit.num_params)
    iterations = config.iterations if circuit.num_params > 0 else 0
    for it in range(iterations + 1):
        if it < iterations:
            loss, eps, grad, _ = _evaluate(circuit, meas, noise, theta, stack,
                                           class_idx, data.weights, config.prob_floor)
        else:
            loss, eps, _, _ = _evaluate(circuit, meas, noise, theta, stack,
                                        class_idx, data.weights, config.prob_floor)
            grad = None
        history.append(HistoryRow(it, loss, eps))
        if eps < best_eps:
            best_eps = eps
            best_theta = theta.copy()
        if grad is not None:
            theta, state = adam_step(theta, grad, state, config)
    clf = BaseClassifier(circuit, best_theta, meas, noise)
    return clf, history
