"""Adaptive boosting of quantum base classifiers, a bagging baseline, and
the learning-risk bound calculators.

Binary boosting uses alpha_t = log((1-eps_t)/eps_t)/2 with the closed-form
normalizer Z_t = 2 sqrt(eps_t (1-eps_t)); D-class boosting uses
alpha_t = log((1-eps_t)/eps_t) + log(D-1) with explicit renormalization.
Natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .learner import (TrainConfig, WeightedDataset, predict_batch,
                      train_base)
from .seeding import BAGGING, INIT, substream

EPSILON_FLOOR = 1e-12


class WeakLearnerFailure(RuntimeError):
    """No classifier better than random guessing was found after retries."""


@dataclass(frozen=True)
class Ensemble:
    mode: str                      # "binary" or "multiclass"
    num_classes: int
    members: tuple                 # of (alpha, BaseClassifier)

    def __post_init__(self):
        if self.mode not in ("binary", "multiclass"):
            raise ValueError(f"unknown ensemble mode {self.mode!r}")
        object.__setattr__(self, "members", tuple(self.members))
        for alpha, _ in self.members:
            if alpha < 0:
                raise ValueError("member weights must be nonnegative")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    epsilon: float
    alpha: float
    z_norm: Optional[float]            # binary normalizer, None for multiclass
    ensemble_train_error: float
    train_bound: Optional[float]       # binary training-error bound prefix
    post_update_error: float           # error of h_t under the updated weights


@dataclass(frozen=True)
class BoundDecomposition:
    train_bound: float
    gen_term_main: float       # 12 sqrt(K log 7K / n)
    gen_term_extra: float      # 4 sqrt(K / n)
    confidence_term: float     # sqrt(log(1/delta) / 2n)

    @property
    def total(self) -> float:
        return (self.train_bound + self.gen_term_main + self.gen_term_extra
                + self.confidence_term)


@dataclass(frozen=True)
class BoundInputs:
    k: int
    n: int
    delta: float
    epsilons: tuple

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("K and n must be at least 1")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))


@dataclass
class BoostReport:
    mode: str
    num_classes: int
    rounds: list
    weak_learner_failure: bool = False
    risk_bound: Optional[BoundDecomposition] = None
    bound_inputs: Optional[BoundInputs] = None
    histories: list = None

    @property
    def epsilons(self) -> list[float]:
        return [r.epsilon for r in self.rounds]


# ---------------------------------------------------------------------------
# bound formulas

def training_bound(epsilons: Sequence[float]) -> float:
    """exp(-2 sum_t (1/2 - eps_t)^2), the AdaBoost empirical-risk bound."""
    eps = np.asarray(list(epsilons), dtype=float)
    if ((eps < 0) | (eps > 1)).any():
        raise ValueError("weighted errors must lie in [0, 1]")
    return float(np.exp(-2.0 * np.sum((0.5 - eps) ** 2)))


def rademacher_bound(k: int, n: int) -> float:
    """6 sqrt(K log(7K) / n) + 2 sqrt(K / n)."""
    if k < 1 or n < 1:
        raise ValueError("K and n must be at least 1")
    return 6.0 * math.sqrt(k * math.log(7.0 * k) / n) + 2.0 * math.sqrt(k / n)


def covering_number_bound(k: int, eps: float) -> int:
    """ceil(pi K / eps)^K, evaluated in exact integer arithmetic.

    The ceiling is taken over the exact rational value of the double
    inputs so boundary cases like eps = pi/K are stable.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if k < 1:
        raise ValueError("K must be at least 1")
    q = Fraction(k) * Fraction(math.pi) / Fraction(float(eps))
    ceiling = -((-q.numerator) // q.denominator)
    return int(ceiling) ** k


def full_risk_bound(inputs: BoundInputs) -> BoundDecomposition:
    """The four-term prediction-error bound for binary boosting."""
    train = training_bound(inputs.epsilons)
    gen_main = 12.0 * math.sqrt(inputs.k * math.log(7.0 * inputs.k) / inputs.n)
    gen_extra = 4.0 * math.sqrt(inputs.k / inputs.n)
    confidence = math.sqrt(math.log(1.0 / inputs.delta) / (2.0 * inputs.n))
    return BoundDecomposition(train, gen_main, gen_extra, confidence)


# ---------------------------------------------------------------------------
# ensemble prediction

def _binary_vote(score: np.ndarray) -> np.ndarray:
    return np.where(score >= 0, 1, -1)


def ensemble_predict_batch(ens: Ensemble, states) -> np.ndarray:
    """Weighted sign vote (binary) or weighted argmax vote (multiclass)."""
    if not ens.members:
        raise ValueError("ensemble is empty")
    member_preds = [predict_batch(clf, states) for _, clf in ens.members]
    alphas = [alpha for alpha, _ in ens.members]
    return _tally(ens, alphas, member_preds)


def _tally(ens: Ensemble, alphas, member_preds) -> np.ndarray:
    n = len(member_preds[0])
    if ens.mode == "binary":
        score = np.zeros(n)
        for alpha, preds in zip(alphas, member_preds):
            score += alpha * preds
        return _binary_vote(score)
    tall = np.zeros((n, ens.num_classes))
    for alpha, preds in zip(alphas, member_preds):
        tall[np.arange(n), preds - 1] += alpha
    return np.argmax(tall, axis=1) + 1


def ensemble_predict(ens: Ensemble, state) -> int:
    return int(ensemble_predict_batch(ens, [state])[0])


# ---------------------------------------------------------------------------
# boosting

def _round_seed(root: int, round_index: int, attempt: int) -> int:
    return int(substream(root, INIT, round_index, attempt).integers(2 ** 63))


def _train_weak(circuit_factory, dataset, config, noise, threshold, round_index,
                max_retries, sample_stack, weights, labels):
    """Train with fresh inits until the weighted error beats `threshold`.

    The gating error is recomputed from the returned classifier's actual
    predictions so every downstream weight-update identity is exact.
    """
    best = None
    for attempt in range(max_retries + 1):
        circuit, meas = circuit_factory()
        cfg = replace(config, init_seed=_round_seed(config.init_seed, round_index, attempt))
        clf, history = train_base(circuit, meas, dataset, cfg, noise)
        preds = predict_batch(clf, sample_stack)
        eps = float(weights @ (preds != labels))
        if best is None or eps < best[1]:
            best = (clf, eps, preds, history)
        if eps < threshold:
            return clf, eps, preds, history, False
    return (*best, True)


def _boost(data: WeightedDataset, circuit_factory, config: TrainConfig, rounds: int,
           noise, mode: str, num_classes: int, delta: float, epsilon_stop: float,
           max_retries: int):
    n = len(data)
    if n == 0:
        raise ValueError("dataset is empty")
    labels = data.labels
    weights = np.full(n, 1.0 / n)
    threshold = 0.5 if mode == "binary" else (num_classes - 1) / num_classes

    members = []
    records = []
    histories = []
    failure = False
    score = np.zeros(n)
    tally = np.zeros((n, num_classes))
    probe_circuit, _ = circuit_factory()
    sample_stack = data.density_stack(probe_circuit.num_qubits)

    for t in range(1, rounds + 1):
        round_data = data.with_weights(weights)
        clf, eps, preds, history, failed = _train_weak(
            circuit_factory, round_data, config, noise, threshold, t, max_retries,
            sample_stack, weights, labels)
        histories.append(history)
        if failed:
            failure = True
            if not members:
                raise WeakLearnerFailure(
                    f"round 1: weighted error {eps} never beat {threshold} "
                    f"after {max_retries} retries")
            break

        wrong = preds != labels
        eps_c = max(eps, EPSILON_FLOOR)

        if mode == "binary":
            alpha = 0.5 * math.log((1.0 - eps_c) / eps_c)
            z_norm = 2.0 * math.sqrt(eps_c * (1.0 - eps_c))
            new_weights = weights * np.exp(-alpha * labels * preds) / z_norm
        else:
            alpha = math.log((1.0 - eps_c) / eps_c) + math.log(num_classes - 1.0)
            z_norm = None
            new_weights = weights * np.exp(alpha * wrong)
        new_weights = new_weights / new_weights.sum()
        post_update = float(new_weights @ wrong)

        members.append((alpha, clf))
        if mode == "binary":
            score += alpha * preds
            ens_err = float(np.mean(_binary_vote(score) != labels))
            bound = training_bound([r.epsilon for r in records] + [eps])
        else:
            tally[np.arange(n), preds - 1] += alpha
            ens_err = float(np.mean((np.argmax(tally, axis=1) + 1) != labels))
            bound = None
        records.append(RoundRecord(t, eps, alpha, z_norm, ens_err, bound, post_update))
        weights = new_weights
        if eps <= epsilon_stop:
            break

    report = BoostReport(mode, num_classes, records, weak_learner_failure=failure)
    if mode == "binary" and members:
        circuit, _ = circuit_factory()
        inputs = BoundInputs(circuit.num_params, n, delta,
                             tuple(r.epsilon for r in records))
        report.bound_inputs = inputs
        report.risk_bound = full_risk_bound(inputs)
    ensemble = Ensemble(mode, num_classes, tuple(members))
    report.histories = histories
    return ensemble, report


def boost_binary(data: WeightedDataset, circuit_factory: Callable, config: TrainConfig,
                 rounds: int, noise=None, *, delta: float = 0.01,
                 epsilon_stop: float = EPSILON_FLOOR, max_retries: int = 5):
    """Binary quantum AdaBoost over labels {-1, +1}; starts from uniform weights."""
    if set(np.unique(data.labels)) - {-1, 1}:
        raise ValueError("binary boosting expects labels in {-1, +1}")
    return _boost(data, circuit_factory, config, rounds, noise, "binary", 2,
                  delta, epsilon_stop, max_retries)


def boost_multiclass(data: WeightedDataset, circuit_factory: Callable,
                     config: TrainConfig, rounds: int, num_classes: int,
                     noise=None, *, delta: float = 0.01,
                     epsilon_stop: float = EPSILON_FLOOR, max_retries: int = 5):
    """D-class quantum AdaBoost over labels {1..D}."""
    if data.labels.min() < 1 or data.labels.max() > num_classes:
        raise ValueError(f"labels must lie in 1..{num_classes}")
    return _boost(data, circuit_factory, config, rounds, noise, "multiclass",
                  num_classes, 1.0, epsilon_stop, max_retries)


def bagging(data: WeightedDataset, circuit_factory: Callable, config: TrainConfig,
            rounds: int, num_classes: int, noise=None, *, seed: int = 0) -> Ensemble:
    """Bootstrap-aggregated ensemble: uniform-weight resamples, fresh inits,
    unweighted majority vote. Accepts every member (no weak-learner gate)."""
    if rounds < 1:
        raise ValueError("need at least one member")
    n = len(data)
    mode = "binary" if set(np.unique(data.labels)) <= {-1, 1} else "multiclass"
    members = []
    for member in range(rounds):
        rng = substream(seed, BAGGING, member)
        indices = rng.integers(0, n, size=n)
        resampled = WeightedDataset.uniform([data.samples[i] for i in indices])
        circuit, meas = circuit_factory()
        cfg = replace(config, init_seed=int(rng.integers(2 ** 63)))
        clf, _ = train_base(circuit, meas, resampled, cfg, noise)
        members.append((1.0, clf))
    return Ensemble(mode, num_classes, tuple(members))


# ---------------------------------------------------------------------------
# report serialization

def report_csv_rows(report: BoostReport) -> list[str]:
    rows = ["round,epsilon,alpha,train_error,train_bound"]
    for r in report.rounds:
        bound = "nan" if r.train_bound is None else repr(r.train_bound)
        rows.append(f"{r.round},{r.epsilon!r},{r.alpha!r},{r.ensemble_train_error!r},{bound}")
    return rows


def bound_summary(report: BoostReport) -> str:
    if report.risk_bound is None:
        return "risk bound: n/a (binary-only decomposition)"
    b = report.risk_bound
    i = report.bound_inputs
    return "\n".join([
        f"risk bound decomposition (K={i.k}, n={i.n}, delta={i.delta}):",
        f"  training-error term : {b.train_bound!r}",
        f"  generalization main : {b.gen_term_main!r}",
        f"  generalization extra: {b.gen_term_extra!r}",
        f"  confidence term     : {b.confidence_term!r}",
        f"  total               : {b.total!r}",
    ])
