"""Seeded experiment runs and their file outputs.

Every run is fully determined by its config (the seed included): repeats
draw per-repeat substreams, workers only parallelize repeats, and files
are written after all repeats finish, so re-running a config reproduces
byte-identical CSVs regardless of QBOOST_THREADS.

Outputs (all under the configured out dir):
  rounds.csv        repeat,round,epsilon,alpha,train_error,train_bound,
                    train_accuracy,test_error,test_accuracy
  history_<r>.csv   round,iteration,loss,weighted_error
  sweep.csv         n,mean_train_error,mean_test_error,mean_abs_gen_error,inv_sqrt_n
  noise_compare.csv repeat,round,boosted_test_accuracy,noisy_best_accuracy,
                    noiseless_best_accuracy
  bounds.csv        k,n,delta,rounds,epsilon,train_term,gen_main,gen_extra,
                    confidence,total
  summary.txt       human-readable digest (wall time lives only here)
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import __version__
from .annni import generate_annni_dataset
from .boost import (BoostReport, Ensemble, bagging, boost_binary,
                    boost_multiclass, bound_summary, ensemble_predict_batch)
from .circuit import dump_circuit
from .engine import stack_states
from .learner import TrainConfig, WeightedDataset, predict_batch
from .mnist import build_mnist_task, generate_synthetic_digits, parse_idx
from .noise import make_noise_model
from .qcnn import build_qcnn
from .seeding import BAGGING, DATA, INIT, TEST_DATA, substream

BASELINE = 8  # substream purpose code for unboosted baselines

TASKS = ("annni-binary", "mnist-multiclass", "bounds", "noise-compare",
         "bagging-compare")


@dataclass
class ExperimentConfig:
    task: str
    seed: int
    num_qubits: int = 6
    n_train: int = 200
    n_test: int = 100
    rounds: int = 10
    repeats: int = 1
    noise: str = "none"
    noise_rate: float = 0.03
    pool_noise: bool = True
    learning_rate: float = 0.05
    iterations: int = 120
    blocks: int = 2
    prelayer: bool = False
    delta: float = 0.01
    n_sweep: tuple = ()
    out_dir: str = "runs/out"
    train_images: str = ""
    train_labels: str = ""
    test_images: str = ""
    test_labels: str = ""
    synthetic_count: int = 4000
    image_size: int = 28
    target_dim: int = 8
    bagging: bool = False
    baseline_best: bool = False
    dump_circuit: bool = False

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.seed is None:
            raise ValueError("seed is required; runs never default to wall-clock")
        for name in ("n_train", "n_test", "rounds", "repeats", "iterations",
                     "num_qubits", "blocks"):
            if getattr(self, name) < 0 or (name in ("rounds", "repeats", "iterations",
                                                    "num_qubits") and getattr(self, name) == 0):
                raise ValueError(f"{name} must be positive")
        self.n_sweep = tuple(int(x) for x in self.n_sweep)

    @property
    def num_classes(self) -> int:
        return 2 if self.task == "annni-binary" else 4

    def snapshot_lines(self) -> list[str]:
        out = [f"# version = {__version__}"]
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            out.append(f"# {f.name} = {value}")
        return out


_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def parse_config_file(path) -> dict:
    """Flat `key = value` lines; '#' starts a comment; keys match fields."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def config_from_sources(file_values: dict, overrides: dict) -> ExperimentConfig:
    """Build a config from file values with CLI overrides applied on top."""
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if "task" not in merged:
        raise ValueError("a task is required (config file or CLI)")
    if "seed" not in merged:
        raise ValueError("a seed is required (config file or CLI)")
    kwargs = {}
    typemap = {f.name: f.type for f in fields(ExperimentConfig)}
    for key, value in merged.items():
        if key not in typemap:
            raise ValueError(f"unknown config key {key!r}")
        if isinstance(value, str):
            if key == "n_sweep":
                value = tuple(int(v) for v in value.split(",") if v.strip())
            elif typemap[key] in ("int", int):
                value = int(value)
            elif typemap[key] in ("float", float):
                value = float(value)
            elif typemap[key] in ("bool", bool):
                value = _BOOL[value.lower()]
        kwargs[key] = value
    return ExperimentConfig(**kwargs)


# ---------------------------------------------------------------------------
# record keeping

@dataclass
class RunRecord:
    repeat: int
    n_train: int
    report: BoostReport
    train_error_series: list
    test_error_series: list
    member_test_errors: list
    baselines: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def final_train_error(self) -> float:
        return self.train_error_series[-1]

    @property
    def final_test_error(self) -> float:
        return self.test_error_series[-1]


def _child_seed(*keys) -> int:
    return int(substream(*keys).integers(2 ** 63))


def _worker_count() -> int:
    raw = os.environ.get("QBOOST_THREADS", "0")
    try:
        count = int(raw)
    except ValueError:
        count = 0
    if count <= 0:
        count = os.cpu_count() or 1
    return count


def _map_repeats(fn, repeats: int):
    """Run repeats in a thread pool; results come back ordered by index."""
    workers = min(_worker_count(), max(repeats, 1))
    if workers <= 1 or repeats <= 1:
        return [fn(r) for r in range(repeats)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(repeats)))


def _map_repeats_flushing(fn, repeats: int, flush):
    """Like _map_repeats, but completed repeats are written out before a
    failing repeat's exception propagates."""

    def guarded(r):
        try:
            return fn(r)
        except Exception as exc:  # noqa: BLE001 - re-raised after flushing
            return exc

    outcomes = _map_repeats(guarded, repeats)
    records = [o for o in outcomes if isinstance(o, RunRecord)]
    failures = [o for o in outcomes if isinstance(o, Exception)]
    if records:
        flush(records)
    if failures:
        raise failures[0]
    return records


def _prefix_error_series(ensemble: Ensemble, member_preds: np.ndarray,
                         labels: np.ndarray) -> list:
    """Ensemble error after each prefix of members; preds shape (T, n)."""
    n = member_preds.shape[1]
    series = []
    if ensemble.mode == "binary":
        score = np.zeros(n)
        for (alpha, _), preds in zip(ensemble.members, member_preds):
            score += alpha * preds
            series.append(float(np.mean(np.where(score >= 0, 1, -1) != labels)))
    else:
        tally = np.zeros((n, ensemble.num_classes))
        for (alpha, _), preds in zip(ensemble.members, member_preds):
            tally[np.arange(n), preds - 1] += alpha
            series.append(float(np.mean((np.argmax(tally, axis=1) + 1) != labels)))
    return series


def _member_pred_matrix(ensemble: Ensemble, stack: np.ndarray) -> np.ndarray:
    return np.array([predict_batch(clf, stack) for _, clf in ensemble.members])


def _evaluate_ensemble(ensemble: Ensemble, stack: np.ndarray, labels: np.ndarray):
    preds = _member_pred_matrix(ensemble, stack)
    series = _prefix_error_series(ensemble, preds, labels)
    member_errors = [float(np.mean(p != labels)) for p in preds]
    return series, member_errors


# ---------------------------------------------------------------------------
# CSV helpers

def _write_lines(path, lines):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _fmt(x) -> str:
    if x is None:
        return "nan"
    return repr(float(x))


def _rounds_rows(records: list) -> list[str]:
    rows = ["repeat,round,epsilon,alpha,train_error,train_bound,"
            "train_accuracy,test_error,test_accuracy"]
    for rec in records:
        for i, r in enumerate(rec.report.rounds):
            train_err = rec.train_error_series[i]
            test_err = rec.test_error_series[i]
            rows.append(",".join([
                str(rec.repeat), str(r.round), _fmt(r.epsilon), _fmt(r.alpha),
                _fmt(train_err), _fmt(r.train_bound), _fmt(1.0 - train_err),
                _fmt(test_err), _fmt(1.0 - test_err)]))
    return rows


def _history_rows(report: BoostReport) -> list[str]:
    rows = ["round,iteration,loss,weighted_error"]
    for round_index, history in enumerate(report.histories or [], start=1):
        for row in history:
            rows.append(f"{round_index},{row.iteration},{_fmt(row.loss)},"
                        f"{_fmt(row.weighted_error)}")
    return rows


def _write_run_outputs(config: ExperimentConfig, records: list, out_dir: str):
    header = config.snapshot_lines()
    _write_lines(os.path.join(out_dir, "rounds.csv"), header + _rounds_rows(records))
    for rec in records:
        _write_lines(os.path.join(out_dir, f"history_{rec.repeat}.csv"),
                     header + _history_rows(rec.report))


def _mean_std(values) -> str:
    arr = np.asarray(values, dtype=float)
    return f"{arr.mean():.4f} +/- {arr.std():.4f}"


# ---------------------------------------------------------------------------
# tasks

def _annni_split(config: ExperimentConfig, n_train: int, repeat: int):
    """Disjoint train/test draw; one rejection-sampled batch per repeat."""
    seed = _child_seed(config.seed, DATA, n_train, repeat)
    points = generate_annni_dataset(config.num_qubits, n_train + config.n_test, seed)
    train = [(p.state, p.label) for p in points[:n_train]]
    test = [(p.state, p.label) for p in points[n_train:]]
    return train, test


def run_annni_binary(config: ExperimentConfig) -> dict:
    """Binary phase classification; optionally sweeps the training-set size."""
    sizes = config.n_sweep or (config.n_train,)
    noise = make_noise_model(config.noise, config.noise_rate, config.pool_noise)
    all_records: dict = {}
    t_start = time.perf_counter()

    def factory():
        return build_qcnn(config.num_qubits, config.blocks, num_classes=2,
                          prelayer=config.prelayer)

    for n_train in sizes:
        def one_repeat(repeat, n_train=n_train):
            t0 = time.perf_counter()
            train, test = _annni_split(config, n_train, repeat)
            data = WeightedDataset.uniform(train)
            tc = TrainConfig(learning_rate=config.learning_rate,
                             iterations=config.iterations,
                             init_seed=_child_seed(config.seed, INIT, n_train, repeat))
            ensemble, report = boost_binary(data, factory, tc, config.rounds,
                                            noise, delta=config.delta)
            train_series = [r.ensemble_train_error for r in report.rounds]
            test_stack = stack_states([s for s, _ in test], config.num_qubits)
            test_labels = np.array([y for _, y in test])
            test_series, member_errors = _evaluate_ensemble(ensemble, test_stack,
                                                            test_labels)
            return RunRecord(repeat, n_train, report, train_series, test_series,
                             member_errors, wall_time=time.perf_counter() - t0)

        sub = os.path.join(config.out_dir, f"n{n_train}") if config.n_sweep \
            else config.out_dir
        records = _map_repeats_flushing(
            one_repeat, config.repeats,
            lambda recs, sub=sub: _write_run_outputs(config, recs, sub))
        all_records[n_train] = records

    lines = config.snapshot_lines() + ["task: annni-binary"]
    if config.n_sweep:
        sweep_rows = ["n,mean_train_error,mean_test_error,mean_abs_gen_error,inv_sqrt_n"]
        for n_train in sizes:
            records = all_records[n_train]
            tr = np.mean([r.final_train_error for r in records])
            te = np.mean([r.final_test_error for r in records])
            gen = np.mean([abs(r.final_test_error - r.final_train_error)
                           for r in records])
            sweep_rows.append(f"{n_train},{_fmt(tr)},{_fmt(te)},{_fmt(gen)},"
                              f"{_fmt(1.0 / math.sqrt(n_train))}")
            lines.append(f"n={n_train}: train err {_mean_std([r.final_train_error for r in records])}, "
                         f"test err {_mean_std([r.final_test_error for r in records])}, "
                         f"mean |gen| {gen:.4f} vs 1/sqrt(n) {1.0 / math.sqrt(n_train):.4f}")
        _write_lines(os.path.join(config.out_dir, "sweep.csv"),
                     config.snapshot_lines() + sweep_rows)
    for n_train in sizes:
        for rec in all_records[n_train]:
            lines.append(f"n={n_train} repeat={rec.repeat}: "
                         f"final train err {rec.final_train_error:.4f}, "
                         f"test err {rec.final_test_error:.4f}, "
                         f"rounds {len(rec.report.rounds)}"
                         + (" [weak-learner failure]"
                            if rec.report.weak_learner_failure else ""))
            lines.append(bound_summary(rec.report))
    lines.append(f"wall time: {time.perf_counter() - t_start:.1f}s")
    _write_lines(os.path.join(config.out_dir, "summary.txt"), lines)
    if config.dump_circuit:
        circuit, meas = factory()
        _write_lines(os.path.join(config.out_dir, "circuit.txt"),
                     dump_circuit(circuit, meas).splitlines())
    return all_records


def _load_digit_pools(config: ExperimentConfig):
    """Image/label pools for the 4-class task, from IDX files or synthetic."""
    if config.train_images:
        with open(config.train_images, "rb") as fh:
            images = parse_idx(fh.read())
        with open(config.train_labels, "rb") as fh:
            labels = parse_idx(fh.read())
        if config.test_images:
            with open(config.test_images, "rb") as fh:
                test_images = parse_idx(fh.read())
            with open(config.test_labels, "rb") as fh:
                test_labels = parse_idx(fh.read())
            return (images, labels), (test_images, test_labels), "idx-files"
        return (images, labels), None, "idx-files"
    images, labels = generate_synthetic_digits(config.synthetic_count,
                                               _child_seed(config.seed, DATA, 9),
                                               config.image_size)
    return (images, labels), None, "synthetic-glyphs"


def _digit_task(config: ExperimentConfig, repeat: int):
    (images, labels), test_pool, source = _load_digit_pools(config)
    dims = (config.target_dim, config.target_dim)
    if test_pool is None:
        train, test = build_mnist_task(images, labels, classes=(0, 1, 2, 3),
                                       target_dims=dims,
                                       num_qubits=config.num_qubits,
                                       n_train=config.n_train, n_test=config.n_test,
                                       seed=_child_seed(config.seed, DATA, repeat))
    else:
        train, _ = build_mnist_task(images, labels, classes=(0, 1, 2, 3),
                                    target_dims=dims, num_qubits=config.num_qubits,
                                    n_train=config.n_train, n_test=0,
                                    seed=_child_seed(config.seed, DATA, repeat))
        _, test = build_mnist_task(test_pool[0], test_pool[1], classes=(0, 1, 2, 3),
                                   target_dims=dims, num_qubits=config.num_qubits,
                                   n_train=0, n_test=config.n_test,
                                   seed=_child_seed(config.seed, TEST_DATA, repeat))
    return train, test, source


def _train_best_checkpoint(circuit, meas, train_data, test_stack, test_labels,
                           iterations, tc: TrainConfig, noise):
    """Unboosted baseline: run `iterations` Adam steps, return the best TEST
    accuracy seen across all checkpoints (optimistic selection by design)."""
    from .learner import AdamState, _class_indices, _evaluate, adam_step
    from .engine import adjoint_observables, compile_circuit, trace_against

    stack = train_data.density_stack(circuit.num_qubits)
    class_idx = _class_indices(train_data.labels, meas)
    rng = substream(tc.init_seed, INIT)
    theta = rng.standard_normal(circuit.num_params)
    compiled = compile_circuit(circuit, noise)
    meas_full = meas.full_projectors(circuit.num_qubits)
    state = AdamState.zeros(circuit.num_params)
    best_acc = -1.0
    test_idx_map = meas.mode == "sign_of_z"

    def test_accuracy(th):
        w = adjoint_observables(compiled, th, meas_full)
        probs = trace_against(test_stack, w)
        classes = np.argmax(probs, axis=1)
        preds = np.where(classes == 0, 1, -1) if test_idx_map else classes + 1
        return float(np.mean(preds == test_labels))

    for it in range(iterations + 1):
        acc = test_accuracy(theta)
        if acc > best_acc:
            best_acc = acc
        if it == iterations:
            break
        _, _, grad, _ = _evaluate(circuit, meas, noise, theta, stack, class_idx,
                                  train_data.weights, tc.prob_floor)
        theta, state = adam_step(theta, grad, state, tc)
    return best_acc


def run_mnist_multiclass(config: ExperimentConfig) -> list:
    """4-class digit classification with optional bagging / unboosted arms."""
    noise = make_noise_model(config.noise, config.noise_rate, config.pool_noise)
    enable_bagging = config.bagging or config.task == "bagging-compare"
    t_start = time.perf_counter()

    def factory():
        return build_qcnn(config.num_qubits, config.blocks, num_classes=4,
                          prelayer=config.prelayer)

    def one_repeat(repeat):
        t0 = time.perf_counter()
        train, test, source = _digit_task(config, repeat)
        data = WeightedDataset.uniform(train)
        tc = TrainConfig(learning_rate=config.learning_rate,
                         iterations=config.iterations,
                         init_seed=_child_seed(config.seed, INIT, repeat))
        ensemble, report = boost_multiclass(data, factory, tc, config.rounds, 4,
                                            noise)
        train_series = [r.ensemble_train_error for r in report.rounds]
        test_stack = stack_states([s for s, _ in test], config.num_qubits)
        test_labels = np.array([y for _, y in test])
        test_series, member_errors = _evaluate_ensemble(ensemble, test_stack,
                                                        test_labels)
        rec = RunRecord(repeat, config.n_train, report, train_series, test_series,
                        member_errors)
        rec.baselines["data_source"] = source
        if enable_bagging:
            bag = bagging(data, factory, tc, config.rounds, 4, noise,
                          seed=_child_seed(config.seed, BAGGING, repeat))
            bag_train = ensemble_predict_batch(bag, data.density_stack(config.num_qubits))
            bag_test = ensemble_predict_batch(bag, test_stack)
            rec.baselines["bagging_train_error"] = float(np.mean(bag_train != data.labels))
            rec.baselines["bagging_test_error"] = float(np.mean(bag_test != test_labels))
        if config.baseline_best:
            circuit, meas = factory()
            budget = config.rounds * config.iterations
            best_tc = replace(tc, init_seed=_child_seed(config.seed, BASELINE, repeat))
            rec.baselines["qcnn_best_test_accuracy"] = _train_best_checkpoint(
                circuit, meas, data, test_stack, test_labels, budget, best_tc, noise)
        rec.wall_time = time.perf_counter() - t0
        return rec

    records = _map_repeats(one_repeat, config.repeats)
    _write_run_outputs(config, records, config.out_dir)

    lines = config.snapshot_lines() + [f"task: {config.task}",
                                       f"data source: {records[0].baselines['data_source']}"]
    lines.append("")
    lines.append("method comparison (mean +/- std over repeats):")
    lines.append(f"  boosted train acc : "
                 f"{_mean_std([1 - r.final_train_error for r in records])}")
    lines.append(f"  boosted test acc  : "
                 f"{_mean_std([1 - r.final_test_error for r in records])}")
    if enable_bagging:
        lines.append(f"  bagging train acc : "
                     f"{_mean_std([1 - r.baselines['bagging_train_error'] for r in records])}")
        lines.append(f"  bagging test acc  : "
                     f"{_mean_std([1 - r.baselines['bagging_test_error'] for r in records])}")
    if config.baseline_best:
        lines.append(f"  qcnn-best test acc: "
                     f"{_mean_std([r.baselines['qcnn_best_test_accuracy'] for r in records])}"
                     " (checkpoint selected on the test set; optimistic)")
    for rec in records:
        best_member = 1 - min(rec.member_test_errors)
        lines.append(f"repeat={rec.repeat}: boosted test acc "
                     f"{1 - rec.final_test_error:.4f}, best single member "
                     f"{best_member:.4f}")
    lines.append(f"wall time: {time.perf_counter() - t_start:.1f}s")
    _write_lines(os.path.join(config.out_dir, "summary.txt"), lines)
    if config.dump_circuit:
        circuit, meas = factory()
        _write_lines(os.path.join(config.out_dir, "circuit.txt"),
                     dump_circuit(circuit, meas).splitlines())
    return records


def run_noise_compare(config: ExperimentConfig) -> list:
    """Noisy boosted vs noisy and noiseless unboosted-best, one seed family."""
    if config.noise == "none":
        raise ValueError("noise-compare needs a noise kind")
    noise = make_noise_model(config.noise, config.noise_rate, config.pool_noise)
    t_start = time.perf_counter()

    def factory():
        return build_qcnn(config.num_qubits, config.blocks, num_classes=4,
                          prelayer=config.prelayer)

    def one_repeat(repeat):
        train, test, source = _digit_task(config, repeat)
        data = WeightedDataset.uniform(train)
        test_stack = stack_states([s for s, _ in test], config.num_qubits)
        test_labels = np.array([y for _, y in test])
        tc = TrainConfig(learning_rate=config.learning_rate,
                         iterations=config.iterations,
                         init_seed=_child_seed(config.seed, INIT, repeat))
        ensemble, report = boost_multiclass(data, factory, tc, config.rounds, 4,
                                            noise)
        train_series = [r.ensemble_train_error for r in report.rounds]
        test_series, member_errors = _evaluate_ensemble(ensemble, test_stack,
                                                        test_labels)
        rec = RunRecord(repeat, config.n_train, report, train_series, test_series,
                        member_errors)
        rec.baselines["data_source"] = source
        circuit, meas = factory()
        budget = config.rounds * config.iterations
        base_tc = replace(tc, init_seed=_child_seed(config.seed, BASELINE, repeat))
        rec.baselines["noisy_best_accuracy"] = _train_best_checkpoint(
            circuit, meas, data, test_stack, test_labels, budget, base_tc, noise)
        rec.baselines["noiseless_best_accuracy"] = _train_best_checkpoint(
            circuit, meas, data, test_stack, test_labels, budget, base_tc, None)
        return rec

    records = _map_repeats(one_repeat, config.repeats)
    _write_run_outputs(config, records, config.out_dir)

    rows = ["repeat,round,boosted_test_accuracy,noisy_best_accuracy,"
            "noiseless_best_accuracy"]
    for rec in records:
        for i in range(len(rec.report.rounds)):
            rows.append(f"{rec.repeat},{i + 1},{_fmt(1 - rec.test_error_series[i])},"
                        f"{_fmt(rec.baselines['noisy_best_accuracy'])},"
                        f"{_fmt(rec.baselines['noiseless_best_accuracy'])}")
    _write_lines(os.path.join(config.out_dir, "noise_compare.csv"),
                 config.snapshot_lines() + rows)

    lines = config.snapshot_lines() + [f"task: noise-compare ({config.noise} "
                                       f"rate {config.noise_rate})"]
    for rec in records:
        noisy_best = rec.baselines["noisy_best_accuracy"]
        noiseless_best = rec.baselines["noiseless_best_accuracy"]
        accs = [1 - e for e in rec.test_error_series]
        crossing = next((i + 1 for i, a in enumerate(accs) if a >= noiseless_best),
                        None)
        lines.append(f"repeat={rec.repeat}: boosted final {accs[-1]:.4f}, "
                     f"noisy best {noisy_best:.4f}, noiseless best "
                     f"{noiseless_best:.4f}, crossing round vs noiseless: "
                     f"{crossing if crossing is not None else 'none'}")
    lines.append("baselines select their checkpoint on the test set (optimistic).")
    lines.append(f"wall time: {time.perf_counter() - t_start:.1f}s")
    _write_lines(os.path.join(config.out_dir, "summary.txt"), lines)
    return records


def run_bounds(config: ExperimentConfig) -> list[str]:
    """Tabulate the risk-bound decomposition over a grid of inputs."""
    from .boost import BoundInputs, full_risk_bound

    k_grid = (1, 10, 43, 120, 240)
    n_grid = (100, 1000, 2000, 8000)
    delta_grid = (0.01, 0.05, 1.0)
    eps_grid = (0.1, 0.3, 0.45)
    rows = ["k,n,delta,rounds,epsilon,train_term,gen_main,gen_extra,confidence,total"]
    for k in k_grid:
        for n in n_grid:
            for delta in delta_grid:
                for eps in eps_grid:
                    b = full_risk_bound(BoundInputs(k, n, delta,
                                                    (eps,) * config.rounds))
                    rows.append(f"{k},{n},{_fmt(delta)},{config.rounds},{_fmt(eps)},"
                                f"{_fmt(b.train_bound)},{_fmt(b.gen_term_main)},"
                                f"{_fmt(b.gen_term_extra)},{_fmt(b.confidence_term)},"
                                f"{_fmt(b.total)}")
    _write_lines(os.path.join(config.out_dir, "bounds.csv"),
                 config.snapshot_lines() + rows)
    _write_lines(os.path.join(config.out_dir, "summary.txt"),
                 config.snapshot_lines()
                 + [f"bounds grid: {len(rows) - 1} rows over K={k_grid}, n={n_grid}, "
                    f"delta={delta_grid}, eps={eps_grid}, T={config.rounds}"])
    return rows


def run_experiment(config: ExperimentConfig):
    if config.task == "annni-binary":
        return run_annni_binary(config)
    if config.task in ("mnist-multiclass", "bagging-compare"):
        return run_mnist_multiclass(config)
    if config.task == "noise-compare":
        return run_noise_compare(config)
    if config.task == "bounds":
        return run_bounds(config)
    raise ValueError(f"unknown task {config.task!r}")
