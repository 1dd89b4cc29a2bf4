"""Command-line entry point: `qboost <task> [--config file] [flags]`."""

from __future__ import annotations

import argparse
import sys

from .experiments import (TASKS, config_from_sources, parse_config_file,
                          run_experiment)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qboost",
        description="Seeded quantum-AdaBoost experiment runs (CSV outputs)")
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--seed", type=int, help="root RNG seed (required here "
                        "or in the config file)")
    parser.add_argument("--rounds", type=int, help="boosting rounds T")
    parser.add_argument("--samples", type=int, dest="n_train",
                        help="training-set size")
    parser.add_argument("--test-samples", type=int, dest="n_test")
    parser.add_argument("--repeats", type=int)
    parser.add_argument("--iterations", type=int, help="Adam iterations per round")
    parser.add_argument("--qubits", type=int, dest="num_qubits")
    parser.add_argument("--blocks", type=int)
    parser.add_argument("--noise", choices=["none", "depolarizing", "amp-damp",
                                            "phase-damp"])
    parser.add_argument("--noise-rate", type=float, dest="noise_rate")
    parser.add_argument("--out", dest="out_dir", help="output directory")
    parser.add_argument("--dump-circuit", action="store_true", default=None,
                        dest="dump_circuit")
    parser.add_argument("--train-images", dest="train_images")
    parser.add_argument("--train-labels", dest="train_labels")
    parser.add_argument("--test-images", dest="test_images")
    parser.add_argument("--test-labels", dest="test_labels")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    file_values = parse_config_file(args.config) if args.config else {}
    overrides = {k: v for k, v in vars(args).items() if k != "config"}
    overrides["task"] = args.task
    try:
        config = config_from_sources(file_values, overrides)
    except (ValueError, KeyError) as exc:
        parser.error(str(exc))
    run_experiment(config)
    print(f"wrote outputs to {config.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
