"""Command-line interface: generate, train, predict, evaluate.

Every command writes its delimited or JSON outputs plus rendered figures into
--out, together with a run manifest. Exit codes: 0 success, 2 input or
validation error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import Config
from .cont_irl import train_continuous
from .dataio import (labels_path_for, load_demonstrations, load_params, load_scenes,
                     read_labels, save_params, write_demonstrations)
from .disc_irl import train_discrete
from .errors import DependencyError, MergeIrlError, NumericalError, ValidationError
from .evaluation import evaluate_suite
from .predictor import ParamSet, predict
from .scenario import DECISIONS_BY_ROLE, Decision, Role
from .synthetic import GeneratorConfig, generate_synthetic

log = logging.getLogger("mergeirl")

# training order: yield first, its weights feed the courtesy-bearing decision
_TRAIN_ORDER = (Decision.YIELD, Decision.PASS, Decision.MERGE_BACK, Decision.MERGE_FRONT)


def _write_json(payload: dict, path: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _write_manifest(out_dir: str, command: str, config: Config, seed: int,
                    inputs: list[str], outputs: list[str], started: float) -> str:
    path = os.path.join(out_dir, "manifest.json")
    _write_json({
        "command": command,
        "package_version": __version__,
        "seed": seed,
        "config": config.to_dict(),
        "inputs": sorted(inputs),
        "outputs": sorted(os.path.relpath(p, out_dir) for p in outputs),
        "wall_time_s": round(time.monotonic() - started, 3),
    }, path)
    return path


def _load_config(args) -> Config:
    config = Config.from_json(args.config) if args.config else Config()
    if getattr(args, "jobs", None):
        config = config.replace(jobs=args.jobs)
    return config


def _out_dir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    started = time.monotonic()
    config = _load_config(args)
    out = _out_dir(args)
    gen = GeneratorConfig(seed=args.seed, n_train=args.train, n_test=args.test,
                          noise_std=args.noise)
    log.info("generating %d train and %d test scenes per role (seed %d)",
             gen.n_train, gen.n_test, gen.seed)
    result = generate_synthetic(gen, config)

    outputs = []
    train_path = os.path.join(out, "train.csv")
    test_path = os.path.join(out, "test.csv")
    train_labels = {d.scene.scene_id: result.labels[d.scene.scene_id]
                    for d in result.train}
    outputs += write_demonstrations(result.train, train_path, labels=train_labels)
    if result.test:
        test_labels = {d.scene.scene_id: result.labels[d.scene.scene_id]
                       for d in result.test}
        outputs += write_demonstrations(result.test, test_path, labels=test_labels)
    outputs.append(_write_manifest(out, "generate", config, args.seed, [],
                                   outputs, started))
    log.info("wrote %d files to %s", len(outputs), out)
    return 0


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def cmd_train(args) -> int:
    started = time.monotonic()
    config = _load_config(args)
    if args.restarts is not None:
        config = config.replace(train_restarts=args.restarts)
    out = _out_dir(args)
    demos = load_demonstrations(args.data, config)
    roles = ((Role.MERGING, Role.LANE_KEEPING) if args.role == "both"
             else (Role(args.role),))

    continuous = {}
    if args.params_in:
        seed_set = load_params(args.params_in, config)
        continuous.update(seed_set.continuous)

    by_decision = {}
    for demo in demos:
        by_decision.setdefault(demo.decision, []).append(demo)

    traces = {}
    runs = {}
    wanted = [d for d in _TRAIN_ORDER if d.role in roles]
    for decision in wanted:
        batch = by_decision.get(decision, [])
        if not batch:
            log.warning("no demonstrations for %s; skipping", decision.value)
            continue
        yp = continuous.get(Decision.YIELD)
        log.info("training %s on %d demonstrations", decision.value, len(batch))
        run = train_continuous(batch, decision, config, yield_params=yp,
                               seed=args.seed)
        runs[decision] = run
        continuous[decision] = run.params()
        traces[decision.value] = run.objective_trace
        log.info("  objective %.6g after %d iterations (converged=%s)",
                 run.objective_trace[-1], run.iterations, run.converged)

    discrete = {}
    for role in roles:
        batch = [d for d in demos if d.scene.role is role]
        missing = [d.value for d in DECISIONS_BY_ROLE[role] if d not in continuous]
        if not batch or missing:
            log.warning("skipping decision-layer training for %s "
                        "(missing: %s)", role.value, ", ".join(missing) or "data")
            continue
        log.info("training decision layer for %s on %d demonstrations",
                 role.value, len(batch))
        discrete[role] = train_discrete(batch, continuous, config)

    if not continuous:
        raise ValidationError("no decision produced trainable demonstrations")

    outputs = []
    params_path = os.path.join(out, "params.json")
    save_params(ParamSet(continuous=continuous, discrete=discrete), params_path,
                config)
    outputs.append(params_path)

    trace_path = os.path.join(out, "training_trace.csv")
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["decision", "iteration", "objective"])
        for decision, run in runs.items():
            for i, value in enumerate(run.objective_trace):
                writer.writerow([decision.value, i, repr(float(value))])
    outputs.append(trace_path)

    if traces:
        from .plots import save_training_figure
        fig_path = os.path.join(out, "training_curves.png")
        save_training_figure(traces, fig_path)
        outputs.append(fig_path)

    inputs = [args.data] + ([args.params_in] if args.params_in else [])
    outputs.append(_write_manifest(out, "train", config, args.seed, inputs,
                                   outputs, started))
    log.info("wrote parameters to %s", params_path)
    return 0


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------

def _mixture_payload(mixture) -> dict:
    return {
        "scene_id": mixture.scene_id,
        "role": mixture.role.value,
        "horizon": mixture.horizon,
        "dt": mixture.dt,
        "decisions": [
            {"decision": c.decision.value,
             "probability": c.probability,
             "min_cost": c.min_cost,
             "bearing": c.bearing,
             "converged": c.converged,
             "most_likely": [[float(x), float(y)] for x, y in c.most_likely.points]}
            for c in mixture.components],
    }


def _write_samples_csv(mixture, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["decision", "sample", "weight", "t", "x", "y"])
        for comp in mixture.components:
            for s, (traj, weight) in enumerate(zip(comp.samples, comp.weights)):
                for t, (x, y) in enumerate(traj.points):
                    writer.writerow([comp.decision.value, s, repr(float(weight)),
                                     repr((t + 1) * mixture.dt), repr(x), repr(y)])


def cmd_predict(args) -> int:
    started = time.monotonic()
    config = _load_config(args)
    if args.samples is not None:
        config = config.replace(sample_count=args.samples)
    out = _out_dir(args)
    params = load_params(args.params, config)
    scenes = load_scenes(args.data, config)
    if args.scene_id:
        scenes = [s for s in scenes if s.scene_id == args.scene_id]
        if not scenes:
            raise ValidationError(f"scene {args.scene_id!r} not found in {args.data}")

    def run(scene):
        horizon = args.horizon or min(config.predict_horizon, scene.horizon)
        return predict(scene, params, config, horizon=horizon, seed=args.seed)

    if config.jobs > 1 and len(scenes) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            mixtures = list(pool.map(run, scenes))
    else:
        mixtures = [run(scene) for scene in scenes]

    from .plots import save_prediction_figure
    outputs = []
    for scene, mixture in zip(scenes, mixtures):
        stem = scene.scene_id or "scene"
        json_path = os.path.join(out, f"prediction_{stem}.json")
        _write_json(_mixture_payload(mixture), json_path)
        samples_path = os.path.join(out, f"samples_{stem}.csv")
        _write_samples_csv(mixture, samples_path)
        fig_path = os.path.join(out, f"prediction_{stem}.png")
        save_prediction_figure(mixture, scene, fig_path)
        outputs += [json_path, samples_path, fig_path]
        top = mixture.top()
        log.info("scene %s: top decision %s (p=%.3f)", stem,
                 top.decision.value, top.probability)

    outputs.append(_write_manifest(out, "predict", config, args.seed,
                                   [args.data, args.params], outputs, started))
    return 0


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def cmd_evaluate(args) -> int:
    started = time.monotonic()
    config = _load_config(args)
    out = _out_dir(args)
    params = load_params(args.params, config)
    demos = load_demonstrations(args.data, config)
    labels_path = args.labels or labels_path_for(args.data)
    labels = read_labels(labels_path)

    report = evaluate_suite(demos, labels, params, config, seed=args.seed,
                            jobs=config.jobs)
    payload = report.to_dict()

    outputs = []
    report_path = os.path.join(out, "report.json")
    _write_json(payload, report_path)
    outputs.append(report_path)

    from .plots import save_evaluation_figure
    fig_path = os.path.join(out, "evaluation.png")
    save_evaluation_figure(payload, fig_path)
    outputs.append(fig_path)

    outputs.append(_write_manifest(out, "evaluate", config, args.seed,
                                   [args.data, args.params, labels_path],
                                   outputs, started))
    log.info("evaluated %d scenes (%d failures): mean displacement %.3f m, "
             "decision score %.4f", report.n_scenes, report.n_failures,
             report.med_mean, report.brier.total)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mergeirl",
        description="Hierarchical inverse-RL trajectory prediction for "
                    "highway merges")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--jobs", type=int, default=None,
                       help="worker threads for batch steps")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("generate", help="write synthetic train/test scene files")
    common(p)
    p.add_argument("--train", type=int, default=20, help="train scenes per role")
    p.add_argument("--test", type=int, default=10, help="test scenes per role")
    p.add_argument("--noise", type=float, default=0.1,
                   help="demonstration waypoint noise [m]")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="learn continuous and decision-layer weights")
    common(p)
    p.add_argument("--data", required=True, help="demonstration CSV")
    p.add_argument("--role", choices=["both", "merging", "lane_keeping"],
                   default="both")
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--params-in", default=None,
                   help="existing parameter file supplying dependencies")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict scenes with learned parameters")
    common(p)
    p.add_argument("--data", required=True, help="scene CSV")
    p.add_argument("--params", required=True, help="parameter JSON")
    p.add_argument("--scene-id", default=None, help="predict one scene only")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--samples", type=int, default=None,
                   help="trajectory samples per decision")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions on held-out scenes")
    common(p)
    p.add_argument("--data", required=True, help="held-out demonstration CSV")
    p.add_argument("--params", required=True, help="parameter JSON")
    p.add_argument("--labels", default=None,
                   help="label CSV (default: <data stem>_labels.csv)")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (NumericalError, np.linalg.LinAlgError, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        return 4
    except FileNotFoundError as exc:
        log.error("missing input: %s", exc)
        return 2
    except MergeIrlError as exc:
        log.error("%s", exc)
        return 2
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
