"""Delimited scene files and the JSON parameter format.

Scene data lives in three CSV files sharing a stem:

    <stem>.csv          trajectories: scene_id, vehicle_role, t, x, y
    <stem>_scenes.csv   per-scene metadata: decision, speed limit, lanes, dims
    <stem>_labels.csv   per-pattern safety labels for evaluation

vehicle_role is "predicted", "host" or "surround_<k>". The predicted and host
vehicles carry history plus future rows on one uniform time grid; surrounding
vehicles carry history only (extra rows are dropped). Files sampled at a
different rate are linearly resampled onto the configured dt.

Learned parameters are stored as a single JSON document carrying the config
fingerprint they were trained under; loading against an incompatible
configuration fails.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .config import Config
from .disc_irl import DiscreteParams
from .errors import ConfigMismatchError, DataFormatError, ValidationError
from .features import ContinuousParams
from .predictor import ParamSet
from .scenario import Decision, Demonstration, LaneGeometry, Role, Scene, VehicleDims
from .trajectory import Trajectory

TRAJECTORY_HEADER = ("scene_id", "vehicle_role", "t", "x", "y")
SCENES_HEADER = ("scene_id", "decision", "v_lim", "vehicle_length",
                 "vehicle_width", "lane_current_y", "lane_target_y")
LABELS_HEADER = ("scene_id", "decision", "label", "w_caution", "w_danger")

PARAMS_FORMAT = "mergeirl-params"
PARAMS_VERSION = 1

_DT_TOL = 1e-9
_GRID_TOL = 1e-6


def scenes_path_for(path: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_scenes{ext or '.csv'}"


def labels_path_for(path: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_labels{ext or '.csv'}"


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------

def write_demonstrations(demos: list[Demonstration], path: str,
                         labels: dict[str, dict] | None = None) -> list[str]:
    """Write scenes with futures to <path> plus the metadata sidecar.

    When `labels` is given, the label table goes to the labels sidecar.
    Returns the paths written.
    """
    if not demos:
        raise ValidationError("nothing to write")
    written = [path, scenes_path_for(path)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_HEADER)
        for demo in demos:
            _write_scene_rows(writer, demo.scene, demo.future)
    with open(scenes_path_for(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCENES_HEADER)
        for demo in demos:
            scene = demo.scene
            writer.writerow([scene.scene_id, demo.decision.value,
                             repr(scene.v_lim), repr(scene.dims.length),
                             repr(scene.dims.width), repr(scene.lanes.current_y),
                             repr(scene.lanes.target_y)])
    if labels is not None:
        write_labels(labels, labels_path_for(path))
        written.append(labels_path_for(path))
    return written


def _write_scene_rows(writer, scene: Scene, future: Trajectory | None) -> None:
    dt = scene.dt
    n_hist = scene.hist_predicted.length

    def rows(role: str, hist_pts, future_pts):
        for i, (x, y) in enumerate(hist_pts):
            writer.writerow([scene.scene_id, role, repr(i * dt), repr(x), repr(y)])
        if future_pts is not None:
            for j, (x, y) in enumerate(future_pts):
                writer.writerow([scene.scene_id, role, repr((n_hist + j) * dt),
                                 repr(x), repr(y)])

    rows("predicted", scene.hist_predicted.points,
         future.points if future is not None else None)
    rows("host", scene.hist_host.points, scene.host_future.points)
    for k, surround in enumerate(scene.hist_surround):
        rows(f"surround_{k}", surround.points, None)


def write_labels(labels: dict[str, dict], path: str) -> None:
    """Label table: labels[scene_id][decision_value] -> {label, w_caution, w_danger}."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LABELS_HEADER)
        for scene_id in labels:
            for decision_value, entry in labels[scene_id].items():
                writer.writerow([scene_id, decision_value, entry["label"],
                                 repr(float(entry.get("w_caution", 1.0))),
                                 repr(float(entry.get("w_danger", 1.0)))])


def read_labels(path: str) -> dict[str, dict]:
    labels: dict[str, dict] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, LABELS_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            try:
                entry = {"label": row["label"].strip(),
                         "w_caution": float(row["w_caution"]),
                         "w_danger": float(row["w_danger"])}
            except (TypeError, KeyError, ValueError) as exc:
                raise DataFormatError(f"{path}: bad label row: {exc}", row=lineno) from exc
            labels.setdefault(row["scene_id"].strip(), {})[row["decision"].strip()] = entry
    return labels


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SceneRecord:
    """One loaded scene with whatever future/decision the file provided."""

    scene: Scene
    future: Trajectory | None
    decision: Decision | None


def read_scene_file(path: str, config: Config | None = None,
                    scenes_path: str | None = None) -> list[SceneRecord]:
    """Read a trajectory CSV plus its metadata sidecar.

    Scenes come back in file order. Histories are clipped to the configured
    history length after resampling; the predicted vehicle's remaining rows
    become the demonstrated future when present.
    """
    config = config or Config()
    scenes_path = scenes_path or scenes_path_for(path)
    meta = _read_scene_meta(scenes_path)
    series = _read_series(path)

    records = []
    for scene_id, vehicles in series.items():
        if scene_id not in meta:
            raise DataFormatError(f"{scenes_path}: no metadata for scene {scene_id!r}")
        records.append(_assemble_scene(scene_id, vehicles, meta[scene_id], config, path))
    unused = set(meta) - set(series)
    if unused:
        raise DataFormatError(
            f"{scenes_path}: metadata for unknown scenes {sorted(unused)}")
    return records


def load_demonstrations(path: str, config: Config | None = None,
                        scenes_path: str | None = None) -> list[Demonstration]:
    """Scenes that must carry a demonstrated future and decision."""
    demos = []
    for record in read_scene_file(path, config, scenes_path):
        if record.future is None:
            raise DataFormatError(
                f"{path}: scene {record.scene.scene_id!r} has no future rows for "
                "the predicted vehicle")
        if record.decision is None:
            raise DataFormatError(
                f"{path}: scene {record.scene.scene_id!r} has no decision in the "
                "metadata sidecar")
        demos.append(Demonstration(scene=record.scene, future=record.future,
                                   decision=record.decision))
    return demos


def load_scenes(path: str, config: Config | None = None,
                scenes_path: str | None = None) -> list[Scene]:
    """Scenes only; demonstrated futures, when present, are dropped."""
    return [record.scene for record in read_scene_file(path, config, scenes_path)]


def _check_header(fieldnames, expected, path: str) -> None:
    got = tuple(name.strip() for name in (fieldnames or ()))
    missing = [name for name in expected if name not in got]
    if missing:
        raise DataFormatError(f"{path}: header misses columns {missing}", row=1)


def _read_series(path: str) -> dict[str, dict[str, list]]:
    """scene_id -> vehicle_role -> [(t, x, y), ...] in file order."""
    series: dict[str, dict[str, list]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, TRAJECTORY_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            try:
                scene_id = row["scene_id"].strip()
                role = row["vehicle_role"].strip()
                sample = (float(row["t"]), float(row["x"]), float(row["y"]))
            except (TypeError, AttributeError, KeyError, ValueError) as exc:
                raise DataFormatError(f"{path}: bad trajectory row: {exc}",
                                      row=lineno) from exc
            if not scene_id:
                raise DataFormatError(f"{path}: empty scene_id", row=lineno)
            if role != "predicted" and role != "host" and not role.startswith("surround_"):
                raise DataFormatError(f"{path}: unknown vehicle_role {role!r}",
                                      row=lineno)
            series.setdefault(scene_id, {}).setdefault(role, []).append(sample)
    if not series:
        raise DataFormatError(f"{path}: no trajectory rows")
    return series


def _uniform_series(samples: list, dt_target: float, label: str) -> np.ndarray:
    """Validate a uniform time grid and resample onto dt_target, shape (n, 2)."""
    arr = np.asarray(sorted(samples), dtype=float)
    t = arr[:, 0]
    if arr.shape[0] < 2:
        raise DataFormatError(f"{label}: needs at least 2 samples")
    steps = np.diff(t)
    dt_src = steps[0]
    if dt_src <= 0 or np.any(np.abs(steps - dt_src) > _GRID_TOL):
        raise DataFormatError(f"{label}: time grid is not uniform")
    if abs(dt_src - dt_target) <= _DT_TOL:
        return arr[:, 1:]
    ratio = dt_target / dt_src
    if abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1:
        return arr[:: int(round(ratio)), 1:]         # exact subsample
    n = int(np.floor((t[-1] - t[0]) / dt_target + 1e-9)) + 1
    grid = t[0] + np.arange(n) * dt_target
    out = np.empty((n, 2))
    out[:, 0] = np.interp(grid, t, arr[:, 1])
    out[:, 1] = np.interp(grid, t, arr[:, 2])
    return out


def _assemble_scene(scene_id: str, vehicles: dict, meta: dict, config: Config,
                    path: str) -> SceneRecord:
    n_hist = config.history_steps
    dt = config.dt

    for required in ("predicted", "host"):
        if required not in vehicles:
            raise DataFormatError(
                f"{path}: scene {scene_id!r} misses vehicle_role {required!r}")

    def split(role: str):
        pts = _uniform_series(vehicles[role], dt, f"{path}: scene {scene_id!r} {role}")
        if pts.shape[0] < n_hist:
            raise DataFormatError(
                f"{path}: scene {scene_id!r} {role}: {pts.shape[0]} samples, "
                f"need {n_hist} history samples")
        return pts[:n_hist], pts[n_hist:]

    pred_hist, pred_future = split("predicted")
    host_hist, host_future = split("host")
    if host_future.shape[0] < 3:
        raise DataFormatError(
            f"{path}: scene {scene_id!r}: host needs at least 3 future samples")

    surround = []
    for role in sorted((r for r in vehicles if r.startswith("surround_")),
                       key=lambda r: int(r.split("_", 1)[1])):
        hist, _ = split(role)                         # future rows dropped
        surround.append(Trajectory.from_points(hist, dt))

    decision = meta["decision"]
    role = decision.role if decision is not None else (
        Role.MERGING if abs(meta["lane_current_y"] - meta["lane_target_y"]) > 1e-9
        else Role.LANE_KEEPING)
    scene = Scene(role=role,
                  hist_predicted=Trajectory.from_points(pred_hist, dt),
                  hist_host=Trajectory.from_points(host_hist, dt),
                  host_future=Trajectory.from_points(host_future, dt),
                  lanes=LaneGeometry(meta["lane_current_y"], meta["lane_target_y"]),
                  v_lim=meta["v_lim"],
                  hist_surround=tuple(surround),
                  dims=VehicleDims(meta["vehicle_length"], meta["vehicle_width"]),
                  scene_id=scene_id)
    if pred_future.shape[0] == 0:
        future = None
    elif pred_future.shape[0] < 3:
        raise DataFormatError(
            f"{path}: scene {scene_id!r}: predicted future needs at least 3 "
            f"samples, got {pred_future.shape[0]}")
    else:
        future = Trajectory.from_points(pred_future, dt)
    return SceneRecord(scene=scene, future=future, decision=decision)


def _read_scene_meta(path: str) -> dict[str, dict]:
    meta: dict[str, dict] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, SCENES_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            try:
                raw = row["decision"].strip()
                decision = Decision(raw) if raw else None
                entry = {"decision": decision,
                         "v_lim": float(row["v_lim"]),
                         "vehicle_length": float(row["vehicle_length"]),
                         "vehicle_width": float(row["vehicle_width"]),
                         "lane_current_y": float(row["lane_current_y"]),
                         "lane_target_y": float(row["lane_target_y"])}
            except (TypeError, AttributeError, KeyError, ValueError) as exc:
                raise DataFormatError(f"{path}: bad scene row: {exc}", row=lineno) from exc
            scene_id = row["scene_id"].strip()
            if scene_id in meta:
                raise DataFormatError(f"{path}: duplicate scene_id {scene_id!r}",
                                      row=lineno)
            meta[scene_id] = entry
    return meta


# ---------------------------------------------------------------------------
# parameter files
# ---------------------------------------------------------------------------

def params_to_dict(params: ParamSet, config: Config) -> dict:
    return {
        "format": PARAMS_FORMAT,
        "version": PARAMS_VERSION,
        "config": config.fingerprint(),
        "continuous": {
            decision.value: {"features": list(p.features),
                             "theta": [float(v) for v in p.theta]}
            for decision, p in sorted(params.continuous.items(),
                                      key=lambda kv: kv[0].value)},
        "discrete": {
            role.value: {"psi": [float(v) for v in p.psi],
                         "feature_mean": [float(v) for v in p.feature_mean],
                         "feature_std": [float(v) for v in p.feature_std]}
            for role, p in sorted(params.discrete.items(),
                                  key=lambda kv: kv[0].value)},
    }


def save_params(params: ParamSet, path: str, config: Config | None = None) -> None:
    """Write the parameter file; identical inputs produce identical bytes."""
    config = config or Config()
    payload = params_to_dict(params, config)
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def load_params(path: str, config: Config | None = None) -> ParamSet:
    """Read a parameter file, enforcing the config fingerprint when given."""
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != PARAMS_FORMAT:
        raise DataFormatError(f"{path}: not a parameter file")
    if payload.get("version") != PARAMS_VERSION:
        raise DataFormatError(
            f"{path}: unsupported parameter file version {payload.get('version')!r}")
    if config is not None:
        _check_fingerprint(payload.get("config", {}), config.fingerprint(), path)

    continuous = {}
    for key, entry in payload.get("continuous", {}).items():
        try:
            decision = Decision(key)
            continuous[decision] = ContinuousParams(
                decision=decision, theta=np.asarray(entry["theta"], dtype=float),
                features=tuple(entry["features"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"{path}: bad continuous entry {key!r}: {exc}") from exc
    discrete = {}
    for key, entry in payload.get("discrete", {}).items():
        try:
            role = Role(key)
            discrete[role] = DiscreteParams(
                role=role, psi=np.asarray(entry["psi"], dtype=float),
                feature_mean=np.asarray(entry["feature_mean"], dtype=float),
                feature_std=np.asarray(entry["feature_std"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"{path}: bad discrete entry {key!r}: {exc}") from exc
    return ParamSet(continuous=continuous, discrete=discrete)


def _check_fingerprint(stored: dict, expected: dict, path: str) -> None:
    diffs = _dict_diff(stored, expected)
    if diffs:
        detail = ", ".join(f"{key}: stored {a!r} vs configured {b!r}"
                           for key, a, b in diffs)
        raise ConfigMismatchError(
            f"{path}: parameters were trained under a different configuration "
            f"({detail})")


def _dict_diff(a: dict, b: dict, prefix: str = "") -> list[tuple[str, object, object]]:
    diffs = []
    for key in sorted(set(a) | set(b)):
        label = f"{prefix}{key}"
        va, vb = a.get(key), b.get(key)
        if isinstance(va, dict) and isinstance(vb, dict):
            diffs.extend(_dict_diff(va, vb, prefix=f"{label}."))
        elif va != vb:
            diffs.append((label, va, vb))
    return diffs
