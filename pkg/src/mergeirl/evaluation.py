"""Prediction quality metrics and the batch evaluation driver."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import Config
from .errors import MergeIrlError, ValidationError
from .predictor import ParamSet, predict
from .scenario import DECISIONS_BY_ROLE, Demonstration
from .trajectory import Trajectory

log = logging.getLogger(__name__)

LABEL_GROUND_TRUTH = "ground_truth"
LABEL_AGGRESSIVE = "aggressive"
LABEL_DANGEROUS = "dangerous"
LABEL_NEUTRAL = "neutral"
VALID_LABELS = (LABEL_GROUND_TRUTH, LABEL_AGGRESSIVE, LABEL_DANGEROUS, LABEL_NEUTRAL)

_PROB_SUM_TOL = 1e-9


def med(predicted: Trajectory | np.ndarray, truth: Trajectory | np.ndarray) -> float:
    """Mean Euclidean distance between paired waypoints."""
    p = predicted.points if isinstance(predicted, Trajectory) else np.asarray(predicted, float)
    t = truth.points if isinstance(truth, Trajectory) else np.asarray(truth, float)
    if p.shape != t.shape:
        raise ValidationError(
            f"trajectories must align pointwise, got {p.shape} vs {t.shape}")
    return float(np.mean(np.linalg.norm(p - t, axis=1)))


@dataclass(frozen=True)
class LabeledPrediction:
    """One example: pattern probabilities with their safety labels.

    Exactly one pattern carries the ground-truth label; the rest are
    aggressive, dangerous, or neutral, with per-pattern weights applied to
    the aggressive and dangerous penalty terms.
    """

    probabilities: np.ndarray
    labels: tuple[str, ...]
    caution_weights: np.ndarray
    danger_weights: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float).reshape(-1)
        wc = np.asarray(self.caution_weights, dtype=float).reshape(-1)
        wd = np.asarray(self.danger_weights, dtype=float).reshape(-1)
        labels = tuple(self.labels)
        m = probs.size
        if m == 0:
            raise ValidationError("an example needs at least one pattern")
        if len(labels) != m or wc.size != m or wd.size != m:
            raise ValidationError("labels and weights must match the pattern count")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValidationError("probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > _PROB_SUM_TOL:
            raise ValidationError(
                f"probabilities sum to {probs.sum():.12f}, expected 1")
        for label in labels:
            if label not in VALID_LABELS:
                raise ValidationError(f"unknown pattern label {label!r}")
        if labels.count(LABEL_GROUND_TRUTH) != 1:
            raise ValidationError("exactly one pattern must be the ground truth")
        if np.any(wc < 0) or np.any(wd < 0):
            raise ValidationError("pattern weights must be non-negative")
        for name, arr in (("probabilities", probs), ("caution_weights", wc),
                          ("danger_weights", wd)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class BrierScores:
    """Decomposed Brier-style decision score; lower is better throughout.

    ground_truth penalizes probability mass missing from the true pattern,
    aggressive penalizes mass on labeled aggressive patterns, dangerous on
    labeled dangerous ones. empty_components names the terms whose label set
    was empty across the batch, making their zero value uninformative.
    """

    ground_truth: float
    aggressive: float
    dangerous: float
    total: float
    empty_components: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"ground_truth": self.ground_truth, "aggressive": self.aggressive,
                "dangerous": self.dangerous, "total": self.total,
                "empty_components": list(self.empty_components)}


def brier_scores(examples: list[LabeledPrediction]) -> BrierScores:
    """Batch Brier decomposition over labeled examples.

    Each term averages over its own label set: squared shortfall on
    ground-truth patterns, weighted squared mass on aggressive and on
    dangerous patterns. A term with no labeled patterns anywhere in the
    batch scores zero and is reported in empty_components.
    """
    if not examples:
        raise ValidationError("at least one labeled example is required")
    truth_terms: list[float] = []
    aggressive_terms: list[float] = []
    dangerous_terms: list[float] = []
    for ex in examples:
        for j, label in enumerate(ex.labels):
            p = float(ex.probabilities[j])
            if label == LABEL_GROUND_TRUTH:
                truth_terms.append((p - 1.0) ** 2)
            elif label == LABEL_AGGRESSIVE:
                aggressive_terms.append(float(ex.caution_weights[j]) * p * p)
            elif label == LABEL_DANGEROUS:
                dangerous_terms.append(float(ex.danger_weights[j]) * p * p)

    empty = []
    g = float(np.mean(truth_terms))            # never empty: one per example
    c = float(np.mean(aggressive_terms)) if aggressive_terms else 0.0
    if not aggressive_terms:
        empty.append("aggressive")
    d = float(np.mean(dangerous_terms)) if dangerous_terms else 0.0
    if not dangerous_terms:
        empty.append("dangerous")
    return BrierScores(ground_truth=g, aggressive=c, dangerous=d, total=g + c + d,
                       empty_components=tuple(empty))


@dataclass(frozen=True)
class SceneResult:
    scene_id: str
    truth_decision: str
    top_decision: str
    top_probability: float
    med_top: float
    probabilities: dict[str, float]


@dataclass(frozen=True)
class EvalReport:
    n_scenes: int
    n_failures: int
    med_mean: float
    med_max: float
    med_min: float
    med_std: float
    brier: BrierScores
    per_scene: tuple[SceneResult, ...]

    def to_dict(self) -> dict:
        return {
            "n_scenes": self.n_scenes,
            "n_failures": self.n_failures,
            "med": {"mean": self.med_mean, "max": self.med_max,
                    "min": self.med_min, "std": self.med_std},
            "brier": self.brier.to_dict(),
            "per_scene": [
                {"scene_id": r.scene_id, "truth_decision": r.truth_decision,
                 "top_decision": r.top_decision,
                 "top_probability": r.top_probability, "med_top": r.med_top,
                 "probabilities": r.probabilities}
                for r in self.per_scene],
        }


def labeled_prediction_for(mixture_probs: np.ndarray, decisions, truth_decision,
                           scene_labels: dict | None) -> LabeledPrediction:
    """Assemble one scored example from mixture probabilities and file labels.

    The ground-truth pattern is the demonstrated decision; labels of the
    remaining patterns come from the label table and default to neutral.
    """
    labels = []
    wc = np.ones(len(decisions))
    wd = np.ones(len(decisions))
    for j, decision in enumerate(decisions):
        if decision is truth_decision:
            labels.append(LABEL_GROUND_TRUTH)
            continue
        entry = (scene_labels or {}).get(decision.value)
        if entry is None:
            labels.append(LABEL_NEUTRAL)
            continue
        labels.append(entry["label"])
        wc[j] = entry.get("w_caution", 1.0)
        wd[j] = entry.get("w_danger", 1.0)
    return LabeledPrediction(probabilities=mixture_probs, labels=tuple(labels),
                             caution_weights=wc, danger_weights=wd)


def evaluate_suite(demos: list[Demonstration], labels: dict[str, dict],
                   params: ParamSet, config: Config | None = None,
                   seed: int = 0, jobs: int = 1) -> EvalReport:
    """Predict every held-out scene and score displacement and decisions.

    Per scene, the mixture's top decision supplies the trajectory for the
    displacement error, and the full probability vector becomes one labeled
    Brier example whose ground truth is the demonstrated decision. Scenes
    whose prediction fails are skipped and counted in n_failures.
    """
    config = config or Config()
    if not demos:
        raise ValidationError("at least one held-out demonstration is required")

    def run(demo: Demonstration):
        return predict(demo.scene, params, config, horizon=demo.future.length,
                       seed=seed, with_samples=False)

    mixtures: list = [None] * len(demos)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run, demo) for demo in demos]
            for i, fut in enumerate(futures):
                try:
                    mixtures[i] = fut.result()
                except MergeIrlError as exc:
                    log.warning("prediction failed for scene %s: %s",
                                demos[i].scene.scene_id, exc)
    else:
        for i, demo in enumerate(demos):
            try:
                mixtures[i] = run(demo)
            except MergeIrlError as exc:
                log.warning("prediction failed for scene %s: %s",
                            demo.scene.scene_id, exc)

    med_values = []
    examples = []
    per_scene = []
    n_failures = 0
    for demo, mixture in zip(demos, mixtures):
        if mixture is None:
            n_failures += 1
            continue
        decisions = DECISIONS_BY_ROLE[demo.scene.role]
        top = mixture.top()
        med_top = med(top.most_likely, demo.future)
        med_values.append(med_top)
        examples.append(labeled_prediction_for(
            mixture.probabilities, decisions, demo.decision,
            labels.get(demo.scene.scene_id)))
        per_scene.append(SceneResult(
            scene_id=demo.scene.scene_id, truth_decision=demo.decision.value,
            top_decision=top.decision.value, top_probability=top.probability,
            med_top=med_top,
            probabilities={c.decision.value: c.probability
                           for c in mixture.components}))

    if not med_values:
        raise ValidationError("every prediction failed; nothing to score")
    arr = np.array(med_values)
    return EvalReport(n_scenes=len(demos), n_failures=n_failures,
                      med_mean=float(arr.mean()), med_max=float(arr.max()),
                      med_min=float(arr.min()), med_std=float(arr.std()),
                      brier=brier_scores(examples), per_scene=tuple(per_scene))
