"""Probabilistic trajectory prediction from learned parameters.

A prediction is a mixture: per candidate decision, the most-likely
trajectory, a weighted sample set around it, and the decision probability
from the learned decision layer.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .config import Config
from .disc_irl import (DiscreteParams, decision_probabilities, noisy_copies,
                       rotation_angle_feature)
from .errors import DependencyError, ValidationError
from .features import ContinuousParams, cost
from .optimizer import optimize_trajectory
from .scenario import DECISIONS_BY_ROLE, Decision, Role, Scene
from .trajectory import Trajectory


@dataclass(frozen=True)
class ParamSet:
    """Learned parameters for every decision plus the per-role decision layer."""

    continuous: dict[Decision, ContinuousParams]
    discrete: dict[Role, DiscreteParams]

    def __post_init__(self):
        for decision, params in self.continuous.items():
            if params.decision is not decision:
                raise ValidationError(
                    f"continuous entry {decision.value} holds parameters for "
                    f"{params.decision.value}")
        for role, params in self.discrete.items():
            if params.role is not role:
                raise ValidationError(
                    f"discrete entry {role.value} holds parameters for "
                    f"{params.role.value}")

    def continuous_for(self, decision: Decision) -> ContinuousParams:
        try:
            return self.continuous[decision]
        except KeyError:
            raise DependencyError(
                f"no continuous parameters for decision {decision.value}") from None

    def discrete_for(self, role: Role) -> DiscreteParams:
        try:
            return self.discrete[role]
        except KeyError:
            raise DependencyError(
                f"no decision-layer parameters for role {role.value}") from None


@dataclass(frozen=True)
class DecisionPrediction:
    """One mixture component: a decision with its trajectory distribution."""

    decision: Decision
    probability: float
    most_likely: Trajectory
    samples: tuple[Trajectory, ...]
    weights: np.ndarray
    min_cost: float
    bearing: float
    converged: bool


@dataclass(frozen=True)
class PredictionMixture:
    """All mixture components of one scene, in canonical decision order."""

    scene_id: str
    role: Role
    horizon: int
    dt: float
    components: tuple[DecisionPrediction, ...]

    @property
    def decisions(self) -> tuple[Decision, ...]:
        return tuple(c.decision for c in self.components)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([c.probability for c in self.components])

    def top(self) -> DecisionPrediction:
        return max(self.components, key=lambda c: c.probability)

    def component(self, decision: Decision) -> DecisionPrediction:
        for c in self.components:
            if c.decision is decision:
                return c
        raise KeyError(decision)


def most_likely_trajectory(params: ContinuousParams, scene: Scene,
                           horizon: int | None = None,
                           config: Config | None = None,
                           yield_params: ContinuousParams | None = None) -> Trajectory:
    """Cost-minimizing future for one decision."""
    config = config or Config()
    horizon = horizon or scene.horizon
    return optimize_trajectory(params, scene, horizon, config, yield_params).trajectory


def trajectory_weights(samples: list[Trajectory], params: ContinuousParams,
                       scene: Scene, config: Config | None = None,
                       yield_params: ContinuousParams | None = None) -> np.ndarray:
    """Normalized exp(-cost) weights over a sample set.

    The lowest cost is subtracted before exponentiation, so weights stay
    finite however expensive the worst sample is.
    """
    config = config or Config()
    if not samples:
        raise ValidationError("at least one sample is required")
    costs = np.array([cost(params, scene, traj, config, yield_params)
                      for traj in samples])
    logw = -(costs - costs.min())
    weights = np.exp(logw)
    return weights / weights.sum()


def predict(scene: Scene, params: ParamSet, config: Config | None = None,
            horizon: int | None = None, seed: int = 0,
            with_samples: bool = True) -> PredictionMixture:
    """Full mixture prediction for one scene.

    The horizon defaults to the host plan's length. Sample noise is drawn
    from one seeded generator in canonical decision order, so results are
    reproducible for a fixed seed.
    """
    config = config or Config()
    horizon = horizon or scene.horizon
    if horizon > scene.horizon:
        raise ValidationError(
            f"horizon {horizon} exceeds the host plan ({scene.horizon} steps)")
    decisions = DECISIONS_BY_ROLE[scene.role]
    disc = params.discrete_for(scene.role)
    yield_params = params.continuous.get(Decision.YIELD)

    host_pts = scene.host_future.points[:horizon]
    rng = np.random.default_rng(seed)
    rows = np.empty((len(decisions), 2))
    partial = []
    for j, decision in enumerate(decisions):
        cont = params.continuous_for(decision)
        needs_yield = "courtesy" in cont.features
        if needs_yield and yield_params is None:
            raise DependencyError(
                "courtesy feature needs yield parameters in the parameter set")
        yp = yield_params if needs_yield else None
        result = optimize_trajectory(cont, scene, horizon, config, yp)
        bearing = rotation_angle_feature(result.trajectory.points, host_pts)
        rows[j] = (bearing, result.cost)
        if with_samples:
            samples = noisy_copies(result.trajectory, config.sample_count,
                                   config.sample_sigma, rng)
            weights = trajectory_weights(samples, cont, scene, config, yp)
        else:
            samples = [result.trajectory]
            weights = np.ones(1)
        partial.append((decision, result, bearing, samples, weights))

    probs = decision_probabilities(disc.psi, disc.standardize(rows))
    components = tuple(
        DecisionPrediction(decision=decision, probability=float(probs[j]),
                           most_likely=result.trajectory, samples=tuple(samples),
                           weights=weights, min_cost=result.cost, bearing=bearing,
                           converged=result.converged)
        for j, (decision, result, bearing, samples, weights) in enumerate(partial))
    return PredictionMixture(scene_id=scene.scene_id, role=scene.role,
                             horizon=horizon, dt=scene.dt, components=components)


def predict_sensitivity(scene: Scene, params: ParamSet,
                        host_futures: list[Trajectory],
                        config: Config | None = None,
                        horizon: int | None = None, seed: int = 0,
                        with_samples: bool = True) -> list[PredictionMixture]:
    """One prediction per candidate host plan, with the rest of the scene fixed.

    Useful for probing how a planned host maneuver shifts the predicted
    decision probabilities.
    """
    out = []
    for future in host_futures:
        variant = dataclasses.replace(scene, host_future=future)
        out.append(predict(variant, params, config, horizon=horizon, seed=seed,
                           with_samples=with_samples))
    return out
