"""Discrete decision-layer learning and trajectory sampling.

Each candidate decision of a scene is summarized by two features: the summed
per-step bearing from the predicted vehicle to the host, and the attained
minimum of the decision's continuous cost. Decision probabilities follow a
softmax over the negated weighted features; the weights are learned by
matching the demonstrated feature mean against the model expectation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .errors import BearingUndefinedError, DependencyError, NumericalError, ValidationError
from .features import ContinuousParams
from .optimizer import optimize_trajectory
from .scenario import DECISIONS_BY_ROLE, Decision, Demonstration, Role, Scene
from .trajectory import Trajectory

log = logging.getLogger(__name__)

DISCRETE_FEATURES = ("bearing", "min_cost")


@dataclass(frozen=True)
class DiscreteParams:
    """Decision-layer weights with the standardization they were trained under."""

    role: Role
    psi: np.ndarray
    feature_mean: np.ndarray
    feature_std: np.ndarray
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float).reshape(-1)
        mean = np.asarray(self.feature_mean, dtype=float).reshape(-1)
        std = np.asarray(self.feature_std, dtype=float).reshape(-1)
        k = len(DISCRETE_FEATURES)
        if psi.size != k or mean.size != k or std.size != k:
            raise ValidationError(f"discrete parameters must have {k} entries")
        if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(mean))
                and np.all(np.isfinite(std))):
            raise ValidationError("discrete parameters must be finite")
        if np.any(std <= 0):
            raise ValidationError("feature_std entries must be positive")
        for name, arr in (("psi", psi), ("feature_mean", mean), ("feature_std", std)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def identity(cls, role: Role, psi: np.ndarray) -> "DiscreteParams":
        """Weights acting on raw (unstandardized) features."""
        k = len(DISCRETE_FEATURES)
        return cls(role=role, psi=psi, feature_mean=np.zeros(k), feature_std=np.ones(k))

    def standardize(self, features: np.ndarray) -> np.ndarray:
        return (np.asarray(features, dtype=float) - self.feature_mean) / self.feature_std


@dataclass(frozen=True)
class DecisionFeature:
    """Per-candidate summary used by the decision layer."""

    decision: Decision
    bearing: float
    min_cost: float
    trajectory: Trajectory          # the cost-minimizing trajectory
    converged: bool = True          # whether that minimization converged

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.bearing, self.min_cost])


def rotation_angle_feature(traj: Trajectory | np.ndarray,
                           host: Trajectory | np.ndarray) -> float:
    """Summed per-step bearing from the trajectory to the host, in (-pi, pi].

    A host dead ahead contributes 0 per step, dead behind pi. Coincident
    positions make the bearing undefined and raise BearingUndefinedError.
    """
    pts = traj.points if isinstance(traj, Trajectory) else np.asarray(traj, float)
    hpts = host.points if isinstance(host, Trajectory) else np.asarray(host, float)
    if pts.shape != hpts.shape:
        raise ValidationError("trajectories must share length for the bearing feature")
    dx = hpts[:, 0] - pts[:, 0]
    dy = hpts[:, 1] - pts[:, 1]
    both_zero = (dx == 0) & (dy == 0)
    if np.any(both_zero):
        idx = int(np.argmax(both_zero))
        raise BearingUndefinedError(
            f"coincident positions at step {idx} leave the bearing undefined", index=idx)
    ang = np.arctan2(dy, dx)
    ang = np.where(ang <= -np.pi, ang + 2.0 * np.pi, ang)
    return float(np.sum(ang))


def min_cost_feature(decision: Decision, scene: Scene,
                     cont_params: ContinuousParams,
                     config: Config | None = None,
                     yield_params: ContinuousParams | None = None,
                     horizon: int | None = None) -> float:
    """Attained minimum of the decision's continuous cost on this scene."""
    config = config or Config()
    horizon = horizon or scene.horizon
    result = optimize_trajectory(cont_params, scene, horizon, config, yield_params)
    return result.cost


def candidate_features(scene: Scene, continuous: dict[Decision, ContinuousParams],
                       config: Config, horizon: int | None = None
                       ) -> dict[Decision, DecisionFeature]:
    """Decision features of every candidate decision of the scene's role.

    Bearings come from the cost-minimizing trajectory of each candidate, so
    the same computation serves training expectations and inference.
    """
    horizon = horizon or scene.horizon
    host_pts = scene.host_future.points[:horizon]
    out = {}
    for decision in DECISIONS_BY_ROLE[scene.role]:
        params = continuous.get(decision)
        if params is None:
            raise DependencyError(
                f"missing continuous parameters for decision {decision.value}")
        yp = continuous.get(Decision.YIELD) if "courtesy" in params.features else None
        if "courtesy" in params.features and yp is None:
            raise DependencyError(
                "courtesy feature needs yield parameters in the parameter set")
        result = optimize_trajectory(params, scene, horizon, config, yp)
        bearing = rotation_angle_feature(result.trajectory.points, host_pts)
        out[decision] = DecisionFeature(decision=decision, bearing=bearing,
                                        min_cost=result.cost,
                                        trajectory=result.trajectory,
                                        converged=result.converged)
    return out


def decision_probabilities(psi: np.ndarray, features: np.ndarray) -> np.ndarray:
    """Softmax over the negated weighted features, one row per decision.

    The maximum utility is subtracted before exponentiation, so zero weights
    give the exact uniform distribution.
    """
    psi = np.asarray(psi, dtype=float).reshape(-1)
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if features.shape[1] != psi.size:
        raise ValidationError("feature columns must match psi length")
    if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(features))):
        raise NumericalError("non-finite decision features or weights")
    utility = -(features @ psi)
    utility -= utility.max()
    weights = np.exp(utility)
    return weights / weights.sum()


def train_discrete(demos: list[Demonstration],
                   continuous: dict[Decision, ContinuousParams],
                   config: Config | None = None,
                   horizon: int | None = None) -> DiscreteParams:
    """Learn decision weights for one role by demonstrated-feature matching.

    The demonstrated side of the gradient uses the recorded trajectory's
    bearing with the attained-minimum cost of the demonstrated decision; the
    expectation side uses every candidate's features. Features are z-scored
    over the demonstrated set and the standardization is stored with the
    weights.
    """
    config = config or Config()
    if not demos:
        raise ValidationError("at least one demonstration is required")
    roles = {demo.scene.role for demo in demos}
    if len(roles) != 1:
        raise ValidationError("demonstrations must share one role")
    role = roles.pop()
    decisions = DECISIONS_BY_ROLE[role]

    emp = np.empty((len(demos), len(DISCRETE_FEATURES)))
    cand = np.empty((len(demos), len(decisions), len(DISCRETE_FEATURES)))
    for i, demo in enumerate(demos):
        h = horizon or demo.future.length
        feats = candidate_features(demo.scene, continuous, config, h)
        for j, decision in enumerate(decisions):
            cand[i, j] = feats[decision].vector
        host_pts = demo.scene.host_future.points[:h]
        emp[i, 0] = rotation_angle_feature(demo.future.points[:h], host_pts)
        emp[i, 1] = feats[demo.decision].min_cost

    mean = emp.mean(axis=0)
    std = emp.std(axis=0)
    std = np.where(std > 1e-12, std, 1.0)
    z_emp = (emp - mean) / std
    z_cand = (cand - mean) / std

    psi = np.zeros(len(DISCRETE_FEATURES))
    emp_mean = z_emp.mean(axis=0)
    converged = False
    iterations = 0
    for it in range(config.disc_max_iter):
        iterations = it + 1
        utility = -np.einsum("ijk,k->ij", z_cand, psi)
        utility -= utility.max(axis=1, keepdims=True)
        probs = np.exp(utility)
        probs /= probs.sum(axis=1, keepdims=True)
        expected = np.einsum("ij,ijk->k", probs, z_cand) / len(demos)
        grad = emp_mean - expected
        if not np.all(np.isfinite(grad)):
            raise NumericalError("non-finite decision-layer gradient")
        psi = psi - config.disc_step_size * grad
        if np.linalg.norm(grad) < config.disc_grad_tol:
            converged = True
            break
    if not converged:
        log.warning("decision-layer training stopped at the iteration cap "
                    "(gradient norm %.2e)", float(np.linalg.norm(grad)))
    return DiscreteParams(role=role, psi=psi, feature_mean=mean, feature_std=std,
                          converged=converged, iterations=iterations)


def noisy_copies(most_likely: Trajectory, count: int, sigma: float,
                 rng: np.random.Generator) -> list[Trajectory]:
    """The most-likely trajectory plus count-1 Gaussian-perturbed copies."""
    if count < 1:
        raise ValidationError("count must be at least 1")
    if sigma < 0:
        raise ValidationError("sigma must be non-negative")
    samples = [most_likely]
    if count > 1:
        noise = rng.normal(0.0, sigma, size=(count - 1, most_likely.coords.size))
        for row in noise:
            samples.append(Trajectory(most_likely.coords + row, most_likely.dt))
    return samples


def sample_trajectories(decision: Decision, scene: Scene,
                        cont_params: ContinuousParams,
                        config: Config | None = None,
                        count: int | None = None, sigma: float | None = None,
                        seed: int = 0,
                        yield_params: ContinuousParams | None = None,
                        horizon: int | None = None) -> list[Trajectory]:
    """Sample candidate futures around the decision's most-likely trajectory.

    Deterministic for a fixed seed; sigma = 0 returns identical copies.
    """
    config = config or Config()
    count = config.sample_count if count is None else count
    sigma = config.sample_sigma if sigma is None else sigma
    horizon = horizon or scene.horizon
    result = optimize_trajectory(cont_params, scene, horizon, config, yield_params)
    rng = np.random.default_rng(seed)
    return noisy_copies(result.trajectory, count, sigma, rng)
