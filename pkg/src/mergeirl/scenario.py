"""Scene and decision data model.

A Scene describes one prediction problem in the lane-aligned frame: the short
history of every vehicle, the interacting (host) vehicle's planned future, the
lane-center offsets and the speed limit. Decisions name the discrete maneuver
of the predicted vehicle; each decision binds an ordered feature set and a
rule for building per-step goal points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .trajectory import Trajectory


class Role(enum.Enum):
    MERGING = "merging"
    LANE_KEEPING = "lane_keeping"


class Decision(enum.Enum):
    MERGE_FRONT = "merge_front"
    MERGE_BACK = "merge_back"
    YIELD = "yield"
    PASS = "pass"

    @property
    def role(self) -> Role:
        if self in (Decision.MERGE_FRONT, Decision.MERGE_BACK):
            return Role.MERGING
        return Role.LANE_KEEPING


DECISIONS_BY_ROLE = {
    Role.MERGING: (Decision.MERGE_FRONT, Decision.MERGE_BACK),
    Role.LANE_KEEPING: (Decision.YIELD, Decision.PASS),
}

# Ordered feature identifiers per decision. Continuous weights bind to this
# order, so it is part of the persisted-parameter contract.
FEATURE_SETS = {
    Decision.YIELD: ("speed", "accel", "jerk", "clearance", "goal"),
    Decision.PASS: ("speed", "idm", "accel", "jerk", "clearance", "goal"),
    Decision.MERGE_BACK: ("speed", "accel", "jerk", "clearance", "goal"),
    Decision.MERGE_FRONT: ("speed", "idm", "accel", "jerk", "clearance", "courtesy", "goal"),
}

# Decisions that aim ahead of the other vehicle; the rest aim behind it.
_AHEAD_DECISIONS = (Decision.PASS, Decision.MERGE_FRONT)


@dataclass(frozen=True)
class VehicleDims:
    length: float = 4.5
    width: float = 1.8

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise ValidationError("vehicle dimensions must be positive")


@dataclass(frozen=True)
class LaneGeometry:
    """Lane-center lateral offsets from the predicted vehicle's perspective."""

    current_y: float
    target_y: float

    def __post_init__(self):
        if not (np.isfinite(self.current_y) and np.isfinite(self.target_y)):
            raise ValidationError("lane offsets must be finite")


@dataclass(frozen=True)
class Scene:
    """One prediction problem.

    hist_* trajectories share dt and length; host_future continues the host
    history one step per sample and bounds the usable prediction horizon.
    """

    role: Role
    hist_predicted: Trajectory
    hist_host: Trajectory
    host_future: Trajectory
    lanes: LaneGeometry
    v_lim: float
    hist_surround: tuple[Trajectory, ...] = field(default_factory=tuple)
    dims: VehicleDims = field(default_factory=VehicleDims)
    scene_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "hist_surround", tuple(self.hist_surround))
        if self.v_lim <= 0:
            raise ValidationError("v_lim must be positive")
        trajs = [self.hist_predicted, self.hist_host, self.host_future, *self.hist_surround]
        dts = {t.dt for t in trajs}
        if max(dts) - min(dts) > 1e-12:
            raise ValidationError("all trajectories in a scene must share dt")
        hist_lengths = {t.length for t in
                        [self.hist_predicted, self.hist_host, *self.hist_surround]}
        if len(hist_lengths) != 1:
            raise ValidationError("historical trajectories must share length")

    @property
    def dt(self) -> float:
        return self.hist_predicted.dt

    @property
    def horizon(self) -> int:
        return self.host_future.length

    def current_state(self) -> tuple[np.ndarray, np.ndarray]:
        """Position and velocity of the predicted vehicle at the end of history."""
        pts = self.hist_predicted.points
        pos = pts[-1]
        vel = (pts[-1] - pts[-2]) / self.dt
        return pos, vel


@dataclass(frozen=True)
class Demonstration:
    """A scene paired with the predicted vehicle's observed future and decision."""

    scene: Scene
    future: Trajectory
    decision: Decision

    def __post_init__(self):
        if self.decision.role is not self.scene.role:
            raise ValidationError(
                f"decision {self.decision.value} does not apply to role {self.scene.role.value}")
        if abs(self.future.dt - self.scene.dt) > 1e-12:
            raise ValidationError("future dt must match the scene dt")


def feature_set_for(decision: Decision, role: Role | None = None) -> tuple[str, ...]:
    """Ordered feature identifiers for a decision.

    `role`, when given, is cross-checked against the decision's role.
    """
    if role is not None and decision.role is not role:
        raise ValidationError(
            f"decision {decision.value} is not available to role {role.value}")
    return FEATURE_SETS[decision]


def goal_point_for(decision: Decision, scene: Scene, t: int,
                   goal_offset: float = 10.0) -> np.ndarray:
    """Goal point for one future step.

    Longitudinally the goal tracks the host vehicle's planned position at the
    same step, offset forward for pass/front-style decisions and backward for
    yield/back-style ones. Laterally it sits on the relevant lane center: the
    target lane when merging, the current lane when lane keeping.
    """
    if not 0 <= t < scene.host_future.length:
        raise ValidationError(
            f"step {t} outside host plan of length {scene.host_future.length}")
    return goal_sequence(decision, scene, t + 1, goal_offset)[t]


def goal_sequence(decision: Decision, scene: Scene, horizon: int,
                  goal_offset: float = 10.0) -> np.ndarray:
    """Per-step goal points over a horizon, shape (horizon, 2)."""
    if decision.role is not scene.role:
        raise ValidationError(
            f"decision {decision.value} does not apply to role {scene.role.value}")
    if horizon < 1 or horizon > scene.host_future.length:
        raise ValidationError(
            f"horizon {horizon} outside host plan of length {scene.host_future.length}")
    host_x = scene.host_future.points[:horizon, 0]
    sign = 1.0 if decision in _AHEAD_DECISIONS else -1.0
    lane_y = (scene.lanes.target_y if scene.role is Role.MERGING
              else scene.lanes.current_y)
    goals = np.empty((horizon, 2))
    goals[:, 0] = host_x + sign * goal_offset
    goals[:, 1] = lane_y
    return goals


def extrapolate_history(traj: Trajectory, horizon: int) -> np.ndarray:
    """Constant-velocity continuation of a history, shape (horizon, 2).

    Step t of the result is (t + 1) samples past the last historical point,
    matching the future-trajectory convention.
    """
    pts = traj.points
    vel = pts[-1] - pts[-2]
    steps = np.arange(1, horizon + 1)[:, None]
    return pts[-1] + steps * vel


def find_leader(reference: Trajectory, surroundings: tuple[Trajectory, ...],
                lane_width: float = 3.6) -> int | None:
    """Index of the reference vehicle's leader among the surroundings.

    The leader is the surrounding vehicle with the smallest positive
    longitudinal gap at the end of history, within half a lane width of the
    reference vehicle's lateral position. Returns None when there is none.
    """
    ref = reference.points[-1]
    best = None
    best_gap = np.inf
    for k, other in enumerate(surroundings):
        pos = other.points[-1]
        if abs(pos[1] - ref[1]) > lane_width / 2:
            continue
        gap = pos[0] - ref[0]
        if gap > 0 and gap < best_gap:
            best = k
            best_gap = gap
    return best
