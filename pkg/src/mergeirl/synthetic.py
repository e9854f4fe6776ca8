"""Synthetic ramp-merge scene generator with known ground-truth parameters.

Scenes live on a straight two-lane layout: the main lane at y = 0 and an
acceleration ramp one lane width above it. Merging-role scenes predict the
ramp vehicle while a main-lane (host) vehicle approaches with a constant
acceleration plan; lane-keeping-role scenes predict the main-lane vehicle
while the host merges in from the ramp. The lead vehicle on the main lane
is placed near the gap-tracking equilibrium of the ahead-style goal, so
the goal and gap pulls of the ground-truth cost agree instead of fighting
each other. Decisions are sampled from the ground-truth decision layer,
and demonstrated futures are the most-likely trajectories plus iid
Gaussian position noise; with noise_std 0 the demonstrations equal the
most-likely trajectories exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .disc_irl import DiscreteParams, candidate_features, decision_probabilities
from .errors import MergeIrlError, NumericalError, ValidationError
from .evaluation import (LABEL_AGGRESSIVE, LABEL_DANGEROUS, LABEL_GROUND_TRUTH,
                         LABEL_NEUTRAL)
from .features import ContinuousParams
from .idm import IdmConfig, desired_gap
from .predictor import ParamSet
from .scenario import (DECISIONS_BY_ROLE, Decision, LaneGeometry, Role, Scene,
                       Demonstration, VehicleDims)
from .trajectory import Trajectory

log = logging.getLogger(__name__)

# Ground-truth continuous weights, in canonical feature order per decision.
# The goal weight dominates so the total cost keeps positive curvature in the
# lateral directions even when braking decisions dip well below the speed
# limit, where the speed term alone would reward weaving toward the limit.
# The remaining weights stay small: each of them pulls the optimum away from
# the goal path during the catch-up or fall-back transient, and the sampled
# scenes should stay dominated by where the driver wants to end up rather
# than by how gingerly the transient is executed.
DEFAULT_THETA_STAR: dict[Decision, tuple[float, ...]] = {
    # (speed, accel, jerk, clearance, goal)
    Decision.YIELD: (0.0005, 0.0005, 0.00005, 0.01, 1.0),
    Decision.MERGE_BACK: (0.0005, 0.0005, 0.00005, 0.01, 1.0),
    # (speed, idm, accel, jerk, clearance, goal)
    Decision.PASS: (0.0005, 0.00003, 0.0005, 0.00005, 0.01, 1.0),
    # (speed, idm, accel, jerk, clearance, courtesy, goal)
    Decision.MERGE_FRONT: (0.0005, 0.00003, 0.0005, 0.00005, 0.01, 0.005, 1.0),
}

# Ground-truth decision weights on raw (bearing, min_cost) features.
DEFAULT_PSI_STAR: dict[Role, tuple[float, float]] = {
    Role.MERGING: (0.02, 0.05),
    Role.LANE_KEEPING: (0.02, 0.05),
}


@dataclass(frozen=True)
class GeneratorConfig:
    """Scene sampling ranges and ground-truth parameters."""

    seed: int = 0
    n_train: int = 20                   # per role
    n_test: int = 10                    # per role
    noise_std: float = 0.1              # per-coordinate demo noise, m
    v_lim: float = 15.0
    speed_range: tuple[float, float] = (12.0, 14.5)
    # Host minus predicted longitudinal offset. Starting the pair roughly
    # side by side keeps both goal styles kinematically gentle: ahead-style
    # goals sit about one goal offset ahead and behind-style ones about one
    # behind, so neither demands a violent speed transient whose inflated
    # desired gap would fight the goal over most of the horizon.
    host_rel_range: tuple[float, float] = (-2.0, 3.0)
    # Spread of speeds around the predicted vehicle's and of the leader
    # around the mid-horizon equilibrium position. Wide spreads put the gap
    # feature far out of equilibrium over most of the horizon, where it
    # drags the optimum away from the goal it is meant to refine.
    speed_spread: float = 0.5
    lead_slack_range: tuple[float, float] = (-3.0, 3.0)
    host_accel_range: tuple[float, float] = (-0.3, 0.3)
    merge_accel_range: tuple[float, float] = (-0.3, 0.3)
    aggressive_margin: float = -1.0     # ahead-style cut-ins from this far behind
    dangerous_margin: float = 1.0       # behind-style merges from this far ahead
    max_retries: int = 50
    theta_star: dict[Decision, tuple[float, ...]] = field(
        default_factory=lambda: dict(DEFAULT_THETA_STAR))
    psi_star: dict[Role, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_PSI_STAR))

    def __post_init__(self):
        if self.n_train < 1 or self.n_test < 0:
            raise ValidationError("n_train must be >= 1 and n_test >= 0")
        if self.noise_std < 0:
            raise ValidationError("noise_std must be non-negative")
        if self.speed_spread < 0:
            raise ValidationError("speed_spread must be non-negative")
        for name in ("speed_range", "host_rel_range", "lead_slack_range",
                     "host_accel_range", "merge_accel_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValidationError(f"{name} must be ordered (lo, hi)")

    def continuous_params(self) -> dict[Decision, ContinuousParams]:
        return {decision: ContinuousParams(decision=decision, theta=np.asarray(theta))
                for decision, theta in self.theta_star.items()}

    def discrete_params(self) -> dict[Role, DiscreteParams]:
        return {role: DiscreteParams.identity(role, np.asarray(psi))
                for role, psi in self.psi_star.items()}

    def param_set(self) -> ParamSet:
        return ParamSet(continuous=self.continuous_params(),
                        discrete=self.discrete_params())


@dataclass(frozen=True)
class GenerationResult:
    train: list[Demonstration]
    test: list[Demonstration]
    labels: dict[str, dict]
    probabilities: dict[str, dict[str, float]]   # ground-truth decision mix


def _constant_velocity_history(end_x: float, y: float, speed: float,
                               n: int, dt: float) -> Trajectory:
    steps = np.arange(-(n - 1), 1)[:, None]
    pts = np.hstack([end_x + steps * speed * dt, np.full((n, 1), y)])
    return Trajectory.from_points(pts, dt)


def _accel_plan(x0: float, v0: float, accel: float, y: np.ndarray | float,
                horizon: int, dt: float) -> Trajectory:
    """Constant-acceleration longitudinal plan, speed floored at zero."""
    xs = np.empty(horizon)
    v, x = v0, x0
    for t in range(horizon):
        v = max(v + accel * dt, 0.0)
        x += v * dt
        xs[t] = x
    ys = np.broadcast_to(np.asarray(y, dtype=float), (horizon,))
    return Trajectory.from_points(np.column_stack([xs, ys]), dt)


def _merge_lateral(ramp_y: float, horizon: int) -> np.ndarray:
    """Smoothstep blend from the ramp center to the main lane."""
    u = np.arange(1, horizon + 1) / horizon
    s = 3.0 * u ** 2 - 2.0 * u ** 3
    return ramp_y * (1.0 - s)


def _equilibrium_lead_x(host_future: Trajectory, v_lead: float,
                        gen: GeneratorConfig, config: Config) -> float:
    """History-end leader position consistent with the ahead-style goal.

    Anchors the leader's extrapolated mid-horizon position one equilibrium
    gap ahead of the mid-horizon goal point, so a vehicle tracking the goal
    sits near its desired spatial headway for most of the plan.
    """
    idm = IdmConfig(desired_speed=config.idm_desired_speed or gen.v_lim,
                    time_headway=config.idm_time_headway,
                    max_accel=config.idm_max_accel,
                    comfort_decel=config.idm_comfort_decel,
                    jam_distance=config.idm_jam_distance)
    pts = host_future.points
    mid = host_future.length // 2
    v_mid = (pts[mid, 0] - pts[mid - 1, 0]) / host_future.dt
    goal_mid_x = pts[mid, 0] + config.goal_offset
    gap = float(desired_gap(v_mid, v_lead, idm))
    # future step t sits (t + 1) samples past the end of history
    return goal_mid_x + gap - v_lead * (mid + 1) * host_future.dt


def _draw_scene(role: Role, rng: np.random.Generator, gen: GeneratorConfig,
                config: Config, scene_id: str) -> Scene:
    dt = config.dt
    n_hist = config.history_steps
    horizon = config.train_horizon
    ramp_y = config.lane_width

    v_pred = rng.uniform(*gen.speed_range)
    v_host = v_pred + rng.uniform(-gen.speed_spread, gen.speed_spread)
    v_lead = v_host + rng.uniform(-gen.speed_spread, gen.speed_spread)
    host_rel = rng.uniform(*gen.host_rel_range)
    slack = rng.uniform(*gen.lead_slack_range)

    if role is Role.MERGING:
        # predicted on the ramp, host and its leader on the main lane
        hist_pred = _constant_velocity_history(0.0, ramp_y, v_pred, n_hist, dt)
        hist_host = _constant_velocity_history(host_rel, 0.0, v_host, n_hist, dt)
        accel = rng.uniform(*gen.host_accel_range)
        host_future = _accel_plan(host_rel, v_host, accel, 0.0, horizon, dt)
        lanes = LaneGeometry(current_y=ramp_y, target_y=0.0)
    else:
        # predicted on the main lane behind its leader, host merging in
        hist_pred = _constant_velocity_history(0.0, 0.0, v_pred, n_hist, dt)
        hist_host = _constant_velocity_history(host_rel, ramp_y, v_host, n_hist, dt)
        accel = rng.uniform(*gen.merge_accel_range)
        plan = _accel_plan(host_rel, v_host, accel, 0.0, horizon, dt).points.copy()
        plan[:, 1] = _merge_lateral(ramp_y, horizon)
        host_future = Trajectory.from_points(plan, dt)
        lanes = LaneGeometry(current_y=0.0, target_y=0.0)

    lead_x = _equilibrium_lead_x(host_future, v_lead, gen, config) + slack
    leader = _constant_velocity_history(lead_x, 0.0, v_lead, n_hist, dt)

    return Scene(role=role, hist_predicted=hist_pred, hist_host=hist_host,
                 host_future=host_future, lanes=lanes, v_lim=gen.v_lim,
                 hist_surround=(leader,),
                 dims=VehicleDims(config.vehicle_length, config.vehicle_width),
                 scene_id=scene_id)


def _label_for(decision: Decision, truth: Decision, margin: float,
               gen: GeneratorConfig) -> str:
    if decision is truth:
        return LABEL_GROUND_TRUTH
    if decision in (Decision.MERGE_FRONT, Decision.PASS):
        return LABEL_AGGRESSIVE if margin < gen.aggressive_margin else LABEL_NEUTRAL
    return LABEL_DANGEROUS if margin > gen.dangerous_margin else LABEL_NEUTRAL


def _sample_demo(role: Role, rng: np.random.Generator, gen: GeneratorConfig,
                 config: Config, scene_id: str,
                 continuous: dict[Decision, ContinuousParams],
                 psi: np.ndarray):
    """One demonstration with its labels; retries degenerate draws."""
    decisions = DECISIONS_BY_ROLE[role]
    for attempt in range(gen.max_retries):
        scene = _draw_scene(role, rng, gen, config, scene_id)
        try:
            feats = candidate_features(scene, continuous, config)
        except MergeIrlError as exc:
            log.debug("scene %s attempt %d rejected: %s", scene_id, attempt, exc)
            continue
        # the filter must not look at the sampled decision, only the scene:
        # requiring every candidate to converge keeps the decision
        # distribution of emitted scenes exactly the softmax
        if not all(feats[d].converged for d in decisions):
            log.debug("scene %s attempt %d rejected: unconverged candidate",
                      scene_id, attempt)
            continue
        rows = np.array([feats[d].vector for d in decisions])
        probs = decision_probabilities(psi, rows)
        truth = decisions[int(rng.choice(len(decisions), p=probs))]
        ml = feats[truth].trajectory
        noise = gen.noise_std * rng.standard_normal(ml.coords.size)
        future = Trajectory(ml.coords + noise, scene.dt)
        # signed longitudinal margin of the predicted vehicle over the host
        margin = scene.hist_predicted.points[-1, 0] - scene.hist_host.points[-1, 0]
        labels = {d.value: {"label": _label_for(d, truth, margin, gen),
                            "w_caution": 1.0, "w_danger": 1.0}
                  for d in decisions}
        prob_map = {d.value: float(probs[j]) for j, d in enumerate(decisions)}
        return Demonstration(scene=scene, future=future, decision=truth), labels, prob_map
    raise NumericalError(
        f"could not draw a usable scene for {scene_id} in {gen.max_retries} tries")


def generate_synthetic(gen: GeneratorConfig | None = None,
                       config: Config | None = None) -> GenerationResult:
    """Deterministic synthetic train/test demonstrations for both roles."""
    gen = gen or GeneratorConfig()
    config = config or Config()
    rng = np.random.default_rng(gen.seed)
    continuous = gen.continuous_params()

    train: list[Demonstration] = []
    test: list[Demonstration] = []
    labels: dict[str, dict] = {}
    probabilities: dict[str, dict[str, float]] = {}
    for role in (Role.MERGING, Role.LANE_KEEPING):
        psi = np.asarray(gen.psi_star[role], dtype=float)
        for kind, count, bucket in (("train", gen.n_train, train),
                                    ("test", gen.n_test, test)):
            for i in range(count):
                scene_id = f"{role.value}_{kind}_{i:03d}"
                demo, scene_labels, prob_map = _sample_demo(
                    role, rng, gen, config, scene_id, continuous, psi)
                bucket.append(demo)
                labels[scene_id] = scene_labels
                probabilities[scene_id] = prob_map
    return GenerationResult(train=train, test=test, labels=labels,
                            probabilities=probabilities)


# ---------------------------------------------------------------------------
# fixed benchmark pair: the same merge scene under two host plans
# ---------------------------------------------------------------------------

def benchmark_params(config: Config | None = None) -> ParamSet:
    """Ground-truth parameters acting on raw decision features."""
    gen = GeneratorConfig()
    return gen.param_set()


def benchmark_scene_pair(config: Config | None = None) -> tuple[Scene, Scene]:
    """A merging scene under a gap-opening and a gap-closing host plan.

    Both scenes share histories, lanes and the leader; only the host plan
    differs: braking opens the gap ahead of the host for a front merge,
    accelerating closes it. Predictions on the pair should shift probability
    mass toward the front merge when the gap opens.
    """
    config = config or Config()
    dt = config.dt
    n_hist = config.history_steps
    horizon = config.train_horizon
    ramp_y = config.lane_width

    v_pred, v_host, v_lead = 12.0, 12.5, 12.5
    host_rel, lead_gap = 9.0, 45.0
    hist_pred = _constant_velocity_history(0.0, ramp_y, v_pred, n_hist, dt)
    hist_host = _constant_velocity_history(host_rel, 0.0, v_host, n_hist, dt)
    leader = _constant_velocity_history(host_rel + lead_gap, 0.0, v_lead, n_hist, dt)
    lanes = LaneGeometry(current_y=ramp_y, target_y=0.0)

    def scene(accel: float, scene_id: str) -> Scene:
        plan = _accel_plan(host_rel, v_host, accel, 0.0, horizon, dt)
        return Scene(role=Role.MERGING, hist_predicted=hist_pred,
                     hist_host=hist_host, host_future=plan, lanes=lanes,
                     v_lim=15.0, hist_surround=(leader,),
                     dims=VehicleDims(config.vehicle_length, config.vehicle_width),
                     scene_id=scene_id)

    return scene(-1.5, "benchmark_gap_opening"), scene(1.5, "benchmark_gap_closing")
