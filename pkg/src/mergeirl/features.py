"""Continuous trajectory-cost features with analytic first and second derivatives.

Every feature maps a candidate future trajectory of the predicted vehicle to a
non-negative scalar; the continuous cost of a decision is a weighted sum over
its feature set. Derivatives are taken with respect to the flat coordinate
vector [x0, y0, ..., x_{L-1}, y_{L-1}] and follow the same forward-difference,
hold-last conventions as `trajectory.differentiate`.

Feature identifiers:

    speed       sum_t (v_t - v_lim)^2
    idm         sum_t (s_t - s_t^des)^2, gap tracking behind the front vehicle
    accel       sum_t a_t^2
    jerk        sum_t j_t^2
    clearance   sum_t sum_k exp(-dx^2/l^2 - dy^2/w^2) against other vehicles
    courtesy    extra cost the trajectory inflicts on the host vehicle,
                max-clamped at zero (softplus-smoothed while differentiating)
    goal        sum_t |p_t - g_t|^2 against per-step goal points
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import Config
from .errors import (
    CrossingOrderError,
    DependencyError,
    NumericalError,
    ValidationError,
)
from .idm import IdmConfig, desired_gap, rollout
from .scenario import (
    FEATURE_SETS,
    Decision,
    Role,
    Scene,
    extrapolate_history,
    feature_set_for,
    find_leader,
    goal_sequence,
)
from .trajectory import Trajectory, differentiate

FEATURE_NAMES = ("speed", "idm", "accel", "jerk", "clearance", "courtesy", "goal")


@dataclass(frozen=True)
class ContinuousParams:
    """Feature weights of one decision's continuous cost.

    `features` fixes the ordering the weights bind to; it defaults to the
    decision's canonical feature set.
    """

    decision: Decision
    theta: np.ndarray
    features: tuple[str, ...] = ()

    def __post_init__(self):
        features = tuple(self.features) if self.features else feature_set_for(self.decision)
        unknown = set(features) - set(FEATURE_NAMES)
        if unknown:
            raise ValidationError(f"unknown feature identifiers: {sorted(unknown)}")
        theta = np.asarray(self.theta, dtype=float).reshape(-1)
        if theta.size != len(features):
            raise ValidationError(
                f"theta has {theta.size} entries for {len(features)} features")
        if not np.all(np.isfinite(theta)) or np.any(theta < 0):
            raise ValidationError("theta entries must be finite and non-negative")
        theta = theta.copy()
        theta.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "features", features)


@dataclass(frozen=True)
class CostReport:
    """Cost with its derivatives at one trajectory."""

    cost: float
    gradient: np.ndarray      # (2L,)
    hessian: np.ndarray       # (2L, 2L), symmetric
    features: np.ndarray      # feature values in params order


# ---------------------------------------------------------------------------
# kinematic chain pieces
# ---------------------------------------------------------------------------

@lru_cache(maxsize=128)
def _chain_matrices(L: int, dt: float):
    """Constant matrices of the padded difference chain for length-L trajectories."""
    w_speed = np.ones(L - 1)
    w_speed[-1] = 2.0                       # held last speed counts twice
    d_acc = (np.eye(L - 2, L - 1, 1) - np.eye(L - 2, L - 1)) / dt
    w_acc = np.ones(L - 2)
    w_acc[-1] = 3.0                         # held last acceleration counts three times
    q_acc = d_acc.T @ (w_acc[:, None] * d_acc)
    if L >= 4:
        d_jerk = (np.eye(L - 3, L - 2, 1) - np.eye(L - 3, L - 2)) / dt
        dj = d_jerk @ d_acc
        q_jerk = dj.T @ dj
    else:
        q_jerk = np.zeros((L - 1, L - 1))
    for m in (w_speed, w_acc, q_acc, q_jerk):
        m.flags.writeable = False
    return w_speed, w_acc, q_acc, q_jerk


class _Kinematics:
    """Speed chain of one coordinate vector plus its Jacobian structures."""

    def __init__(self, pts: np.ndarray, dt: float):
        self.pts = pts
        self.dt = dt
        self.L = pts.shape[0]
        disp = np.diff(pts, axis=0)
        norms = np.linalg.norm(disp, axis=1)
        self.norms = norms
        safe = np.maximum(norms, 1e-12)
        self.unit = disp / safe[:, None]
        self.v_core = norms / dt                      # L-1 measured speeds
        self.v_pad = np.append(self.v_core, self.v_core[-1])

    def jac(self) -> np.ndarray:
        """Dense Jacobian of the measured speeds, shape (L-1, 2L)."""
        L, dt = self.L, self.dt
        jac = np.zeros((L - 1, 2 * L))
        r = np.arange(L - 1)
        jac[r, 2 * r] = -self.unit[:, 0] / dt
        jac[r, 2 * r + 1] = -self.unit[:, 1] / dt
        jac[r, 2 * r + 2] = self.unit[:, 0] / dt
        jac[r, 2 * r + 3] = self.unit[:, 1] / dt
        return jac

    def jac_pad(self, jac: np.ndarray) -> np.ndarray:
        return np.vstack([jac, jac[-1]])

    def curvature_blocks(self) -> np.ndarray:
        """(L-1, 2, 2) second-derivative blocks of each measured speed."""
        denom = np.maximum(self.norms, 1e-12) * self.dt
        eye = np.eye(2)
        return (eye[None, :, :]
                - self.unit[:, :, None] * self.unit[:, None, :]) / denom[:, None, None]


def _scatter_speed_curvature(L: int, coeff: np.ndarray, blocks: np.ndarray,
                             out: np.ndarray) -> None:
    """Add sum_t coeff[t] * d2 v_t / dz2 into `out` (2L x 2L)."""
    r = 2 * np.arange(L - 1)
    cs = coeff[:, None, None] * blocks
    for a in (0, 1):
        for b in (0, 1):
            np.add.at(out, (r + a, r + b), cs[:, a, b])
            np.add.at(out, (r + 2 + a, r + 2 + b), cs[:, a, b])
            np.add.at(out, (r + a, r + 2 + b), -cs[:, a, b])
            np.add.at(out, (r + 2 + a, r + b), -cs[:, a, b])


def _pad_coeff(coeff_pad: np.ndarray) -> np.ndarray:
    """Fold coefficients on padded speeds onto the measured speeds."""
    core = coeff_pad[:-1].copy()
    core[-1] += coeff_pad[-1]
    return core


# ---------------------------------------------------------------------------
# standalone feature values
# ---------------------------------------------------------------------------

def speed_feature(traj: Trajectory, v_lim: float) -> float:
    """Squared deviation from the speed limit, summed over all steps."""
    prof = differentiate(traj)
    return float(np.sum((prof.speeds - v_lim) ** 2))


def accel_feature(traj: Trajectory) -> float:
    """Sum of squared accelerations."""
    prof = differentiate(traj)
    return float(np.sum(prof.accels ** 2))


def jerk_feature(traj: Trajectory) -> float:
    """Sum of squared jerks (defined from the second step)."""
    prof = differentiate(traj)
    return float(np.sum(prof.jerks ** 2))


def _padded_speeds(pts: np.ndarray, dt: float) -> np.ndarray:
    v_core = np.linalg.norm(np.diff(pts, axis=0), axis=1) / dt
    return np.append(v_core, v_core[-1])


def _idm_residuals(own_pts: np.ndarray, front_pts: np.ndarray, dt: float,
                   idm: IdmConfig) -> np.ndarray:
    """Per-step gap-tracking residuals s_t - s_t^des; raises on crossing order."""
    gap = front_pts[:, 0] - own_pts[:, 0]
    if np.any(gap < 0):
        idx = int(np.argmax(gap < 0))
        raise CrossingOrderError(
            f"front vehicle behind the predicted vehicle at step {idx}", index=idx)
    v_own = _padded_speeds(own_pts, dt)
    v_front = _padded_speeds(front_pts, dt)
    return gap - desired_gap(v_own, v_front, idm)


def idm_feature(traj: Trajectory, front: Trajectory | np.ndarray, idm: IdmConfig) -> float:
    """Squared deviation from the equilibrium car-following gap."""
    front_pts = front.points if isinstance(front, Trajectory) else np.asarray(front, float)
    if front_pts.shape != traj.points.shape:
        raise ValidationError("front trajectory must match the predicted one in length")
    res = _idm_residuals(traj.points, front_pts, traj.dt, idm)
    return float(np.sum(res ** 2))


def _kernel_terms(dx: np.ndarray, dy: np.ndarray, l: float, w: float) -> np.ndarray:
    return np.exp(-(dx ** 2) / l ** 2 - (dy ** 2) / w ** 2)


def clearance_feature(traj: Trajectory, scene: Scene, config: Config | None = None) -> float:
    """Proximity penalty against the host plan and extrapolated surroundings."""
    config = config or Config()
    others = _other_positions(scene, traj.length)
    l, w = _kernel_axes(config)
    dx = traj.points[None, :, 0] - others[:, :, 0]
    dy = traj.points[None, :, 1] - others[:, :, 1]
    return float(np.sum(_kernel_terms(dx, dy, l, w)))


def goal_feature(traj: Trajectory, goals: np.ndarray) -> float:
    """Squared distance to per-step goal points."""
    goals = np.asarray(goals, dtype=float)
    if goals.shape != (traj.length, 2):
        raise ValidationError("goals must have shape (L, 2)")
    return float(np.sum((traj.points - goals) ** 2))


def courtesy_feature(traj: Trajectory, scene: Scene, yield_params: ContinuousParams,
                     config: Config | None = None) -> float:
    """Extra cost the trajectory imposes on the host, clamped at zero.

    Both sides of the difference evaluate the host's yield-style cost in the
    scene where the predicted vehicle follows `traj`; they differ only in the
    host trajectory used: its actual plan versus its default car-following
    rollout behind its current leader (computed ignoring the predicted
    vehicle). No interference, in the sense of the plan matching the rollout,
    gives exactly zero.
    """
    config = config or Config()
    _check_traj(scene, traj)
    if traj.length > scene.host_future.length:
        raise ValidationError(
            f"trajectory length {traj.length} exceeds host plan length "
            f"{scene.host_future.length}")
    cc = _build_courtesy(scene, yield_params, traj.length, config)
    delta = _courtesy_delta(cc, traj.points, derivs=False)[0]
    return float(max(delta, 0.0))


# ---------------------------------------------------------------------------
# evaluation context
# ---------------------------------------------------------------------------

def _kernel_axes(config: Config) -> tuple[float, float]:
    return (config.kernel_length or config.vehicle_length,
            config.kernel_width or config.vehicle_width)


def _other_positions(scene: Scene, horizon: int) -> np.ndarray:
    """Future positions of the host and surroundings, shape (N+1, horizon, 2)."""
    if horizon > scene.host_future.length:
        raise ValidationError(
            f"horizon {horizon} exceeds host plan length {scene.host_future.length}")
    rows = [scene.host_future.points[:horizon]]
    rows += [extrapolate_history(s, horizon) for s in scene.hist_surround]
    return np.stack(rows, axis=0)


def _idm_for(scene: Scene, config: Config) -> IdmConfig:
    return IdmConfig(
        desired_speed=config.idm_desired_speed or scene.v_lim,
        time_headway=config.idm_time_headway,
        max_accel=config.idm_max_accel,
        comfort_decel=config.idm_comfort_decel,
        jam_distance=config.idm_jam_distance,
    )


@dataclass
class _CourtesyContext:
    host_pts: np.ndarray          # (H, 2) actual host plan
    rollout_pts: np.ndarray       # (H, 2) default host rollout
    theta: dict                   # yield weights by feature name
    const_delta: float            # part of the cost difference independent of traj
    goal_grad_x: np.ndarray       # (H,) constant d(delta)/d(x_t)
    s0: float                     # goal offset of the host's yield goal
    l: float
    w: float
    kappa: float


@dataclass
class FeatureContext:
    """Everything needed to evaluate one decision's features on a scene."""

    decision: Decision
    features: tuple[str, ...]
    horizon: int
    dt: float
    v_lim: float
    goals: np.ndarray | None
    others: np.ndarray | None             # (N+1, H, 2)
    front: np.ndarray | None              # (H, 2) or None for free road
    front_speed: np.ndarray | None        # (H,)
    idm: IdmConfig
    l: float
    w: float
    courtesy: _CourtesyContext | None


def _resolve_front(decision: Decision, scene: Scene, horizon: int,
                   config: Config) -> np.ndarray | None:
    """Front-vehicle future for the gap-tracking feature, or None."""
    if scene.role is Role.MERGING:
        reference = scene.hist_host      # leader of the host on the target lane
    else:
        reference = scene.hist_predicted  # own leader
    k = find_leader(reference, scene.hist_surround, config.lane_width)
    if k is None:
        return None
    return extrapolate_history(scene.hist_surround[k], horizon)


def _yield_theta_map(yield_params: ContinuousParams) -> dict:
    if yield_params.decision is not Decision.YIELD:
        raise ValidationError("courtesy requires yield-decision parameters")
    return dict(zip(yield_params.features, yield_params.theta))


def _host_cost_parts(pts: np.ndarray, dt: float, v_lim: float, theta: dict,
                     surr: np.ndarray, lane_y: float, l: float, w: float) -> float:
    """Trajectory-independent yield-cost terms of one host trajectory."""
    traj = Trajectory.from_points(pts, dt)
    total = theta.get("speed", 0.0) * speed_feature(traj, v_lim)
    total += theta.get("accel", 0.0) * accel_feature(traj)
    total += theta.get("jerk", 0.0) * jerk_feature(traj)
    if surr.size and "clearance" in theta:
        dx = pts[None, :, 0] - surr[:, :, 0]
        dy = pts[None, :, 1] - surr[:, :, 1]
        total += theta["clearance"] * float(np.sum(_kernel_terms(dx, dy, l, w)))
    total += theta.get("goal", 0.0) * float(np.sum((pts[:, 1] - lane_y) ** 2))
    return total


def _build_courtesy(scene: Scene, yield_params: ContinuousParams | None,
                    horizon: int, config: Config) -> _CourtesyContext:
    if yield_params is None:
        raise DependencyError(
            "courtesy needs previously trained yield parameters for the host cost")
    theta = _yield_theta_map(yield_params)
    l, w = _kernel_axes(config)
    idm = _idm_for(scene, config)
    host_pts = scene.host_future.points[:horizon]
    host_end = scene.hist_host.points[-1]
    host_v = (scene.hist_host.points[-1, 0] - scene.hist_host.points[-2, 0]) / scene.dt
    lead_idx = find_leader(scene.hist_host, scene.hist_surround, config.lane_width)
    leader = (extrapolate_history(scene.hist_surround[lead_idx], horizon)
              if lead_idx is not None else None)
    roll = rollout(host_end[0], host_v, host_end[1], horizon, scene.dt, idm, leader)
    surr = (np.stack([extrapolate_history(s, horizon) for s in scene.hist_surround])
            if scene.hist_surround else np.zeros((0, horizon, 2)))
    # the host keeps its own lane; when the predicted vehicle merges, that is
    # the target lane
    lane_y = scene.lanes.target_y if scene.role is Role.MERGING else scene.lanes.current_y
    const = (_host_cost_parts(host_pts, scene.dt, scene.v_lim, theta, surr, lane_y, l, w)
             - _host_cost_parts(roll, scene.dt, scene.v_lim, theta, surr, lane_y, l, w))
    goal_grad_x = -2.0 * theta.get("goal", 0.0) * (host_pts[:, 0] - roll[:, 0])
    return _CourtesyContext(host_pts=host_pts, rollout_pts=roll, theta=theta,
                            const_delta=const, goal_grad_x=goal_grad_x,
                            s0=config.goal_offset, l=l, w=w,
                            kappa=config.courtesy_sharpness)


def build_context(decision: Decision, scene: Scene, config: Config, horizon: int,
                  yield_params: ContinuousParams | None = None,
                  features: tuple[str, ...] | None = None) -> FeatureContext:
    """Precompute the scene-dependent inputs of one decision's feature set."""
    if decision.role is not scene.role:
        raise ValidationError(
            f"decision {decision.value} does not apply to role {scene.role.value}")
    if horizon < 3:
        raise ValidationError("horizon must be at least 3")
    if horizon > scene.host_future.length:
        raise ValidationError(
            f"horizon {horizon} exceeds host plan length {scene.host_future.length}")
    names = tuple(features) if features is not None else feature_set_for(decision)
    unknown = set(names) - set(FEATURE_NAMES)
    if unknown:
        raise ValidationError(f"unknown feature identifiers: {sorted(unknown)}")
    l, w = _kernel_axes(config)
    goals = (goal_sequence(decision, scene, horizon, config.goal_offset)
             if "goal" in names else None)
    others = _other_positions(scene, horizon) if "clearance" in names else None
    front = _resolve_front(decision, scene, horizon, config) if "idm" in names else None
    front_speed = _padded_speeds(front, scene.dt) if front is not None else None
    courtesy = (_build_courtesy(scene, yield_params, horizon, config)
                if "courtesy" in names else None)
    return FeatureContext(decision=decision, features=names, horizon=horizon,
                          dt=scene.dt, v_lim=scene.v_lim, goals=goals,
                          others=others, front=front, front_speed=front_speed,
                          idm=_idm_for(scene, config), l=l, w=w, courtesy=courtesy)


# ---------------------------------------------------------------------------
# feature stack evaluation
# ---------------------------------------------------------------------------

def _courtesy_delta(cc: _CourtesyContext, pts: np.ndarray, derivs: bool):
    """Host-cost difference and its derivatives with respect to `pts`."""
    n2 = 2 * pts.shape[0]
    delta = cc.const_delta
    grad = np.zeros(n2) if derivs else None
    hess = np.zeros((n2, n2)) if derivs else None
    tc = cc.theta.get("clearance", 0.0)
    for h_pts, sign in ((cc.host_pts, 1.0), (cc.rollout_pts, -1.0)):
        dx = h_pts[:, 0] - pts[:, 0]
        dy = h_pts[:, 1] - pts[:, 1]
        e = _kernel_terms(dx, dy, cc.l, cc.w)
        delta += sign * tc * float(np.sum(e))
        if derivs:
            gx = sign * tc * e * (2.0 * dx / cc.l ** 2)
            gy = sign * tc * e * (2.0 * dy / cc.w ** 2)
            grad[0::2] += gx
            grad[1::2] += gy
            hxx = sign * tc * e * (4.0 * dx ** 2 / cc.l ** 4 - 2.0 / cc.l ** 2)
            hyy = sign * tc * e * (4.0 * dy ** 2 / cc.w ** 4 - 2.0 / cc.w ** 2)
            hxy = sign * tc * e * (4.0 * dx * dy / (cc.l ** 2 * cc.w ** 2))
            idx = np.arange(pts.shape[0])
            hess[2 * idx, 2 * idx] += hxx
            hess[2 * idx + 1, 2 * idx + 1] += hyy
            hess[2 * idx, 2 * idx + 1] += hxy
            hess[2 * idx + 1, 2 * idx] += hxy
    tg = cc.theta.get("goal", 0.0)
    if tg:
        # goal terms of both host trajectories share the quadratic part in the
        # predicted coordinates, so their difference is linear in them
        h1x = cc.host_pts[:, 0]
        rx = cc.rollout_pts[:, 0]
        zx = pts[:, 0]
        delta += tg * float(np.sum((h1x - zx + cc.s0) ** 2 - (rx - zx + cc.s0) ** 2))
        if derivs:
            grad[0::2] += cc.goal_grad_x
    return delta, grad, hess


def _softplus(x: float, kappa: float) -> float:
    z = kappa * x
    if z > 0:
        return float(x + np.log1p(np.exp(-z)) / kappa)
    return float(np.log1p(np.exp(z)) / kappa)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return float(1.0 / (1.0 + np.exp(-x)))
    ez = np.exp(x)
    return float(ez / (1.0 + ez))


def feature_stack(ctx: FeatureContext, pts: np.ndarray, derivs: bool = True,
                  smooth: bool = True, stabilized: bool = False):
    """Evaluate the context's features at a coordinate matrix (L, 2).

    Returns (values, gradients, hessians): values has one entry per feature;
    gradients is (n_features, 2L) and hessians (n_features, 2L, 2L), both None
    when `derivs` is false. With `smooth`, the courtesy value/derivatives come
    from the softplus-smoothed clamp so they describe one common function.

    With `stabilized`, the speed-curvature coefficients of the speed,
    acceleration and jerk Hessians enter by absolute value. At rough
    iterates those terms otherwise inject large negative curvature into
    lateral directions faster than any descent method can follow; flipping
    their sign keeps the stiffness magnitude while making the surrogate
    safe to step on. Values and gradients are unchanged.
    """
    pts = np.asarray(pts, dtype=float)
    L = pts.shape[0]
    if pts.shape != (L, 2) or L != ctx.horizon:
        raise ValidationError(f"points must have shape ({ctx.horizon}, 2)")
    n2 = 2 * L
    n = len(ctx.features)
    vals = np.zeros(n)
    grads = np.zeros((n, n2)) if derivs else None
    hesses = np.zeros((n, n2, n2)) if derivs else None

    kin = _Kinematics(pts, ctx.dt)
    w_speed, _, q_acc, q_jerk = _chain_matrices(L, ctx.dt)
    jac = kin.jac() if derivs else None
    blocks = kin.curvature_blocks() if derivs else None

    flip = np.abs if stabilized else (lambda c: c)

    for i, name in enumerate(ctx.features):
        if name == "speed":
            r = kin.v_core - ctx.v_lim
            vals[i] = float(np.sum(w_speed * r ** 2))
            if derivs:
                grads[i] = jac.T @ (2.0 * w_speed * r)
                hesses[i] = 2.0 * jac.T @ (w_speed[:, None] * jac)
                _scatter_speed_curvature(L, flip(2.0 * w_speed * r), blocks, hesses[i])
        elif name == "accel":
            q = q_acc @ kin.v_core
            vals[i] = float(kin.v_core @ q)
            if derivs:
                grads[i] = jac.T @ (2.0 * q)
                hesses[i] = 2.0 * jac.T @ (q_acc @ jac)
                _scatter_speed_curvature(L, flip(2.0 * q), blocks, hesses[i])
        elif name == "jerk":
            q = q_jerk @ kin.v_core
            vals[i] = float(kin.v_core @ q)
            if derivs:
                grads[i] = jac.T @ (2.0 * q)
                hesses[i] = 2.0 * jac.T @ (q_jerk @ jac)
                _scatter_speed_curvature(L, flip(2.0 * q), blocks, hesses[i])
        elif name == "clearance":
            dx = pts[None, :, 0] - ctx.others[:, :, 0]
            dy = pts[None, :, 1] - ctx.others[:, :, 1]
            e = _kernel_terms(dx, dy, ctx.l, ctx.w)
            vals[i] = float(np.sum(e))
            if derivs:
                gx = np.sum(e * (-2.0 * dx / ctx.l ** 2), axis=0)
                gy = np.sum(e * (-2.0 * dy / ctx.w ** 2), axis=0)
                grads[i, 0::2] = gx
                grads[i, 1::2] = gy
                hxx = np.sum(e * (4.0 * dx ** 2 / ctx.l ** 4 - 2.0 / ctx.l ** 2), axis=0)
                hyy = np.sum(e * (4.0 * dy ** 2 / ctx.w ** 4 - 2.0 / ctx.w ** 2), axis=0)
                hxy = np.sum(e * (4.0 * dx * dy / (ctx.l ** 2 * ctx.w ** 2)), axis=0)
                idx = np.arange(L)
                hesses[i, 2 * idx, 2 * idx] = hxx
                hesses[i, 2 * idx + 1, 2 * idx + 1] = hyy
                hesses[i, 2 * idx, 2 * idx + 1] = hxy
                hesses[i, 2 * idx + 1, 2 * idx] = hxy
        elif name == "goal":
            diff = pts - ctx.goals
            vals[i] = float(np.sum(diff ** 2))
            if derivs:
                grads[i] = 2.0 * diff.reshape(-1)
                hesses[i] = 2.0 * np.eye(n2)
        elif name == "idm":
            if ctx.front is None:
                continue    # free road: no gap to track
            gap = ctx.front[:, 0] - pts[:, 0]
            if np.any(gap < 0):
                bad = int(np.argmax(gap < 0))
                raise CrossingOrderError(
                    f"front vehicle behind the predicted vehicle at step {bad}",
                    index=bad)
            c = 2.0 * np.sqrt(ctx.idm.max_accel * ctx.idm.comfort_decel)
            v = kin.v_pad
            raw = (ctx.idm.jam_distance + v * ctx.idm.time_headway
                   + v * (v - ctx.front_speed) / c)
            active = raw >= ctx.idm.jam_distance
            res = gap - np.maximum(raw, ctx.idm.jam_distance)
            vals[i] = float(np.sum(res ** 2))
            if derivs:
                slope = np.where(
                    active,
                    ctx.idm.time_headway + (2.0 * v - ctx.front_speed) / c,
                    0.0)
                curv = np.where(active, 2.0 / c, 0.0)
                jac_pad = kin.jac_pad(jac)
                b = -slope[:, None] * jac_pad
                cols = 2 * np.arange(L)
                b[np.arange(L), cols] += -1.0
                grads[i] = 2.0 * b.T @ res
                hess = 2.0 * b.T @ b
                hess += jac_pad.T @ ((-2.0 * res * curv)[:, None] * jac_pad)
                _scatter_speed_curvature(L, _pad_coeff(-2.0 * res * slope),
                                         blocks, hess)
                hesses[i] = hess
        elif name == "courtesy":
            cc = ctx.courtesy
            delta, dgrad, dhess = _courtesy_delta(cc, pts, derivs)
            if derivs or smooth:
                sig = _sigmoid(cc.kappa * delta)
            vals[i] = _softplus(delta, cc.kappa) if smooth else max(delta, 0.0)
            if derivs:
                grads[i] = sig * dgrad
                hesses[i] = (cc.kappa * sig * (1.0 - sig) * np.outer(dgrad, dgrad)
                             + sig * dhess)
        else:  # pragma: no cover - guarded in build_context
            raise ValidationError(f"unknown feature {name}")

    if not np.all(np.isfinite(vals)):
        raise NumericalError("non-finite feature value")
    if derivs:
        hesses = 0.5 * (hesses + np.transpose(hesses, (0, 2, 1)))
    return vals, grads, hesses


# ---------------------------------------------------------------------------
# public cost API
# ---------------------------------------------------------------------------

def feature_vector(decision: Decision, scene: Scene, traj: Trajectory,
                   config: Config | None = None,
                   yield_params: ContinuousParams | None = None) -> np.ndarray:
    """Feature values of a trajectory in the decision's canonical order."""
    config = config or Config()
    _check_traj(scene, traj)
    ctx = build_context(decision, scene, config, traj.length, yield_params)
    vals, _, _ = feature_stack(ctx, traj.points, derivs=False, smooth=False)
    return vals


def cost(params: ContinuousParams, scene: Scene, traj: Trajectory,
         config: Config | None = None,
         yield_params: ContinuousParams | None = None,
         smooth_courtesy: bool = False) -> float:
    """Weighted feature sum theta . f(trajectory)."""
    config = config or Config()
    _check_traj(scene, traj)
    ctx = build_context(params.decision, scene, config, traj.length,
                        yield_params, params.features)
    vals, _, _ = feature_stack(ctx, traj.points, derivs=False, smooth=smooth_courtesy)
    return float(params.theta @ vals)


def cost_gradient_hessian(params: ContinuousParams, scene: Scene, traj: Trajectory,
                          config: Config | None = None,
                          yield_params: ContinuousParams | None = None,
                          stabilized: bool = False) -> CostReport:
    """Cost with analytic gradient and Hessian over the flat coordinates.

    The courtesy clamp is softplus-smoothed here so the reported cost,
    gradient and Hessian all describe one differentiable function. With
    `stabilized` the Hessian uses the sign-flipped speed-curvature terms
    of `feature_stack`; see there for when that surrogate is appropriate.
    """
    config = config or Config()
    _check_traj(scene, traj)
    ctx = build_context(params.decision, scene, config, traj.length,
                        yield_params, params.features)
    vals, grads, hesses = feature_stack(ctx, traj.points, derivs=True, smooth=True,
                                        stabilized=stabilized)
    grad = params.theta @ grads
    hess = np.tensordot(params.theta, hesses, axes=1)
    hess = 0.5 * (hess + hess.T)
    if not (np.all(np.isfinite(grad)) and np.all(np.isfinite(hess))):
        raise NumericalError("non-finite cost derivatives")
    return CostReport(cost=float(params.theta @ vals), gradient=grad,
                      hessian=hess, features=vals)


def _check_traj(scene: Scene, traj: Trajectory) -> None:
    if abs(traj.dt - scene.dt) > 1e-12:
        raise ValidationError("trajectory dt must match the scene dt")
