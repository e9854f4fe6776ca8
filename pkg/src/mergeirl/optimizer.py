"""Trajectory optimization of a decision's continuous cost.

The optimized variable is the future trajectory of the predicted vehicle. Its
first two waypoints are fixed by the current state: waypoint 0 continues the
current position at the current velocity for one step, waypoint 1 for a
second step. The remaining waypoints are free.

The solver warm-starts from the exact minimizer of a convex surrogate (goal
tracking plus coordinate-difference smoothness) and then runs a trust-region
Newton method. The model Hessian flips the sign-indefinite speed-curvature
terms of the kinematic chain (see `feature_stack(stabilized=True)`); the
trust-region subproblem is solved exactly in the eigenbasis. Accepted steps
are extended while they keep paying off, which traverses the long shallow
valleys that goal sequences anchored to the host plan produce.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import Config
from .errors import CrossingOrderError, NumericalError, ValidationError
from .features import ContinuousParams, FeatureContext, build_context, feature_stack
from .scenario import Scene
from .trajectory import Trajectory

log = logging.getLogger(__name__)

_FIXED = 4          # two anchored waypoints = four fixed coordinates
_TR_INIT = 2.0      # initial trust radius, meters of joint waypoint motion
_TR_MAX = 20.0
_TR_ACCEPT = 0.1    # model agreement required to take a step


@dataclass(frozen=True)
class OptimizeResult:
    trajectory: Trajectory
    cost: float                 # smoothed cost actually minimized
    converged: bool
    iterations: int
    gradient_norm: float        # over the free coordinates, at the last iterate


def initial_guess(scene: Scene, horizon: int) -> np.ndarray:
    """Constant-velocity continuation of the predicted vehicle, (horizon, 2)."""
    pos, vel = scene.current_state()
    steps = np.arange(1, horizon + 1)[:, None]
    return pos + steps * vel * scene.dt


def _warm_start(ctx: FeatureContext, theta: np.ndarray, scene: Scene,
                horizon: int) -> np.ndarray:
    """Minimizer of a convex goal-plus-smoothness surrogate, (horizon, 2).

    Acceleration and jerk act on per-axis coordinate differences here, not on
    the scalar speed chain, which keeps the problem an unconstrained least
    squares per axis. Solved over the trajectory extended by the current
    position so the difference penalties see the entry transient.
    """
    if ctx.goals is None:
        return initial_guess(scene, horizon)
    pos, vel = scene.current_state()
    dt = scene.dt
    w0, w1 = pos + vel * dt, pos + 2 * vel * dt
    weight = dict(zip(ctx.features, theta))
    wg = 2.0 * max(weight.get("goal", 0.0), 1e-3)
    wa = 2.0 * max(weight.get("accel", 0.0), 1e-3)
    wj = 2.0 * max(weight.get("jerk", 0.0), 1e-4)
    n = horizon + 1
    d2 = np.zeros((n - 2, n))
    for i in range(n - 2):
        d2[i, i:i + 3] = (1.0, -2.0, 1.0)
    d2 /= dt * dt
    d3 = np.zeros((n - 3, n))
    for i in range(n - 3):
        d3[i, i:i + 4] = (-1.0, 3.0, -3.0, 1.0)
    d3 /= dt ** 3
    sel = np.zeros((horizon, n))
    sel[:, 1:] = np.eye(horizon)
    quad = wg * sel.T @ sel + wa * d2.T @ d2 + wj * d3.T @ d3
    out = np.empty((horizon, 2))
    for ax in range(2):
        rhs = wg * sel.T @ ctx.goals[:, ax]
        fixed = np.array([pos[ax], w0[ax], w1[ax]])
        out[2:, ax] = np.linalg.solve(quad[3:, 3:], rhs[3:] - quad[3:, :3] @ fixed)
    out[0], out[1] = w0, w1
    return out


def _tr_step(lam: np.ndarray, gh: np.ndarray, delta: float) -> np.ndarray:
    """Exact trust-region subproblem in the eigenbasis.

    Minimizes gh.p + p.diag(lam).p/2 over |p| <= delta, `lam` ascending.
    """
    lam_min = lam[0]
    if lam_min > 0.0:
        p = -gh / lam
        if np.linalg.norm(p) <= delta:
            return p
    lo = max(0.0, -lam_min)
    mask = np.abs(gh) > 0.0

    def radius(sigma: float) -> float:
        return float(np.linalg.norm(gh[mask] / (lam[mask] + sigma)))

    eps = max(1e-12, 1e-12 * abs(lam_min))
    if radius(lo + eps) < delta:
        # hard case: the gradient barely touches the bottom eigenspace; pad
        # the step along it out to the boundary
        p = -gh / np.where(np.abs(lam + lo) < eps, np.inf, lam + lo)
        tau = np.sqrt(max(delta * delta - float(p @ p), 0.0))
        p[0] += tau
        return p
    sig, hi = lo + eps, lo + np.linalg.norm(gh) / delta + 1.0
    while radius(hi) > delta:
        hi = lo + 2.0 * (hi - lo)
    for _ in range(100):
        mid = 0.5 * (sig + hi)
        if radius(mid) > delta:
            sig = mid
        else:
            hi = mid
        if hi - sig < 1e-10 * max(1.0, hi):
            break
    return -gh / (lam + 0.5 * (sig + hi))


def optimize_trajectory(params: ContinuousParams, scene: Scene, horizon: int,
                        config: Config | None = None,
                        yield_params: ContinuousParams | None = None) -> OptimizeResult:
    """Minimize the decision cost over the free waypoints of the future."""
    config = config or Config()
    if horizon < 3:
        raise ValidationError("horizon must be at least 3")
    ctx = build_context(params.decision, scene, config, horizon,
                        yield_params, params.features)
    theta = params.theta

    def total(p: np.ndarray) -> float:
        vals, _, _ = feature_stack(ctx, p, derivs=False, smooth=True)
        return float(theta @ vals)

    pts = _warm_start(ctx, theta, scene, horizon)
    try:
        cost = total(pts)
        if not np.isfinite(cost):
            raise CrossingOrderError("non-finite warm start cost", 0)
    except CrossingOrderError:
        pts = initial_guess(scene, horizon)
        cost = total(pts)
    if not np.isfinite(cost):
        raise NumericalError("non-finite cost at the initial trajectory")

    delta = _TR_INIT
    converged = False
    iterations = 0
    gradient_norm = np.inf
    for it in range(config.opt_max_iter):
        iterations = it + 1
        vals, grads, hesses = feature_stack(ctx, pts, derivs=True, smooth=True,
                                            stabilized=True)
        grad = (theta @ grads)[_FIXED:]
        hess = np.tensordot(theta, hesses, axes=1)[_FIXED:, _FIXED:]
        if not (np.all(np.isfinite(grad)) and np.all(np.isfinite(hess))):
            raise NumericalError("non-finite cost derivatives during optimization")
        gradient_norm = float(np.linalg.norm(grad))
        lam, vec = np.linalg.eigh(0.5 * (hess + hess.T))
        gh = vec.T @ grad

        accepted = False
        while True:
            p = _tr_step(lam, gh, delta)
            predicted = -float(gh @ p + 0.5 * p @ (lam * p))
            step = vec @ p
            # a predicted decrease below float noise on the cost cannot be
            # ratio-tested, so treat it as converged
            if (predicted <= 1e-12 * (1.0 + abs(cost))
                    or np.max(np.abs(step)) < config.opt_step_tol):
                converged = True
                break
            cand = pts.copy()
            cand.reshape(-1)[_FIXED:] += step
            try:
                cand_cost = total(cand)
                rho = (cost - cand_cost) / predicted if np.isfinite(cand_cost) else -np.inf
            except CrossingOrderError:
                rho = -np.inf
            if rho >= _TR_ACCEPT:
                accepted = True
                if rho > 0.75 and np.linalg.norm(p) > 0.8 * delta:
                    delta = min(delta * 2.0, _TR_MAX)
                elif rho < 0.25:
                    delta *= 0.25
                break
            delta *= 0.25
            if delta < 1e-10:
                converged = True
                break
        if converged or not accepted:
            converged = True
            break

        # extend along the accepted step while each doubling still pays at
        # least half of the previous gain; cheap way down shallow valleys
        gain = cost - cand_cost
        while gain > 0.0:
            again = cand.copy()
            again.reshape(-1)[_FIXED:] += step
            try:
                again_cost = total(again)
            except CrossingOrderError:
                break
            if not np.isfinite(again_cost) or again_cost >= cand_cost - 0.5 * gain:
                break
            gain = cand_cost - again_cost
            cand, cand_cost = again, again_cost

        round_gain = cost - cand_cost
        pts, cost = cand, cand_cost
        if (np.max(np.abs(step)) < config.opt_step_tol
                or round_gain <= 1e-12 * (1.0 + abs(cost))):
            converged = True
            break
    if not converged:
        log.warning("trajectory optimization for %s stopped at the iteration cap "
                    "(gradient norm %.2e)", params.decision.value, gradient_norm)
    return OptimizeResult(trajectory=Trajectory.from_points(pts, scene.dt),
                          cost=cost, converged=converged, iterations=iterations,
                          gradient_norm=gradient_norm)
