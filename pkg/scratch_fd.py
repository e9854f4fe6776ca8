"""Scratch: finite-difference check of the analytic feature derivatives."""
import numpy as np

from mergeirl.config import Config
from mergeirl.features import ContinuousParams, build_context, feature_stack
from mergeirl.scenario import Decision, LaneGeometry, Role, Scene, VehicleDims
from mergeirl.trajectory import Trajectory

config = Config(history_steps=5)
dt = config.dt
n = 5
H = 8


def hist(x, y, v):
    steps = np.arange(-(n - 1), 1)[:, None]
    pts = np.hstack([x + steps * v * dt, np.full((n, 1), y)])
    return Trajectory.from_points(pts, dt)


rng = np.random.default_rng(7)

for role, decisions in ((Role.MERGING, (Decision.MERGE_FRONT, Decision.MERGE_BACK)),
                        (Role.LANE_KEEPING, (Decision.YIELD, Decision.PASS))):
    if role is Role.MERGING:
        scene = Scene(role=role, hist_predicted=hist(0.0, 3.6, 12.0),
                      hist_host=hist(-3.0, 0.0, 12.5),
                      host_future=Trajectory.from_points(
                          np.column_stack([-3.0 + 12.5 * dt * np.arange(1, H + 1),
                                           np.zeros(H)]), dt),
                      lanes=LaneGeometry(3.6, 0.0), v_lim=15.0,
                      hist_surround=(hist(40.0, 0.0, 12.0),),
                      dims=VehicleDims(), scene_id="fd_m")
    else:
        scene = Scene(role=role, hist_predicted=hist(0.0, 0.0, 12.0),
                      hist_host=hist(-3.0, 3.6, 12.5),
                      host_future=Trajectory.from_points(
                          np.column_stack([-3.0 + 12.5 * dt * np.arange(1, H + 1),
                                           np.linspace(3.2, 0.0, H)]), dt),
                      lanes=LaneGeometry(0.0, 0.0), v_lim=15.0,
                      hist_surround=(hist(40.0, 0.0, 12.0),),
                      dims=VehicleDims(), scene_id="fd_l")

    yp = ContinuousParams(decision=Decision.YIELD, theta=np.array([0.02, 0.005, 1e-5, 0.5, 0.01]))
    for decision in decisions:
        ctx = build_context(decision, scene, config, H,
                            yp if decision is Decision.MERGE_FRONT else None)
        pos, vel = scene.current_state()
        base = pos + np.arange(1, H + 1)[:, None] * vel * dt
        pts = base + rng.normal(0, 0.3, base.shape)
        vals, grads, hesses = feature_stack(ctx, pts, derivs=True, smooth=True)
        names = ctx.features if hasattr(ctx, "features") else None
        eps = 1e-6
        flat = pts.reshape(-1).copy()
        d = len(vals)
        fd_grad = np.zeros((d, flat.size))
        for j in range(flat.size):
            p1, p2 = flat.copy(), flat.copy()
            p1[j] += eps
            p2[j] -= eps
            v1, _, _ = feature_stack(ctx, p1.reshape(-1, 2), derivs=False, smooth=True)
            v2, _, _ = feature_stack(ctx, p2.reshape(-1, 2), derivs=False, smooth=True)
            fd_grad[:, j] = (v1 - v2) / (2 * eps)
        gerr = np.abs(fd_grad - grads).max(axis=1) / (1 + np.abs(grads).max(axis=1))
        # Hessian check: directional second difference
        herr = np.zeros(d)
        for trial in range(3):
            u = rng.normal(size=flat.size)
            u /= np.linalg.norm(u)
            h = 1e-4
            vp, gp, _ = feature_stack(ctx, (flat + h * u).reshape(-1, 2), derivs=True, smooth=True)
            vm, gm, _ = feature_stack(ctx, (flat - h * u).reshape(-1, 2), derivs=True, smooth=True)
            fd_Hu = (gp - gm) / (2 * h)
            an_Hu = np.einsum("dij,j->di", hesses, u)
            herr = np.maximum(herr, np.abs(fd_Hu - an_Hu).max(axis=1) / (1 + np.abs(an_Hu).max(axis=1)))
        print(f"{decision.value:12s} grad_relerr {gerr.round(9)} hess_relerr {herr.round(7)}")
