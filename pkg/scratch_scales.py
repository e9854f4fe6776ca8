"""Scratch: feature scales, Hessian definiteness, objective landscape."""
import numpy as np

from mergeirl.config import Config
from mergeirl.cont_irl import laplace_objective
from mergeirl.features import ContinuousParams, build_context, feature_stack
from mergeirl.optimizer import optimize_trajectory
from mergeirl.scenario import Decision, Demonstration, LaneGeometry, Role, Scene, VehicleDims
from mergeirl.trajectory import Trajectory

config = Config()
dt = config.dt
n = config.history_steps
H = config.train_horizon
rng = np.random.default_rng(0)


def gp_noise(rng, n_pts, sigma=0.1, ell=1.5, dt=0.1):
    t = np.arange(n_pts) * dt
    cov = sigma ** 2 * np.exp(-0.5 * ((t[:, None] - t[None, :]) / ell) ** 2)
    chol = np.linalg.cholesky(cov + 1e-12 * np.eye(n_pts))
    return chol @ rng.standard_normal(n_pts)


def hist(x, y, v):
    steps = np.arange(-(n - 1), 1)[:, None]
    pts = np.hstack([x + steps * v * dt, np.full((n, 1), y)])
    return Trajectory.from_points(pts, dt)


# merging scene
scene = Scene(role=Role.MERGING, hist_predicted=hist(0.0, 3.6, 12.0),
              hist_host=hist(-3.0, 0.0, 12.5),
              host_future=Trajectory.from_points(
                  np.column_stack([-3.0 + 12.5 * dt * np.arange(1, H + 1), np.zeros(H)]), dt),
              lanes=LaneGeometry(3.6, 0.0), v_lim=15.0,
              hist_surround=(hist(42.0, 0.0, 12.0),), dims=VehicleDims(), scene_id="s")

theta_star = np.array([0.02, 0.005, 1e-5, 0.5, 0.01])
params = ContinuousParams(decision=Decision.MERGE_BACK, theta=theta_star)
res = optimize_trajectory(params, scene, H, config)
print("opt converged:", res.converged, "cost:", res.cost)

ml = res.trajectory
for label, noise_fn in (("white", lambda: rng.normal(0, 0.1, 2 * H)),
                        ("gp", lambda: np.concatenate(
                            [gp_noise(rng, H), gp_noise(rng, H)]))):
    demo_pts = ml.points + np.column_stack(
        [noise_fn()[:H], noise_fn()[:H]]) if label == "white" else ml.points + np.column_stack(
        [gp_noise(rng, H), gp_noise(rng, H)])
    demo = Trajectory.from_points(demo_pts, dt)
    ctx = build_context(Decision.MERGE_BACK, scene, config, H)
    vals, grads, hesses = feature_stack(ctx, demo.points, derivs=True, smooth=True)
    print(f"\n[{label}] feature values:", dict(zip(ctx.features, vals.round(3))))
    for theta_label, theta in (("theta*", theta_star),
                               ("uniform", np.full(5, 0.2))):
        g = theta @ grads
        h = np.tensordot(theta, hesses, axes=1)
        lam = np.linalg.eigvalsh(h)
        lam_t = np.maximum(lam, 1e-6)
        quad = float(((np.linalg.eigh(h)[1].T @ g) ** 2 / lam_t).sum())
        logdet = float(np.log(lam_t).sum())
        print(f"  {theta_label}: lam_min={lam.min():.3e} lam_max={lam.max():.3e} "
              f"n_clamped={(lam < 1e-6).sum()} quad={quad:.4g} -logdet={-logdet:.4g} "
              f"J={quad - logdet:.6g}")
    dd = Demonstration(scene=scene, future=demo, decision=Decision.MERGE_BACK)
    print("  laplace_objective(theta*):",
          laplace_objective(params, [dd], config))
