"""Scratch: trace Newton iterations on a failing scene."""
import numpy as np

from mergeirl.config import Config
from mergeirl.features import ContinuousParams, cost, cost_gradient_hessian
from mergeirl.optimizer import initial_guess, _FIXED
from mergeirl.scenario import Decision, Role
from mergeirl.synthetic import DEFAULT_THETA_STAR, GeneratorConfig, _draw_scene
from mergeirl.trajectory import Trajectory
import scipy.linalg

config = Config()
gen = GeneratorConfig()
H = config.train_horizon
decision = Decision.YIELD
role = Role.LANE_KEEPING
theta = np.asarray(DEFAULT_THETA_STAR[decision])
params = ContinuousParams(decision=decision, theta=theta)

rng = np.random.default_rng(11)
scene = _draw_scene(role, rng, gen, config, "probe")

traj = initial_guess(scene, H)
pts = traj.coords.copy()
floor = config.hessian_floor
for it in range(60):
    t = Trajectory(pts, config.dt)
    rep = cost_gradient_hessian(params, scene, t, config)
    g = rep.gradient[_FIXED:]
    h = rep.hessian[_FIXED:, _FIXED:]
    lam, vec = np.linalg.eigh(h)
    lam_c = np.maximum(np.abs(lam), floor)
    step = -(vec @ ((vec.T @ g) / lam_c))
    # line search
    alpha, accepted = 1.0, False
    base = rep.cost
    gTs = float(g @ step)
    while alpha > 1e-12:
        cand = pts.copy()
        cand[_FIXED:] += alpha * step
        c = cost(params, scene, Trajectory(cand, config.dt), config, smooth_courtesy=True)
        if c <= base + 1e-4 * alpha * gTs:
            accepted = True
            break
        alpha *= 0.5
    if it % 5 == 0 or np.max(np.abs(alpha * step)) < 1e-6:
        print(f"it {it:3d} cost {base:14.6f} |step| {np.max(np.abs(step)):10.3e} "
              f"alpha {alpha:8.2e} lam_min {lam.min():10.3e} lam_max {lam.max():10.3e} "
              f"neg {(lam < 0).sum():2d} gTs {gTs:10.3e}")
    if not accepted:
        print("no acceptable step at it", it)
        break
    pts[_FIXED:] += alpha * step
    if np.max(np.abs(alpha * step)) < 1e-6:
        print("converged at it", it)
        break
