"""FD-verify the exact Hessian at a displaced (rough) trajectory point."""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role
from mergeirl.synthetic import GeneratorConfig, _draw_scene
from mergeirl.features import ContinuousParams, cost_gradient_hessian
from mergeirl.optimizer import optimize_trajectory
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()
rng = np.random.default_rng(7)

decision = Decision.YIELD
role = Role.LANE_KEEPING
theta_star = np.asarray(gen.theta_star[decision], dtype=float)
params_star = ContinuousParams(decision, theta_star)
H = config.train_horizon

n = 0
while True:
    n += 1
    s = _draw_scene(role, rng, gen, config, f"d_{n}")
    try:
        res = optimize_trajectory(params_star, s, H, config, None)
    except Exception:
        continue
    if res.converged:
        scene = s
        break

ml = res.trajectory
x = ml.coords + 0.1 * rng.standard_normal(ml.coords.size)

rep = cost_gradient_hessian(params_star, scene, Trajectory(x, scene.dt), config)
n = x.size
eps = 1e-6
cols = np.empty((n, n))
for j in range(n):
    xp = x.copy(); xp[j] += eps
    xm = x.copy(); xm[j] -= eps
    gp = cost_gradient_hessian(params_star, scene, Trajectory(xp, scene.dt), config).gradient
    gm = cost_gradient_hessian(params_star, scene, Trajectory(xm, scene.dt), config).gradient
    cols[:, j] = (gp - gm) / (2 * eps)

diff = np.abs(rep.hessian - cols)
scale = np.maximum(np.abs(cols), 1.0)
rel = diff / scale
print("max abs component diff:", float(diff.max()))
print("max rel component diff:", float(rel.max()))
i, j = np.unravel_index(np.argmax(rel), rel.shape)
print(f"worst at ({i},{j}): analytic {rep.hessian[i, j]:.6g} fd {cols[i, j]:.6g}")
lam_a = np.linalg.eigvalsh(0.5 * (rep.hessian + rep.hessian.T))
lam_f = np.linalg.eigvalsh(0.5 * (cols + cols.T))
print("min eig analytic:", float(lam_a.min()), " fd:", float(lam_f.min()))
print("n neg analytic:", int((lam_a < 0).sum()), " fd:", int((lam_f < 0).sum()))
