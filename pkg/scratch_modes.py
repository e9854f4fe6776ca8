"""Measure quadratic-model validity of the cost around an optimum, per mode class."""
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
rep0 = cost_gradient_hessian(params_star, scene, ml, config)
g0, H0 = rep0.gradient, rep0.hessian
c0 = float(theta_star @ rep0.features)
L = ml.coords.size // 2
t = np.arange(L)

def probe(name, mode):
    mode = mode / np.linalg.norm(mode)
    lam_lin = float(mode @ H0 @ mode)
    print(f"{name}: linear-model curvature {lam_lin:10.4g}")
    for a in (0.01, 0.02, 0.05, 0.1, 0.2):
        pts = ml.coords + a * mode
        rep = cost_gradient_hessian(params_star, scene, Trajectory(pts, scene.dt), config)
        c = float(theta_star @ rep.features)
        quad_pred = c0 + a * float(g0 @ mode) + 0.5 * lam_lin * a * a
        gerr = np.linalg.norm(rep.gradient - (g0 + a * (H0 @ mode)))
        gerr /= max(np.linalg.norm(g0 + a * (H0 @ mode)), 1e-9)
        neg = int(np.sum(np.linalg.eigvalsh(0.5 * (rep.hessian + rep.hessian.T)) < 0))
        print(f"   a={a:5.2f}  cost {c:10.4f} (quad pred {quad_pred:10.4f})"
              f"  grad nonlin {gerr:8.3f}  neg eigs {neg}")

# pure lateral zigzag (highest frequency)
z = np.zeros(2 * L); z[1::2] = (-1.0) ** t
probe("lateral zigzag ", z)
# smooth lateral half wave
w = np.zeros(2 * L); w[1::2] = np.sin(np.pi * t / (L - 1))
probe("lateral halfwave", w)
# smooth longitudinal half wave
u = np.zeros(2 * L); u[0::2] = np.sin(np.pi * t / (L - 1))
probe("longit halfwave ", u)
# longitudinal zigzag
v = np.zeros(2 * L); v[0::2] = (-1.0) ** t
probe("longit zigzag  ", v)
# lateral mid frequency (period ~8 steps)
m = np.zeros(2 * L); m[1::2] = np.sin(2 * np.pi * t / 8.0)
probe("lateral 8-step  ", m)

# spectrum bands at ml
lam = np.linalg.eigvalsh(0.5 * (H0 + H0.T))
edges = [-np.inf, 0, 0.5, 3, 10, 100, 1e4, np.inf]
print("eig bands at ml:", [int(((lam >= lo) & (lam < hi)).sum())
                           for lo, hi in zip(edges[:-1], edges[1:])])
