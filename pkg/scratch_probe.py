"""Probe: is the Laplace objective minimized near a positive multiple of theta*,
and does train_continuous find it?"""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role
from mergeirl.synthetic import GeneratorConfig, _draw_scene, _model_noise
from mergeirl.features import ContinuousParams, FEATURE_SETS
from mergeirl.optimizer import optimize_trajectory
from mergeirl.cont_irl import Demonstration, laplace_objective, train_continuous
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()
rng = np.random.default_rng(7)

decision = Decision.YIELD
role = Role.LANE_KEEPING
theta_star = np.asarray(gen.theta_star[decision], dtype=float)
params_star = ContinuousParams(decision, theta_star)
yp = None
H = config.train_horizon

demos = []
n = 0
while len(demos) < 20:
    n += 1
    scene = _draw_scene(role, rng, gen, config, f"probe_{n}")
    try:
        res = optimize_trajectory(params_star, scene, H, config, yp)
    except Exception:
        continue
    if not res.converged:
        continue
    noise = _model_noise(params_star, scene, res.trajectory, config, gen, rng, yp)
    demos.append(Demonstration(
        scene=scene,
        future=Trajectory(res.trajectory.coords + noise, scene.dt),
        decision=decision))
    if len(demos) == 1:
        print("demo rms per-coord:", np.sqrt(np.mean(noise ** 2)))

print("ray scan (objective at c*theta_star):")
for c in [0.25, 1.0, 4.0, 16.0, 64.0, 256.0, 1024.0]:
    p = ContinuousParams(decision, c * theta_star)
    val = laplace_objective(p, demos, config, yp)
    print(f"  c={c:8.2f}  J={val:14.4f}")

run = train_continuous(demos, decision, config, yield_params=yp, restarts=1)
print("trained theta:", np.array2string(run.theta, precision=6))
print("theta_star   :", theta_star)
print("ratio        :", np.array2string(run.theta / theta_star, precision=3))
print("converged:", run.converged, "iterations:", run.iterations)
print("J(theta_hat):", laplace_objective(run.params(), demos, config, yp))
c = float(run.theta @ theta_star / (theta_star @ theta_star))
print("J(c*theta_star) at projected c=%.2f:" % c,
      laplace_objective(ContinuousParams(decision, max(c, 1e-6) * theta_star), demos, config, yp))
cos = float(run.theta @ theta_star / (np.linalg.norm(run.theta) * np.linalg.norm(theta_star)))
print("cosine:", cos)
