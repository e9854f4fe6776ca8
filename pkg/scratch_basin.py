"""Check the goal-dominated basin of the Laplace objective on iid-noise demos."""
import time
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role, Demonstration
from mergeirl.synthetic import GeneratorConfig, _draw_scene
from mergeirl.features import ContinuousParams
from mergeirl.optimizer import optimize_trajectory
from mergeirl.cont_irl import laplace_objective, train_continuous, _demo_stacks, _objective_from_stacks
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()

decision = Decision.YIELD
role = Role.LANE_KEEPING
theta_star = np.asarray(gen.theta_star[decision], dtype=float)
params_star = ContinuousParams(decision, theta_star)
H = config.train_horizon


def collect(n_want, seed):
    rng = np.random.default_rng(seed)
    out = []
    n = 0
    while len(out) < n_want:
        n += 1
        s = _draw_scene(role, rng, gen, config, f"d_{n}")
        try:
            res = optimize_trajectory(params_star, s, H, config, None)
        except Exception:
            continue
        if res.converged:
            out.append((s, res.trajectory))
    return out


scenes = collect(20, 7)
rng = np.random.default_rng(11)
demos = [Demonstration(scene=s,
                       future=Trajectory(ml.coords + 0.1 * rng.standard_normal(ml.coords.size), s.dt),
                       decision=decision)
         for s, ml in scenes]

for g in (5.0, 20.0, 50.0, 200.0):
    th = np.array([1e-6, 1e-6, 1e-6, 1e-6, g])
    print(f"J(goal={g:6.1f}, rest=1e-6): "
          f"{laplace_objective(ContinuousParams(decision, th), demos, config):14.2f}")
# mild nonzero others
th = np.array([1e-4, 1e-4, 1e-4, 1e-3, 50.0])
print("J(goal=50, others 1e-4):",
      laplace_objective(ContinuousParams(decision, th), demos, config))

stacks = _demo_stacks(demos, decision, config, None, params_star.features)
t0 = time.time()
for _ in range(20):
    _objective_from_stacks(np.array([1e-4, 1e-4, 1e-4, 1e-3, 50.0]), stacks,
                           config.hessian_floor)
print("objective eval time: %.4f s" % ((time.time() - t0) / 20))
