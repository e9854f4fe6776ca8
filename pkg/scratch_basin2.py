"""Per-restart basin diagnosis for yield training."""
import numpy as np

from mergeirl.config import Config
from mergeirl.cont_irl import _demo_stacks, _objective_from_stacks, _descend
from mergeirl.features import ContinuousParams
from mergeirl.optimizer import optimize_trajectory
from mergeirl.scenario import Decision, Demonstration, Role, feature_set_for
from mergeirl.synthetic import DEFAULT_THETA_STAR, GeneratorConfig, _draw_scene
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()
H = config.train_horizon
decision, role = Decision.YIELD, Role.LANE_KEEPING
names = feature_set_for(decision)
dim = len(names)
theta_star = np.asarray(DEFAULT_THETA_STAR[decision])
params = ContinuousParams(decision=decision, theta=theta_star)

rng = np.random.default_rng(11)
demos = []
draws = 0
while len(demos) < 20:
    scene = _draw_scene(role, rng, gen, config, f"t{draws}")
    draws += 1
    res = optimize_trajectory(params, scene, H, config, None)
    if not res.converged:
        continue
    noise = gen.noise_std * rng.standard_normal(res.trajectory.coords.size)
    demos.append(Demonstration(scene=scene,
                               future=Trajectory(res.trajectory.coords + noise, scene.dt),
                               decision=decision))

stacks = _demo_stacks(demos, decision, config, None, names)
floor = config.hessian_floor

def J(th):
    return _objective_from_stacks(np.asarray(th, float), stacks, floor)

print("J(uniform 1/5)      ", f"{J(np.full(dim, 0.2)):.4e}")
print("J(theta*)           ", f"{J(theta_star):.4e}")
for i, n in enumerate(names):
    ax = np.full(dim, config.theta_min)
    ax[i] = 1.0
    print(f"J(axis {n:9s} 1.0)", f"{J(ax):.4e}")
g50 = np.full(dim, config.theta_min)
g50[names.index("goal")] = 50.0
print("J(goal=50 corner)   ", f"{J(g50):.4e}")

ax_goal = np.full(dim, config.theta_min)
ax_goal[names.index("goal")] = 1.0
trace, objs, conv = _descend(ax_goal, stacks, config)
print(f"goal-axis descent: {len(objs)-1} iters converged={conv}")
print("  objs head", np.array2string(objs[:6], precision=4))
print("  objs tail", np.array2string(objs[-3:], precision=4))
print("  theta end", np.array2string(trace[-1], precision=6))

ax_clr = np.full(dim, config.theta_min)
ax_clr[names.index("clearance")] = 1.0
trace2, objs2, conv2 = _descend(ax_clr, stacks, config)
print(f"clearance-axis descent: {len(objs2)-1} iters converged={conv2} end J {objs2[-1]:.4e}")
print("  theta end", np.array2string(trace2[-1], precision=6))
