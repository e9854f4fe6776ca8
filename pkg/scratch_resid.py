"""Inspect gap residual profile and optimum displacement for pass scenes."""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role, goal_sequence
from mergeirl.synthetic import GeneratorConfig, _draw_scene
from mergeirl.features import ContinuousParams, FEATURE_SETS, build_context
from mergeirl.features import _idm_residuals, _idm_for
from mergeirl.optimizer import optimize_trajectory

config = Config()
gen = GeneratorConfig()
H = config.train_horizon

names = FEATURE_SETS[Decision.PASS]
ii = names.index("idm")
base = np.asarray(gen.theta_star[Decision.PASS], dtype=float)

rng = np.random.default_rng(5)
s = _draw_scene(Role.LANE_KEEPING, rng, gen, config, "s0")

free = base.copy(); free[ii] = 1e-6
th = base.copy(); th[ii] = 1e-5

r_free = optimize_trajectory(ContinuousParams(Decision.PASS, free), s, H, config)
r_idm = optimize_trajectory(ContinuousParams(Decision.PASS, th), s, H, config)
print("converged:", r_free.converged, r_idm.converged,
      "iters:", r_free.iterations, r_idm.iterations,
      "gnorm:", f"{r_free.gradient_norm:.2e}", f"{r_idm.gradient_norm:.2e}")
print("costs:", f"{r_free.cost:.4f}", f"{r_idm.cost:.4f}")

ctx = build_context(Decision.PASS, s, config, H)
idm = _idm_for(s, config)
for tag, r in (("free", r_free), ("idm1e-5", r_idm)):
    res = _idm_residuals(r.trajectory.points, ctx.front, s.dt, idm)
    print(f"{tag}: residual head {np.round(res[:5],2)} mid {np.round(res[23:27],2)} "
          f"tail {np.round(res[-4:],2)} mean|r| {np.mean(np.abs(res)):.2f}")

goals = goal_sequence(Decision.PASS, s, H, config.goal_offset)
for tag, r in (("free", r_free), ("idm1e-5", r_idm)):
    d = r.trajectory.points - goals
    print(f"{tag}: goal offset x head {np.round(d[:3,0],2)} mid {np.round(d[24:26,0],2)} tail {np.round(d[-3:,0],2)}")

diff = r_idm.trajectory.points - r_free.trajectory.points
print("displacement profile x:", np.round(diff[::8, 0], 3))
print("displacement profile y:", np.round(diff[::8, 1], 4))
