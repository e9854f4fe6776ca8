"""MED between theta*-optimum and idm-free optimum as a function of theta_idm."""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role
from mergeirl.synthetic import GeneratorConfig, _draw_scene
from mergeirl.features import ContinuousParams, FEATURE_SETS
from mergeirl.optimizer import optimize_trajectory

config = Config()
gen = GeneratorConfig()
H = config.train_horizon

names = FEATURE_SETS[Decision.PASS]
ii = names.index("idm")
base = np.asarray(gen.theta_star[Decision.PASS], dtype=float)

rng = np.random.default_rng(5)
scenes = [_draw_scene(Role.LANE_KEEPING, rng, gen, config, f"s{k}") for k in range(4)]

free = base.copy()
free[ii] = 1e-6
ref = [optimize_trajectory(ContinuousParams(Decision.PASS, free), s, H, config)
       for s in scenes]

for tv in (2e-3, 5e-4, 2e-4, 5e-5, 2e-5, 1e-5):
    th = base.copy()
    th[ii] = tv
    meds = []
    for s, r0 in zip(scenes, ref):
        r = optimize_trajectory(ContinuousParams(Decision.PASS, th), s, H, config)
        meds.append(float(np.mean(np.linalg.norm(r.trajectory.points - r0.trajectory.points, axis=1))))
    print(f"theta_idm {tv:8.0e}: MED vs idm-free mean {np.mean(meds):.3f} max {np.max(meds):.3f}")
