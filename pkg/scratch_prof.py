import numpy as np
from mergeirl.config import Config
from mergeirl.scenario import Decision, Role, feature_set_for, goal_sequence
from mergeirl.synthetic import GeneratorConfig, _draw_scene, DEFAULT_THETA_STAR
from mergeirl.features import ContinuousParams
from mergeirl.optimizer import optimize_trajectory

config = Config()
gen = GeneratorConfig(seed=77)
rng = np.random.default_rng(123)

for dec, role in [(Decision.YIELD, Role.LANE_KEEPING), (Decision.PASS, Role.LANE_KEEPING)]:
    scene = _draw_scene(role, rng, gen, config, 0)
    theta = np.asarray(DEFAULT_THETA_STAR[dec])
    names = feature_set_for(dec)
    ml_star, c1 = optimize_trajectory(ContinuousParams(dec, theta), scene,
                                      config.train_horizon, config, None)
    corner = np.zeros_like(theta)
    corner[-1] = 20.0
    ml_c, c2 = optimize_trajectory(ContinuousParams(dec, corner), scene,
                                   config.train_horizon, config, None)
    gseq = goal_sequence(dec, scene, config.train_horizon, config.goal_offset)
    d = np.linalg.norm(ml_star.points - ml_c.points, axis=1)
    ds = np.linalg.norm(ml_star.points - gseq, axis=1)
    dc = np.linalg.norm(ml_c.points - gseq, axis=1)
    print(f"{dec.value}: conv {c1},{c2} MED {d.mean():.3f}")
    print("  |star-corner| :", " ".join(f"{v:.2f}" for v in d[::5]))
    print("  |star-goalseq|:", " ".join(f"{v:.2f}" for v in ds[::5]))
    print("  |corn-goalseq|:", " ".join(f"{v:.2f}" for v in dc[::5]))
