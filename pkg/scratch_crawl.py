"""Which weight combination makes the optimizer crawl on side-by-side scenes."""
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
base = np.asarray(gen.theta_star[Decision.PASS], dtype=float)
rng = np.random.default_rng(5)
scenes = [_draw_scene(Role.LANE_KEEPING, rng, gen, config, f"s{k}") for k in range(3)]

variants = {
    "theta*": base.copy(),
    "idm->0": base.copy(),
    "clr->0": base.copy(),
    "idm,clr->0": base.copy(),
    "corner g20": np.full(len(names), 1e-6),
}
variants["idm->0"][names.index("idm")] = 1e-6
variants["clr->0"][names.index("clearance")] = 1e-6
variants["idm,clr->0"][names.index("idm")] = 1e-6
variants["idm,clr->0"][names.index("clearance")] = 1e-6
variants["corner g20"][names.index("goal")] = 20.0

for tag, th in variants.items():
    rows = []
    for s in scenes:
        r = optimize_trajectory(ContinuousParams(Decision.PASS, th), s, H, config)
        rows.append(f"conv={r.converged} it={r.iterations} |g|={r.gradient_norm:.1e}")
    print(f"{tag:12s}: " + " | ".join(rows))
