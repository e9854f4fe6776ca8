"""How many iterations do slow pass scenes need, and where do they land."""
import time

import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role
from mergeirl.synthetic import GeneratorConfig, _draw_scene
from mergeirl.features import ContinuousParams, FEATURE_SETS
from mergeirl.optimizer import optimize_trajectory

gen = GeneratorConfig()

names = FEATURE_SETS[Decision.PASS]
base = np.asarray(gen.theta_star[Decision.PASS], dtype=float)

rng = np.random.default_rng(5)

for cap in (200, 1000, 4000):
    config = Config(opt_max_iter=cap)
    H = config.train_horizon
    rng2 = np.random.default_rng(5)
    scenes = [_draw_scene(Role.LANE_KEEPING, rng2, gen, config, f"s{k}") for k in range(4)]
    t0 = time.perf_counter()
    out = []
    for s in scenes:
        r = optimize_trajectory(ContinuousParams(Decision.PASS, base), s, H, config)
        out.append((r.converged, r.iterations, r.cost, r.gradient_norm, r.trajectory))
    dtw = time.perf_counter() - t0
    print(f"cap {cap}: " + "; ".join(
        f"conv={c} it={i} cost={co:.4f} |g|={g:.1e}" for c, i, co, g, _ in out)
        + f"  [{dtw:.1f}s]")
    if cap == 200:
        ref = [o[4] for o in out]
    else:
        meds = [float(np.mean(np.linalg.norm(a.points - b.points, axis=1)))
                for a, b in zip((o[4] for o in out), ref)]
        print("   MED vs cap200:", np.round(meds, 3))
