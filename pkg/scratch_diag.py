"""Per-feature ablation: which feature bends theta*-optima away from corner optima."""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, feature_set_for
from mergeirl.synthetic import DEFAULT_THETA_STAR, GeneratorConfig, _draw_scene
from mergeirl.cont_irl import ContinuousParams
from mergeirl.optimizer import optimize_trajectory

config = Config()
gen = GeneratorConfig()

yp = ContinuousParams(decision=Decision.YIELD,
                      features=feature_set_for(Decision.YIELD),
                      theta=np.asarray(DEFAULT_THETA_STAR[Decision.YIELD]))


def med(a, b):
    return float(np.mean(np.linalg.norm(a.points - b.points, axis=1)))


for dec in (Decision.YIELD, Decision.MERGE_BACK, Decision.PASS, Decision.MERGE_FRONT):
    names = feature_set_for(dec)
    theta_star = np.asarray(DEFAULT_THETA_STAR[dec])
    rng = np.random.default_rng(77)
    print(f"=== {dec.value} theta*={dict(zip(names, theta_star))}")
    meds = {n: [] for n in names if n != "goal"}
    meds["corner"] = []
    for k in range(6):
        scene = _draw_scene(dec.role, rng, gen, config, f"d{k}")
        base = ContinuousParams(decision=dec, features=names, theta=theta_star)
        r0 = optimize_trajectory(base, scene, config.train_horizon, config, yield_params=yp)
        if not r0.converged:
            print(f"  scene {k}: theta* opt not converged, skip")
            continue
        # goal-only corner
        tc = np.full(len(names), 1e-6)
        tc[names.index("goal")] = theta_star[names.index("goal")]
        rc = optimize_trajectory(
            ContinuousParams(decision=dec, features=names, theta=tc),
            scene, config.train_horizon, config, yield_params=yp)
        meds["corner"].append(med(r0.trajectory, rc.trajectory))
        # single-feature ablations
        for i, n in enumerate(names):
            if n == "goal":
                continue
            tv = theta_star.copy()
            tv[i] = 1e-6
            rv = optimize_trajectory(
                ContinuousParams(decision=dec, features=names, theta=tv),
                scene, config.train_horizon, config, yield_params=yp)
            meds[n].append(med(r0.trajectory, rv.trajectory))
    for n, vals in meds.items():
        if vals:
            print(f"  drop {n:10s}: MED mean {np.mean(vals):7.3f} max {np.max(vals):7.3f}")
