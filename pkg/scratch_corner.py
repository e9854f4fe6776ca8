"""Per decision: MED between goal-corner optima and theta*-optima; basin probes."""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role, Demonstration
from mergeirl.synthetic import GeneratorConfig, _draw_scene
from mergeirl.features import ContinuousParams, FEATURE_SETS
from mergeirl.optimizer import optimize_trajectory
from mergeirl.cont_irl import laplace_objective
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()
H = config.train_horizon

PAIRS = [
    (Decision.YIELD, Role.LANE_KEEPING),
    (Decision.PASS, Role.LANE_KEEPING),
    (Decision.MERGE_BACK, Role.MERGING),
    (Decision.MERGE_FRONT, Role.MERGING),
]

yield_params = ContinuousParams(Decision.YIELD,
                                np.asarray(gen.theta_star[Decision.YIELD]))

for decision, role in PAIRS:
    theta_star = np.asarray(gen.theta_star[decision], dtype=float)
    params_star = ContinuousParams(decision, theta_star)
    yp = yield_params if decision is Decision.MERGE_FRONT else None
    feats = FEATURE_SETS[decision]
    gi = feats.index("goal")

    rng = np.random.default_rng(23)
    scenes = []
    n = 0
    while len(scenes) < 10 and n < 200:
        n += 1
        s = _draw_scene(role, rng, gen, config, f"{decision.value}_{n}")
        try:
            res = optimize_trajectory(params_star, s, H, config, yp)
        except Exception:
            continue
        if res.converged:
            scenes.append((s, res.trajectory))

    corner = np.full(len(feats), 1e-6)
    corner[gi] = 20.0
    pc = ContinuousParams(decision, corner)
    meds = []
    nconv = 0
    for s, ml in scenes:
        try:
            r2 = optimize_trajectory(pc, s, H, config, yp)
        except Exception:
            continue
        nconv += r2.converged
        meds.append(float(np.mean(np.linalg.norm(r2.trajectory.points - ml.points, axis=1))))
    print(f"{decision.value}: scenes {len(scenes)} corner-conv {nconv} "
          f"MED mean {np.mean(meds):.3f} max {np.max(meds):.3f}")

    # basin probe on iid demos: paired objective values
    rng2 = np.random.default_rng(31)
    demos = [Demonstration(scene=s,
                           future=Trajectory(ml.coords + 0.1 * rng2.standard_normal(ml.coords.size), s.dt),
                           decision=decision)
             for s, ml in scenes]
    probes = {"corner g=20": corner}
    if "idm" in feats:
        v = corner.copy(); v[feats.index("idm")] = 0.2
        probes["corner + idm 0.2"] = v
        v2 = corner.copy(); v2[feats.index("idm")] = 0.02
        probes["corner + idm 0.02"] = v2
    v3 = corner.copy(); v3[feats.index("clearance")] = 0.2
    probes["corner + clr 0.2"] = v3
    for name, th in probes.items():
        val = laplace_objective(ContinuousParams(decision, th), demos, config, yp)
        print(f"    J({name}) = {val:.1f}")
