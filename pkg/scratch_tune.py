"""Recovery rehearsal: cosine(theta_hat, theta*) and held-out MED per decision."""
import time

import numpy as np

from mergeirl.config import Config
from mergeirl.cont_irl import train_continuous
from mergeirl.evaluation import med
from mergeirl.features import ContinuousParams
from mergeirl.optimizer import optimize_trajectory
from mergeirl.scenario import Decision, Demonstration, Role
from mergeirl.synthetic import DEFAULT_THETA_STAR, GeneratorConfig, _draw_scene
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()
H = config.train_horizon

t0 = time.time()
for decision, role in ((Decision.YIELD, Role.LANE_KEEPING),
                       (Decision.PASS, Role.LANE_KEEPING),
                       (Decision.MERGE_BACK, Role.MERGING),
                       (Decision.MERGE_FRONT, Role.MERGING)):
    theta_star = np.asarray(DEFAULT_THETA_STAR[decision])
    params = ContinuousParams(decision=decision, theta=theta_star)
    yp = (ContinuousParams(decision=Decision.YIELD,
                           theta=np.asarray(DEFAULT_THETA_STAR[Decision.YIELD]))
          if decision is Decision.MERGE_FRONT else None)
    rng = np.random.default_rng(11)

    demos, held = [], []
    draws = 0
    while len(demos) < 20 or len(held) < 20:
        scene = _draw_scene(role, rng, gen, config, f"t{draws}")
        draws += 1
        res = optimize_trajectory(params, scene, H, config, yp)
        if not res.converged:
            continue
        if len(demos) < 20:
            noise = gen.noise_std * rng.standard_normal(res.trajectory.coords.size)
            demos.append(Demonstration(
                scene=scene,
                future=Trajectory(res.trajectory.coords + noise, scene.dt),
                decision=decision))
        else:
            held.append((scene, res.trajectory))

    run = train_continuous(demos, decision, config, yield_params=yp, restarts=1)
    th = run.theta
    cosine = float(th @ theta_star / (np.linalg.norm(th) * np.linalg.norm(theta_star)))

    meds = []
    for scene, ml_star in held:
        res_hat = optimize_trajectory(run.params(), scene, H, config, yp)
        meds.append(med(res_hat.trajectory, ml_star))
    scale = np.median(th / theta_star)
    print(f"{decision.value}: draws {draws} cosine {cosine:.4f} "
          f"MED mean {np.mean(meds):.4f} max {np.max(meds):.4f} "
          f"scale x{scale:.1f} converged {run.converged}")
    print("  theta_hat", np.array2string(th, precision=6, suppress_small=False))
    print("  theta*  ", np.array2string(theta_star, precision=6))
print("elapsed", round(time.time() - t0, 1))
