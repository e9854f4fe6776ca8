"""Scratch: end-to-end generate -> train -> predict -> evaluate."""
import time

import numpy as np

from mergeirl.config import Config
from mergeirl.cont_irl import train_continuous
from mergeirl.disc_irl import train_discrete
from mergeirl.evaluation import evaluate_suite
from mergeirl.predictor import ParamSet, predict
from mergeirl.scenario import DECISIONS_BY_ROLE, Decision, Role
from mergeirl.synthetic import GeneratorConfig, generate_synthetic

config = Config()
gen = GeneratorConfig(seed=3, n_train=6, n_test=3)

t0 = time.monotonic()
result = generate_synthetic(gen, config)
print(f"generate: {time.monotonic()-t0:.1f}s, "
      f"{len(result.train)} train {len(result.test)} test")
for demo in result.train[:4] + result.train[-4:]:
    print(" ", demo.scene.scene_id, demo.decision.value)

by_decision = {}
for demo in result.train:
    by_decision.setdefault(demo.decision, []).append(demo)
print("decision counts:", {d.value: len(v) for d, v in by_decision.items()})

continuous = {}
for decision in (Decision.YIELD, Decision.PASS, Decision.MERGE_BACK, Decision.MERGE_FRONT):
    batch = by_decision.get(decision, [])
    if not batch:
        print(f"no demos for {decision.value}")
        continue
    t0 = time.monotonic()
    run = train_continuous(batch, decision, config,
                           yield_params=continuous.get(Decision.YIELD),
                           restarts=1)
    continuous[decision] = run.params()
    theta_star = np.asarray(gen.theta_star[decision])
    theta_hat = run.theta
    cosine = float(theta_hat @ theta_star / (np.linalg.norm(theta_hat) * np.linalg.norm(theta_star)))
    print(f"train {decision.value}: {time.monotonic()-t0:.1f}s obj={run.objective_trace[-1]:.4g} "
          f"iters={run.iterations} conv={run.converged} cos={cosine:.4f}")
    print(f"   theta_hat  {theta_hat.round(6)}")
    print(f"   theta_star {theta_star}")

discrete = {}
for role in (Role.MERGING, Role.LANE_KEEPING):
    batch = [d for d in result.train if d.scene.role is role]
    if any(d not in continuous for d in DECISIONS_BY_ROLE[role]):
        print(f"skip psi for {role.value}")
        continue
    t0 = time.monotonic()
    dp = train_discrete(batch, continuous, config)
    discrete[role] = dp
    print(f"train psi {role.value}: {time.monotonic()-t0:.1f}s psi={dp.psi.round(4)} "
          f"conv={dp.converged} iters={dp.iterations}")

params = ParamSet(continuous=continuous, discrete=discrete)
t0 = time.monotonic()
mix = predict(result.test[0].scene, params, config, seed=1)
print(f"predict: {time.monotonic()-t0:.1f}s",
      {c.decision.value: round(c.probability, 3) for c in mix.components})

t0 = time.monotonic()
report = evaluate_suite(result.test, result.labels, params, config)
print(f"evaluate: {time.monotonic()-t0:.1f}s med_mean={report.med_mean:.3f} "
      f"brier_total={report.brier.total:.4f} failures={report.n_failures}")
