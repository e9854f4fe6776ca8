"""Trace TR behavior on an unconverged pass scene."""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role
from mergeirl.synthetic import GeneratorConfig, _draw_scene
from mergeirl.features import ContinuousParams, FEATURE_SETS, build_context, feature_stack
from mergeirl.optimizer import _warm_start, _tr_step, _FIXED
from mergeirl.errors import CrossingOrderError

config = Config()
gen = GeneratorConfig()
H = config.train_horizon

names = FEATURE_SETS[Decision.PASS]
base = np.asarray(gen.theta_star[Decision.PASS], dtype=float)
base[names.index("idm")] = 1e-6

rng = np.random.default_rng(5)
s = _draw_scene(Role.LANE_KEEPING, rng, gen, config, "s0")
ctx = build_context(Decision.PASS, s, config, H, None, names)
theta = base


def total(pts):
    vals, _, _ = feature_stack(ctx, pts, derivs=False, smooth=True)
    return float(theta @ vals)


pts = _warm_start(ctx, theta, s, H)
cost = total(pts)
delta = 2.0
for it in range(200):
    vals, grads, hesses = feature_stack(ctx, pts, derivs=True, smooth=True, stabilized=True)
    grad = np.tensordot(theta, grads, axes=1)[_FIXED:]
    hess = np.tensordot(theta, hesses, axes=1)[_FIXED:, _FIXED:]
    lam, vec = np.linalg.eigh(hess)
    gh = vec.T @ grad
    step = _tr_step(lam, gh, delta)
    predicted = -(gh @ (vec.T @ step)) - 0.5 * step @ (hess @ step)
    cand = pts.copy()
    cand_flat = cand.reshape(-1)
    cand_flat[_FIXED:] += step
    try:
        cand_cost = total(cand)
        rho = (cost - cand_cost) / predicted if predicted > 0 else -1
    except CrossingOrderError:
        cand_cost, rho = np.nan, -np.inf
    if it % 10 == 0 or it > 190:
        print(f"it {it:3d} cost {cost:10.4f} |g| {np.linalg.norm(grad):9.3e} "
              f"lam[min,max] [{lam.min():9.2e},{lam.max():9.2e}] delta {delta:8.2e} "
              f"pred {predicted:9.2e} rho {rho:7.3f}")
    if rho >= 0.1:
        pts, cost = cand, cand_cost
        delta = min(delta * 2.0, 20.0) if rho > 0.75 else delta
    else:
        delta *= 0.25
    if delta < 1e-10:
        print("delta collapsed", it)
        break
