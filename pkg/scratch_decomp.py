"""Decompose the per-demo Laplace quadratic term by eigendirection."""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role
from mergeirl.synthetic import GeneratorConfig, _draw_scene, _model_noise
from mergeirl.features import ContinuousParams, cost_gradient_hessian
from mergeirl.optimizer import optimize_trajectory
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()
rng = np.random.default_rng(7)

decision = Decision.YIELD
role = Role.LANE_KEEPING
theta_star = np.asarray(gen.theta_star[decision], dtype=float)
params_star = ContinuousParams(decision, theta_star)
H = config.train_horizon

scene = None
n = 0
while True:
    n += 1
    s = _draw_scene(role, rng, gen, config, f"d_{n}")
    try:
        res = optimize_trajectory(params_star, s, H, config, None)
    except Exception:
        continue
    if res.converged:
        scene = s
        break

ml = res.trajectory
noise = _model_noise(params_star, scene, ml, config, gen, rng, None)
demo = Trajectory(ml.coords + noise, scene.dt)

print("noise rms:", float(np.sqrt(np.mean(noise ** 2))),
      "max:", float(np.max(np.abs(noise))))

rep_ml = cost_gradient_hessian(params_star, scene, ml, config)
rep = cost_gradient_hessian(params_star, scene, demo, config)
g = rep.gradient
Hm = rep.hessian
lam, vec = np.linalg.eigh(0.5 * (Hm + Hm.T))
gh = vec.T @ g
lam_t = np.maximum(lam, config.hessian_floor)
contrib = gh ** 2 / lam_t

print("gradient norm at ml :", float(np.linalg.norm(rep_ml.gradient)))
print("gradient norm at demo:", float(np.linalg.norm(g)))
print("eig range at demo: min %.4g max %.4g, n_below_floor=%d, n_neg=%d"
      % (lam.min(), lam.max(), int(np.sum(lam < config.hessian_floor)),
         int(np.sum(lam < 0))))
print("quad term total:", float(contrib.sum()))
order = np.argsort(contrib)[::-1]
print("top 10 directions (lam_true, |g_dir|, contrib):")
for i in order[:10]:
    print(f"  lam={lam[i]:12.4g}  g={abs(gh[i]):10.4g}  contrib={contrib[i]:12.4g}")

# linearity check: g(demo) vs H(ml) @ noise + g(ml)
pred = rep_ml.gradient + rep_ml.hessian @ noise
err = np.linalg.norm(g - pred) / max(np.linalg.norm(g), 1e-12)
print("relative nonlinearity of gradient:", float(err))

# Hessian at ml spectrum for reference
lam_ml = np.linalg.eigvalsh(0.5 * (rep_ml.hessian + rep_ml.hessian.T))
print("eig range at ml: min %.4g max %.4g, n_neg=%d"
      % (lam_ml.min(), lam_ml.max(), int(np.sum(lam_ml < 0))))
