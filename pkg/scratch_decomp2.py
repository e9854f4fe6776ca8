"""Decompose J(goal corner) per demo: quad vs logdet, eigenvalue bands, culprits."""
import numpy as np

from mergeirl.config import Config
from mergeirl.cont_irl import _demo_stacks
from mergeirl.features import ContinuousParams
from mergeirl.optimizer import optimize_trajectory
from mergeirl.scenario import Decision, Demonstration, Role, feature_set_for
from mergeirl.synthetic import DEFAULT_THETA_STAR, GeneratorConfig, _draw_scene
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()
H = config.train_horizon
decision, role = Decision.YIELD, Role.LANE_KEEPING
names = feature_set_for(decision)
dim = len(names)
theta_star = np.asarray(DEFAULT_THETA_STAR[decision])
params = ContinuousParams(decision=decision, theta=theta_star)

rng = np.random.default_rng(11)
demos = []
draws = 0
while len(demos) < 20:
    scene = _draw_scene(role, rng, gen, config, f"t{draws}")
    draws += 1
    res = optimize_trajectory(params, scene, H, config, None)
    if not res.converged:
        continue
    noise = gen.noise_std * rng.standard_normal(res.trajectory.coords.size)
    demos.append(Demonstration(scene=scene,
                               future=Trajectory(res.trajectory.coords + noise, scene.dt),
                               decision=decision))

stacks = _demo_stacks(demos, decision, config, None, names)
floor = config.hessian_floor

th = np.full(dim, config.theta_min)
th[names.index("goal")] = 50.0

tot_quad = tot_logdet = 0.0
worst = []
for k, st in enumerate(stacks):
    g = th @ st.grads
    Hm = np.tensordot(th, st.hesses, axes=1)
    lam, vec = np.linalg.eigh(0.5 * (Hm + Hm.T))
    lam_c = np.maximum(lam, floor)
    gh = vec.T @ g
    quad = float(np.sum(gh * gh / lam_c))
    logdet = float(np.sum(np.log(lam_c)))
    tot_quad += quad
    tot_logdet += logdet
    worst.append((quad, k, lam.min(), lam.max(), int((lam < floor).sum())))
    if k < 3:
        contrib = gh * gh / lam_c
        idx = np.argsort(contrib)[::-1][:4]
        print(f"demo {k}: quad {quad:.3e} logdet {logdet:.2f} lam[min,max] "
              f"[{lam.min():.2e},{lam.max():.2e}] clamped {(lam<floor).sum()}")
        for i in idx:
            print(f"   dir lam {lam[i]:.3e} gh {gh[i]:.3e} contrib {contrib[i]:.3e}")

worst.sort(reverse=True)
print("top quad demos:", [(f"{q:.2e}", k, f"min {mn:.1e}", f"clamp {c}") for q, k, mn, mx, c in worst[:5]])
print(f"TOTAL quad {tot_quad:.4e} -logdet-sum {-tot_logdet:.2f} J {tot_quad - tot_logdet:.4e}")

# per-feature gradient norms at the worst demo
qk = worst[0][1]
st = stacks[qk]
for i, n in enumerate(names):
    print(f"  demo {qk} feature {n:9s} |grad| {np.linalg.norm(st.grads[i]):.3e} "
          f"H eig range [{np.linalg.eigvalsh(st.hesses[i]).min():.2e},{np.linalg.eigvalsh(st.hesses[i]).max():.2e}]")
