"""Compare demo-noise designs: objective ray shape, trained theta, cosine."""
import numpy as np

from mergeirl.config import Config
from mergeirl.scenario import Decision, Role, Demonstration
from mergeirl.synthetic import GeneratorConfig, _draw_scene
from mergeirl.features import ContinuousParams, cost_gradient_hessian
from mergeirl.optimizer import optimize_trajectory
from mergeirl.cont_irl import laplace_objective, train_continuous
from mergeirl.trajectory import Trajectory

config = Config()
gen = GeneratorConfig()

decision = Decision.YIELD
role = Role.LANE_KEEPING
theta_star = np.asarray(gen.theta_star[decision], dtype=float)
params_star = ContinuousParams(decision, theta_star)
H = config.train_horizon
STD = 0.1


def collect_scenes(n_want, seed):
    rng = np.random.default_rng(seed)
    out = []
    n = 0
    while len(out) < n_want:
        n += 1
        s = _draw_scene(role, rng, gen, config, f"d_{n}")
        try:
            res = optimize_trajectory(params_star, s, H, config, None)
        except Exception:
            continue
        if res.converged:
            out.append((s, res.trajectory))
    return out


def noise_capped(rep, rng, cap):
    hess = 0.5 * (rep.hessian + rep.hessian.T)
    lam, vec = np.linalg.eigh(hess)
    pos = lam > 1e-9
    n = lam.size
    lo, hi = 0.0, 1.0
    while np.sum(np.minimum(hi ** 2 / lam[pos], cap ** 2)) < STD ** 2 * n:
        hi *= 2.0
        if hi > 1e6:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        tot = np.sum(np.minimum(mid ** 2 / lam[pos], cap ** 2))
        if tot < STD ** 2 * n:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    sig = np.zeros(n)
    sig[pos] = np.minimum(r / np.sqrt(lam[pos]), cap)
    return vec @ (rng.standard_normal(n) * sig)


def noise_smooth(L, rng, sigma_steps):
    k = np.arange(-3 * sigma_steps, 3 * sigma_steps + 1)
    kern = np.exp(-0.5 * (k / sigma_steps) ** 2)
    kern /= kern.sum()
    eps = rng.standard_normal((L + k.size, 2))
    out = np.empty((L, 2))
    for ax in (0, 1):
        out[:, ax] = np.convolve(eps[:, ax], kern, mode="valid")[:L]
    out *= STD / np.sqrt(np.sum(kern ** 2))
    return out.reshape(-1)


scenes = collect_scenes(20, 7)
print("collected", len(scenes), "scenes")

designs = {}
rng = np.random.default_rng(11)
demos = []
for s, ml in scenes:
    rep = cost_gradient_hessian(params_star, s, ml, config)
    demos.append(Demonstration(
        scene=s, future=Trajectory(ml.coords + noise_capped(rep, rng, 0.12), s.dt),
        decision=decision))
designs["capped 0.12"] = demos

rng = np.random.default_rng(11)
demos = []
for s, ml in scenes:
    demos.append(Demonstration(
        scene=s, future=Trajectory(ml.coords + noise_smooth(H, rng, 4.0), s.dt),
        decision=decision))
designs["smooth sig4"] = demos

rng = np.random.default_rng(11)
demos = []
for s, ml in scenes:
    demos.append(Demonstration(
        scene=s, future=Trajectory(ml.coords + noise_smooth(H, rng, 8.0), s.dt),
        decision=decision))
designs["smooth sig8"] = demos

rng = np.random.default_rng(11)
designs["iid 0.1"] = [
    Demonstration(scene=s,
                  future=Trajectory(ml.coords + STD * rng.standard_normal(ml.coords.size), s.dt),
                  decision=decision)
    for s, ml in scenes]

designs["exact"] = [
    Demonstration(scene=s, future=Trajectory(ml.coords.copy(), s.dt), decision=decision)
    for s, ml in scenes]

for name, demos in designs.items():
    rms = np.sqrt(np.mean([np.mean((d.future.coords - m.coords) ** 2)
                           for d, (s, m) in zip(demos, scenes)]))
    mx = max(np.max(np.abs(d.future.coords - m.coords))
             for d, (s, m) in zip(demos, scenes))
    print(f"\n=== {name}: rms {rms:.4f} max {mx:.4f}")
    row = []
    for c in [0.5, 2.0, 8.0, 32.0, 128.0, 512.0]:
        p = ContinuousParams(decision, c * theta_star)
        row.append((c, laplace_objective(p, demos, config)))
    print("  ray:", "  ".join(f"c={c:g}:{v:.1f}" for c, v in row))
    run = train_continuous(demos, decision, config, restarts=1)
    cos = float(run.theta @ theta_star /
                (np.linalg.norm(run.theta) * np.linalg.norm(theta_star)))
    print("  theta_hat:", np.array2string(run.theta, precision=5))
    print("  ratio    :", np.array2string(run.theta / theta_star, precision=3))
    print(f"  cosine {cos:.4f}  J(that) {laplace_objective(run.params(), demos, config):.2f}"
          f"  iters {run.iterations} conv {run.converged}")
    meds = []
    for s, ml in scenes[:10]:
        try:
            r2 = optimize_trajectory(run.params(), s, H, config, None)
            meds.append(float(np.mean(np.linalg.norm(
                r2.trajectory.points - ml.points, axis=1))))
        except Exception as exc:
            meds.append(np.nan)
    print("  MED vs theta* optima:", np.array2string(np.asarray(meds), precision=3),
          " mean %.3f" % np.nanmean(meds))
