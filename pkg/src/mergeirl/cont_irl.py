"""Continuous cost-weight learning from demonstrations.

The likelihood of a demonstration under a cost exp(-C) is approximated with a
second-order expansion of C around the demonstrated trajectory, which turns
the negative log-likelihood (up to constants) into

    g^T H~^{-1} g  -  log det H~

per demonstration, with g and H the cost gradient and Hessian at the
demonstration and H~ the positive-definite regularization of H. Training
minimizes the sum over demonstrations by projected gradient descent on the
non-negative weight vector; good weights make demonstrations near-stationary
(small g) and strongly curved (large H).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import Config
from .errors import DependencyError, NumericalError, ValidationError
from .features import ContinuousParams, build_context, feature_stack
from .scenario import Decision, Demonstration, feature_set_for

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingRun:
    """Outcome of one continuous training call (best restart)."""

    decision: Decision
    theta: np.ndarray
    features: tuple
    theta_trace: tuple
    objective_trace: np.ndarray
    converged: bool
    iterations: int
    restart: int
    restart_seeds: tuple

    def params(self) -> ContinuousParams:
        return ContinuousParams(self.decision, self.theta, self.features)


def regularize(hessian: np.ndarray, floor: float = 1e-6) -> np.ndarray:
    """Clamp the eigenvalues of a symmetric matrix at `floor`."""
    hessian = np.asarray(hessian, dtype=float)
    if hessian.ndim != 2 or hessian.shape[0] != hessian.shape[1]:
        raise ValidationError("hessian must be square")
    if not np.all(np.isfinite(hessian)):
        raise NumericalError("non-finite hessian")
    vals, vecs = np.linalg.eigh(0.5 * (hessian + hessian.T))
    clamped = np.maximum(vals, floor)
    out = (vecs * clamped) @ vecs.T
    return 0.5 * (out + out.T)


def _quad_logdet(hess: np.ndarray, grad: np.ndarray, floor: float) -> tuple[float, float]:
    """(g^T H~^{-1} g, log det H~) for the eigenvalue-clamped H~.

    When all eigenvalues already exceed the floor (proved by a Cholesky
    factorization of H - floor*I), the clamp is the identity and the
    factorization of H itself is reused; otherwise the eigendecomposition
    computes both terms directly.
    """
    n = hess.shape[0]
    try:
        scipy.linalg.cholesky(hess - floor * np.eye(n), lower=True,
                              check_finite=False)
        chol = scipy.linalg.cholesky(hess, lower=True, check_finite=False)
        half = scipy.linalg.solve_triangular(chol, grad, lower=True,
                                             check_finite=False)
        return float(half @ half), float(2.0 * np.sum(np.log(np.diag(chol))))
    except np.linalg.LinAlgError:
        pass
    vals, vecs = np.linalg.eigh(0.5 * (hess + hess.T))
    clamped = np.maximum(vals, floor)
    proj = vecs.T @ grad
    return float(np.sum(proj ** 2 / clamped)), float(np.sum(np.log(clamped)))


class _DemoStack:
    """Per-demonstration feature derivatives, fixed across weight updates."""

    def __init__(self, grads: np.ndarray, hesses: np.ndarray):
        self.grads = grads      # (d, 2L)
        self.hesses = hesses    # (d, 2L, 2L)


def _objective_from_stacks(theta: np.ndarray, stacks: list[_DemoStack],
                           floor: float) -> float:
    total = 0.0
    for stack in stacks:
        grad = theta @ stack.grads
        hess = np.tensordot(theta, stack.hesses, axes=1)
        quad, logdet = _quad_logdet(hess, grad, floor)
        total += quad - logdet
    return total


def _demo_stacks(demos: list[Demonstration], decision: Decision, config: Config,
                 yield_params: ContinuousParams | None,
                 features: tuple[str, ...]) -> list[_DemoStack]:
    stacks = []
    for i, demo in enumerate(demos):
        try:
            ctx = build_context(decision, demo.scene, config, demo.future.length,
                                yield_params, features)
            _, grads, hesses = feature_stack(ctx, demo.future.points,
                                             derivs=True, smooth=True)
        except NumericalError as exc:
            raise NumericalError(f"demonstration {i}: {exc}") from exc
        if not (np.all(np.isfinite(grads)) and np.all(np.isfinite(hesses))):
            raise NumericalError(f"non-finite feature derivatives at demonstration {i}")
        stacks.append(_DemoStack(grads, hesses))
    return stacks


def laplace_objective(params: ContinuousParams, demos: list[Demonstration],
                      config: Config | None = None,
                      yield_params: ContinuousParams | None = None) -> float:
    """Sum over demonstrations of g^T H~^{-1} g - log det H~."""
    config = config or Config()
    if not demos:
        raise ValidationError("at least one demonstration is required")
    stacks = _demo_stacks(demos, params.decision, config, yield_params,
                          params.features)
    value = _objective_from_stacks(params.theta, stacks, config.hessian_floor)
    if not np.isfinite(value):
        raise NumericalError("non-finite objective")
    return value


def objective_gradient(theta: np.ndarray, stacks: list[_DemoStack],
                       floor: float, step: float) -> np.ndarray:
    """Central finite-difference gradient of the stacked objective."""
    grad = np.empty_like(theta)
    for j in range(theta.size):
        hi = theta.copy()
        hi[j] += step
        lo = theta.copy()
        lo[j] -= step
        grad[j] = (_objective_from_stacks(hi, stacks, floor)
                   - _objective_from_stacks(lo, stacks, floor)) / (2.0 * step)
    return grad


def _descend(theta0: np.ndarray, stacks: list[_DemoStack], config: Config):
    """Projected gradient descent from one start; returns (trace, objs, converged)."""
    floor = config.hessian_floor
    theta = np.maximum(theta0, config.theta_min)
    obj = _objective_from_stacks(theta, stacks, floor)
    if not np.isfinite(obj):
        raise NumericalError("non-finite objective at the starting point",
                             detail=[theta.copy()])
    trace = [theta.copy()]
    objs = [obj]
    converged = False
    alpha0 = 1.0
    for _ in range(config.train_max_iter):
        grad = objective_gradient(theta, stacks, floor, config.train_fd_step)
        if not np.all(np.isfinite(grad)):
            raise NumericalError("non-finite objective gradient", detail=trace)
        alpha = alpha0
        accepted = False
        while alpha > 1e-14:
            cand = np.maximum(theta - alpha * grad, config.theta_min)
            cand_obj = _objective_from_stacks(cand, stacks, floor)
            expected = grad @ (cand - theta)
            if np.isfinite(cand_obj) and cand_obj <= obj + config.train_armijo_c * expected:
                accepted = True
                break
            alpha *= config.train_backtrack
        if not accepted:
            converged = True
            break
        decrease = obj - cand_obj
        theta, obj = cand, cand_obj
        trace.append(theta.copy())
        objs.append(obj)
        alpha0 = min(alpha * 4.0, 1e6)
        if decrease < config.train_obj_tol:
            converged = True
            break
    return trace, np.asarray(objs), converged


def train_continuous(demos: list[Demonstration], decision: Decision,
                     config: Config | None = None,
                     yield_params: ContinuousParams | None = None,
                     features: tuple[str, ...] | None = None,
                     restarts: int | None = None,
                     seed: int = 0) -> TrainingRun:
    """Learn the feature weights of one decision's continuous cost.

    The front-merge decision requires previously trained yield parameters
    (its courtesy feature evaluates the host's yield cost); training it first
    raises DependencyError.
    """
    config = config or Config()
    if not demos:
        raise ValidationError("at least one demonstration is required")
    for i, demo in enumerate(demos):
        if demo.decision is not decision:
            raise ValidationError(
                f"demonstration {i} is labeled {demo.decision.value}, "
                f"expected {decision.value}")
    names = tuple(features) if features is not None else feature_set_for(decision)
    if "courtesy" in names and yield_params is None:
        raise DependencyError(
            "courtesy feature needs trained yield parameters; train yield first")
    stacks = _demo_stacks(demos, decision, config, yield_params, names)
    dim = len(names)
    restarts = config.train_restarts if restarts is None else restarts
    if restarts < 1:
        raise ValidationError("restarts must be at least 1")

    # The objective is multimodal in scale space. Away from the dominant
    # weights, the exact Hessian of the cost at a noisy demonstration picks
    # up so much curvature scatter that clamped directions turn the
    # objective into spiky noise, and the line search stalls within a step
    # or two of the uniform start. Every single-feature basin is therefore
    # probed explicitly: that feature's weight swept over a log grid with
    # the rest floored, and a descent started from the best sweep point.
    # The sweep matters because gradient steps cannot traverse orders of
    # magnitude in weight space, so each axis start must already sit at
    # roughly the right scale.
    floor = config.hessian_floor
    sweep = 10.0 ** np.arange(-2.0, 5.5, 0.5)
    starts: list[tuple[np.ndarray, int | None]] = [(np.full(dim, 1.0 / dim), None)]
    for i in range(dim):
        axis = np.full(dim, config.theta_min)
        best_s, best_obj = None, np.inf
        for s in sweep:
            axis[i] = s
            obj = _objective_from_stacks(axis, stacks, floor)
            if np.isfinite(obj) and obj < best_obj:
                best_s, best_obj = s, obj
        if best_s is not None:
            axis = np.full(dim, config.theta_min)
            axis[i] = best_s
            starts.append((axis, None))
    for k in range(restarts):
        rng_seed = seed + k + 1
        rng = np.random.default_rng(rng_seed)
        starts.append((10.0 ** rng.uniform(-2.0, 4.0, dim), rng_seed))

    best = None
    restart_seeds = []
    for k, (theta0, rng_seed) in enumerate(starts):
        restart_seeds.append(rng_seed)
        trace, objs, converged = _descend(theta0, stacks, config)
        log.debug("restart %d: objective %.6f after %d iterations (converged=%s)",
                  k, objs[-1], len(objs) - 1, converged)
        if best is None or objs[-1] < best[1][-1]:
            best = (trace, objs, converged, k)
    trace, objs, converged, k = best
    return TrainingRun(decision=decision, theta=trace[-1], features=names,
                       theta_trace=tuple(trace), objective_trace=objs,
                       converged=converged, iterations=len(objs) - 1,
                       restart=k, restart_seeds=tuple(restart_seeds))
