"""Intelligent-driver car-following model: desired gap and forward rollout."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# acceleration exponent of the model
DELTA = 4.0


@dataclass(frozen=True)
class IdmConfig:
    desired_speed: float
    time_headway: float = 1.5
    max_accel: float = 1.0
    comfort_decel: float = 1.5
    jam_distance: float = 2.0

    def __post_init__(self):
        for name in ("desired_speed", "time_headway", "max_accel",
                     "comfort_decel", "jam_distance"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"IDM parameter {name} must be positive")


def desired_gap(v: np.ndarray, v_front: np.ndarray, idm: IdmConfig) -> np.ndarray:
    """Equilibrium spatial headway s* for given own and leader speeds.

    s* = s_jam + v*T + v*(v - v_front) / (2*sqrt(a*b)), floored at s_jam.
    """
    v = np.asarray(v, dtype=float)
    v_front = np.asarray(v_front, dtype=float)
    c = 2.0 * np.sqrt(idm.max_accel * idm.comfort_decel)
    raw = idm.jam_distance + v * idm.time_headway + v * (v - v_front) / c
    return np.maximum(raw, idm.jam_distance)


def idm_acceleration(v: float, gap: float | None, v_front: float | None,
                     idm: IdmConfig) -> float:
    """Longitudinal acceleration command; `gap=None` means free road."""
    free = 1.0 - (max(v, 0.0) / idm.desired_speed) ** DELTA
    if gap is None:
        a = idm.max_accel * free
    else:
        gap = max(gap, 0.1)
        s_star = float(desired_gap(v, v_front, idm))
        a = idm.max_accel * (free - (s_star / gap) ** 2)
    # keep the rollout physically plausible under extreme inputs
    return float(np.clip(a, -2.0 * idm.comfort_decel, idm.max_accel))


def rollout(x0: float, v0: float, y: float, horizon: int, dt: float,
            idm: IdmConfig, leader: np.ndarray | None = None) -> np.ndarray:
    """Roll the model forward, returning (horizon, 2) future positions.

    `leader` gives the leader's future positions (horizon, 2); None rolls a
    free road. Step t of the output is (t + 1)*dt past the initial state,
    matching the future-trajectory convention. Lateral position is held.
    """
    if horizon < 1:
        raise ValidationError("rollout horizon must be at least 1")
    out = np.empty((horizon, 2))
    x, v = float(x0), max(float(v0), 0.0)
    lead_v = None
    if leader is not None:
        leader = np.asarray(leader, dtype=float)
        if leader.shape != (horizon, 2):
            raise ValidationError("leader positions must have shape (horizon, 2)")
        lead_x_prev = None
    for t in range(horizon):
        if leader is None:
            a = idm_acceleration(v, None, None, idm)
        else:
            lx = leader[t, 0]
            if t == 0:
                lead_v = (leader[1, 0] - leader[0, 0]) / dt if horizon > 1 else v
            else:
                lead_v = (leader[t, 0] - leader[t - 1, 0]) / dt
            a = idm_acceleration(v, lx - x, lead_v, idm)
        v = max(v + a * dt, 0.0)
        x = x + v * dt
        out[t] = (x, y)
    return out
