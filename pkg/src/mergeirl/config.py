"""Run configuration shared by features, training, prediction and the CLI."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class Config:
    """Numeric defaults for the whole pipeline.

    Geometry is expressed in a lane-aligned frame: x runs along the road,
    y is the signed lateral offset (positive left). All lengths in meters,
    times in seconds.
    """

    dt: float = 0.1
    history_steps: int = 50
    train_horizon: int = 50
    predict_horizon: int = 30
    goal_offset: float = 10.0          # longitudinal slack between goal and the other vehicle
    lane_width: float = 3.6
    corridor: float = 50.0             # max projection distance onto a centerline
    vehicle_length: float = 4.5
    vehicle_width: float = 1.8
    # car-following model constants
    idm_time_headway: float = 1.5
    idm_max_accel: float = 1.0
    idm_comfort_decel: float = 1.5
    idm_jam_distance: float = 2.0
    idm_desired_speed: float | None = None   # None: use the scene speed limit
    # cost shaping
    courtesy_sharpness: float = 20.0   # softplus sharpness used when differentiating courtesy
    kernel_length: float | None = None  # None: vehicle_length
    kernel_width: float | None = None   # None: vehicle_width
    # continuous trainer
    theta_min: float = 1e-6
    hessian_floor: float = 1e-6
    train_max_iter: int = 500
    train_obj_tol: float = 1e-8
    train_fd_step: float = 1e-5
    train_armijo_c: float = 1e-4
    train_backtrack: float = 0.5
    train_restarts: int = 3
    # trajectory optimizer
    opt_max_iter: int = 200
    opt_step_tol: float = 1e-6
    # discrete trainer
    disc_step_size: float = 0.05
    disc_max_iter: int = 2000
    disc_grad_tol: float = 1e-6
    # sampling
    sample_count: int = 100
    sample_sigma: float = 0.5
    # execution
    jobs: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("dt must be positive")
        for name in ("history_steps", "train_horizon", "predict_horizon"):
            if getattr(self, name) < 3:
                raise ValidationError(f"{name} must be at least 3")
        if self.sample_count < 1:
            raise ValidationError("sample_count must be at least 1")
        if self.sample_sigma < 0:
            raise ValidationError("sample_sigma must be non-negative")
        for name in ("idm_time_headway", "idm_max_accel", "idm_comfort_decel",
                     "idm_jam_distance", "lane_width", "vehicle_length",
                     "vehicle_width", "corridor"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")

    def replace(self, **changes) -> "Config":
        return dataclasses.replace(self, **changes)

    def fingerprint(self) -> dict:
        """Values that must match between training and later use of parameters."""
        return {
            "dt": self.dt,
            "history_steps": self.history_steps,
            "train_horizon": self.train_horizon,
            "predict_horizon": self.predict_horizon,
            "goal_offset": self.goal_offset,
            "idm": {
                "time_headway": self.idm_time_headway,
                "max_accel": self.idm_max_accel,
                "comfort_decel": self.idm_comfort_decel,
                "jam_distance": self.idm_jam_distance,
                "desired_speed": self.idm_desired_speed,
            },
            "vehicle_length": self.vehicle_length,
            "vehicle_width": self.vehicle_width,
        }

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str) -> "Config":
        with open(path) as fh:
            payload = json.load(fh)
        section = payload.get("run", payload) if isinstance(payload, dict) else payload
        if not isinstance(section, dict):
            raise ValidationError("config file must contain a JSON object")
        return cls.from_dict(section)
