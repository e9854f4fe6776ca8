"""Trajectory containers, numerical differentiation and lane-frame projection.

Trajectories are uniformly sampled planar waypoint sequences. Differentiation
uses forward differences with the trailing values held, so a sequence of L
waypoints yields L speeds, L accelerations and L-1 jerks:

    v_t = |p_{t+1} - p_t| / dt            (last value held)
    a_t = (v_{t+1} - v_t) / dt            (held past the last measured pair)
    j_t = (a_t - a_{t-1}) / dt            (defined from t = 1)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTrajectoryError, ExtrapolationError, ProjectionError, ValidationError


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Planar trajectory as a flat coordinate vector [x0, y0, ..., x_{L-1}, y_{L-1}]."""

    coords: np.ndarray
    dt: float

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 1 or coords.size % 2 != 0:
            raise DegenerateTrajectoryError("coords must be a flat [x, y, ...] vector")
        if coords.size < 6:
            raise DegenerateTrajectoryError("a trajectory needs at least 3 waypoints")
        if not np.all(np.isfinite(coords)):
            raise DegenerateTrajectoryError("coords must be finite")
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValidationError("dt must be a positive finite number")
        coords = coords.copy()
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_points(cls, points: np.ndarray, dt: float) -> "Trajectory":
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise DegenerateTrajectoryError("points must have shape (L, 2)")
        return cls(points.reshape(-1), dt)

    @property
    def length(self) -> int:
        return self.coords.size // 2

    @property
    def points(self) -> np.ndarray:
        return self.coords.reshape(-1, 2)

    @property
    def duration(self) -> float:
        return (self.length - 1) * self.dt

    def __len__(self) -> int:
        return self.length


@dataclass(frozen=True)
class KinematicProfile:
    """Derived per-step kinematics of a trajectory."""

    speeds: np.ndarray      # length L
    accels: np.ndarray      # length L
    jerks: np.ndarray       # length L - 1
    headings: np.ndarray    # length L, rad

    def __post_init__(self):
        L = self.speeds.size
        if self.accels.size != L or self.headings.size != L or self.jerks.size != L - 1:
            raise ValidationError("inconsistent kinematic array lengths")


def differentiate(traj: Trajectory) -> KinematicProfile:
    """Forward-difference speeds, accelerations, jerks and headings.

    Held boundary values keep every array aligned with the waypoints: the
    last speed repeats the final measured one, the last two accelerations
    repeat the final measured one. A uniform-speed trajectory therefore maps
    to constant speeds exactly, and a constant-acceleration trajectory to
    constant accelerations.
    """
    pts = traj.points
    L = traj.length
    dt = traj.dt
    disp = np.diff(pts, axis=0)
    v_core = np.linalg.norm(disp, axis=1) / dt          # L-1 measured speeds
    speeds = np.append(v_core, v_core[-1])
    a_core = np.diff(v_core) / dt                        # L-2 measured accelerations
    accels = np.concatenate([a_core, [a_core[-1], a_core[-1]]])
    jerks = np.diff(accels) / dt                         # L-1 values, defined from t=1
    head_core = np.arctan2(disp[:, 1], disp[:, 0])
    headings = np.append(head_core, head_core[-1])
    return KinematicProfile(speeds=speeds, accels=accels, jerks=jerks, headings=headings)


class Centerline:
    """Piecewise-linear lane centerline in world coordinates.

    Supports projecting world points into the lane frame (arc length along
    the line, signed lateral offset, positive to the left of travel) and
    mapping lane-frame points back to world coordinates.
    """

    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
            raise ValidationError("centerline needs at least 2 (x, y) points")
        if not np.all(np.isfinite(points)):
            raise ValidationError("centerline points must be finite")
        seg = np.diff(points, axis=0)
        seg_len = np.linalg.norm(seg, axis=1)
        if np.any(seg_len <= 0):
            raise ValidationError("centerline points must be strictly distinct")
        self.points = points
        self._seg = seg
        self._seg_len = seg_len
        self._cum = np.concatenate([[0.0], np.cumsum(seg_len)])

    @property
    def arc_length(self) -> float:
        return float(self._cum[-1])


def project_to_frenet(centerline: Centerline, points: np.ndarray,
                      corridor: float = 50.0) -> np.ndarray:
    """Project world points onto a centerline.

    Returns an (N, 2) array of (arc length, signed lateral offset). Each point
    is matched to its closest location on the polyline, interpolating linearly
    within segments. Raises ProjectionError (with the first offending index)
    when a point lies farther than `corridor` from the line.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != 2:
        raise ValidationError("points must have shape (N, 2)")
    base = centerline.points[:-1]                        # (S, 2)
    seg = centerline._seg
    seg_len = centerline._seg_len
    rel = points[:, None, :] - base[None, :, :]          # (N, S, 2)
    t = np.einsum("nsk,sk->ns", rel, seg) / (seg_len ** 2)
    t = np.clip(t, 0.0, 1.0)
    proj = base[None, :, :] + t[:, :, None] * seg[None, :, :]
    d2 = np.sum((points[:, None, :] - proj) ** 2, axis=2)
    best = np.argmin(d2, axis=1)
    n = np.arange(points.shape[0])
    dist = np.sqrt(d2[n, best])
    outside = dist > corridor
    if np.any(outside):
        idx = int(np.argmax(outside))
        raise ProjectionError(
            f"point {idx} is {dist[idx]:.2f} m from the centerline "
            f"(corridor {corridor:.2f} m)", index=idx)
    arc = centerline._cum[best] + t[n, best] * seg_len[best]
    tangent = seg[best] / seg_len[best][:, None]
    offset = points - proj[n, best]
    lateral = tangent[:, 0] * offset[:, 1] - tangent[:, 1] * offset[:, 0]
    return np.column_stack([arc, lateral])


def frenet_to_xy(centerline: Centerline, frenet_points: np.ndarray) -> np.ndarray:
    """Map (arc length, lateral) pairs back to world coordinates.

    Arc lengths must lie within [0, total length]; queries outside raise
    ExtrapolationError.
    """
    fp = np.atleast_2d(np.asarray(frenet_points, dtype=float))
    if fp.shape[1] != 2:
        raise ValidationError("frenet points must have shape (N, 2)")
    arc = fp[:, 0]
    lat = fp[:, 1]
    total = centerline.arc_length
    if np.any(arc < -1e-9) or np.any(arc > total + 1e-9):
        bad = int(np.argmax((arc < -1e-9) | (arc > total + 1e-9)))
        raise ExtrapolationError(
            f"arc length {arc[bad]:.3f} outside [0, {total:.3f}] at index {bad}")
    arc = np.clip(arc, 0.0, total)
    seg_idx = np.clip(np.searchsorted(centerline._cum, arc, side="right") - 1,
                      0, len(centerline._seg_len) - 1)
    local = arc - centerline._cum[seg_idx]
    tangent = centerline._seg[seg_idx] / centerline._seg_len[seg_idx][:, None]
    base = centerline.points[seg_idx] + local[:, None] * tangent
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])   # left normal
    return base + lat[:, None] * normal
