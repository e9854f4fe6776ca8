"""Static figure rendering for CLI reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .predictor import PredictionMixture
from .scenario import Scene

_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red")


def save_prediction_figure(mixture: PredictionMixture, scene: Scene,
                           path: str, max_samples: int = 25) -> None:
    """Bird's-eye overlay of history, host plan and the predicted mixture."""
    fig, ax = plt.subplots(figsize=(9, 4))
    hp = scene.hist_predicted.points
    hh = scene.hist_host.points
    ax.plot(hp[:, 0], hp[:, 1], color="0.4", lw=1.2, label="predicted history")
    ax.plot(hh[:, 0], hh[:, 1], color="0.7", lw=1.2, label="host history")
    hf = scene.host_future.points
    ax.plot(hf[:, 0], hf[:, 1], color="0.2", lw=1.5, ls="--", label="host plan")
    for color, comp in zip(_COLORS, mixture.components):
        for traj in comp.samples[1:max_samples]:
            pts = traj.points
            ax.plot(pts[:, 0], pts[:, 1], color=color, alpha=0.12, lw=0.8)
        ml = comp.most_likely.points
        ax.plot(ml[:, 0], ml[:, 1], color=color, lw=2.0,
                label=f"{comp.decision.value} (p={comp.probability:.2f})")
    for lane_y in {scene.lanes.current_y, scene.lanes.target_y}:
        ax.axhline(lane_y, color="0.85", lw=0.8, zorder=0)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(f"scene {mixture.scene_id or '(unnamed)'}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_training_figure(traces: dict[str, np.ndarray], path: str) -> None:
    """Objective value per iteration for each trained decision."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for color, (name, trace) in zip(_COLORS * 2, sorted(traces.items())):
        trace = np.asarray(trace, dtype=float)
        ax.plot(np.arange(trace.size), trace, color=color, label=name)
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    ax.set_title("continuous training convergence")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_evaluation_figure(report: dict, path: str) -> None:
    """Displacement-error histogram next to the Brier decomposition."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    med_values = [row["med_top"] for row in report.get("per_scene", [])]
    if med_values:
        ax1.hist(med_values, bins=min(20, max(5, len(med_values) // 2)),
                 color="tab:blue", edgecolor="white")
    ax1.set_xlabel("mean Euclidean distance [m]")
    ax1.set_ylabel("scenes")
    ax1.set_title("displacement error")
    brier = report.get("brier", {})
    names = ["ground_truth", "aggressive", "dangerous", "total"]
    values = [brier.get(name, 0.0) for name in names]
    ax2.bar(names, values, color=["tab:blue", "tab:orange", "tab:red", "0.4"])
    ax2.set_ylabel("score (lower is better)")
    ax2.set_title("decision score decomposition")
    ax2.tick_params(axis="x", labelrotation=20)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
