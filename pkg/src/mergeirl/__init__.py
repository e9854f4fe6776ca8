"""Interaction-aware trajectory prediction for merging and lane-keeping drivers.

The package learns driver cost functions from demonstrations (a continuous
maximum-entropy layer per decision plus a discrete decision layer on top) and
predicts probabilistic trajectory mixtures conditioned on the interacting
vehicle's plan.
"""

from .config import Config
from .errors import (
    BearingUndefinedError,
    ConfigMismatchError,
    CrossingOrderError,
    DataFormatError,
    DegenerateTrajectoryError,
    DependencyError,
    ExtrapolationError,
    MergeIrlError,
    NumericalError,
    ProjectionError,
    ValidationError,
)
from .scenario import Decision, Demonstration, LaneGeometry, Role, Scene, VehicleDims
from .trajectory import Centerline, KinematicProfile, Trajectory
from .features import ContinuousParams, cost, feature_vector
from .cont_irl import TrainingRun, laplace_objective, train_continuous
from .disc_irl import (DiscreteParams, decision_probabilities, sample_trajectories,
                       train_discrete)
from .optimizer import OptimizeResult, optimize_trajectory
from .predictor import (ParamSet, PredictionMixture, most_likely_trajectory,
                        predict, predict_sensitivity, trajectory_weights)
from .evaluation import BrierScores, EvalReport, brier_scores, evaluate_suite, med
from .dataio import load_demonstrations, load_params, save_params, write_demonstrations
from .synthetic import GeneratorConfig, benchmark_scene_pair, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "Config",
    "Trajectory",
    "Centerline",
    "KinematicProfile",
    "Role",
    "Decision",
    "Scene",
    "Demonstration",
    "LaneGeometry",
    "VehicleDims",
    "MergeIrlError",
    "ValidationError",
    "DegenerateTrajectoryError",
    "ProjectionError",
    "ExtrapolationError",
    "CrossingOrderError",
    "BearingUndefinedError",
    "DependencyError",
    "NumericalError",
    "DataFormatError",
    "ConfigMismatchError",
    "ContinuousParams",
    "DiscreteParams",
    "ParamSet",
    "TrainingRun",
    "OptimizeResult",
    "PredictionMixture",
    "BrierScores",
    "EvalReport",
    "GeneratorConfig",
    "cost",
    "feature_vector",
    "laplace_objective",
    "train_continuous",
    "train_discrete",
    "decision_probabilities",
    "sample_trajectories",
    "optimize_trajectory",
    "most_likely_trajectory",
    "predict",
    "predict_sensitivity",
    "trajectory_weights",
    "med",
    "brier_scores",
    "evaluate_suite",
    "load_demonstrations",
    "load_params",
    "save_params",
    "write_demonstrations",
    "generate_synthetic",
    "benchmark_scene_pair",
    "__version__",
]
