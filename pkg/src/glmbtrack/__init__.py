"""Labeled multi-Bernoulli multi-target tracking with measurement-driven births."""

from .assignment import AssociationMap, CostMatrix, k_best_subsets, optimal_assignment, ranked_assignments
from .config import ConfigError, FilterConfig, RunConfig, load_config, validate_config
from .glmb import (
    GlmbDensity,
    Hypothesis,
    TruncationBudget,
    extract_estimates,
    glmb_predict,
    glmb_update,
    prune_and_cap,
)
from .mdb import BirthComponent, MdbConfig, birth_existences, make_birth_components, newborn_likelihoods
from .metrics import OspaParams, ospa
from .models import Measurement, MotionModel, SensorModel
from .pipeline import filter_scans, run_experiment, run_single
from .rfs import LabeledSet, LabeledState, TrackLabel
from .smc import LabeledParticleDensity

__all__ = [
    "AssociationMap",
    "BirthComponent",
    "ConfigError",
    "CostMatrix",
    "FilterConfig",
    "GlmbDensity",
    "Hypothesis",
    "LabeledParticleDensity",
    "LabeledSet",
    "LabeledState",
    "Measurement",
    "MdbConfig",
    "MotionModel",
    "OspaParams",
    "RunConfig",
    "SensorModel",
    "TrackLabel",
    "TruncationBudget",
    "birth_existences",
    "extract_estimates",
    "filter_scans",
    "glmb_predict",
    "glmb_update",
    "k_best_subsets",
    "load_config",
    "make_birth_components",
    "newborn_likelihoods",
    "optimal_assignment",
    "ospa",
    "prune_and_cap",
    "ranked_assignments",
    "run_experiment",
    "run_single",
    "validate_config",
]

__version__ = "0.1.0"
