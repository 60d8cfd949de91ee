"""Simulation and verification workbench for full network nonlocality in the
entanglement-swapping network.

The pipeline runs scenario -> joint distribution -> correlators -> witnesses,
with side tools for finite-sample statistics, classical/no-signaling hybrid
models, inflation checks and a space-time audit of the lab layout.
"""
from .born import (
    CorrelatorSet,
    JointDistribution,
    compute_distribution,
    correlators,
    validate_no_signaling,
)
from .scenario import Scenario, default_paper_scenario, ideal_scenario
from .witness import BOUND, WitnessReport, eval_r_cns, eval_r_nsc, evaluate_scenario, theory_point

__version__ = "0.1.0"

__all__ = [
    "BOUND",
    "CorrelatorSet",
    "JointDistribution",
    "Scenario",
    "WitnessReport",
    "compute_distribution",
    "correlators",
    "default_paper_scenario",
    "eval_r_cns",
    "eval_r_nsc",
    "evaluate_scenario",
    "ideal_scenario",
    "theory_point",
    "validate_no_signaling",
]
