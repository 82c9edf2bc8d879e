"""Boundary control of the LWR traffic model with Lyapunov and barrier functionals."""

from .compound import feasibility_margin, solve_compound, solve_compound_left, solve_compound_right
from .flux import DomainError, FluxModel, flux_eval, godunov_flux
from .functionals import FunctionalParams, barrier_b, lyapunov_v
from .scenario import ConfigError, ScenarioConfig, load_config, run_scenario
from .solver import BoundaryData, GridState, advance_interval, init_from_profile
from .synthesis import (
    Status,
    SynthesisOutcome,
    solve_inv_both,
    solve_inv_left,
    solve_inv_right,
    solve_stab_both,
    solve_stab_left,
    solve_stab_right,
)

__all__ = [
    "BoundaryData", "ConfigError", "DomainError", "FluxModel", "FunctionalParams",
    "GridState", "ScenarioConfig", "Status", "SynthesisOutcome", "advance_interval",
    "barrier_b", "feasibility_margin", "flux_eval", "godunov_flux", "init_from_profile",
    "load_config", "lyapunov_v", "run_scenario", "solve_compound", "solve_compound_left",
    "solve_compound_right", "solve_inv_both", "solve_inv_left", "solve_inv_right",
    "solve_stab_both", "solve_stab_left", "solve_stab_right",
]
