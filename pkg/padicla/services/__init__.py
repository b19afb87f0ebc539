# Import the service entry points to make them accessible from the services package
from .coboundary import CoboundarySolution, coboundary_solve
from .experiments import EXPERIMENTS, render, run_experiment, write_report
from .group import (
    GroupContext,
    Witness,
    best_lambda_at_level,
    c_small_check,
    orbit_mahler,
    sharp_smooth_check,
    witness_search,
)
from .tate_sen import TS3Solution, TS4Check, measure_projection, ts1_witness, ts3_invert, ts4_check

__all__ = [
    "GroupContext",
    "Witness",
    "orbit_mahler",
    "witness_search",
    "best_lambda_at_level",
    "c_small_check",
    "sharp_smooth_check",
    "ts1_witness",
    "measure_projection",
    "ts3_invert",
    "TS3Solution",
    "ts4_check",
    "TS4Check",
    "coboundary_solve",
    "CoboundarySolution",
    "EXPERIMENTS",
    "run_experiment",
    "render",
    "write_report",
]
