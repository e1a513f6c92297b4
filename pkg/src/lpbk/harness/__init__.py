"""Executable inequality checks over reproducible function families."""
from .checks import CATALOG, ExperimentReport, Instance, run_check, run_checks
from .families import FunctionFamily, default_family
from .fitting import FitResult, fit_constant

__all__ = [
    "CATALOG",
    "ExperimentReport",
    "Instance",
    "run_check",
    "run_checks",
    "FunctionFamily",
    "default_family",
    "FitResult",
    "fit_constant",
]
