"""Empirical constants for checks whose inequality carries no explicit constant."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from ..errors import InvalidParams, ValidationFailure
from .checks import CATALOG, ExperimentReport, run_check
from .families import FunctionFamily

__all__ = ["MARGIN", "FitResult", "fit_constant", "constant_from_ratios"]

MARGIN = 1.05


def constant_from_ratios(rule: str, ratios, margin: float = MARGIN):
    ratios = [float(r) for r in ratios]
    if rule == "upper":
        return max(ratios) * margin
    if rule == "symmetric":
        return max(max(ratios), 1.0 / min(ratios)) * margin
    if rule == "interval":
        return [min(ratios) / margin, max(ratios) * margin]
    raise InvalidParams(f"unknown fit rule {rule!r}")


@dataclass(frozen=True)
class FitResult:
    check: str
    constant: Any
    calibration: ExperimentReport
    validation: ExperimentReport

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "constant": self.constant,
            "calibration": self.calibration.to_dict(),
            "validation": self.validation.to_dict(),
        }


def fit_constant(
    check_id: str,
    calibration: FunctionFamily,
    validation: FunctionFamily,
    params: Mapping | None = None,
    margin: float = MARGIN,
) -> FitResult:
    """Fit on ``calibration`` (max ratio times ``margin``), then require ``validation`` to pass."""
    cdef = CATALOG.get(check_id)
    if cdef is None:
        raise InvalidParams(f"unknown check {check_id!r}")
    if cdef.tier != "fitted":
        raise InvalidParams(f"{check_id} has a {cdef.tier} constant; nothing to fit")
    if calibration.seed == validation.seed:
        raise InvalidParams("calibration and validation families must use different seeds")
    cal = run_check(check_id, calibration, params, fit=True)
    constant = constant_from_ratios(cdef.fit_rule, cal.ratios, margin)
    val = run_check(check_id, validation, params, constant=constant)
    if not val.passed:
        worst = val.summary
        raise ValidationFailure(
            f"{check_id}: validation family violates fitted constant {constant} "
            f"(ratios {worst['min_ratio']}..{worst['max_ratio']})"
        )
    return FitResult(check_id, constant, cal, val)
