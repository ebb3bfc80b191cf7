"""Slack-to-clock-period ratio and the four operating classes."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class OperatingClass(str, Enum):
    BARELY_FAIL = "BarelyFail"
    BARELY_PASS = "BarelyPass"
    FAIL = "Fail"
    PASS = "Pass"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OperatingPoint:
    scpr: float  # percent
    cls: OperatingClass

    def render(self) -> str:
        return f"{self.cls.value} {self.scpr:.2f}%"


def scpr(worst_slack: float, clock_period: float) -> float:
    """Worst slack as a percentage of the clock period."""
    if not clock_period > 0:
        raise ValueError(f"clock period must be positive, got {clock_period}")
    return worst_slack / clock_period * 100.0


def classify_scpr(value: float) -> OperatingClass:
    # Open windows (-10, 0) and (0, 10); exactly 0 counts as passing.
    if -10.0 < value < 0.0:
        return OperatingClass.BARELY_FAIL
    if 0.0 < value < 10.0:
        return OperatingClass.BARELY_PASS
    if value <= -10.0:
        return OperatingClass.FAIL
    return OperatingClass.PASS


def classify_operating_point(worst_slack: float, clock_period: float) -> OperatingPoint:
    v = scpr(worst_slack, clock_period)
    return OperatingPoint(v, classify_scpr(v))
