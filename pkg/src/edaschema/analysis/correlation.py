"""Pearson correlation and the per-circuit parameter/metric correlation matrix."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .metrics import Sentinel

CONSTANT = Sentinel("UNDEFINED", "zero variance")
PARAMETERS = ("clock_period", "aspect_ratio", "utilization", "placement_density")
METRICS = ("total_area", "total_power", "worst_slack", "total_negative_slack", "total_wirelength",
           "total_capacitance")


def pearson(xs: Sequence[float], ys: Sequence[float]):
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    if max(xs) == min(xs) or max(ys) == min(ys):
        return CONSTANT
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0 or syy == 0:
        return CONSTANT
    return max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))


@dataclass(frozen=True)
class CorrelationRow:
    design: str
    parameter: str
    metric: str
    n: int
    r: object  # float | Sentinel


def _get(obj, name):
    if isinstance(obj, dict):
        return obj.get(name)
    return getattr(obj, name, None)


def parameter_correlation(instances, parameters: Sequence[str] = PARAMETERS,
                          metrics: Sequence[str] | None = None) -> list[CorrelationRow]:
    """One r per (circuit, parameter, metric).

    ``instances`` are mappings or objects with ``design``, ``constraints`` and
    ``metrics`` (final-stage values). Instances lacking a value are skipped for
    that pair only.
    """
    by_design = defaultdict(list)
    for inst in instances:
        by_design[_get(inst, "design")].append(inst)
    rows = []
    for design in sorted(by_design):
        group = by_design[design]
        if len(group) < 2:
            raise ValueError(f"circuit {design} has fewer than two instances")
        names = metrics or sorted({k for inst in group for k in (_get(inst, "metrics") or {})})
        for p in parameters:
            for m in names:
                xs, ys = [], []
                for inst in group:
                    x = _get(_get(inst, "constraints"), p)
                    y = (_get(inst, "metrics") or {}).get(m)
                    if x is not None and y is not None:
                        xs.append(float(x))
                        ys.append(float(y))
                r = pearson(xs, ys) if len(xs) >= 2 else Sentinel("INSUFFICIENT", "fewer than two values")
                rows.append(CorrelationRow(design, p, m, len(xs), r))
    return rows
