"""Constraint-set generator for the clock / shape / utilization / density sweep."""

from __future__ import annotations

import itertools

from ..errors import ValidationError
from ..schema import DesignConstraint

PDKS = ("NG45", "SKY130", "IHP130", "ASAP7")
ASPECT_RATIOS = (0.5, 1.0, 1.5)
PLACEMENT_DENSITIES = (1.0, 1.25, 1.5)  # multiples of the uniform density
UTILIZATION = {"NG45": (0.3, 0.4, 0.5), "SKY130": (0.2, 0.3, 0.4), "IHP130": (0.2, 0.3, 0.4),
               "ASAP7": (0.3, 0.4, 0.5)}
CORE_MARGIN = {"NG45": 5.72, "SKY130": 22.4, "IHP130": 22.72, "ASAP7": 2.29}  # um
CLOCK_TRANSITION = {"NG45": 0.05, "SKY130": 0.1875, "IHP130": 0.1875, "ASAP7": 0.02375}  # ns
IO_DELAY_FRACTION = 0.20
LATENCY_FRACTION, LATENCY_CAP = 0.01, 0.05
UNCERTAINTY_FRACTION = 0.05
UNCERTAINTY_CAP = 0.25  # ns; the tabulated alternative is 0.05
UNCERTAINTY_CAP_TABLE = 0.05


def normalize_pdk(pdk: str) -> str:
    key = pdk.upper().replace("-", "").replace("_", "")
    aliases = {"NANGATE45": "NG45", "FREEPDK45": "NG45", "SKY130HD": "SKY130",
               "IHPSG13G2": "IHP130", "IHP": "IHP130"}
    key = aliases.get(key, key)
    if key not in PDKS:
        raise ValueError(f"unknown PDK {pdk!r}; expected one of {', '.join(PDKS)}")
    return key


def clock_periods(bp_period: float, bf_period: float, digits: int = 6) -> list[float]:
    """{0.8 BF, BF, BP, 1.2 BP}, rounded and de-duplicated, ascending."""
    if not bf_period > 0:
        raise ValidationError("barely-fail period must be positive")
    if bp_period < bf_period:
        raise ValidationError(f"barely-pass period {bp_period} is below barely-fail period {bf_period}")
    raw = (0.8 * bf_period, bf_period, bp_period, 1.2 * bp_period)
    return sorted({round(p, digits) for p in raw})


def derived_constraint(period: float, pdk: str, aspect_ratio: float, utilization: float,
                       placement_density: float, uncertainty_cap: float = UNCERTAINTY_CAP
                       ) -> DesignConstraint:
    io = IO_DELAY_FRACTION * period
    return DesignConstraint(
        clock_period=period,
        clock_uncertainty=min(UNCERTAINTY_FRACTION * period, uncertainty_cap),
        clock_latency=min(LATENCY_FRACTION * period, LATENCY_CAP),
        clock_transition=CLOCK_TRANSITION[pdk],
        input_delay=io, output_delay=io,
        aspect_ratio=aspect_ratio, utilization=utilization,
        placement_density=placement_density, core_margin=CORE_MARGIN[pdk], pdk=pdk)


def sweep_manifest(bp_period: float, bf_period: float, pdk: str,
                   uncertainty_cap: float = UNCERTAINTY_CAP) -> list[DesignConstraint]:
    """Full cross product, clock-major, in a stable order."""
    pdk = normalize_pdk(pdk)
    return [derived_constraint(p, pdk, ar, u, d, uncertainty_cap)
            for p, ar, u, d in itertools.product(clock_periods(bp_period, bf_period), ASPECT_RATIOS,
                                                 UTILIZATION[pdk], PLACEMENT_DENSITIES)]
