"""Canonical flow stages and the per-attribute stage availability windows.

Windows are inclusive ``(first, last)`` pairs over the canonical stage order.
``final`` is the last stage of every window in the table.
"""

from __future__ import annotations

from .errors import AvailabilityError

STAGES: tuple[str, ...] = (
    "floorplan",
    "global_place",
    "place_resize",
    "detailed_place",
    "cts",
    "global_route",
    "detailed_route",
    "final",
)

ABBREVIATIONS = {
    "FP": "floorplan",
    "GP": "global_place",
    "PR": "place_resize",
    "DP": "detailed_place",
    "CTS": "cts",
    "GR": "global_route",
    "DR": "detailed_route",
    "F": "final",
}

_INDEX = {name: i for i, name in enumerate(STAGES)}


def stage_index(stage: str) -> int:
    try:
        return _INDEX[stage]
    except KeyError:
        raise AvailabilityError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}") from None


def is_canonical_order(stages) -> bool:
    """True if ``stages`` is a strictly increasing subsequence of :data:`STAGES`."""
    idx = [stage_index(s) for s in stages]
    return all(a < b for a, b in zip(idx, idx[1:]))


FP_F = ("floorplan", "final")
GP_F = ("global_place", "final")
CTS_F = ("cts", "final")
DR_F = ("detailed_route", "final")
F_ONLY = ("final", "final")

# (entity, attribute) -> window. Entities with no stage column (flow, constraint,
# standard cell) are stage-independent and not listed.
AVAILABILITY: dict[tuple[str, str], tuple[str, str]] = {}


def _add(entity: str, window: tuple[str, str], *attrs: str) -> None:
    for a in attrs:
        AVAILABILITY[(entity, a)] = window


_add("netlist", FP_F, "width", "height", "no_of_inputs", "no_of_outputs", "no_of_cells",
     "no_of_nets", "no_of_pins", "utilization", "total_hpwl")
_add("netlist", DR_F, "total_wirelength", "routing", "routing_by_metal_layers")
_add("netlist", GP_F, "cell_placement", "cell_placement_combinational",
     "cell_placement_sequential", "pin_placement")
_add("netlist", F_ONLY, "cell_placement_filler")

_add("clock_tree", FP_F, "clock_source")
_add("clock_tree", CTS_F, "no_of_buffers", "no_of_clock_sinks", "cell_placement",
     "cell_placement_combinational", "cell_placement_sequential", "pin_placement")
_add("clock_tree", DR_F, "routing", "routing_by_metal_layers")

_add("pdn", FP_F, "pdn_routing_vdd", "pdn_routing_vss", "voltage_source")
_add("pdn", DR_F, "ir_drop_vdd", "ir_drop_vss", "em_vdd", "em_vss")

_add("port", FP_F, "name", "direction")
_add("port", GP_F, "x", "y")

_add("gate", FP_F, "name", "standard_cell", "no_of_inputs", "no_of_outputs",
     "internal_power", "switching_power", "leakage_power", "total_power")
_add("gate", GP_F, "x_min", "y_min", "x_max", "y_max")
_add("gate", DR_F, "ir_drop_vdd", "ir_drop_vss")

_add("net", FP_F, "name", "is_special_net", "no_of_fanouts")
_add("net", GP_F, "x_min", "y_min", "x_max", "y_max", "hpwl")
_add("net", DR_F, "length", "resistance", "capacitance", "total_coupling_capacitance")

_add("pin", FP_F, "name", "direction", "is_startpoint", "is_endpoint",
     "setup_rise_slew", "setup_fall_slew", "hold_rise_slew", "hold_fall_slew",
     "setup_rise_slack", "setup_fall_slack", "hold_rise_slack", "hold_fall_slack",
     "load_capacitance", "switching_activity")
_add("pin", GP_F, "x_min", "y_min", "x_max", "y_max")

_add("timing_path", FP_F, "startpoint", "endpoint", "path_type", "arrival_time",
     "required_time", "slack", "no_of_pins", "is_critical_path")
_add("cell_arc", FP_F, "gate", "delay", "arrival_time", "slew")
_add("net_arc", FP_F, "net", "delay", "arrival_time", "slew", "capacitance")

_add("cell_metrics", FP_F, "no_of_combinational_cells", "no_of_sequential_cells",
     "no_of_buffers", "no_of_inverters", "no_of_fillers", "no_of_tap_cells",
     "no_of_diodes", "no_of_macros", "no_of_total_cells")
_add("area_metrics", FP_F, "combinational_cell_area", "sequential_cell_area", "buffer_area",
     "inverter_area", "filler_area", "tap_cell_area", "diode_area", "macro_area",
     "cell_area", "total_area")
_add("power_metrics", FP_F, "combinational_power", "sequential_power", "macro_power",
     "internal_power", "switching_power", "leakage_power", "total_power")
_add("timing_metrics", FP_F, "total_negative_slack", "worst_slack", "worst_arrival_time",
     "worst_required_time", "critical_path_startpoint", "critical_path_endpoint",
     "no_of_endpoints", "no_of_violating_endpoints")
_add("routability_metrics", DR_F, "rudy_net", "rudy_net_long", "rudy_net_short", "rudy_pin")


def window(entity: str, attribute: str) -> tuple[str, str]:
    try:
        return AVAILABILITY[(entity, attribute)]
    except KeyError:
        raise AvailabilityError(f"no availability entry for {entity}.{attribute}") from None


def is_available(entity: str, attribute: str, stage: str) -> bool:
    first, last = window(entity, attribute)
    i = stage_index(stage)
    return stage_index(first) <= i <= stage_index(last)


def require_available(entity: str, attribute: str, stage: str) -> None:
    if not is_available(entity, attribute, stage):
        first, last = window(entity, attribute)
        raise AvailabilityError(
            f"{entity}.{attribute} is available only {first}..{last}, not at {stage}")


def at_or_after(stage: str, first: str) -> bool:
    return stage_index(stage) >= stage_index(first)
