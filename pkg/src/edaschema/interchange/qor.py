"""Stage QoR summaries: flat JSON objects or ``key: value`` / ``key = value`` lines.

OpenROAD-style metric names (``finish__power__total``) are mapped to the
schema's metric names; unknown keys are kept under their normalized name.
"""

from __future__ import annotations

import json
import math
import re

from ..errors import ParseError

ALIASES = {
    "power__internal__total": "internal_power",
    "power__switching__total": "switching_power",
    "power__leakage__total": "leakage_power",
    "power__total": "total_power",
    "timing__setup__ws": "worst_slack",
    "timing__setup__tns": "total_negative_slack",
    "route__wirelength": "total_wirelength",
    "design__instance__area": "cell_area",
    "design__die__area": "total_area",
    "design__instance__utilization": "utilization",
}
_STAGE_PREFIX = re.compile(r"^(floorplan|globalplace|global_place|placeopt|detailedplace|"
                           r"detailed_place|cts|globalroute|global_route|detailedroute|"
                           r"detailed_route|finish|final)__")
# ORFS reports powers in W; the schema uses uW.
_SCALE = {"internal_power": 1e6, "switching_power": 1e6, "leakage_power": 1e6, "total_power": 1e6}


def _key(raw: str) -> str:
    k = re.sub(r"[\s\-]+", "_", raw.strip().lower())
    bare = _STAGE_PREFIX.sub("", k)
    if bare in ALIASES:
        return ALIASES[bare]
    return bare


def parse_qor(text: str, source: str | None = None, watts: bool | None = None) -> dict[str, float | str]:
    """Parse a QoR report.

    ``watts`` forces power keys to be treated as watts (scaled to uW); by default
    that happens only for OpenROAD-style keys, which are always in watts.
    """
    stripped = text.strip()
    items: list[tuple[str, object, int | None]] = []
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", e.lineno, source) from None
        if not isinstance(obj, dict):
            raise ParseError("QoR JSON must be an object", 1, source)
        items = [(k, v, None) for k, v in obj.items()]
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.match(r"^([^:=]+?)\s*[:=]\s*(.*)$", line)
            if not m:
                raise ParseError(f"expected 'key: value', found {line!r}", lineno, source)
            items.append((m.group(1), m.group(2).strip(), lineno))
    out: dict[str, float | str] = {}
    for raw_key, value, lineno in items:
        key = _key(raw_key)
        is_orfs = "__" in raw_key
        if isinstance(value, bool) or value is None:
            continue
        if isinstance(value, (int, float)):
            num = float(value)
        else:
            text_value = str(value).split()[0] if str(value).split() else ""
            try:
                num = float(text_value)
            except ValueError:
                out[key] = str(value)
                continue
        if not math.isfinite(num):
            raise ParseError(f"non-finite value for {raw_key}", lineno, source)
        if key in _SCALE and (watts if watts is not None else is_orfs):
            num *= _SCALE[key]
        out[key] = num
    return out
