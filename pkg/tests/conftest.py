import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from edaschema.interchange import (attach_geometry, parse_def, parse_lef, parse_liberty,  # noqa: E402
                                   parse_spef, parse_sta_report)
from edaschema.schema import assemble_stage  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
LATE = ("detailed_route", "final")


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def tech():
    t = parse_lef(fixture_text("ng45_tech.lef"))
    return parse_lef(fixture_text("ng45_cells.lef"), base=t)


@pytest.fixture(scope="session")
def catalog(tech):
    return attach_geometry(parse_liberty(fixture_text("ng45_cells.lib")), tech)


@pytest.fixture(scope="session")
def physical(tech):
    return parse_def(fixture_text("four_gate.def"), tech)


@pytest.fixture(scope="session")
def parasitics():
    return parse_spef(fixture_text("four_gate.spef"))


@pytest.fixture(scope="session")
def timing():
    return parse_sta_report(fixture_text("four_gate.sta"))


@pytest.fixture(scope="session")
def make_stage(tech, catalog, physical, parasitics, timing):
    def build(stage, **kw):
        kw.setdefault("rc", parasitics if stage in LATE else None)
        kw.setdefault("timing", timing)
        return assemble_stage(stage, tech, physical, catalog, **kw)
    return build


@pytest.fixture(scope="session")
def four_gate(make_stage):
    return {st: make_stage(st) for st in ("floorplan", "global_place", "detailed_place", "cts",
                                          "global_route", "detailed_route", "final")}


@pytest.fixture(scope="session")
def synth_stages():
    from synth import synth_snapshots
    return synth_snapshots(1900)
