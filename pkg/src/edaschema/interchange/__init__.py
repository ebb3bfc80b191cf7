"""Readers (and canonical writers) for the physical-design interchange formats."""

from .def_ import Component, Net, PhysicalNetlist, Port, RouteSegment, RouteVia, Row, parse_def, write_def
from .gridcsv import GridSample, GridSamples, parse_gridded_csv, write_gridded_csv
from .lef import Layer, Macro, MacroPin, Site, TechLibrary, parse_lef, write_lef
from .liberty import Cell, CellCatalog, CellPin, attach_geometry, parse_liberty
from .qor import parse_qor
from .spef import NetParasitics, ParasiticSet, parse_spef, write_spef
from .sta import TimingPathRecord, TimingPoint, parse_sta_report, write_sta_report

__all__ = [
    "Cell", "CellCatalog", "CellPin", "Component", "GridSample", "GridSamples", "Layer", "Macro",
    "MacroPin", "Net", "NetParasitics", "ParasiticSet", "PhysicalNetlist", "Port", "RouteSegment",
    "RouteVia", "Row", "Site", "TechLibrary", "TimingPathRecord", "TimingPoint", "attach_geometry",
    "parse_def", "parse_gridded_csv", "parse_lef", "parse_liberty", "parse_qor", "parse_spef",
    "parse_sta_report", "write_def", "write_gridded_csv", "write_lef", "write_spef",
    "write_sta_report",
]
