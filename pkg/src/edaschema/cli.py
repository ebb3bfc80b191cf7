"""``edaschema`` command line.

Exit codes: 0 success, 2 parse error, 3 validation / availability / integrity
error, 64 usage error (bad flags, missing input files).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import (AvailabilityError, EdaSchemaError, ParseError, StoreError, TimingGraphError,
                     UndefinedError, ValidationError)

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_USAGE = 0, 2, 3, 64
logger = logging.getLogger("edaschema")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    pdk: str | None = None
    w_m1: int | None = None  # DBU override
    k: int = 50
    grid_anchor: str = "core"
    strict: bool = False
    uncertainty_cap: float = 0.25
    averaging: str = "pooled"

    def validate(self) -> None:
        if self.k < 1:
            raise UsageError("k must be >= 1")
        if self.grid_anchor != "core":
            raise UsageError(f"grid anchor {self.grid_anchor!r} is not supported (only 'core')")
        if self.averaging not in ("pooled", "macro"):
            raise UsageError("averaging must be 'pooled' or 'macro'")
        if self.w_m1 is not None and self.w_m1 <= 0:
            raise UsageError("w_m1 must be positive")
        if not self.uncertainty_cap > 0:
            raise UsageError("uncertainty_cap must be positive")


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path:
        import tomli

        try:
            with open(path, "rb") as fh:
                doc = tomli.load(fh)
        except FileNotFoundError:
            raise UsageError(f"config file {path} not found") from None
        except tomli.TOMLDecodeError as e:
            raise UsageError(f"config file {path}: {e}") from None
        known = {f.name for f in fields(RunConfig)}
        unknown = set(doc) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for k, v in doc.items():
            setattr(cfg, k, v)
    return cfg


def _read(path: str | None) -> str | None:
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file {path} does not exist")
    return p.read_text()


def _stage(name: str) -> str:
    from .stages import ABBREVIATIONS, STAGES

    stage = ABBREVIATIONS.get(name.upper(), name)
    if stage not in STAGES:
        raise UsageError(f"unknown stage {name!r}")
    return stage


def _load_stage(args):
    from .store import read_instance

    snap = read_instance(_root(args), args.instance).snapshot(args.stage)
    if snap is None:
        raise StoreError(f"instance {args.instance} has no {args.stage} stage")
    return snap


def _root(args) -> Path:
    root = args.root or os.environ.get("EDA_SCHEMA_ROOT")
    if not root:
        raise UsageError("no dataset root: pass --root/--dataset or set EDA_SCHEMA_ROOT")
    return Path(root)


# --- commands ------------------------------------------------------------

def cmd_ingest(args, cfg: RunConfig) -> int:
    from .interchange import (parse_def, parse_gridded_csv, parse_lef, parse_liberty, parse_qor,
                              parse_spef, parse_sta_report)
    from .interchange.liberty import attach_geometry
    from .schema import DesignConstraint, assemble_stage
    from .store import add_stage, instance_id, load_manifest, write_instance

    texts = {"lef": [_read(p) for p in args.lef], "lib": [_read(p) for p in args.lib],
             "def": _read(args.def_), "spef": _read(args.spef), "sta": _read(args.sta),
             "qor": _read(args.qor)}
    grids = {}
    for item in args.grid_csv or []:
        name, _, path = item.partition("=")
        if not path:
            raise UsageError(f"--grid-csv expects NAME=PATH, got {item!r}")
        grids[name] = (path, _read(path))
    tech = None
    for path, text in zip(args.lef, texts["lef"]):
        tech = parse_lef(text, base=tech, source=path)
    catalog = None
    for path, text in zip(args.lib, texts["lib"]):
        lib = parse_liberty(text, source=path)
        catalog = lib if catalog is None else catalog.merge(lib)
    catalog = attach_geometry(catalog, tech)
    pn = parse_def(texts["def"], tech, source=args.def_)
    rc = parse_spef(texts["spef"], source=args.spef) if texts["spef"] else None
    timing = parse_sta_report(texts["sta"], strict=cfg.strict, source=args.sta) if texts["sta"] else None
    qor = parse_qor(texts["qor"], source=args.qor) if texts["qor"] else None
    samples = {n: parse_gridded_csv(t, source=p) for n, (p, t) in grids.items()}
    snap = assemble_stage(args.stage, tech, pn, catalog, rc=rc, timing=timing, qor=qor,
                          grid_samples=samples or None, clock_source=args.clock_source,
                          scalar_k=cfg.k, w_m1=cfg.w_m1)
    pdk = args.pdk or cfg.pdk
    if not pdk:
        raise UsageError("--pdk (or pdk in the config file) is required")
    constraints = None
    if args.clock_period is not None:
        constraints = DesignConstraint(args.clock_period, aspect_ratio=args.aspect_ratio,
                                       utilization=args.utilization, pdk=pdk)
    root = Path(args.out)
    iid = instance_id(pn.design, pdk, constraints)
    if iid in load_manifest(root)["instances"]:
        entry = add_stage(root, iid, snap)
    else:
        entry = write_instance([snap], constraints, root, pdk, scalar_k=cfg.k)
    print(json.dumps({"instance": entry["id"], "stages": [s["name"] for s in entry["stages"]]},
                     sort_keys=True))
    return EXIT_OK


def _png(path: Path, arr: np.ndarray) -> None:
    """8-bit grayscale preview, min-max scaled, row 0 at the bottom."""
    from PIL import Image

    a = np.asarray(arr, dtype=np.float64)
    lo, hi = float(a.min(initial=0.0)), float(a.max(initial=0.0))
    img = np.zeros(a.shape, np.uint8) if hi == lo else np.round((a - lo) / (hi - lo) * 255).astype(np.uint8)
    Image.fromarray(np.flipud(img), mode="L").save(path)


def _export_maps(out: Path, maps: dict, png: bool) -> list[str]:
    from .raster import SpatialMap
    from .store import _write_map

    out.mkdir(parents=True, exist_ok=True)
    written = []
    for key in sorted(maps):
        m = maps[key]
        written.extend(_write_map(out, key, m))
        if png:
            name = key.replace("/", "__") + ".png"
            _png(out / name, m.bits if isinstance(m, SpatialMap) else m.values)
            written.append(name)
    return written


def cmd_maps(args, cfg: RunConfig) -> int:
    from .raster import (CLOCK_MAPS, NETLIST_MAPS, PDN_MAPS, render_clock_maps, render_netlist_maps,
                         render_pdn_maps)
    from .schema import render_all_maps

    snap = _load_stage(args)
    if args.which in (None, "all"):
        maps = dict(render_all_maps(snap))
        maps.update({k: m for k, m in snap.maps.items() if k not in maps})
    else:
        wanted: dict[str, list[str]] = {"netlist": [], "clock_tree": [], "pdn": []}
        stored = {}
        for item in args.which.split(","):
            item = item.strip()
            entity, _, name = item.rpartition("/")
            entity = entity or "netlist"
            if item in snap.maps and entity not in wanted:
                stored[item] = snap.maps[item]
                continue
            if entity not in wanted:
                raise UsageError(f"unknown map {item!r}")
            names = {"netlist": NETLIST_MAPS, "clock_tree": CLOCK_MAPS, "pdn": PDN_MAPS}[entity]
            if name not in names:
                raise UsageError(f"unknown {entity} map {name!r}")
            wanted[entity].append(name)
        maps = dict(stored)
        if wanted["netlist"]:
            maps.update(render_netlist_maps(snap, wanted["netlist"]))
        if wanted["clock_tree"]:
            maps.update(render_clock_maps(snap, wanted["clock_tree"]))
        if wanted["pdn"]:
            maps.update(render_pdn_maps(snap, wanted["pdn"]))
    out = Path(args.out or f"maps_{args.instance}_{args.stage}")
    files = _export_maps(out, maps, args.png)
    print(json.dumps({"maps": sorted(maps), "files": len(files), "out": str(out)}, sort_keys=True))
    return EXIT_OK


def cmd_rudy(args, cfg: RunConfig) -> int:
    from .routability import rudy_for_snapshot

    k = args.k or cfg.k
    if k < 1:
        raise UsageError("--k must be >= 1")
    snap = _load_stage(args)
    rudy = rudy_for_snapshot(snap, k)
    out = Path(args.out or f"rudy_{args.instance}_{args.stage}")
    maps = {m.name: m for _, m in rudy.items()}
    _export_maps(out, maps, args.png)
    h, w = rudy.rudy_net.grid.shape
    summary = {"grid": [h, w], "k": k, "out": str(out),
               "totals": {n: round(float(m.values.sum()), 4) for n, m in rudy.items()}}
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _parse_pairs(text: str | None):
    from .stages import ABBREVIATIONS, STAGES

    if not text:
        from .analysis.report import DEFAULT_PAIRS
        return DEFAULT_PAIRS
    pairs = []
    for item in text.split(","):
        a, sep, b = item.strip().partition(":")
        if not sep:
            raise UsageError(f"stage pair {item!r} must look like BASE:FINAL")
        a = ABBREVIATIONS.get(a.upper(), a)
        b = ABBREVIATIONS.get(b.upper(), b)
        for s in (a, b):
            if s not in STAGES:
                raise UsageError(f"unknown stage {s!r}")
        pairs.append((a, b))
    return pairs


def cmd_baseline(args, cfg: RunConfig) -> int:
    from .analysis.report import baseline_report
    from .store import read_dataset

    metrics = [m.strip() for m in args.metrics.split(",")] if args.metrics else None
    averaging = args.averaging or cfg.averaging
    try:
        report = baseline_report(read_dataset(_root(args)), _parse_pairs(args.pairs), metrics,
                                 averaging, jobs=args.jobs)
    except ValueError as e:
        if "unknown metric" in str(e):
            raise UsageError(str(e)) from None
        raise
    text = report.to_csv() if args.format == "csv" else report.to_json() + "\n"
    _emit(args.out, text)
    return EXIT_OK


def _emit(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _final_metrics(inst, stage: str) -> dict:
    from .analysis.matching import design_value

    s = inst.snapshot(stage)
    if s is None:
        return {}
    out = {}
    for m in ("total_area", "total_power", "worst_slack", "total_negative_slack",
              "no_of_violating_endpoints"):
        out[m] = design_value(s, m)
    out["total_wirelength"] = s.summary.total_wirelength
    caps = [n.capacitance for n in s.netlist.nets.values() if n.capacitance is not None]
    out["total_capacitance"] = math.fsum(caps) if caps else None
    return out


def cmd_correlate(args, cfg: RunConfig) -> int:
    from .analysis.correlation import parameter_correlation
    from .analysis.metrics import Sentinel
    from .store import read_dataset

    instances = read_dataset(_root(args))
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        metrics = list(pool.map(lambda i: _final_metrics(i, args.stage), instances))
    try:
        rows = parameter_correlation(
            [{"design": i.design, "constraints": i.constraints, "metrics": m}
             for i, m in zip(instances, metrics) if i.constraints is not None and m])
    except ValueError as e:
        raise ValidationError(str(e), [str(e)]) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["design", "parameter", "metric", "n", "r"])
    for r in rows:
        w.writerow([r.design, r.parameter, r.metric, r.n,
                    r.r.code if isinstance(r.r, Sentinel) else f"{r.r:.4f}"])
    _emit(args.out, buf.getvalue())
    return EXIT_OK


def cmd_classify(args, cfg: RunConfig) -> int:
    from .analysis.operating import classify_operating_point

    if not args.clock_period > 0:
        raise UsageError("--clock-period must be positive")
    print(classify_operating_point(args.worst_slack, args.clock_period).render())
    return EXIT_OK


# --- wiring --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="edaschema", description="Physical-design dataset schema tools.")
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for multi-instance commands")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="parse artifacts of one stage and store the snapshot")
    s.add_argument("--lef", action="append", required=True, help="technology/cell LEF (repeatable)")
    s.add_argument("--def", dest="def_", required=True)
    s.add_argument("--lib", action="append", required=True, help="Liberty library (repeatable)")
    s.add_argument("--spef")
    s.add_argument("--sta")
    s.add_argument("--qor")
    s.add_argument("--grid-csv", action="append", metavar="NAME=PATH",
                   help="ir_drop_vdd / ir_drop_vss / em_vdd / em_vss samples")
    s.add_argument("--stage", required=True)
    s.add_argument("--pdk")
    s.add_argument("--clock-source")
    s.add_argument("--clock-period", type=float)
    s.add_argument("--utilization", type=float, default=0.5)
    s.add_argument("--aspect-ratio", type=float, default=1.0)
    s.add_argument("--strict", action="store_true", help="reject unknown STA report lines")
    s.add_argument("--out", required=True, help="dataset root")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("maps", help="render spatial maps of a stored stage")
    s.add_argument("--root")
    s.add_argument("--instance", required=True)
    s.add_argument("--stage", required=True)
    s.add_argument("--which", default="all", help="'all' or comma-separated map names")
    s.add_argument("--png", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_maps)

    s = sub.add_parser("rudy", help="compute the four RUDY maps")
    s.add_argument("--root")
    s.add_argument("--instance", required=True)
    s.add_argument("--stage", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--png", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_rudy)

    s = sub.add_parser("baseline", help="cross-stage baseline error report")
    s.add_argument("--dataset", dest="root")
    s.add_argument("--pairs", help="comma-separated BASE:FINAL stage pairs, e.g. GP:DR,CTS:DR")
    s.add_argument("--metrics", help="comma-separated metric names")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--averaging", choices=("pooled", "macro"))
    s.add_argument("--out")
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("correlate", help="parameter/metric Pearson correlation per circuit")
    s.add_argument("--dataset", dest="root")
    s.add_argument("--stage", default="final")
    s.add_argument("--out")
    s.set_defaults(func=cmd_correlate)

    s = sub.add_parser("classify", help="SCPR operating class")
    s.add_argument("--worst-slack", type=float, required=True)
    s.add_argument("--clock-period", type=float, required=True)
    s.set_defaults(func=cmd_classify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if getattr(args, "stage", None):
            args.stage = _stage(args.stage)
        if getattr(args, "strict", False):
            cfg.strict = True
        cfg.validate()
        return args.func(args, cfg)
    except UsageError as e:
        print(f"edaschema: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"edaschema: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, AvailabilityError, TimingGraphError, UndefinedError, StoreError) as e:
        print(f"edaschema: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID
    except EdaSchemaError as e:
        print(f"edaschema: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
