"""On-disk dataset: one directory per (design, pdk, constraint hash), one subdirectory per stage.

Layout::

    root/manifest.json
    root/<design>__<pdk>__<hash>/<stage>/stage.json
                                        /gates.parquet pins.parquet ... metrics.parquet
                                        /maps/<key>.bin (+ .json sidecar)   binary maps
                                        /maps/<key>.npy (+ .json, .mask.bin) scalar maps

Every file is listed in the manifest with its SHA-256 digest and verified on
load. The manifest is rewritten through a temp file and ``os.replace`` under
an exclusive lock, so readers see either the old or the new version.
"""

from __future__ import annotations

import contextlib
import fcntl
import hashlib
import json
import logging
import os
import shutil
import tempfile
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq

from .errors import IntegrityError, StoreError
from .geometry import Rect
from .graphs import (ClockNetworkGraph, GateNode, NetlistGraph, NetNode, PathNode, PinNode,
                     PortNode, TimingPathGraph, Wire)
from .raster import GridSpec, ScalarMap, SpatialMap
from .schema import (METRIC_BUNDLES, ClockTreeSummary, DesignConstraint, DesignFlow, NetlistSummary,
                     PdnModel, StageSnapshot, require_valid)
from .stages import is_available, is_canonical_order, stage_index

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "2.0"
MANIFEST = "manifest.json"

_ARROW = {"str": pa.string(), "int": pa.int64(), "float": pa.float64(), "bool": pa.bool_()}


def _arrow_schema(cls, extra: list[tuple[str, pa.DataType]] = ()) -> pa.Schema:
    cols = list(extra)
    for f in fields(cls):
        base = str(f.type).split("|")[0].strip()
        if base not in _ARROW:
            continue
        cols.append((f.name, _ARROW[base]))
    return pa.schema(cols)


@dataclass(frozen=True)
class _PathRow:
    path_id: int
    startpoint: str
    endpoint: str
    path_type: str
    arrival_time: float
    required_time: float
    slack: float
    is_critical_path: bool
    path_group: str | None


@dataclass(frozen=True)
class _ArcRow:
    path_id: int
    seq: int
    kind: str
    name: str
    delay: float | None
    arrival: float | None
    slew: float | None
    capacitance: float | None
    resolved: bool


@dataclass(frozen=True)
class _EdgeRow:
    kind: str
    src: str
    dst: str


@dataclass(frozen=True)
class _MetricRow:
    bundle: str
    name: str
    type: str  # int | float | str | null
    num: float | None
    text: str | None


TABLES = {
    "gates": (GateNode, _arrow_schema(GateNode)),
    "pins": (PinNode, _arrow_schema(PinNode)),
    "nets": (NetNode, _arrow_schema(NetNode)),
    "ports": (PortNode, _arrow_schema(PortNode)),
    "wires": (Wire, _arrow_schema(Wire)),
    "edges": (_EdgeRow, _arrow_schema(_EdgeRow)),
    "paths": (_PathRow, _arrow_schema(_PathRow)),
    "arcs": (_ArcRow, _arrow_schema(_ArcRow)),
    "metrics": (_MetricRow, _arrow_schema(_MetricRow)),
}
TABLE_ENTITY = {"gates": "gate", "pins": "pin", "nets": "net", "ports": "port"}


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def instance_id(design: str, pdk: str, constraints: DesignConstraint | None) -> str:
    digest = constraints.constraint_hash() if constraints is not None else "unconstrained"
    return f"{design}__{pdk}__{digest}"


def _map_stem(key: str) -> str:
    return key.replace("/", "__")


# --- manifest ------------------------------------------------------------

@contextlib.contextmanager
def _manifest_lock(root: Path):
    root.mkdir(parents=True, exist_ok=True)
    with open(root / ".manifest.lock", "w") as lock:
        fcntl.flock(lock, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(lock, fcntl.LOCK_UN)


def load_manifest(root) -> dict:
    path = Path(root) / MANIFEST
    if not path.exists():
        return {"schema_version": SCHEMA_VERSION, "instances": {}}
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise IntegrityError(f"manifest {path} is corrupt: {e}") from None


def _write_json_atomic(path: Path, doc: dict) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def _update_manifest(root: Path, fn) -> dict:
    with _manifest_lock(root):
        doc = load_manifest(root)
        fn(doc)
        _write_json_atomic(root / MANIFEST, doc)
        return doc


# --- writing -------------------------------------------------------------

def _write_table(path: Path, name: str, rows: list) -> None:
    cls, schema = TABLES[name]
    data = [{c: getattr(r, c) for c in schema.names} for r in rows]
    pq.write_table(pa.Table.from_pylist(data, schema=schema), path)


def _metric_rows(s: StageSnapshot) -> list[_MetricRow]:
    rows = []
    for bundle in METRIC_BUNDLES:
        obj = getattr(s, bundle)
        if obj is None:
            continue
        for f in fields(obj):
            v = getattr(obj, f.name)
            if v is None:
                rows.append(_MetricRow(bundle, f.name, "null", None, None))
            elif isinstance(v, str):
                rows.append(_MetricRow(bundle, f.name, "str", None, v))
            elif isinstance(v, bool) or isinstance(v, int):
                rows.append(_MetricRow(bundle, f.name, "int", float(v), None))
            else:
                rows.append(_MetricRow(bundle, f.name, "float", float(v), None))
    return rows


def _rect(r: Rect | None):
    return None if r is None else [r.x0, r.y0, r.x1, r.y1]


def _write_map(d: Path, key: str, m) -> list[str]:
    stem = _map_stem(key)
    side = {"key": key, "name": m.name, "grid": m.grid.to_dict(), "shape": list(m.grid.shape)}
    files = []
    if isinstance(m, SpatialMap):
        side["kind"] = "binary"
        (d / f"{stem}.bin").write_bytes(np.packbits(m.bits.astype(bool), axis=None).tobytes())
        files.append(f"{stem}.bin")
    else:
        side["kind"] = "scalar"
        side["unit"] = m.unit
        side["dtype"] = "<f8"
        side["has_mask"] = m.mask is not None
        np.save(d / f"{stem}.npy", np.ascontiguousarray(m.values, dtype="<f8"), allow_pickle=False)
        files.append(f"{stem}.npy")
        if m.mask is not None:
            (d / f"{stem}.mask.bin").write_bytes(np.packbits(m.mask.astype(bool), axis=None).tobytes())
            files.append(f"{stem}.mask.bin")
    (d / f"{stem}.json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    files.append(f"{stem}.json")
    return files


def _write_stage(d: Path, s: StageSnapshot) -> list[str]:
    d.mkdir(parents=True, exist_ok=False)
    g = s.netlist
    paths, arcs = [], []
    for i, p in enumerate(s.timing_paths):
        paths.append(_PathRow(i, p.startpoint, p.endpoint, p.path_type, p.arrival_time,
                              p.required_time, p.slack, p.is_critical_path, p.path_group))
        for j, n in enumerate(p.nodes):
            arcs.append(_ArcRow(i, j, n.kind, n.name, n.delay, n.arrival, n.slew, n.capacitance,
                                n.resolved))
    tables = {
        "gates": list(g.gates.values()), "pins": list(g.pins.values()),
        "nets": list(g.nets.values()), "ports": list(g.ports.values()), "wires": g.wires,
        "edges": [_EdgeRow(*e) for e in g.edges], "paths": paths, "arcs": arcs,
        "metrics": _metric_rows(s),
    }
    files = []
    for name, rows in tables.items():
        _write_table(d / f"{name}.parquet", name, rows)
        files.append(f"{name}.parquet")
    (d / "maps").mkdir()
    for key in sorted(s.maps):
        files.extend(f"maps/{f}" for f in _write_map(d / "maps", key, s.maps[key]))
    cng = s.clock_tree
    doc = {
        "design": s.design, "stage": s.stage, "run_status": s.run_status,
        "dbu_per_micron": s.dbu_per_micron, "die_box": _rect(s.die_box),
        "core_box": _rect(s.core_box), "w_m1": s.w_m1, "routing_layers": list(s.routing_layers),
        "netlist_design": g.design,
        "summary": asdict(s.summary),
        "clock": None if s.clock is None else asdict(s.clock),
        "clock_tree": None if cng is None else {
            "clock_source": cng.clock_source, "gates": cng.gates, "pins": cng.pins,
            "nets": cng.nets, "ports": cng.ports, "buffers": cng.buffers, "sinks": cng.sinks,
            "edges": [list(e) for e in cng.edges]},
        "pdn": None if s.pdn is None else {
            "vdd_nets": s.pdn.vdd_nets, "vss_nets": s.pdn.vss_nets,
            "voltage_sources": [list(p) for p in s.pdn.voltage_sources],
            "strap_pitch": s.pdn.strap_pitch},
        "bundles_present": [b for b in METRIC_BUNDLES if getattr(s, b) is not None],
        "maps": sorted(s.maps),
        "extras": s.extras,
        "grid_anchor": "core",
    }
    (d / "stage.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    files.append("stage.json")
    return sorted(files)


def _stage_entry(root: Path, inst_dir: str, s: StageSnapshot, files: list[str]) -> dict:
    base = root / inst_dir / s.stage
    return {"name": s.stage, "run_status": s.run_status, "path": f"{inst_dir}/{s.stage}",
            "artifacts": {f: sha256_file(base / f) for f in files}}


def write_instance(snapshots: list[StageSnapshot], constraints: DesignConstraint | None, root,
                   pdk: str, flow: DesignFlow | None = None, validate: bool = True,
                   scalar_k: int = 50) -> dict:
    """Write all stages of one instance and register it in the manifest."""
    root = Path(root)
    if not snapshots:
        raise StoreError("an instance needs at least one stage snapshot")
    design = snapshots[0].design
    if any(s.design != design for s in snapshots):
        raise StoreError("snapshots of one instance must share a design name")
    stages = [s.stage for s in snapshots]
    if not is_canonical_order(stages):
        raise StoreError(f"stages {stages} are not in canonical order")
    if validate:
        for s in snapshots:
            require_valid(s)
    iid = instance_id(design, pdk, constraints)
    inst_dir = root / iid
    if inst_dir.exists() or iid in load_manifest(root)["instances"]:
        raise StoreError(f"instance {iid} already exists under {root}")
    root.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(dir=root, prefix=f".{iid}."))
    try:
        written = {s.stage: _write_stage(tmp / s.stage, s) for s in snapshots}
        os.replace(tmp, inst_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    flow = flow or DesignFlow(iid, design, stages=stages,
                              run_status=snapshots[-1].run_status)
    entry = {
        "id": iid, "design": design, "pdk": pdk,
        "constraints": None if constraints is None else constraints.to_dict(),
        "constraint_hash": None if constraints is None else constraints.constraint_hash(),
        "flow": asdict(flow),
        "grid": {"anchor": "core", "k_binary": 1, "k_scalar": scalar_k},
        "stages": [_stage_entry(root, iid, s, written[s.stage]) for s in snapshots],
    }

    def add(doc):
        if iid in doc["instances"]:
            raise StoreError(f"instance {iid} already exists in the manifest")
        doc["instances"][iid] = entry
    _update_manifest(root, add)
    return entry


def add_stage(root, iid: str, snapshot: StageSnapshot, validate: bool = True) -> dict:
    """Append a later stage to an existing instance."""
    root = Path(root)
    entry = load_manifest(root)["instances"].get(iid)
    if entry is None:
        raise StoreError(f"instance {iid} not found under {root}")
    names = [s["name"] for s in entry["stages"]]
    if snapshot.stage in names:
        raise StoreError(f"stage {snapshot.stage} already stored for {iid}")
    if not is_canonical_order(names + [snapshot.stage]):
        raise StoreError(f"stage {snapshot.stage} would break canonical order after {names}")
    if validate:
        require_valid(snapshot)
    tmp = Path(tempfile.mkdtemp(dir=root / iid, prefix=f".{snapshot.stage}."))
    try:
        files = _write_stage(tmp / "s", snapshot)
        os.replace(tmp / "s", root / iid / snapshot.stage)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    stage_entry = _stage_entry(root, iid, snapshot, files)

    def add(doc):
        e = doc["instances"][iid]
        e["stages"].append(stage_entry)
        e["flow"]["stages"].append(snapshot.stage)
        e["flow"]["run_status"] = snapshot.run_status
    return _update_manifest(root, add)["instances"][iid]


# --- reading -------------------------------------------------------------

def _read_rows(path: Path, name: str) -> list[dict]:
    cls, schema = TABLES[name]
    table = pq.read_table(path)
    if table.schema.names != schema.names:
        raise IntegrityError(f"{path}: columns {table.schema.names} != {schema.names}")
    return table.to_pylist()


def _restore_metric(row: dict):
    t = row["type"]
    if t == "null":
        return None
    if t == "str":
        return row["text"]
    if t == "int":
        return int(row["num"])
    return row["num"]


def _read_map(d: Path, key: str):
    stem = _map_stem(key)
    side = json.loads((d / f"{stem}.json").read_text())
    grid = GridSpec.from_dict(side["grid"])
    h, w = side["shape"]
    if side["kind"] == "binary":
        raw = np.frombuffer((d / f"{stem}.bin").read_bytes(), dtype=np.uint8)
        bits = np.unpackbits(raw, count=h * w).reshape(h, w).astype(bool)
        return SpatialMap(side["name"], grid, bits)
    values = np.load(d / f"{stem}.npy", allow_pickle=False).astype(np.float64)
    mask = None
    if side.get("has_mask"):
        raw = np.frombuffer((d / f"{stem}.mask.bin").read_bytes(), dtype=np.uint8)
        mask = np.unpackbits(raw, count=h * w).reshape(h, w).astype(bool)
    return ScalarMap(side["name"], grid, values, side.get("unit"), mask)


def _box(v) -> Rect | None:
    return None if v is None else Rect(*v)


def load_stage(stage_dir: Path, digests: dict[str, str] | None = None) -> StageSnapshot:
    stage_dir = Path(stage_dir)
    if digests is not None:
        for rel, want in digests.items():
            p = stage_dir / rel
            if not p.exists():
                raise StoreError(f"missing artifact {p}")
            got = sha256_file(p)
            if got != want:
                raise IntegrityError(f"digest mismatch for {p}: {got[:12]} != {want[:12]}")
    doc = json.loads((stage_dir / "stage.json").read_text())
    g = NetlistGraph(doc["netlist_design"], doc["dbu_per_micron"])
    for name, cls, table in (("gates", GateNode, g.gates), ("pins", PinNode, g.pins),
                             ("nets", NetNode, g.nets), ("ports", PortNode, g.ports)):
        for row in _read_rows(stage_dir / f"{name}.parquet", name):
            table[row["name"]] = cls(**row)
    g.wires = [Wire(**r) for r in _read_rows(stage_dir / "wires.parquet", "wires")]
    g.edges = [(r["kind"], r["src"], r["dst"]) for r in _read_rows(stage_dir / "edges.parquet", "edges")]
    paths = []
    for r in _read_rows(stage_dir / "paths.parquet", "paths"):
        r.pop("path_id")
        paths.append(TimingPathGraph(**r))
    for r in _read_rows(stage_dir / "arcs.parquet", "arcs"):
        i = r.pop("path_id")
        r.pop("seq")
        paths[i].nodes.append(PathNode(**r))
    bundles = {b: METRIC_BUNDLES[b]() for b in doc["bundles_present"]}
    for r in _read_rows(stage_dir / "metrics.parquet", "metrics"):
        setattr(bundles[r["bundle"]], r["name"], _restore_metric(r))
    cng = None
    if doc["clock_tree"] is not None:
        c = doc["clock_tree"]
        cng = ClockNetworkGraph(c["clock_source"], c["gates"], c["pins"], c["nets"], c["ports"],
                                c["buffers"], c["sinks"], [tuple(e) for e in c["edges"]], parent=g)
    pdn = None
    if doc["pdn"] is not None:
        p = doc["pdn"]
        pdn = PdnModel(p["vdd_nets"], p["vss_nets"], [tuple(x) for x in p["voltage_sources"]],
                       p["strap_pitch"])
    maps = {key: _read_map(stage_dir / "maps", key) for key in doc["maps"]}
    return StageSnapshot(
        design=doc["design"], stage=doc["stage"], dbu_per_micron=doc["dbu_per_micron"],
        die_box=_box(doc["die_box"]), core_box=_box(doc["core_box"]), w_m1=doc["w_m1"],
        routing_layers=tuple(doc["routing_layers"]), netlist=g,
        summary=NetlistSummary(**doc["summary"]), run_status=doc["run_status"],
        clock=None if doc["clock"] is None else ClockTreeSummary(**doc["clock"]),
        clock_tree=cng, pdn=pdn, timing_paths=paths,
        cell_metrics=bundles.get("cell_metrics"), area_metrics=bundles.get("area_metrics"),
        power_metrics=bundles.get("power_metrics"), timing_metrics=bundles.get("timing_metrics"),
        maps=maps, extras=doc["extras"])


@dataclass
class InstanceBundle:
    """Manifest entry plus stage snapshots loaded (and digest-checked) on first access."""

    root: Path
    entry: dict
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def id(self) -> str:
        return self.entry["id"]

    @property
    def design(self) -> str:
        return self.entry["design"]

    @property
    def pdk(self) -> str:
        return self.entry["pdk"]

    @property
    def constraints(self) -> DesignConstraint | None:
        c = self.entry.get("constraints")
        return None if c is None else DesignConstraint.from_dict(c)

    @property
    def flow(self) -> DesignFlow:
        return DesignFlow(**self.entry["flow"])

    @property
    def stages(self) -> list[str]:
        return [s["name"] for s in self.entry["stages"]]

    def snapshot(self, stage: str) -> StageSnapshot | None:
        if stage not in self._cache:
            st = next((s for s in self.entry["stages"] if s["name"] == stage), None)
            if st is None:
                return None
            self._cache[stage] = load_stage(self.root / st["path"], st["artifacts"])
        return self._cache[stage]

    def __getitem__(self, stage: str) -> StageSnapshot:
        s = self.snapshot(stage)
        if s is None:
            raise KeyError(f"{self.id} has no stage {stage}")
        return s

    def snapshots(self) -> list[StageSnapshot]:
        return [self[s] for s in self.stages]


def read_instance(root, iid: str) -> InstanceBundle:
    root = Path(root)
    entry = load_manifest(root)["instances"].get(iid)
    if entry is None:
        raise StoreError(f"instance {iid} not found under {root}")
    return InstanceBundle(root, entry)


def list_instances(root) -> list[str]:
    return sorted(load_manifest(root)["instances"])


def read_dataset(root) -> list[InstanceBundle]:
    return [read_instance(root, i) for i in list_instances(root)]


def export_tables(instances, stage: str, entity: str, columns: list[str] | None = None) -> pa.Table:
    """Concatenate one table kind at ``stage`` across instances, with key columns prepended.

    Requesting an attribute outside its window at ``stage`` yields an empty table
    and a warning.
    """
    if entity not in TABLES:
        raise KeyError(f"unknown table {entity!r}; expected one of {', '.join(TABLES)}")
    stage_index(stage)
    cls, schema = TABLES[entity]
    keys = [("design", pa.string()), ("pdk", pa.string()), ("instance_id", pa.string()),
            ("stage", pa.string())]
    cols = columns or schema.names
    missing = [c for c in cols if c not in schema.names]
    if missing:
        raise KeyError(f"{entity} has no columns {missing}")
    out_schema = pa.schema(keys + [(c, schema.field(c).type) for c in cols])
    ent = TABLE_ENTITY.get(entity)
    if ent is not None and columns:
        late = [c for c in cols if _has_window(ent, c) and not is_available(ent, c, stage)]
        if late:
            logger.warning("%s.%s not available at %s; returning no rows", ent, ",".join(late), stage)
            return out_schema.empty_table()
    parts = []
    for inst in instances:
        st = next((s for s in inst.entry["stages"] if s["name"] == stage), None)
        if st is None:
            logger.warning("%s has no %s stage", inst.id, stage)
            continue
        inst.snapshot(stage)  # digest check
        t = pq.read_table(inst.root / st["path"] / f"{entity}.parquet", columns=cols)
        n = t.num_rows
        for i, (name, typ) in enumerate(keys):
            val = {"design": inst.design, "pdk": inst.pdk, "instance_id": inst.id, "stage": stage}[name]
            t = t.add_column(i, pa.field(name, typ), pa.array([val] * n, type=typ))
        parts.append(t)
    if not parts:
        return out_schema.empty_table()
    return pa.concat_tables(parts)


def _has_window(entity: str, attr: str) -> bool:
    from .stages import AVAILABILITY
    return (entity, attr) in AVAILABILITY
