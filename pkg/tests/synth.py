"""Deterministic synthetic NG45-like designs for scale and end-to-end tests.

Cells are laid out row by row. Every cell's output drives the next cell's
first input, every tenth cell is a flop clocked through a two-level buffer
tree, and every signal net gets an L-shaped metal2/metal3 route.
"""

from __future__ import annotations

import random
from pathlib import Path

from edaschema.interchange import attach_geometry, parse_def, parse_lef, parse_liberty

FIXTURES = Path(__file__).parent / "fixtures"
DBU = 2000
SITE_W, ROW_H = 380, 2800
_PINS = {"NAND2_X1": ("A1", "A2", "ZN"), "NOR2_X1": ("A1", "A2", "ZN"),
         "AND2_X1": ("A1", "A2", "ZN"), "INV_X1": ("A", None, "ZN"), "BUF_X1": ("A", None, "Z")}
_WIDTH_SITES = {"NAND2_X1": 2, "NOR2_X1": 3, "AND2_X1": 4, "INV_X1": 2, "BUF_X1": 3,
                "DFF_X1": 17, "CLKBUF_X1": 3}


def load_library():
    tech = parse_lef((FIXTURES / "ng45_tech.lef").read_text())
    tech = parse_lef((FIXTURES / "ng45_cells.lef").read_text(), base=tech)
    catalog = attach_geometry(parse_liberty((FIXTURES / "ng45_cells.lib").read_text()), tech)
    return tech, catalog


def synth_def(n_cells: int = 1200, seed: int = 7, routed: bool = True, name: str = "synth") -> str:
    rng = random.Random(seed)
    per_row = 40
    n_rows = -(-n_cells // per_row) + 1
    row_sites = per_row * 18
    core_w, core_h = row_sites * SITE_W, n_rows * ROW_H
    x0, y0 = 2 * SITE_W, ROW_H
    die = (core_w + 4 * SITE_W, core_h + 2 * ROW_H)

    comps, nets = [], {}
    n_bufs = max(1, n_cells // 200)
    kinds = []
    for i in range(n_cells):
        kinds.append("DFF_X1" if i % 10 == 9 else rng.choice(sorted(_PINS)))
    kinds += ["CLKBUF_X1"] * (n_bufs + 1)
    placed = []
    for i, kind in enumerate(kinds):
        r, c = divmod(i, per_row)
        x = x0 + c * 18 * SITE_W
        y = y0 + r * ROW_H
        orient = "N" if r % 2 == 0 else "FS"
        placed.append((f"g{i}", kind, x, y, orient))
        comps.append(f"- g{i} {kind} + PLACED ( {x} {y} ) {orient} ;")

    def connect(net, *members):
        nets.setdefault(net, []).extend(members)

    connect("in0", ("PIN", "in0"))
    prev = ("in0", None)
    logic = [p for p in placed if p[1] not in ("CLKBUF_X1",)]
    for i, (inst, kind, *_rest) in enumerate(logic):
        src_net = prev[0]
        if kind == "DFF_X1":
            connect(src_net, (inst, "D"))
            out = f"n{i}"
            connect(out, (inst, "Q"))
        else:
            a, b, z = _PINS[kind]
            connect(src_net, (inst, a))
            if b:
                connect(f"n{max(0, i - 2)}" if i >= 2 else "in0", (inst, b))
            out = f"n{i}"
            connect(out, (inst, z))
        prev = (out, inst)
    connect(prev[0], ("PIN", "out0"))

    bufs = [p for p in placed if p[1] == "CLKBUF_X1"]
    root, leaves = bufs[0], bufs[1:]
    connect("clk", ("PIN", "clk"), (root[0], "A"))
    connect("clk_root", (root[0], "Z"), *[(b[0], "A") for b in leaves])
    flops = [p for p in logic if p[1] == "DFF_X1"]
    for j, f in enumerate(flops):
        connect(f"clk_l{j % len(leaves)}", (f[0], "CK"))
    for j, b in enumerate(leaves):
        connect(f"clk_l{j}", (b[0], "Z"))

    pos = {p[0]: (p[2], p[3]) for p in placed}
    ports = {"in0": (0, y0), "clk": (0, y0 + ROW_H), "out0": (die[0], y0)}
    lines = ["VERSION 5.8 ;", 'DIVIDERCHAR "/" ;', 'BUSBITCHARS "[]" ;', f"DESIGN {name} ;",
             f"UNITS DISTANCE MICRONS {DBU} ;", f"DIEAREA ( 0 0 ) ( {die[0]} {die[1]} ) ;", ""]
    for r in range(n_rows):
        lines.append(f"ROW ROW_{r} FreePDK45_38x28_10R_NP_162NW_34O {x0} {y0 + r * ROW_H} "
                     f"{'N' if r % 2 == 0 else 'FS'} DO {row_sites} BY 1 STEP {SITE_W} 0 ;")
    lines += ["", f"COMPONENTS {len(comps)} ;", *comps, "END COMPONENTS", ""]
    lines.append(f"PINS {len(ports)} ;")
    for pname, (px, py) in ports.items():
        d = "OUTPUT" if pname.startswith("out") else "INPUT"
        lines.append(f"- {pname} + NET {pname} + DIRECTION {d} + USE SIGNAL "
                     f"+ LAYER metal2 ( -70 -70 ) ( 70 70 ) + PLACED ( {px} {py} ) N ;")
    lines += ["END PINS", "", "SPECIALNETS 2 ;"]
    for sname, use, off in (("VDD", "POWER", 0), ("VSS", "GROUND", ROW_H // 2)):
        segs = []
        for k in range(0, core_w, 20 * SITE_W * 2):
            xs = x0 + k + off
            segs.append(f"metal4 560 + SHAPE STRIPE ( {xs} {y0} ) ( {xs} {y0 + core_h} )")
        lines.append(f"- {sname} ( * {sname} ) + USE {use}\n  + ROUTED " + "\n    NEW ".join(segs) + " ;")
    lines += ["END SPECIALNETS", "", f"NETS {len(nets)} ;"]
    for net in sorted(nets):
        members = nets[net]
        conn = " ".join(f"( {a} {b} )" for a, b in members)
        entry = f"- {net} {conn}"
        if routed:
            pts = [ports[b] if a == "PIN" else pos[a] for a, b in members]
            xs = sorted({p[0] for p in pts})
            ys = sorted({p[1] for p in pts})
            ya = pts[0][1] + 700
            route = [f"metal3 ( {xs[0]} {ya} ) ( {max(xs[-1], xs[0] + 380)} {ya} )"]
            for px, py in pts:
                route.append(f"metal2 ( {px + 190} {py + 700} ) ( {px + 190} {ya if ya != py + 700 else ya + 380} )")
            entry += "\n  + ROUTED " + "\n    NEW ".join(route)
        lines.append(entry + " ;")
    lines += ["END NETS", "", "END DESIGN", ""]
    return "\n".join(lines)


def synth_snapshots(n_cells: int = 1200, stages=("cts", "detailed_route", "final"), seed: int = 7):
    from edaschema.schema import assemble_stage

    tech, catalog = load_library()
    pn = parse_def(synth_def(n_cells, seed), tech)
    return [assemble_stage(st, tech, pn, catalog, clock_source="clk") for st in stages]
