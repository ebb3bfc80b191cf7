"""Brute-force reference computations, written without the package's helpers.

Loops are deliberately naive: one tile, one rectangle, one sample at a time.
"""

from __future__ import annotations

import math


def grid_dims(length, width, w_m1, k):
    return math.ceil(length / (k * w_m1)), math.ceil(width / (k * w_m1))


def raster_oracle(rects, ox, oy, pixel, nx, ny):
    """bits[row][col] true iff some rectangle overlaps that pixel with positive area."""
    bits = [[False] * nx for _ in range(ny)]
    for r in range(ny):
        ty0, ty1 = oy + r * pixel, oy + (r + 1) * pixel
        for c in range(nx):
            tx0, tx1 = ox + c * pixel, ox + (c + 1) * pixel
            for (x0, y0, x1, y1) in rects:
                w = min(x1, tx1) - max(x0, tx0)
                h = min(y1, ty1) - max(y0, ty0)
                if w > 0 and h > 0:
                    bits[r][c] = True
                    break
    return bits


def _widen(lo, hi, side):
    if hi - lo >= side:
        return lo, hi
    mid = (lo + hi) / 2
    return mid - side / 2, mid + side / 2


def _tile_of(v, o, pixel, n):
    i = math.floor((v - o) / pixel)
    if i == n and v == o + n * pixel:
        i = n - 1
    return i


def _raw_tiles(x0, y0, x1, y1, ox, oy, pixel, nx, ny):
    """Tiles touched by the unwidened box: positive-area overlap, or the point's own tile."""
    def axis(lo, hi, o, n):
        if hi > lo:
            return [i for i in range(n) if min(hi, o + (i + 1) * pixel) - max(lo, o + i * pixel) > 0]
        i = _tile_of(lo, o, pixel, n)
        return [i] if 0 <= i < n else []
    return len(axis(x0, x1, ox, nx)) * len(axis(y0, y1, oy, ny))


def rudy_oracle(nets, ox, oy, pixel, nx, ny, dbu):
    """Four maps as nested lists: (net, pin, long, short); nets are (x0, y0, x1, y1, pins)."""
    zero = lambda: [[0.0] * nx for _ in range(ny)]  # noqa: E731
    long_, short, pin = zero(), zero(), zero()
    for (x0, y0, x1, y1, pins) in nets:
        is_long = _raw_tiles(x0, y0, x1, y1, ox, oy, pixel, nx, ny) >= 2
        x0, x1 = _widen(x0, x1, pixel)
        y0, y1 = _widen(y0, y1, pixel)
        w, h = x1 - x0, y1 - y0
        density = (w + h) / (w * h)
        areas = {}
        for r in range(ny):
            for c in range(nx):
                a = max(0.0, min(x1, ox + (c + 1) * pixel) - max(x0, ox + c * pixel)) * \
                    max(0.0, min(y1, oy + (r + 1) * pixel) - max(y0, oy + r * pixel))
                if a > 0:
                    areas[(r, c)] = a
        target = long_ if is_long else short
        for (r, c), a in areas.items():
            target[r][c] += density * a / dbu
        for (px, py) in pins:
            c = _tile_of(px, ox, pixel, nx)
            r = _tile_of(py, oy, pixel, ny)
            if 0 <= c < nx and 0 <= r < ny:
                pin[r][c] += density * dbu
    net = [[long_[r][c] + short[r][c] for c in range(nx)] for r in range(ny)]
    return net, pin, long_, short


# --- statistics ----------------------------------------------------------

def ref_mae(b, f):
    return math.fsum(abs(x - y) for x, y in zip(b, f)) / len(b)


def ref_mape(b, f):
    terms = [abs(x - y) / abs(y) * 100 for x, y in zip(b, f) if y != 0]
    return math.fsum(terms) / len(terms) if terms else None


def ref_r2(b, f):
    n = len(f)
    mean = math.fsum(f) / n
    tot = math.fsum((y - mean) ** 2 for y in f)
    if tot / n < 1e-12:
        return None
    return 1 - math.fsum((y - x) ** 2 for x, y in zip(b, f)) / tot


def ref_directional(b, f):
    over = [x - y for x, y in zip(b, f) if x - y > 0]
    under = [y - x for x, y in zip(b, f) if x - y < 0]
    mpe = math.fsum(over) / len(over) if over else None
    mne = math.fsum(under) / len(under) if under else None
    return mpe, mne, len(over), len(under)


def ref_rates(b, f):
    tp = sum(1 for x, y in zip(b, f) if y < 0 and x < 0)
    pos = sum(1 for y in f if y < 0)
    tn = sum(1 for x, y in zip(b, f) if y >= 0 and x >= 0)
    neg = len(f) - pos
    return (tp / pos if pos else None), (tn / neg if neg else None)


def ref_rank_pick(values, p):
    """Nearest rank via exact rational arithmetic on the rank."""
    from fractions import Fraction
    s = sorted(values)
    rank = math.ceil(Fraction(p) * len(s) / 100)
    return s[max(rank, 1) - 1]


def ref_top(b, f):
    cut = ref_rank_pick(f, 95)
    sel = [(x, y) for x, y in zip(b, f) if y > cut]
    if not sel:
        return None, None
    tb, tf = zip(*sel)
    return ref_mae(tb, tf), ref_mape(tb, tf)


def ref_pearson(x, y):
    n = len(x)
    mx, my = math.fsum(x) / n, math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)
