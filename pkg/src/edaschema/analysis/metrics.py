"""Baseline-vs-final error statistics.

Every function takes a :class:`MatchedSeries` (or anything exposing
``baseline`` and ``final`` sequences). Values that cannot be reported as a
number come back as a :class:`Sentinel`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

MAPE_LIMIT = 10000.0  # percent
R2_LIMIT = -1.0
FLAT_VARIANCE = 1e-12
TOP_MIN_SIZE = 20


@dataclass(frozen=True)
class Sentinel:
    code: str
    reason: str = ""

    def __str__(self) -> str:
        return self.code

    def to_json(self) -> dict:
        return {"sentinel": self.code, "reason": self.reason}


MAPE_OVER = Sentinel(">10000%", "MAPE exceeds 10000%")
R2_UNDER = Sentinel("<-1", "R^2 below -1")
UNDEFINED = Sentinel("UNDEFINED", "no samples or zero denominator")
FLAT = Sentinel("UNDEFINED", "final-value variance below 1e-12")
NO_POSITIVE = Sentinel("NO_POSITIVE_ERROR", "n_p = 0")
NO_NEGATIVE = Sentinel("NO_NEGATIVE_ERROR", "n_n = 0")
NO_ACTUAL_POSITIVES = Sentinel("UNDEFINED", "no violating final values")
NO_ACTUAL_NEGATIVES = Sentinel("UNDEFINED", "no non-violating final values")
INSUFFICIENT = Sentinel("INSUFFICIENT", f"fewer than {TOP_MIN_SIZE} samples")
EMPTY_TOP = Sentinel("UNDEFINED", "no final value strictly above the cut")


@dataclass(frozen=True)
class Pair:
    key: tuple
    baseline: float
    final: float


@dataclass
class MatchedSeries:
    kind: str  # path | cell_arc | net_arc | net | design
    pairs: list[Pair] = field(default_factory=list)
    excluded_count: int = 0

    def __post_init__(self):
        keys = [p.key for p in self.pairs]
        if len(set(keys)) != len(keys):
            raise ValueError(f"{self.kind} series has duplicate keys")
        for p in self.pairs:
            if p.baseline is None or p.final is None:
                raise ValueError(f"{self.kind} pair {p.key} has a missing side")

    @classmethod
    def from_values(cls, baseline: Sequence[float], final: Sequence[float], kind: str = "design"
                    ) -> "MatchedSeries":
        if len(baseline) != len(final):
            raise ValueError("baseline and final lengths differ")
        return cls(kind, [Pair((i,), float(b), float(f)) for i, (b, f) in enumerate(zip(baseline, final))])

    @property
    def baseline(self) -> list[float]:
        return [p.baseline for p in self.pairs]

    @property
    def final(self) -> list[float]:
        return [p.final for p in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)

    def extend(self, other: "MatchedSeries", prefix: tuple = ()) -> None:
        self.pairs.extend(Pair(prefix + p.key, p.baseline, p.final) for p in other.pairs)
        self.excluded_count += other.excluded_count
        self.__post_init__()


def _values(series) -> tuple[list[float], list[float]]:
    return list(series.baseline), list(series.final)


def _require(b: list[float]) -> None:
    if not b:
        raise ValueError("empty series")


def _mape_value(pcts: list[float]):
    if not pcts:
        return UNDEFINED
    v = math.fsum(pcts) / len(pcts)
    return MAPE_OVER if v > MAPE_LIMIT else v


def _pct_errors(b: list[float], f: list[float]) -> list[float]:
    return [100.0 * abs(x - y) / abs(y) for x, y in zip(b, f) if y != 0]


@dataclass
class RegressionMetrics:
    n: int
    mae: float
    mape: object  # float | Sentinel
    mape_excluded: int
    r2: object


def mae(series) -> float:
    b, f = _values(series)
    _require(b)
    return math.fsum(abs(x - y) for x, y in zip(b, f)) / len(b)


def mape(series):
    """Mean |b - f| / |f| in percent, over pairs with f != 0."""
    b, f = _values(series)
    _require(b)
    return _mape_value(_pct_errors(b, f))


def r_squared(series):
    b, f = _values(series)
    _require(b)
    n = len(f)
    mean = math.fsum(f) / n
    ss_tot = math.fsum((y - mean) ** 2 for y in f)
    if ss_tot / n < FLAT_VARIANCE:
        return FLAT
    ss_res = math.fsum((y - x) ** 2 for x, y in zip(b, f))
    r2 = 1.0 - ss_res / ss_tot
    return R2_UNDER if r2 < R2_LIMIT else r2


def regression_metrics(series) -> RegressionMetrics:
    b, f = _values(series)
    _require(b)
    return RegressionMetrics(len(b), mae(series), mape(series), sum(1 for y in f if y == 0),
                             r_squared(series))


@dataclass
class DirectionalMetrics:
    mpe: object  # float | Sentinel
    mne: object
    n_p: int
    n_n: int


def directional_metrics(series) -> DirectionalMetrics:
    """MPE over overestimates (b > f), MNE over underestimates (b < f), both as magnitudes."""
    b, f = _values(series)
    pos = [x - y for x, y in zip(b, f) if x > y]
    neg = [y - x for x, y in zip(b, f) if x < y]
    return DirectionalMetrics(math.fsum(pos) / len(pos) if pos else NO_POSITIVE,
                              math.fsum(neg) / len(neg) if neg else NO_NEGATIVE,
                              len(pos), len(neg))


def mae_decomposition(series) -> tuple[Fraction, Fraction, Fraction]:
    """Exact (sum |b-f|, sum of overestimates, sum of underestimates) as rationals."""
    total = pos = neg = Fraction(0)
    for x, y in zip(*_values(series)):
        d = Fraction(x) - Fraction(y)
        total += abs(d)
        if d > 0:
            pos += d
        elif d < 0:
            neg -= d
    return total, pos, neg


@dataclass
class ClassificationMetrics:
    tpr: object  # fraction in [0, 1] | Sentinel
    tnr: object
    tp: int
    fn: int
    tn: int
    fp: int


def classification_metrics(series, threshold: float = 0.0) -> ClassificationMetrics:
    """Violation = value < threshold. Positives are decided by the final value."""
    tp = fn = tn = fp = 0
    for x, y in zip(*_values(series)):
        actual, predicted = y < threshold, x < threshold
        if actual and predicted:
            tp += 1
        elif actual:
            fn += 1
        elif predicted:
            fp += 1
        else:
            tn += 1
    return ClassificationMetrics(tp / (tp + fn) if tp + fn else NO_ACTUAL_POSITIVES,
                                 tn / (tn + fp) if tn + fp else NO_ACTUAL_NEGATIVES,
                                 tp, fn, tn, fp)


def nearest_rank(values: Sequence[float], percentile: float) -> float:
    """Smallest value with at least ``percentile`` percent of the data at or below it."""
    if not values:
        raise ValueError("empty sample")
    s = sorted(values)
    # rounding guards ceil() against 95.00000000000001-style float noise
    rank = max(1, math.ceil(round(percentile * len(s) / 100.0, 9)))
    return s[rank - 1]


@dataclass
class TailMetrics:
    mae_p95: object
    mape_p95: object
    mae_top5: object
    mape_top5: object
    top_size: int


def tail_metrics(series, percentile: float = 95.0, top_fraction: float = 0.05) -> TailMetrics:
    b, f = _values(series)
    _require(b)
    abs_err = [abs(x - y) for x, y in zip(b, f)]
    pct = _pct_errors(b, f)
    mae_p = nearest_rank(abs_err, percentile)
    mape_p = UNDEFINED if not pct else nearest_rank(pct, percentile)
    if isinstance(mape_p, float) and mape_p > MAPE_LIMIT:
        mape_p = MAPE_OVER
    if len(b) < TOP_MIN_SIZE:
        return TailMetrics(mae_p, mape_p, INSUFFICIENT, INSUFFICIENT, 0)
    cut = nearest_rank(f, 100.0 * (1.0 - top_fraction))
    top = [(x, y) for x, y in zip(b, f) if y > cut]
    if not top:
        return TailMetrics(mae_p, mape_p, EMPTY_TOP, EMPTY_TOP, 0)
    tb = [x for x, _ in top]
    tf = [y for _, y in top]
    top_mae = math.fsum(abs(x - y) for x, y in top) / len(top)
    return TailMetrics(mae_p, mape_p, top_mae, _mape_value(_pct_errors(tb, tf)), len(top))


STATISTICS = ("mae", "mape", "r2", "mpe", "mne", "n_p", "n_n", "tpr", "tnr",
              "mae_p95", "mape_p95", "mae_top5", "mape_top5")


def compute_statistics(series, wanted: Sequence[str]) -> dict[str, object]:
    """Selected statistics by name; an empty series gives UNDEFINED for each."""
    unknown = set(wanted) - set(STATISTICS)
    if unknown:
        raise KeyError(f"unknown statistics {sorted(unknown)}")
    if len(series.baseline) == 0:
        return {k: (0 if k in ("n_p", "n_n") else UNDEFINED) for k in wanted}
    out: dict[str, object] = {}
    if {"mae", "mape", "r2"} & set(wanted):
        r = regression_metrics(series)
        out.update(mae=r.mae, mape=r.mape, r2=r.r2)
    if {"mpe", "mne", "n_p", "n_n"} & set(wanted):
        d = directional_metrics(series)
        out.update(mpe=d.mpe, mne=d.mne, n_p=d.n_p, n_n=d.n_n)
    if {"tpr", "tnr"} & set(wanted):
        c = classification_metrics(series)
        out.update(tpr=c.tpr, tnr=c.tnr)
    if {"mae_p95", "mape_p95", "mae_top5", "mape_top5"} & set(wanted):
        t = tail_metrics(series)
        out.update(mae_p95=t.mae_p95, mape_p95=t.mape_p95, mae_top5=t.mae_top5, mape_top5=t.mape_top5)
    return {k: out[k] for k in wanted}
