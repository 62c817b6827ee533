"""Empirical spatial extremogram for fields observed on a regular lattice.

The estimate at lag h is a ratio of two rates: the fraction of ordered
site pairs (t + h, t), both inside the grid, whose values land in the
scaled sets (A at the displaced site, B at the base site), over the
fraction of all sites landing in the scaled A.  Pair counting is exact:
no wraparound, n(h) = prod_i (n_i - |h_i|).

`lattice_ese` keeps one row per vector lag; `lattice_ese_by_distance`
pools every integer lag of equal norm into a single row, which is the
natural display for isotropic fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, LagOutOfRange
from .fields import (
    ExtremeSet,
    Lag,
    LatticeField,
    ThresholdRule,
    as_lag,
    lag_grid,
    resolve_threshold,
)

__all__ = ["EseResult", "lattice_ese", "lattice_ese_by_distance"]


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EseResult:
    """Per-row extremogram estimates with the counts behind them.

    One row per vector lag, or per distance class when ``by_distance``
    is set (``lags`` then holds one representative lag per class).
    ``pair_count`` is the number of ordered pairs evaluated and
    ``exceed_count`` the number that hit both sets; for kernel
    estimates these count kernel-support visits instead, and
    ``rho_hat`` comes from the weighted sums rather than the raw
    counts.  ``denom_rate`` is the fraction of sites (or points) whose
    value lands in the scaled A set.
    """

    lags: tuple[Lag, ...]
    distances: np.ndarray
    rho_hat: np.ndarray
    pair_count: np.ndarray
    exceed_count: np.ndarray
    a_m: float
    m: float
    set_a: ExtremeSet
    set_b: ExtremeSet
    denom_rate: float
    mode: str
    by_distance: bool = False
    bandwidth_degenerate: bool = False
    nu_used: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "distances", _frozen(self.distances, float))
        object.__setattr__(self, "rho_hat", _frozen(self.rho_hat, float))
        object.__setattr__(self, "pair_count", _frozen(self.pair_count, np.int64))
        object.__setattr__(self, "exceed_count", _frozen(self.exceed_count, np.int64))
        n = len(self.lags)
        for name in ("distances", "rho_hat", "pair_count", "exceed_count"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have one entry per row")

    @property
    def n_rows(self) -> int:
        return len(self.lags)


def _lag_slices(dims, offset):
    """Index slices picking the displaced (t+h) and base (t) sites."""
    disp = tuple(
        slice(max(o, 0), n + min(o, 0)) for o, n in zip(offset, dims)
    )
    base = tuple(
        slice(max(-o, 0), n + min(-o, 0)) for o, n in zip(offset, dims)
    )
    return disp, base


def _check_lag(field: LatticeField, lag: Lag) -> tuple[int, ...]:
    if lag.d != field.d:
        raise LagOutOfRange(
            f"lag {lag.offset} has dimension {lag.d}, field has {field.d}"
        )
    if not lag.is_integer:
        raise LagOutOfRange(f"lattice lags must be integer-valued, got {lag.offset}")
    off = lag.int_offset()
    for o, n in zip(off, field.dims):
        if abs(o) >= n:
            raise LagOutOfRange(
                f"lag {lag.offset} does not fit a grid with side lengths {field.dims}"
            )
    return off


def _pair_counts(field, ind_a, ind_b, lag):
    """(hits, pairs) for one lag: A evaluated at t+h, B at t."""
    off = _check_lag(field, lag)
    pairs = math.prod(n - abs(o) for o, n in zip(off, field.dims))
    disp, base = _lag_slices(field.dims, off)
    hits = int(np.count_nonzero(ind_a[disp] & ind_b[base]))
    return hits, pairs


def _threshold_and_indicators(field, set_a, set_b, rule):
    a_m, m = resolve_threshold(field.values, rule)
    grid = field.grid
    ind_a = set_a.indicator(grid, a_m)
    ind_b = set_b.indicator(grid, a_m)
    n_a = int(np.count_nonzero(ind_a))
    if n_a == 0:
        raise DegenerateDenominator(
            f"no site lands in {set_a.label()} at threshold {a_m:g}"
        )
    return a_m, m, ind_a, ind_b, n_a / field.size


def lattice_ese(
    field: LatticeField,
    set_a: ExtremeSet,
    set_b: ExtremeSet,
    rule: ThresholdRule,
    lags,
) -> EseResult:
    """Extremogram estimate at each requested vector lag.

    rho_hat(h) = [hits(h) / n(h)] / [#{X in a_m A} / #sites] with
    hits counting ordered in-grid pairs where X_{t+h} lands in a_m A
    and X_t lands in a_m B, strict inequalities on both sides.

    Raises DegenerateDenominator when no site at all lands in the
    scaled A set (a NaN here would silently poison any aggregation),
    and LagOutOfRange for non-integer lags or |h_i| >= n_i.
    """
    lag_list = [as_lag(h) for h in lags]  # dimension checked per-lag below
    a_m, m, ind_a, ind_b, denom_rate = _threshold_and_indicators(
        field, set_a, set_b, rule
    )
    hits = np.empty(len(lag_list), dtype=np.int64)
    pairs = np.empty(len(lag_list), dtype=np.int64)
    for i, lag in enumerate(lag_list):
        hits[i], pairs[i] = _pair_counts(field, ind_a, ind_b, lag)
    rho = (hits / pairs) / denom_rate
    return EseResult(
        lags=tuple(lag_list),
        distances=np.array([lag.norm for lag in lag_list]),
        rho_hat=rho,
        pair_count=pairs,
        exceed_count=hits,
        a_m=a_m,
        m=m,
        set_a=set_a,
        set_b=set_b,
        denom_rate=denom_rate,
        mode="lattice",
    )


def lattice_ese_by_distance(
    field: LatticeField,
    set_a: ExtremeSet,
    set_b: ExtremeSet,
    rule: ThresholdRule,
    max_dist: float,
) -> EseResult:
    """Extremogram pooled over all integer lags of equal norm.

    Every lag with 0 < |h| <= max_dist is evaluated; lags sharing a
    squared norm are merged by summing hits and pair counts, so the
    pooled estimate is the pair-count-weighted mean of the per-lag
    ones.  Rows are sorted by distance; each row's representative lag
    is the lexicographically largest member of its class, e.g. (1,0)
    for distance 1 and (1,1) for sqrt 2.
    """
    if not max_dist > 0:
        raise ValueError(f"max_dist must be positive, got {max_dist}")
    lags = lag_grid(max_dist, field.d)
    a_m, m, ind_a, ind_b, denom_rate = _threshold_and_indicators(
        field, set_a, set_b, rule
    )
    classes: dict[int, list] = {}
    for lag in lags:
        h, p = _pair_counts(field, ind_a, ind_b, lag)
        key = int(round(lag.norm_sq))
        classes.setdefault(key, []).append((lag, h, p))

    reps, dists, rho, pooled_h, pooled_p = [], [], [], [], []
    for key in sorted(classes):
        members = classes[key]
        rep = max(m_lag.offset for m_lag, _, _ in members)
        h_sum = sum(h for _, h, _ in members)
        p_sum = sum(p for _, _, p in members)
        reps.append(Lag(rep))
        dists.append(math.sqrt(key))
        pooled_h.append(h_sum)
        pooled_p.append(p_sum)
        rho.append((h_sum / p_sum) / denom_rate)
    return EseResult(
        lags=tuple(reps),
        distances=np.array(dists),
        rho_hat=np.array(rho),
        pair_count=np.array(pooled_p, dtype=np.int64),
        exceed_count=np.array(pooled_h, dtype=np.int64),
        a_m=a_m,
        m=m,
        set_a=set_a,
        set_b=set_b,
        denom_rate=denom_rate,
        mode="lattice",
        by_distance=True,
    )
