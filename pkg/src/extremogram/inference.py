"""Permutation confidence bands and the Monte Carlo study harness.

The permutation bands answer "is there any spatial dependence among
these values at all": values are shuffled uniformly over the fixed
locations, the estimator is rerun per shuffle, and the pooled quantiles
of the shuffled estimates form a flat null envelope. The Monte Carlo
harness repeats simulate->estimate with derived per-replicate seeds and
aggregates, attaching closed-form limit and finite-m reference values
when the model has them.

Both are embarrassingly parallel; every task draws its randomness from
a stream derived from (seed, task index), and results are reduced in
task order, so output is bit-identical for any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDenominator,
    DomainError,
    ExtremogramError,
    TooFewPermutations,
)
from .fields import (
    ExtremeSet,
    Lag,
    LatticeField,
    PointField,
    ThresholdRule,
    as_lag,
    derive_rng,
    derive_seed,
)
from .kernel import KernelSpec, kernel_ese, kernel_ese_by_distance
from .lattice import EseResult, lattice_ese, lattice_ese_by_distance
from .oracles import br_extremogram, br_pa_extremogram, mma_extremogram, mma_pa_extremogram
from .simulate import (
    BrSimConfig,
    FieldSource,
    VariogramSpec,
    WeightSpec,
    sim_brown_resnick,
    sim_frechet_iid,
    sim_mma,
    sim_point_field,
)

__all__ = [
    "EstimatorConfig",
    "BandResult",
    "McSummary",
    "RateCheck",
    "MmaModel",
    "FrechetModel",
    "BrLatticeModel",
    "PointProcessModel",
    "run_estimator",
    "permutation_bands",
    "mc_study",
    "clt_rate_check",
]

MC_QUANTILES = (2.5, 25.0, 50.0, 75.0, 97.5)


@dataclass(frozen=True)
class EstimatorConfig:
    """Which estimator to run and how.

    mode "lattice" needs a LatticeField, mode "kernel" a PointField
    plus a KernelSpec.  ``by_distance`` switches to one row per
    distance (lattice: pooled equal-norm lags; kernel: rho averaged
    over ``n_angles`` directions).  ``nu`` is the known point
    intensity; None means the plug-in N/|S|.
    """

    mode: str
    by_distance: bool = False
    kernel: KernelSpec | None = None
    nu: float | None = None
    n_angles: int = 8

    def __post_init__(self):
        if self.mode not in ("lattice", "kernel"):
            raise ValueError(f"mode must be 'lattice' or 'kernel', got {self.mode!r}")
        if self.mode == "kernel" and self.kernel is None:
            raise ValueError("kernel mode needs a KernelSpec")

    def label(self) -> str:
        parts = [self.mode]
        if self.kernel is not None:
            parts.append(self.kernel.label())
            parts.append("nu=plugin" if self.nu is None else f"nu={self.nu:g}")
        if self.by_distance:
            parts.append("by-distance")
        return " ".join(parts)


def run_estimator(data, set_a, set_b, rule, config: EstimatorConfig, lags) -> EseResult:
    """Dispatch to the configured estimator.

    ``lags``: a list of vector lags normally; with ``by_distance`` a
    single max distance for lattice mode, or an explicit list of
    distances for kernel mode.
    """
    if config.mode == "lattice":
        if not isinstance(data, LatticeField):
            raise DomainError("lattice mode requires a LatticeField input")
        if config.by_distance:
            return lattice_ese_by_distance(data, set_a, set_b, rule, float(lags))
        return lattice_ese(data, set_a, set_b, rule, lags)
    if not isinstance(data, PointField):
        raise DomainError("kernel mode requires a PointField input")
    if config.by_distance:
        dists = [float(lags)] if np.isscalar(lags) else [float(r) for r in lags]
        return kernel_ese_by_distance(
            data, set_a, set_b, rule, config.kernel, dists,
            nu=config.nu, n_angles=config.n_angles,
        )
    return kernel_ese(data, set_a, set_b, rule, config.kernel, lags, nu=config.nu)


def _permuted(data, rng) -> LatticeField | PointField:
    shuffled = rng.permutation(data.values)
    if isinstance(data, LatticeField):
        return LatticeField(data.dims, shuffled)
    return PointField(data.locations, shuffled, data.region, data.intensity_hint)


@dataclass(frozen=True, eq=False)
class BandResult:
    """Null envelope for 'no spatial dependence' from value shuffles.

    ``lo``/``hi`` are pooled over every (permutation, lag) estimate and
    are therefore constant across lags; ``per_lag`` keeps the per-lag
    envelopes for diagnostics.  ``n_dropped`` counts permutations whose
    estimate degenerated and was excluded.  ``observed`` is the
    estimate on the unshuffled data.
    """

    lo: float
    hi: float
    level: float
    n_perm: int
    per_lag: tuple[tuple[float, float], ...]
    n_dropped: int
    observed: EseResult

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"band must satisfy lo <= hi, got ({self.lo}, {self.hi})")


def permutation_bands(
    data,
    set_a: ExtremeSet,
    set_b: ExtremeSet,
    rule: ThresholdRule,
    config: EstimatorConfig,
    lags,
    n_perm: int = 1000,
    level: float = 0.95,
    seed: int = 0,
    threads: int = 1,
) -> BandResult:
    """Random-permutation confidence bands at the given level.

    Permutation p shuffles the values over the fixed locations with the
    stream derived from (seed, p), so each permutation is reproducible
    independent of execution order.  Permutations whose estimate raises
    DegenerateDenominator are dropped and counted; other estimator
    errors propagate.
    """
    if n_perm < 100:
        raise TooFewPermutations(
            f"need at least 100 permutations for a meaningful band, got {n_perm}"
        )
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    observed = run_estimator(data, set_a, set_b, rule, config, lags)

    def one(p: int):
        shuffled = _permuted(data, derive_rng(seed, p))
        try:
            return run_estimator(shuffled, set_a, set_b, rule, config, lags).rho_hat
        except DegenerateDenominator:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            drawn = list(pool.map(one, range(n_perm)))
    else:
        drawn = [one(p) for p in range(n_perm)]
    kept = [r for r in drawn if r is not None]
    if not kept:
        raise DegenerateDenominator("every permutation produced a degenerate estimate")
    stack = np.vstack(kept)
    alpha = 1.0 - level
    lo, hi = np.quantile(stack.ravel(), [alpha / 2.0, 1.0 - alpha / 2.0])
    col_lo = np.quantile(stack, alpha / 2.0, axis=0)
    col_hi = np.quantile(stack, 1.0 - alpha / 2.0, axis=0)
    return BandResult(
        lo=float(lo),
        hi=float(hi),
        level=level,
        n_perm=n_perm,
        per_lag=tuple((float(a), float(b)) for a, b in zip(col_lo, col_hi)),
        n_dropped=len(drawn) - len(kept),
        observed=observed,
    )


# ---------------------------------------------------------------------------
# model configurations for the Monte Carlo harness

_RAY = ExtremeSet.ray(1.0)


@dataclass(frozen=True)
class MmaModel:
    """Max-moving-average field on a lattice."""

    dims: tuple
    weights: WeightSpec

    def simulate(self, seed: int) -> LatticeField:
        return sim_mma(self.dims, self.weights, seed)

    def oracle_limit(self, lag: Lag) -> float:
        return mma_extremogram(self.weights, lag)

    def oracle_pa(self, lag: Lag, m: float) -> float:
        return mma_pa_extremogram(self.weights, lag, m).rho_pa

    def describe(self) -> str:
        return f"mma {self.weights.label()} dims={'x'.join(str(n) for n in self.dims)}"


@dataclass(frozen=True)
class FrechetModel:
    """Independent unit-Frechet values on a lattice (no dependence)."""

    dims: tuple

    def simulate(self, seed: int) -> LatticeField:
        return sim_frechet_iid(self.dims, seed)

    def oracle_limit(self, lag: Lag) -> float:
        return 1.0 if lag.norm == 0.0 else 0.0

    def oracle_pa(self, lag: Lag, m: float) -> float:
        return 1.0 if lag.norm == 0.0 else 1.0 / m

    def describe(self) -> str:
        return f"frechet-iid dims={'x'.join(str(n) for n in self.dims)}"


def centered_grid_sites(dims, spacing: float) -> np.ndarray:
    """Planar grid coordinates centered on the origin, row-major order."""
    nx, ny = dims
    xs = (np.arange(nx) - (nx - 1) / 2.0) * spacing
    ys = (np.arange(ny) - (ny - 1) / 2.0) * spacing
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass(frozen=True)
class BrLatticeModel:
    """Brown-Resnick field sampled on a centered lattice.

    Grid lags are separated by ``spacing`` in physical units; oracle
    lookups convert grid-step lags to physical distance.  The grid is
    centered on the origin because the spectral simulator's truncation
    error grows with the variogram at the site, i.e. with distance
    from the origin.
    """

    dims: tuple
    vario: VariogramSpec
    config: BrSimConfig
    spacing: float = 1.0

    @property
    def sites(self) -> np.ndarray:
        return centered_grid_sites(self.dims, self.spacing)

    def simulate(self, seed: int) -> LatticeField:
        result = sim_brown_resnick(self.sites, self.vario, self.config, seed=seed)
        return LatticeField(self.dims, result.values)

    def _physical(self, lag: Lag) -> Lag:
        return Lag.of(lag.norm * self.spacing, 0.0)

    def oracle_limit(self, lag: Lag) -> float:
        return br_extremogram(self._physical(lag), self.vario)

    def oracle_pa(self, lag: Lag, m: float) -> float:
        return br_pa_extremogram(self._physical(lag), self.vario, m=m).rho_pa

    def describe(self) -> str:
        dims = "x".join(str(n) for n in self.dims)
        return (
            f"brown-resnick {self.config.method} theta={self.vario.theta:g} "
            f"alpha={self.vario.alpha:g} dims={dims} spacing={self.spacing:g}"
        )


@dataclass(frozen=True)
class PointProcessModel:
    """Random planar locations carrying values from a field source."""

    region: tuple
    count_rule: object
    source: FieldSource

    def simulate(self, seed: int) -> PointField:
        return sim_point_field(self.region, self.count_rule, self.source, seed=seed)

    def oracle_limit(self, lag: Lag) -> float:
        if self.source.kind == "frechet_iid":
            return 1.0 if lag.norm == 0.0 else 0.0
        return br_extremogram(lag, self.source.vario)

    def oracle_pa(self, lag: Lag, m: float) -> float:
        if self.source.kind == "frechet_iid":
            return 1.0 if lag.norm == 0.0 else 1.0 / m
        return br_pa_extremogram(lag, self.source.vario, m=m).rho_pa

    def describe(self) -> str:
        return f"point-field {self.source.kind} region={self.region}"


# ---------------------------------------------------------------------------
# Monte Carlo harness


@dataclass(frozen=True, eq=False)
class McSummary:
    """Replicate aggregates of rho_hat, one column per estimator row.

    ``quantiles`` maps percent points to per-row arrays.  Oracle
    columns are filled when the model provides closed forms and both
    sets are the exceedance ray (1, inf); otherwise None.  ``mean_m``
    is the average tail index across usable replicates (constant for
    quantile rules).
    """

    lags: tuple[Lag, ...]
    distances: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    quantiles: dict
    n_reps: int
    n_used: int
    n_failed: int
    model: str
    estimator: str
    mean_m: float
    oracle_limit: np.ndarray | None = None
    oracle_pa: np.ndarray | None = None


def _describe(model) -> str:
    describe = getattr(model, "describe", None)
    return describe() if callable(describe) else repr(model)


def _attach_oracles(model, lags, set_a, set_b, mean_m):
    if set_a != _RAY or set_b != _RAY:
        return None, None
    get_limit = getattr(model, "oracle_limit", None)
    get_pa = getattr(model, "oracle_pa", None)
    limit = pa = None
    try:
        if callable(get_limit):
            limit = np.array([get_limit(lag) for lag in lags])
        if callable(get_pa) and math.isfinite(mean_m):
            pa = np.array([get_pa(lag, mean_m) for lag in lags])
    except ExtremogramError:
        return None, None
    return limit, pa


def mc_study(
    model,
    set_a: ExtremeSet,
    set_b: ExtremeSet,
    rule: ThresholdRule,
    config: EstimatorConfig,
    lags,
    n_reps: int,
    seed: int = 0,
    threads: int = 1,
) -> McSummary:
    """Repeat simulate -> estimate and aggregate the estimates per row.

    Replicate r simulates with the seed derived from (seed, r).
    Replicates whose simulation or estimation raises a package error
    are excluded and counted in ``n_failed``; aggregation runs over
    the rest (all-NaN aggregates and empty rows when nothing
    succeeded).
    """
    if n_reps < 1:
        raise ValueError(f"n_reps must be >= 1, got {n_reps}")

    def one(r: int):
        try:
            data = model.simulate(derive_seed(seed, r))
            res = run_estimator(data, set_a, set_b, rule, config, lags)
            return res.lags, res.distances, res.rho_hat, res.m
        except ExtremogramError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            drawn = list(pool.map(one, range(n_reps)))
    else:
        drawn = [one(r) for r in range(n_reps)]
    kept = [r for r in drawn if r is not None]
    n_used = len(kept)
    if n_used == 0:
        return McSummary(
            lags=(),
            distances=np.empty(0),
            mean=np.empty(0),
            variance=np.empty(0),
            quantiles={q: np.empty(0) for q in MC_QUANTILES},
            n_reps=n_reps,
            n_used=0,
            n_failed=n_reps,
            model=_describe(model),
            estimator=config.label(),
            mean_m=math.nan,
        )
    row_lags, distances = kept[0][0], kept[0][1]
    stack = np.vstack([r[2] for r in kept])
    mean_m = float(np.mean([r[3] for r in kept]))
    q_levels = np.array(MC_QUANTILES) / 100.0
    q_rows = np.quantile(stack, q_levels, axis=0)
    limit, pa = _attach_oracles(model, row_lags, set_a, set_b, mean_m)
    return McSummary(
        lags=row_lags,
        distances=distances,
        mean=stack.mean(axis=0),
        variance=stack.var(axis=0, ddof=1) if n_used > 1 else np.zeros(stack.shape[1]),
        quantiles={q: q_rows[i] for i, q in enumerate(MC_QUANTILES)},
        n_reps=n_reps,
        n_used=n_used,
        n_failed=n_reps - n_used,
        model=_describe(model),
        estimator=config.label(),
        mean_m=mean_m,
        oracle_limit=limit,
        oracle_pa=pa,
    )


@dataclass(frozen=True, eq=False)
class RateCheck:
    """Variance of rho_hat at a reference lag across grid sizes.

    ``slope`` is the fitted coefficient of log variance against
    log(size^d); None when fewer than two sizes or a zero variance
    makes the fit undefined.  The theoretical value for a lattice
    field with a fixed quantile threshold is -1.
    """

    sizes: tuple[int, ...]
    variances: np.ndarray
    means: np.ndarray
    n_reps: int
    ref_lag: Lag
    d: int
    slope: float | None


def clt_rate_check(
    make_model,
    set_a: ExtremeSet,
    set_b: ExtremeSet,
    rule: ThresholdRule,
    config: EstimatorConfig,
    ref_lag,
    sizes,
    n_reps: int,
    seed: int = 0,
    threads: int = 1,
) -> RateCheck:
    """How fast the estimator variance shrinks as the grid grows.

    ``make_model(size)`` must build the model at linear size ``size``.
    A quantile threshold is required so the tail index m stays fixed
    across sizes; otherwise the rate comparison is meaningless.
    """
    if rule.kind != "quantile":
        raise DomainError("rate check requires a quantile threshold rule (fixed m)")
    size_list = [int(n) for n in sizes]
    if not size_list:
        raise ValueError("need at least one size")
    lag = as_lag(ref_lag)
    variances, means, d_seen = [], [], 2
    for size in size_list:
        model = make_model(size)

        def one(r: int, _model=model, _size=size):
            data = _model.simulate(derive_seed(seed, _size, r))
            rho = run_estimator(data, set_a, set_b, rule, config, [lag]).rho_hat[0]
            return rho, getattr(data, "d", 2)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                drawn = list(pool.map(one, range(n_reps)))
        else:
            drawn = [one(r) for r in range(n_reps)]
        vals = np.array([rho for rho, _ in drawn])
        d_seen = drawn[0][1]
        variances.append(vals.var(ddof=1) if n_reps > 1 else 0.0)
        means.append(vals.mean())
    variances = np.array(variances)
    slope = None
    if len(size_list) >= 2 and np.all(variances > 0):
        x = np.log(np.array(size_list, dtype=float) ** d_seen)
        slope = float(np.polyfit(x, np.log(variances), 1)[0])
    return RateCheck(
        sizes=tuple(size_list),
        variances=variances,
        means=np.array(means),
        n_reps=n_reps,
        ref_lag=lag,
        d=d_seen,
        slope=slope,
    )
