"""Kernel estimator: normalization, exactness, and order invariances."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from extremogram import (
    CountRule,
    DegenerateDenominator,
    EmptyField,
    ExtremeSet,
    FieldSource,
    KernelSpec,
    Lag,
    PointField,
    ThresholdRule,
    derive_rng,
    kernel_ese,
    kernel_ese_by_distance,
    kernel_p_hat,
    kernel_tau_hat,
    resolve_threshold,
    sim_point_field,
)

RAY = ExtremeSet.ray(1.0)


def brute_tau(pf, set_a, set_b, rule, kernel, lag, nu=None):
    """Double loop mirroring the estimator's pair definition.

    The difference vector is (s_i - s_j) + h exactly as in the
    estimator, and the accepted weights are summed in ascending order,
    so the result must match bit for bit.
    """
    nu_used = pf.n_points / pf.area if nu is None else nu
    a_m, m = resolve_threshold(pf.values, rule)
    ind_a = set_a.indicator(pf.values, a_m)
    ind_b = set_b.indicator(pf.values, a_m)
    lam = kernel.bandwidth
    h = np.asarray(lag.offset, dtype=float)
    contribs = []
    pairs = hits = 0
    for i in range(pf.n_points):
        for j in range(pf.n_points):
            if i == j:
                continue
            d = ((pf.locations[i] - pf.locations[j]) + h) / lam
            nsq = float(np.sum(d * d))
            if nsq <= 0.25:
                pairs += 1
                if ind_a[i] and ind_b[j]:
                    hits += 1
                    contribs.append(float(kernel.profile(nsq)) / (lam * lam))
    total = float(np.sort(np.array(contribs)).sum()) if contribs else 0.0
    tau = (m / (nu_used * nu_used * pf.area)) * total
    return tau, pairs, hits


def scatter(n, seed, side=10.0):
    rng = derive_rng(seed)
    locs = rng.uniform(0, side, size=(n, 2))
    vals = rng.pareto(1.0, size=n) + 1.0
    return PointField(locs, vals, (0.0, side, 0.0, side))


def test_kernel_normalizes_to_one():
    """Radial form: integral of w over the plane is int_0^{1/2} w(r^2) 2 pi r dr."""
    for spec in (KernelSpec.box(1.0), KernelSpec.epanechnikov(1.0)):
        total, err = quad(lambda r: float(spec.profile(r * r)) * 2 * math.pi * r,
                          0.0, 0.5)
        assert abs(total - 1.0) < 1e-12, (spec.shape, total)
        assert err < 1e-10


def test_kernel_is_isotropic():
    spec = KernelSpec.epanechnikov(1.0)
    r = 0.3
    angles = np.linspace(0, 2 * math.pi, 9)
    pts = np.column_stack([r * np.cos(angles), r * np.sin(angles)])
    w = spec.unscaled(pts)
    # cos/sin rounding perturbs the radius in the last ulp
    assert np.allclose(w, w[0], rtol=1e-14)


def test_kernel_scaling_and_support():
    spec = KernelSpec.box(0.5)
    assert spec.support_radius == 0.25
    inside = spec.unscaled(np.array([[0.49, 0.0]]))
    outside = spec.unscaled(np.array([[0.51, 0.0]]))
    assert inside[0] > 0 and outside[0] == 0.0
    diffs = np.array([[0.1, 0.05]])
    assert spec.scaled(diffs)[0] == spec.unscaled(diffs / 0.5)[0] / 0.25


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("triangle", 1.0)
    with pytest.raises(ValueError):
        KernelSpec.box(0.0)


def test_p_hat_plugin_identity():
    pf = scatter(200, seed=1)
    p_hat, a_m, m, nu_used = kernel_p_hat(pf, RAY, ThresholdRule.quantile(0.9))
    n_a = int(np.count_nonzero(pf.values > a_m))
    assert nu_used == pf.n_points / pf.area
    assert p_hat == m * n_a / (nu_used * pf.area)
    with pytest.raises(EmptyField):
        kernel_p_hat(PointField(np.empty((0, 2)), [], (0, 1, 0, 1)), RAY,
                     ThresholdRule.quantile(0.9))


def test_tau_matches_double_loop_bitwise():
    pf = scatter(150, seed=2)
    rule = ThresholdRule.quantile(0.8)
    for spec in (KernelSpec.box(1.2), KernelSpec.epanechnikov(0.9)):
        res = kernel_tau_hat(pf, RAY, RAY, rule, spec,
                             [Lag.of(1.0, 0.0), Lag.of(0.7, -1.3), Lag.of(0.0, 2.0)])
        for k, lag in enumerate(res.lags):
            tau, pairs, hits = brute_tau(pf, RAY, RAY, rule, spec, lag)
            assert res.pair_count[k] == pairs
            assert res.exceed_count[k] == hits
            assert res.tau[k] == tau, (spec.shape, lag.offset)


def test_tau_matches_double_loop_asymmetric_sets():
    pf = scatter(120, seed=3)
    rule = ThresholdRule.quantile(0.7)
    set_a = ExtremeSet(1.0, 4.0)
    set_b = ExtremeSet.ray(1.5)
    spec = KernelSpec.box(1.0)
    res = kernel_tau_hat(pf, set_a, set_b, rule, spec, [Lag.of(1.5, 0.5)])
    tau, pairs, hits = brute_tau(pf, set_a, set_b, rule, spec, Lag.of(1.5, 0.5))
    assert res.tau[0] == tau and res.pair_count[0] == pairs


def test_tau_sign_symmetry_bitwise():
    """tau(h) == tau(-h) exactly when A == B: the pair map is an involution."""
    pf = scatter(250, seed=4)
    rule = ThresholdRule.quantile(0.85)
    spec = KernelSpec.epanechnikov(1.1)
    for off in [(1.0, 0.0), (0.6, 0.8), (1.3, -0.4)]:
        fwd = kernel_tau_hat(pf, RAY, RAY, rule, spec, [Lag.of(*off)])
        rev = kernel_tau_hat(pf, RAY, RAY, rule, spec, [Lag.of(*off).negate()])
        assert fwd.tau[0] == rev.tau[0], off
        assert fwd.pair_count[0] == rev.pair_count[0]


def test_tau_relabeling_invariance_bitwise():
    pf = scatter(180, seed=5)
    rng = derive_rng(6)
    perm = rng.permutation(pf.n_points)
    shuffled = PointField(pf.locations[perm], pf.values[perm], pf.region)
    rule = ThresholdRule.quantile(0.8)
    spec = KernelSpec.box(1.0)
    lags = [Lag.of(1.0, 0.0), Lag.of(0.5, 0.5)]
    a = kernel_tau_hat(pf, RAY, RAY, rule, spec, lags)
    b = kernel_tau_hat(shuffled, RAY, RAY, rule, spec, lags)
    assert np.array_equal(a.tau, b.tau)
    assert np.array_equal(a.pair_count, b.pair_count)


def test_tau_translation_invariance():
    pf = scatter(150, seed=7)
    shift = np.array([3.25, -1.5])
    x0, x1, y0, y1 = pf.region
    moved = PointField(
        pf.locations + shift, pf.values,
        (x0 + shift[0], x1 + shift[0], y0 + shift[1], y1 + shift[1]),
    )
    rule = ThresholdRule.quantile(0.8)
    spec = KernelSpec.epanechnikov(1.0)
    a = kernel_tau_hat(pf, RAY, RAY, rule, spec, [Lag.of(1.0, -0.5)])
    b = kernel_tau_hat(moved, RAY, RAY, rule, spec, [Lag.of(1.0, -0.5)])
    assert a.tau[0] == pytest.approx(b.tau[0], rel=1e-10)


def test_tau_hand_value_single_pair():
    """One aligned pair under a box kernel: tau = m * w(0)/lambda^2 / (nu^2 |S|)."""
    locs = np.array([[1.0, 1.0], [2.0, 1.0]])
    pf = PointField(locs, [1.0, 1.0], (0.0, 4.0, 0.0, 1.0))  # area 4, nu = 1/2
    spec = KernelSpec.box(0.5)
    res = kernel_tau_hat(pf, RAY, RAY, ThresholdRule.absolute(0.5), spec,
                         [Lag.of(1.0, 0.0)])
    # m = 2/2 = 1, nu^2 |S| = 1, single in-support ordered pair at the center
    assert res.m == 1.0
    assert res.pair_count[0] == 1
    assert res.tau[0] == pytest.approx(16.0 / math.pi, rel=1e-14)


def test_kernel_ese_ratio_and_metadata():
    pf = scatter(300, seed=8)
    rule = ThresholdRule.quantile(0.9)
    spec = KernelSpec.box(1.0)
    lags = [Lag.of(1.0, 0.0)]
    res = kernel_ese(pf, RAY, RAY, rule, spec, lags)
    taus = kernel_tau_hat(pf, RAY, RAY, rule, spec, lags)
    p_hat, _, _, _ = kernel_p_hat(pf, RAY, rule)
    assert res.rho_hat[0] == taus.tau[0] / p_hat
    assert res.mode == "kernel"
    assert res.nu_used == pf.n_points / pf.area
    assert not res.bandwidth_degenerate


def test_kernel_ese_known_intensity():
    pf = sim_point_field((0, 10, 0, 10), CountRule.poisson(2.0),
                         FieldSource.frechet_iid(), seed=9)
    res = kernel_ese(pf, RAY, RAY, ThresholdRule.quantile(0.9),
                     KernelSpec.box(1.0), [Lag.of(1.0, 0.0)], nu=2.0)
    assert res.nu_used == 2.0


def test_kernel_ese_degenerate_denominator():
    pf = scatter(100, seed=10)
    with pytest.raises(DegenerateDenominator):
        kernel_ese(pf, ExtremeSet.ray(1e9), RAY, ThresholdRule.absolute(1.0),
                   KernelSpec.box(1.0), [Lag.of(1.0, 0.0)])


def test_kernel_ese_needs_two_points():
    pf = PointField(np.array([[0.5, 0.5]]), [2.0], (0, 1, 0, 1))
    with pytest.raises(EmptyField):
        kernel_ese(pf, RAY, RAY, ThresholdRule.absolute(1.0),
                   KernelSpec.box(0.5), [Lag.of(0.5, 0.0)])


def test_tiny_bandwidth_flags_degenerate():
    # points ~0.3 apart on average; a 1e-6 support captures no pair
    pf = scatter(100, seed=11)
    res = kernel_ese(pf, RAY, RAY, ThresholdRule.quantile(0.9),
                     KernelSpec.box(1e-6), [Lag.of(1.0, 0.0)])
    assert res.bandwidth_degenerate
    assert np.all(res.rho_hat == 0.0)
    assert np.all(res.pair_count == 0)


def test_by_distance_averages_ring():
    pf = scatter(400, seed=12)
    rule = ThresholdRule.quantile(0.9)
    spec = KernelSpec.box(1.0)
    res = kernel_ese_by_distance(pf, RAY, RAY, rule, spec, [1.0, 2.0], n_angles=8)
    assert res.by_distance
    assert list(res.distances) == [1.0, 2.0]
    assert [lag.offset for lag in res.lags] == [(1.0, 0.0), (2.0, 0.0)]
    # manual ring average must agree
    ring = [Lag.of(math.cos(a), math.sin(a))
            for a in 2 * math.pi * np.arange(8) / 8]
    per = kernel_ese(pf, RAY, RAY, rule, spec, ring)
    assert res.rho_hat[0] == pytest.approx(float(per.rho_hat.mean()), abs=1e-15)
    assert res.pair_count[0] == per.pair_count.sum()
    with pytest.raises(ValueError):
        kernel_ese_by_distance(pf, RAY, RAY, rule, spec, [-1.0])
