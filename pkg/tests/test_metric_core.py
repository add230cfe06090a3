import numpy as np
import pytest

import embedlab as el
from embedlab.metric_core import bin_index, net_is_dense, sampled_map_from_json


# ---------------------------------------------------------------------------
# oracles: independent brute-force pair scans
# ---------------------------------------------------------------------------

def brute_omega(smap, t):
    n = len(smap)
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            sd = smap.source_dist(smap.source_points[i], smap.source_points[j])
            if sd <= t:
                td = smap.target_dist(smap.image_points[i], smap.image_points[j])
                best = max(best, td)
    return best


def brute_rho(smap, t):
    n = len(smap)
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            sd = smap.source_dist(smap.source_points[i], smap.source_points[j])
            if sd >= t:
                td = smap.target_dist(smap.image_points[i], smap.image_points[j])
                best = td if best is None else min(best, td)
    return best


def brute_greedy_net(dist_matrix, delta):
    kept = []
    for i in range(len(dist_matrix)):
        if all(dist_matrix[i][j] >= delta for j in kept):
            kept.append(i)
    return kept


# ---------------------------------------------------------------------------
# expansion / compression moduli
# ---------------------------------------------------------------------------

def test_expansion_identity_isometry():
    m = el.SampledMap.from_lr_points([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
    assert el.expansion_modulus(m, 1.0) == 1.0


def test_expansion_linear_map_homogeneity():
    grid = np.arange(11.0)
    m = el.SampledMap.from_lr_points(grid, 2.0 * grid)
    assert el.expansion_modulus(m, 3.0) == 6.0


def test_expansion_no_qualifying_pair_is_zero():
    m = el.SampledMap.from_lr_points([0.0, 10.0], [0.0, 1.0])
    assert el.expansion_modulus(m, 0.5) == 0.0


def test_expansion_empty_map_rejected():
    with pytest.raises(ValueError, match="no samples"):
        el.SampledMap.from_lr_points([0.0], [0.0])


def test_expansion_matches_brute_force_on_random_sample():
    rng = np.random.default_rng(5)
    src = rng.uniform(0, 10, 40)
    img = rng.uniform(0, 10, 40)
    m = el.SampledMap.from_lr_points(src, img)
    for t in [0.5, 1.0, 3.0, 12.0]:
        assert el.expansion_modulus(m, t) == pytest.approx(brute_omega(m, t), abs=0)


def test_compression_identity_rho_bar():
    grid = np.arange(0.0, 5.0, 0.5)
    m = el.SampledMap.from_lr_points(grid, grid)
    prof = el.compression_moduli(m, [0.0, 1.0, 2.0, 2.0 + 1e-6, 3.0])
    b = bin_index(prof.bin_edges, 2.0)
    assert not prof.rho_bar_empty[b]
    assert prof.rho_bar[b] == 2.0


def test_compression_constant_map_zero():
    grid = np.arange(10.0)
    m = el.SampledMap.from_lr_points(grid, np.zeros(10))
    prof = el.compression_moduli(m, [0.5, 2.0, 5.0, 9.0])
    for b in range(prof.n_bins):
        if not prof.rho_bar_empty[b]:
            assert prof.rho[b] == 0.0
            assert prof.rho_bar[b] == 0.0


def test_compression_empty_bins_marked_not_zero():
    m = el.SampledMap.from_lr_points([0.0, 1.0, 10.0], [0.0, 1.0, 10.0])
    prof = el.compression_moduli(m, [0.0, 1.5, 3.0, 11.0])
    assert prof.rho_bar_empty[1]  # no pair with distance in [1.5, 3)
    assert np.isnan(prof.rho_bar[1])
    assert not prof.rho_empty[1]  # tail from 1.5 still sees the far pairs


def test_compression_rejects_bad_bins():
    m = el.SampledMap.from_lr_points([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        el.compression_moduli(m, [2.0, 1.0])
    with pytest.raises(ValueError):
        el.compression_moduli(m, [-1.0, 1.0])


def test_profile_monotonicity_random_maps():
    """omega nondecreasing; rho nondecreasing in the tail threshold (the
    constraint set d >= t shrinks as t grows); rho <= rho_bar binwise."""
    rng = np.random.default_rng(17)
    for trial in range(20):
        src = rng.uniform(0, 20, 30)
        img = rng.uniform(0, 20, (30, 2))
        m = el.SampledMap.from_lr_points(src, img)
        prof = el.compression_moduli(m, el.uniform_bins(m, 16))
        omega = prof.omega
        assert (np.diff(omega) >= 0).all()
        filled = ~prof.rho_empty
        rho_vals = prof.rho[filled]
        assert (np.diff(rho_vals) >= -1e-15).all()
        both = filled & ~prof.rho_bar_empty
        assert (prof.rho[both] <= prof.rho_bar[both] + 1e-15).all()


def test_profile_sandwich_rho_td_omega():
    rng = np.random.default_rng(23)
    src = rng.uniform(0, 8, 25)
    img = np.sin(src) * 3.0
    m = el.SampledMap.from_lr_points(src, img)
    prof = el.compression_moduli(m, el.uniform_bins(m, 12))
    sd, td = m.pair_arrays()
    for s, t in zip(sd, td):
        b = bin_index(prof.bin_edges, s)
        assert prof.rho[b] <= t + 1e-12
        assert t <= prof.omega[b] + 1e-12


def test_profile_rho_matches_brute_force_at_edges():
    rng = np.random.default_rng(31)
    src = rng.uniform(0, 6, 20)
    img = rng.uniform(0, 6, 20)
    m = el.SampledMap.from_lr_points(src, img)
    edges = el.uniform_bins(m, 8)
    prof = el.compression_moduli(m, edges)
    for b in range(prof.n_bins):
        expect = brute_rho(m, edges[b])
        if expect is None:
            assert prof.rho_empty[b]
        else:
            assert prof.rho[b] == pytest.approx(expect, abs=0)


def test_profile_csv_and_json_roundtrip_fields():
    m = el.SampledMap.from_lr_points([0.0, 1.0, 10.0], [0.0, 1.0, 10.0])
    prof = el.compression_moduli(m, [0.0, 1.5, 3.0, 11.0])
    csv = prof.to_csv()
    header, *rows = csv.strip().split("\n")
    assert header == "t_lo,t_hi,omega,rho,rho_bar,empty_flag"
    assert len(rows) == prof.n_bins
    assert rows[1].endswith(",1")  # empty bin flagged
    js = prof.to_json()
    assert js["rho_bar"][1] is None


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def test_classify_identity_grid():
    grid = np.arange(0.0, 101.0)
    rep = el.classify(el.SampledMap.from_lr_points(grid, grid))
    assert rep.expanding_at_scale
    assert [n for n, _ in rep.solvent_at_scale] == list(range(1, 9))
    assert rep.uncollapsed and rep.almost_uncollapsed
    assert rep.coarse_at_scale


def test_classify_constant_map():
    grid = np.arange(0.0, 50.0)
    rep = el.classify(el.SampledMap.from_lr_points(grid, np.zeros_like(grid)))
    assert not rep.expanding_at_scale
    assert rep.solvent_at_scale == []
    assert not rep.uncollapsed
    assert not rep.almost_uncollapsed
    assert rep.linear_growth_constant == 0.0


def test_classify_bounded_injective_map():
    """x / (1 + |x|): almost uncollapsed, but depth 2 insolvable (image diameter < 2)."""
    grid = np.linspace(-30, 30, 121)
    img = grid / (1.0 + np.abs(grid))
    rep = el.classify(el.SampledMap.from_lr_points(grid, img))
    assert rep.almost_uncollapsed
    solved = {n for n, _ in rep.solvent_at_scale}
    assert 2 not in solved
    assert not rep.expanding_at_scale


def test_classify_scaling_covariance():
    """lambda * f scales the moduli by exactly lambda; verdicts survive a
    rescaled tolerance."""
    rng = np.random.default_rng(9)
    src = rng.uniform(0, 15, 40)
    img = np.stack([src + rng.uniform(-0.05, 0.05, 40), np.cos(src)], axis=1)
    m = el.SampledMap.from_lr_points(src, img)
    lam = 2.0
    edges = el.uniform_bins(m, 16)
    prof = el.compression_moduli(m, edges)
    prof_scaled = el.compression_moduli(m.scaled_image(lam), edges)
    assert (prof_scaled.omega == lam * prof.omega).all()
    filled = ~prof.rho_empty
    assert (prof_scaled.rho[filled] == lam * prof.rho[filled]).all()
    binful = ~prof.rho_bar_empty
    assert (prof_scaled.rho_bar[binful] == lam * prof.rho_bar[binful]).all()

    params = el.ClassifyParams(t_grid=edges, zero_tol=1e-9)
    scaled_params = el.ClassifyParams(t_grid=edges, zero_tol=lam * 1e-9)
    rep = el.classify(m, params)
    rep_scaled = el.classify(m.scaled_image(lam), scaled_params)
    assert rep.uncollapsed == rep_scaled.uncollapsed
    assert rep.almost_uncollapsed == rep_scaled.almost_uncollapsed
    assert rep_scaled.linear_growth_constant == pytest.approx(
        lam * rep.linear_growth_constant, rel=1e-12
    )


def test_taxonomy_arrows_on_random_reports():
    rng = np.random.default_rng(41)
    for trial in range(15):
        src = rng.uniform(0, 12, 30)
        mode = trial % 3
        if mode == 0:
            img = src * rng.uniform(0.5, 2.0)
        elif mode == 1:
            img = np.sin(src)
        else:
            img = rng.uniform(0, 1, 30)
        rep = el.classify(el.SampledMap.from_lr_points(src, img))
        if rep.expanding_at_scale:
            assert rep.solvent_at_scale and rep.uncollapsed
        if rep.uncollapsed:
            assert rep.almost_uncollapsed


# ---------------------------------------------------------------------------
# nets
# ---------------------------------------------------------------------------

def test_net_grid_example():
    space = el.FiniteMetricSpace.from_points([0.0, 0.5, 1.0, 1.5, 2.0])
    assert el.extract_net(space, 1.0) == [0, 2, 4]


def test_net_large_delta_singleton():
    space = el.FiniteMetricSpace.from_points([3.0, 4.0, 5.0])
    assert el.extract_net(space, 10.0) == [0]


def test_net_matches_independent_scan_and_is_dense():
    rng = np.random.default_rng(42)
    pts = rng.uniform(0, 1, (100, 2))
    space = el.FiniteMetricSpace.from_points(pts)
    net = el.extract_net(space, 0.25)
    assert net == brute_greedy_net(space.dist, 0.25)
    assert net_is_dense(space, net, 0.25)
    for a in net:
        for b in net:
            if a != b:
                assert space.dist[a, b] >= 0.25


def test_net_transfer_identity():
    grid = np.arange(0.0, 40.0, 0.5)
    m = el.SampledMap.from_lr_points(grid, grid)
    space = el.FiniteMetricSpace.from_points(grid)
    net = el.extract_net(space, 0.75)
    rep = el.net_transfer_check(m, net, 0.75, n=1, R=10.0)
    assert rep["hypothesis_holds"] and rep["conclusion_holds"] and rep["implication_ok"]


def test_net_transfer_constant_map_vacuous():
    grid = np.arange(0.0, 20.0)
    m = el.SampledMap.from_lr_points(grid, np.zeros_like(grid))
    rep = el.net_transfer_check(m, range(len(grid)), 1.5, n=1, R=5.0)
    assert not rep["hypothesis_holds"]
    assert rep["implication_ok"]


def test_net_transfer_perturbed_isometry():
    rng = np.random.default_rng(7)
    grid = np.arange(0.0, 40.0, 0.5)
    img = grid + rng.uniform(-0.1, 0.1, len(grid))
    m = el.SampledMap.from_lr_points(grid, img)
    space = el.FiniteMetricSpace.from_points(grid)
    net = el.extract_net(space, 0.5)
    rep = el.net_transfer_check(m, net, 0.5, n=1, R=20.0)
    assert rep["implication_ok"]
    assert rep["hypothesis_holds"] and rep["conclusion_holds"]


def test_net_transfer_rejects_sparse_net():
    grid = np.arange(0.0, 20.0)
    m = el.SampledMap.from_lr_points(grid, grid)
    with pytest.raises(ValueError, match="dense"):
        el.net_transfer_check(m, [0, 19], 0.5, n=1, R=5.0)


# ---------------------------------------------------------------------------
# types and serialization
# ---------------------------------------------------------------------------

def test_metric_space_validation():
    with pytest.raises(ValueError, match="triangle"):
        el.FiniteMetricSpace(["a", "b", "c"], np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0.0]]))
    with pytest.raises(ValueError, match="diagonal"):
        el.FiniteMetricSpace(["a", "b"], np.array([[0.5, 1], [1, 0.0]]))
    with pytest.raises(ValueError, match="symmetric|asymmetric"):
        el.FiniteMetricSpace(["a", "b"], np.array([[0, 1], [2, 0.0]]))


def test_normed_point_norms():
    p = el.NormedPoint((3 + 4j, 0), r=2.0)
    assert p.norm() == pytest.approx(5.0)
    q = el.NormedPoint((1, -2, 3), r=float("inf"))
    assert q.norm() == 3.0
    assert q.norm_kind == "l_inf"
    # absolute homogeneity and triangle inequality, spot checks
    rng = np.random.default_rng(3)
    for _ in range(25):
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        lam = rng.uniform(0.1, 4.0)
        for r in [1.0, 1.5, 2.0, 3.0, float("inf")]:
            assert el.metric_core.lr_norm(lam * x, r) == pytest.approx(
                lam * el.metric_core.lr_norm(x, r), rel=1e-12
            )
            assert el.metric_core.lr_norm(x + y, r) <= (
                el.metric_core.lr_norm(x, r) + el.metric_core.lr_norm(y, r) + 1e-12
            )


def test_sampled_map_json_roundtrip():
    obj = {
        "source_space": {"kind": "lr", "r": 2.0},
        "image_space": {"kind": "lr", "r": "inf"},
        "source": [0.0, 1.0, 2.5],
        "image": [[0.0, 0.0], [1.0, 0.5], [2.5, 1.0]],
    }
    m = sampled_map_from_json(obj)
    assert len(m) == 3
    sd, td = m.pair_arrays()
    assert sd[0] == 1.0
    assert td[0] == 1.0  # sup norm of (1, 0.5)


def test_sampled_map_json_rejects_unknown_fields():
    with pytest.raises(ValueError):
        sampled_map_from_json({"source_space": {"kind": "lr"}, "image_space": {"kind": "lr"}, "source": [0, 1], "image": [0, 1], "extra": 1})
