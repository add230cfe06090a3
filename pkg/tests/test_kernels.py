import math

import numpy as np
import pytest

import embedlab as el
from embedlab.kernels import KernelMatrix, holder_sandwich_check
from embedlab.metric_core import compression_moduli, uniform_bins


def oracle_projected_max_eig(K):
    """Independent check: eigenvalues of P K P via explicit centering."""
    n = len(K)
    P = np.eye(n) - np.full((n, n), 1.0 / n)
    M = P @ np.asarray(K, float) @ P
    return float(np.linalg.eigvalsh((M + M.T) / 2)[-1])


def random_points(rng, n, dim):
    return rng.uniform(-3, 3, (n, dim))


# ---------------------------------------------------------------------------
# negative definiteness
# ---------------------------------------------------------------------------

def test_squared_distances_are_negative_definite():
    rng = np.random.default_rng(1)
    for _ in range(10):
        pts = random_points(rng, 12, 3)
        K = el.squared_distance_kernel(pts)
        res = el.is_negative_definite(K)
        assert res["verdict"]
        assert res["max_violation"] <= 1e-12 * K.scale


def test_sign_flip_fails_with_positive_violation():
    rng = np.random.default_rng(2)
    pts = random_points(rng, 8, 2)
    K = el.squared_distance_kernel(pts)
    flipped = KernelMatrix(-K.entries, zero_diagonal=True)
    res = el.is_negative_definite(flipped)
    assert not res["verdict"]
    assert res["max_violation"] > 0
    assert res["max_violation"] == pytest.approx(oracle_projected_max_eig(-K.entries), rel=1e-9)


def test_absolute_distance_on_reals_negative_definite():
    """|x - y| on {0, 1, 3, 7}; oracle recomputes the projected eigenvalue."""
    xs = np.array([0.0, 1.0, 3.0, 7.0])
    K = KernelMatrix(np.abs(xs[:, None] - xs[None, :]), zero_diagonal=True)
    res = el.is_negative_definite(K)
    assert res["verdict"]
    assert oracle_projected_max_eig(K.entries) <= 1e-12 * K.scale


def test_kernel_symmetry_exact_by_construction():
    raw = np.array([[0.0, 1.0, 2.0], [99.0, 0.0, 3.0], [98.0, 97.0, 0.0]])
    K = KernelMatrix(raw)
    assert (K.entries == K.entries.T).all()
    assert K.entries[1, 0] == 1.0  # rebuilt from the upper triangle


def test_kernel_json_roundtrip():
    rng = np.random.default_rng(3)
    K = el.squared_distance_kernel(random_points(rng, 6, 2))
    K2 = KernelMatrix.from_json(K.to_json())
    assert (K2.entries == K.entries).all()
    assert K2.zero_diagonal
    with pytest.raises(ValueError, match="unknown kernel fields"):
        KernelMatrix.from_json({"size": 1, "upper": [0.0], "bogus": 1})


# ---------------------------------------------------------------------------
# snowflake
# ---------------------------------------------------------------------------

def test_snowflake_halves_exponent_on_line():
    xs = np.array([0.0, 1.0, 2.0, 3.0])
    K = el.squared_distance_kernel(xs)
    flake = el.snowflake_kernel(K, 0.5)
    assert np.allclose(flake.entries, np.abs(xs[:, None] - xs[None, :]), atol=1e-12)


def test_snowflake_zero_kernel():
    K = KernelMatrix(np.zeros((4, 4)), zero_diagonal=True)
    flake = el.snowflake_kernel(K, 0.3)
    assert (flake.entries == 0).all()


def test_snowflake_seeded_point_sets_certify():
    rng = np.random.default_rng(11)
    pts = random_points(rng, 20, 3)
    K = el.squared_distance_kernel(pts)
    for alpha in [0.25, 0.4]:
        flake = el.snowflake_kernel(K, alpha)
        assert oracle_projected_max_eig(flake.entries) <= 1e-9 * flake.scale


def test_snowflake_rejects_bad_inputs():
    K = KernelMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]), zero_diagonal=True)
    with pytest.raises(ValueError, match="not a squared-distance kernel"):
        el.snowflake_kernel(K, 0.5)
    good = el.squared_distance_kernel(np.array([0.0, 1.0]))
    for alpha in [0.0, 1.0, 1.5]:
        with pytest.raises(ValueError):
            el.snowflake_kernel(good, alpha)


# ---------------------------------------------------------------------------
# Schoenberg embedding
# ---------------------------------------------------------------------------

def test_embed_two_points():
    K = KernelMatrix(np.array([[0.0, 4.0], [4.0, 0.0]]), zero_diagonal=True)
    emb = el.schoenberg_embed(K)
    assert emb.points.shape[1] <= 1
    d = np.linalg.norm(emb.points[0] - emb.points[1])
    assert d == pytest.approx(2.0, abs=1e-12)


def test_embed_unit_square_congruent():
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    K = el.squared_distance_kernel(corners)
    emb = el.schoenberg_embed(K)
    assert emb.reconstruction_error <= 1e-9
    got = np.linalg.norm(emb.points[:, None, :] - emb.points[None, :, :], axis=2)
    want = np.sqrt(K.entries)
    assert np.allclose(got, want, atol=1e-9)


def test_embed_snowflaked_kernel_reconstructs():
    rng = np.random.default_rng(7)
    pts = random_points(rng, 10, 3)
    K = el.squared_distance_kernel(pts)
    flake = el.snowflake_kernel(K, 0.5)
    emb = el.schoenberg_embed(flake)
    got_sq = ((emb.points[:, None, :] - emb.points[None, :, :]) ** 2).sum(axis=2)
    # ||g_i - g_j||^2 equals the original distances |x_i - x_j|
    assert np.abs(got_sq - np.sqrt(K.entries)).max() <= 1e-9


def test_embed_dimension_and_centering():
    rng = np.random.default_rng(9)
    for n in [3, 8, 15]:
        K = el.squared_distance_kernel(random_points(rng, n, 4))
        emb = el.schoenberg_embed(K)
        assert emb.points.shape[1] <= n - 1
        # noise-level eigenvalues (~eps*scale) contribute sqrt(eps*scale) to
        # the column sums, so the centering residual sits near 1e-7 here
        assert np.abs(emb.points.sum(axis=0)).max() <= 1e-6 * math.sqrt(K.scale + 1)


def test_embed_rejects_non_negative_type():
    bad = KernelMatrix(-el.squared_distance_kernel(np.array([0.0, 1.0, 3.0])).entries, zero_diagonal=True)
    with pytest.raises(ValueError, match="not negative type"):
        el.schoenberg_embed(bad)


# ---------------------------------------------------------------------------
# exp(-g) positive definiteness
# ---------------------------------------------------------------------------

def test_exp_of_zero_is_all_ones():
    res = el.exp_positive_definite_check(np.zeros((5, 5)))
    assert res["verdict"]
    assert res["min_eigenvalue"] >= -1e-12


def test_exp_gaussian_kernel_psd():
    rng = np.random.default_rng(13)
    pts = random_points(rng, 15, 3)
    K = el.squared_distance_kernel(pts)
    res = el.exp_positive_definite_check(K)
    assert res["verdict"]


def test_exp_forward_direction_over_seeds():
    """Certified negative definite => exp(-K) passes PSD, 200 seeded sets."""
    rng = np.random.default_rng(31)
    for _ in range(200):
        n = int(rng.integers(3, 12))
        dim = int(rng.integers(1, 5))
        K = el.squared_distance_kernel(random_points(rng, n, dim))
        assert el.is_negative_definite(K)["verdict"]
        assert el.exp_positive_definite_check(K)["verdict"]


def test_exp_no_reverse_claim():
    # a kernel that is NOT negative definite may land either way; only
    # validate that the check runs and reports the eigenvalue
    g = np.array([[0.0, 5.0, 0.1], [5.0, 0.0, 5.0], [0.1, 5.0, 0.0]])
    res = el.exp_positive_definite_check(g)
    assert "min_eigenvalue" in res


def test_exp_rejects_bad_g():
    with pytest.raises(ValueError):
        el.exp_positive_definite_check(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError):
        el.exp_positive_definite_check(np.array([[1.0, 1.0], [1.0, 1.0]]))


# ---------------------------------------------------------------------------
# Holder-solvent transform
# ---------------------------------------------------------------------------

def test_holder_identity_on_separated_grid():
    grid = np.arange(0.0, 12.0)  # 1-separated, identity map
    f = el.SampledMap.from_lr_points(grid, grid)
    fa, rep = el.holder_solvent_transform(f, 0.4)
    sd, _ = f.pair_arrays()
    _, td_new = fa.pair_arrays()
    assert np.abs(td_new - sd**0.4).max() <= 1e-9


def test_holder_constant_map():
    grid = np.arange(0.0, 6.0)
    f = el.SampledMap.from_lr_points(grid, np.zeros_like(grid))
    fa, _ = el.holder_solvent_transform(f, 0.3)
    _, td_new = fa.pair_arrays()
    assert np.abs(td_new).max() <= 1e-9


def test_holder_floor_map_sandwich():
    grid = np.arange(0.0, 50.0, 0.25)
    img = np.floor(grid) / 2.0  # normalized: 1-distant pairs stay 1-bounded
    f = el.SampledMap.from_lr_points(grid, img)
    prof = compression_moduli(f, uniform_bins(f, 64))
    fa, rep = el.holder_solvent_transform(f, 0.4, profile=prof)
    res = holder_sandwich_check(f, fa, 0.4, prof)
    assert res["pairs_checked"] > 0
    assert res["lower_ok"] and res["upper_ok"]


def test_holder_alpha_range_enforced():
    grid = np.arange(0.0, 5.0)
    f = el.SampledMap.from_lr_points(grid, grid)
    with pytest.raises(ValueError, match="alpha"):
        el.holder_solvent_transform(f, 0.5)


def test_holder_normalization_enforced():
    grid = np.arange(0.0, 5.0)
    f = el.SampledMap.from_lr_points(grid, 2.0 * grid)  # expands: not normalized
    with pytest.raises(ValueError, match="normalization"):
        el.holder_solvent_transform(f, 0.4)


def test_holder_net_restriction():
    grid = np.arange(0.0, 10.0, 0.5)
    f = el.SampledMap.from_lr_points(grid, grid)
    fa, rep = el.holder_solvent_transform(f, 0.25, net_delta=1.0)
    assert len(fa) < len(f)
    sd, _ = fa.pair_arrays()
    assert sd.min() >= 1.0  # net restriction is 1-separated
