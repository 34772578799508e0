import math

import numpy as np
import pytest

from conftest import odd_lattice_centers
from inclab.core.error_codes import BusinessException
from inclab.engine.cantor import cantor_generate
from inclab.engine.constructions import (
    Construction1Params,
    construct,
    construct1,
    construct2,
    construct3,
    construct4,
    furstenberg_config,
    furstenberg_product,
    lambda_conditions,
    region_of,
    regularize,
)
from inclab.engine.geometry import Configuration, Scale, incidence_mask
from inclab.engine.incidence import count_brute, count_grid
from inclab.engine.spacing import (
    ball_profile_dyadic,
    max_intersect_degree_balls,
    max_overlap_degree_tubes,
    tube_profile,
)

# one representative (α, β) per construction region
REGION_POINTS = [(1, 1.0, 1.0), (2, 1.8, 0.5), (3, 0.5, 1.8), (4, 1.7, 1.6)]


def test_bundle_exponents_at_unit_point():
    config = construct1(6, 1.0, 1.0)
    assert config.meta["gamma"] == pytest.approx(0.5)
    assert config.meta["kappa"] == pytest.approx(0.5)
    assert config.meta["lambda"] == pytest.approx(0.5)


def test_bundle_exponents_at_half_point():
    params = Construction1Params.from_exponents(0.5, 0.5)
    assert params.gamma == pytest.approx(0.5)
    assert params.kappa == pytest.approx(0.25)
    assert all(lambda_conditions(params))


def test_lambda_conditions_hold_on_region_grid():
    for alpha in np.linspace(0.1, 1.9, 10):
        for beta in np.linspace(0.1, 1.9, 10):
            if alpha < beta + 1 and beta < alpha + 1 and alpha + beta < 3:
                assert all(lambda_conditions(Construction1Params.from_exponents(alpha, beta)))


def test_lambda_override():
    config = construct1(6, 1.0, 1.0, lam=0.0)
    assert config.meta["lambda"] == 0.0
    assert config.meta["n_rows"] == 1
    with pytest.raises(BusinessException):
        construct1(6, 1.0, 1.0, lam=1.5)


def test_bundle_region_violation():
    with pytest.raises(BusinessException) as exc:
        construct1(6, 2.0, 0.5)
    assert exc.value.code == "REGION_VIOLATION"


def test_bundle_balls_meet_their_own_tubes():
    config = construct1(7, 1.2, 0.9)
    n_t, n_b = config.meta["tubes_per_bundle"], config.meta["balls_per_bundle"]
    for bundle in range(config.meta["n_bundles"]):
        balls = config.ball_centers[bundle * n_b:(bundle + 1) * n_b]
        tubes = config.tube_params[bundle * n_t:(bundle + 1) * n_t]
        mask = incidence_mask(balls, config.ball_radius, tubes, config.tube_width, config.tube_length)
        assert mask.all()


def test_bundle_incidence_lower_bound():
    config = construct1(8, 1.0, 1.0)
    assert config.n_balls == 256
    assert config.n_tubes == 256
    report = count_grid(config)
    assert report.total >= 4096
    assert report.total == count_brute(config).total


def test_fan_single_ball():
    scale = Scale(6)
    config = construct2(6, 2.0, 0.0)
    m = config.meta["fan_size"]
    assert config.n_balls == 1
    assert config.n_tubes == config.meta["n_bundles"] * m
    total = count_grid(config).total
    assert total >= m >= scale.D / 12


def test_fan_region_violation():
    with pytest.raises(BusinessException) as exc:
        construct2(6, 1.2, 0.5)
    assert exc.value.code == "REGION_VIOLATION"


@pytest.mark.parametrize("alpha,beta", [(0.5, 1.8), (0.7, 1.95), (0.0, 1.5)])
def test_columns_exact_count(alpha, beta):
    for k in (6, 7, 8):
        D = 2 ** k
        config = construct3(k, alpha, beta)
        assert count_grid(config).total == math.floor(D ** alpha + 1e-9) * D
    assert count_brute(construct3(6, alpha, beta)).total == math.floor(64 ** alpha + 1e-9) * 64


def test_columns_at_full_ball_dimension_stay_two_deltas_apart():
    for k in (6, 7):
        scale = Scale(k)
        config = construct3(k, 1.0, 2.0)
        xs = np.unique(config.ball_centers[:, 0])
        assert xs.size == scale.D // 2
        assert np.min(np.diff(xs)) >= 2 * scale.delta - 1e-12
        assert config.n_tubes == scale.D // 2
        report = count_brute(config)
        assert report.total == count_grid(config).total == config.n_tubes * scale.D
        assert np.all(report.per_ball <= 1)
    assert ball_profile_dyadic(config.ball_centers, config.scale, 2.0).K <= 64
    assert tube_profile(config.tube_params, config.scale, 1.0).K <= 64


def test_cone_grid_disjoint_and_centered():
    scale = Scale(6)
    config = construct4(6, 1.7, 1.6)
    n = config.meta["grid_side"]
    assert config.n_balls == n * n
    assert config.meta["grid_spacing"] >= 2 * scale.delta
    assert np.all(np.abs(config.ball_centers - 0.5) < 0.25)


def test_region_of():
    assert region_of(1.0, 1.0) == 1
    assert region_of(1.8, 0.5) == 2
    assert region_of(0.5, 1.8) == 3
    assert region_of(1.7, 1.6) == 4


def test_dispatch_errors():
    with pytest.raises(BusinessException) as exc:
        construct(5, 6, 1.0, 1.0)
    assert exc.value.code == "UNKNOWN_CONSTRUCTION"
    with pytest.raises(BusinessException) as exc:
        construct(2, 6, 2.0, 0.0, lam=0.3)
    assert exc.value.code == "INVALID_INPUT"
    assert construct(1, 6, 1.0, 1.0, lam=None).n_tubes > 0


def test_constructions_need_k_at_least_four():
    with pytest.raises(BusinessException) as exc:
        construct(3, 3, 0.5, 1.8)
    assert exc.value.code == "INVALID_SCALE"


def test_furstenberg_product_size():
    config = furstenberg_product(6, 1.0)
    assert config.n_balls == len(cantor_generate(6, 1.0)) * 65
    assert config.n_tubes == 0


def test_furstenberg_members_meet_their_tubes():
    fc = furstenberg_config(6, 0.5, 1.5)
    assert fc.tube_params.shape[0] == 8 * 64
    limit = len(cantor_generate(6, 0.5))
    for t, members in zip(fc.tube_params, fc.members):
        assert 1 <= members.size <= limit
        mask = incidence_mask(fc.ball_centers[members], fc.scale.delta, t[None, :], fc.scale.delta, 1.0)
        assert mask.all()
    assert fc.as_configuration().n_balls == fc.n_balls


def test_furstenberg_parallel_family():
    fc = furstenberg_config(6, 1.0, 1.0)
    assert fc.tube_params.shape[0] == 64
    assert np.allclose(fc.tube_params[:, 2], math.pi / 2)


def test_furstenberg_region():
    with pytest.raises(BusinessException) as exc:
        furstenberg_config(6, 0.0, 1.5)
    assert exc.value.code == "REGION_VIOLATION"


def _dense_quarter_block(k: int) -> np.ndarray:
    delta = 2.0 ** -k
    odd = (2 * np.arange(16) + 1) * delta
    gx, gy = np.meshgrid(odd, odd, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


def test_regularize_replaces_the_heavy_square():
    scale = Scale(7)
    centers = _dense_quarter_block(7)
    result = regularize(centers, 7, 0.5, 1.0)
    assert result.squares == [(0.0, 0.0, 0.25)]
    assert result.replaced == 256
    assert result.copies == 1
    assert result.centers.shape == (285, 2)
    assert ball_profile_dyadic(result.centers, scale, 1.5).K <= 4.0


def test_regularized_set_keeps_quarter_of_incidences():
    scale = Scale(7)
    centers = _dense_quarter_block(7)
    result = regularize(centers, 7, 0.5, 1.0)
    xs = (2 * np.arange(16) + 1) * scale.delta
    tubes = np.stack([xs, np.full(16, 0.125), np.full(16, math.pi / 2)], axis=1)
    before = count_grid(Configuration.at_scale(scale, centers, tubes)).total
    after = count_grid(Configuration.at_scale(scale, result.centers, tubes)).total
    assert before == 256
    assert after >= 0.25 * before


def test_regularize_fixed_point(rng):
    centers = odd_lattice_centers(rng, 7, 50)
    result = regularize(centers, 7, 0.5, 1.0)
    assert result.squares == []
    np.testing.assert_array_equal(result.centers, centers)


def test_regularize_rejects_off_lattice():
    with pytest.raises(BusinessException) as exc:
        regularize([[0.5, 0.5]], 7, 0.5, 1.0)
    assert exc.value.code == "LATTICE_VIOLATION"


@pytest.mark.parametrize(
    "construction,k,alpha,beta",
    [(1, 8, 1.0, 1.0), (1, 7, 1.2, 0.9), (1, 6, 0.5, 0.5), (2, 7, 1.8, 0.5), (3, 7, 0.5, 1.8),
     (3, 6, 1.0, 2.0), (4, 6, 1.7, 1.6)],
)
def test_constructions_are_essentially_distinct(construction, k, alpha, beta):
    config = construct(construction, k, alpha, beta)
    assert max_overlap_degree_tubes(config.tube_params, config.tube_width, config.tube_length) <= 2
    assert max_intersect_degree_balls(config.ball_centers, config.ball_radius) <= 10


def test_bundle_fan_step_is_at_least_three_deltas():
    for alpha, beta in [(1.0, 1.0), (0.9, 0.8), (1.2, 0.9)]:
        config = construct1(10, alpha, beta)
        assert config.meta["fan_step"] >= 3 * config.scale.delta
        n_t = config.meta["tubes_per_bundle"]
        fan = np.sort(config.tube_params[:n_t, 2])
        assert np.all(np.diff(fan) >= 3 * config.scale.delta - 1e-12)


@pytest.mark.parametrize("construction,alpha,beta", REGION_POINTS)
@pytest.mark.parametrize("k", [6, 8])
def test_construction_sizes_match_exponents(construction, alpha, beta, k):
    config = construct(construction, k, alpha, beta)
    D = 2 ** k
    assert D ** alpha / 32 <= config.n_tubes <= 32 * D ** alpha
    assert D ** beta / 32 <= config.n_balls <= 32 * D ** beta


@pytest.mark.parametrize("construction,alpha,beta", REGION_POINTS + [(3, 1.0, 2.0)])
def test_construction_incidences_ignore_tolerance(construction, alpha, beta):
    config = construct(construction, 6, alpha, beta)
    tight = count_brute(config, tol=1e-14)
    loose = count_brute(config, tol=1e-10)
    np.testing.assert_array_equal(tight.per_ball, loose.per_ball)
    np.testing.assert_array_equal(tight.per_tube, loose.per_tube)
    assert count_grid(config, tol=1e-14).total == count_grid(config, tol=1e-10).total == tight.total
