import math

import numpy as np
import pytest

from conftest import random_tubes
from inclab.core.error_codes import BusinessException
from inclab.engine.geometry import Configuration, Scale, Tube, angle_between, incidence_mask
from inclab.engine.incidence import (
    BallGrid,
    IncidenceReport,
    angle_bands,
    color_partition_balls,
    color_partition_tubes,
    count,
    count_brute,
    count_grid,
    dualize,
    duality_groups,
    incident_balls,
    moment_J,
    moment_j,
    thicken,
    tubes_at_angle,
)
from inclab.engine.spacing import ball_profile_dyadic, overlapping_tube_pairs


def _random_config(rng, k: int, n: int, m: int) -> Configuration:
    return Configuration.at_scale(Scale(k), rng.uniform(0, 1, size=(n, 2)), random_tubes(rng, m))


@pytest.mark.parametrize("seed", range(100))
def test_grid_matches_brute(seed):
    rng = np.random.RandomState(seed)
    k = int(rng.randint(5, 9))
    config = _random_config(rng, k, int(rng.randint(1, 1000)), int(rng.randint(1, 1000)))
    grid, brute = count_grid(config, threads=2), count_brute(config)
    assert grid.total == brute.total
    np.testing.assert_array_equal(grid.per_tube, brute.per_tube)
    np.testing.assert_array_equal(grid.per_ball, brute.per_ball)


def test_simple_counts():
    scale = Scale(6)
    hit = Configuration.at_scale(scale, [[0.5, 0.5]], [[0.5, 0.5, 0.3]])
    miss = Configuration.at_scale(scale, [[0.5, 0.9]], [[0.5, 0.5, 0.0]])
    assert count_grid(hit).total == 1
    assert count_grid(miss).total == 0
    empty = Configuration.at_scale(scale, np.zeros((0, 2)), [[0.5, 0.5, 0.0]])
    report = count_grid(empty)
    assert report.total == 0
    assert report.per_tube.tolist() == [0]


def test_report_to_dict():
    config = Configuration.at_scale(Scale(6), [[0.5, 0.5], [0.2, 0.2]], [[0.5, 0.5, 0.0]])
    data = count(config, "brute").to_dict(include_vectors=True)
    assert data["total"] == 1
    assert data["method"] == "brute"
    assert data["per_ball"] == [1, 0]
    assert "per_tube" not in count(config).to_dict()


def test_unknown_method():
    config = Configuration.at_scale(Scale(4), [[0.5, 0.5]], [[0.5, 0.5, 0.0]])
    with pytest.raises(BusinessException) as exc:
        count(config, "quadtree")
    assert exc.value.code == "INVALID_INPUT"


def test_brute_pair_guard(rng):
    config = _random_config(rng, 6, 4, 4)
    with pytest.raises(BusinessException) as exc:
        count_brute(config, pair_limit=10)
    assert exc.value.code == "SIZE_GUARD_EXCEEDED"


def test_ball_grid_returns_every_nearby_ball(rng):
    centers = rng.uniform(0, 1, size=(400, 2))
    grid = BallGrid(centers, 0.05)
    for _ in range(50):
        pt = rng.uniform(0, 1, size=(1, 2))
        reach = float(rng.uniform(0.01, 0.1))
        found = set(grid.balls_near(pt, reach).tolist())
        close = np.flatnonzero(np.max(np.abs(centers - pt), axis=1) <= reach)
        assert set(close.tolist()) <= found


def test_incident_balls_matches_vector(rng):
    config = _random_config(rng, 6, 300, 20)
    report = count_brute(config)
    for j in range(config.n_tubes):
        assert incident_balls(config, j).size == report.per_tube[j]


def test_angle_bands_partition_meeting_tubes(rng):
    delta = Scale(6).delta
    tubes = random_tubes(rng, 400)
    t = Tube(0.5, 0.5, 0.4, delta)
    bands = angle_bands(tubes, t, delta)
    seen = np.concatenate(list(bands.values()))
    assert seen.size == np.unique(seen).size
    expected = [i for i, row in enumerate(tubes) if Tube(*row, delta).polygon().intersects(t.polygon())]
    assert sorted(seen.tolist()) == expected
    for w, idx in bands.items():
        angles = angle_between(tubes[idx, 2], t.theta)
        if w == delta:
            assert np.all(angles < 2 * delta)
        else:
            assert np.all((angles >= w) & (angles < 2 * w))
    assert tubes_at_angle(tubes, t, 4 * delta, delta).tolist() == bands[4 * delta].tolist()


def test_tubes_at_angle_rejects_non_dyadic():
    delta = Scale(6).delta
    with pytest.raises(BusinessException):
        tubes_at_angle(np.zeros((1, 3)), Tube(0.5, 0.5, 0.0, delta), 3 * delta, delta)


def test_moments():
    report = IncidenceReport(3, np.array([3]), np.array([1, 2]), "brute")
    assert moment_J(report, 1.0, 1.0) == pytest.approx(5.0)
    assert moment_J(report, 2.0, 0.0) == pytest.approx(3.0)
    with pytest.raises(BusinessException) as exc:
        moment_J(report, 0.0, 1.0)
    assert exc.value.code == "INVALID_EXPONENT"


def test_moment_j_sums_incident_balls(rng):
    config = _random_config(rng, 6, 200, 10)
    report = count_brute(config)
    for j in range(config.n_tubes):
        balls = incident_balls(config, j)
        assert moment_j(config, report, j, 1.0, 1.0) == pytest.approx(float(report.per_ball[balls].sum()))


def test_thicken_scales_radius_and_is_monotone(rng):
    config = _random_config(rng, 7, 500, 200)
    assert thicken(config, 1) is config
    totals = []
    for S in (1, 2, 4, 8):
        thick = thicken(config, S)
        assert thick.ball_radius == pytest.approx(S * config.ball_radius)
        assert thick.tube_width == pytest.approx(S * config.tube_width)
        assert thick.thickening == S
        totals.append(count_grid(thick).total)
    assert totals == sorted(totals)
    assert thicken(thicken(config, 2), 2).thickening == 4


@pytest.mark.parametrize("S", [0, 1.5, True, 200])
def test_thicken_rejects_bad_factor(rng, S):
    config = _random_config(rng, 6, 5, 5)
    with pytest.raises(BusinessException) as exc:
        thicken(config, S)
    assert exc.value.code == "INVALID_INPUT"


def test_ball_coloring_is_proper(rng):
    delta = Scale(5).delta
    centers = rng.uniform(0, 1, size=(300, 2))
    partition = color_partition_balls(centers, delta)
    assert partition.edges.shape[0] > 0
    for i, j in partition.edges:
        assert partition.colors[i] != partition.colors[j]
    assert partition.n_classes <= partition.max_degree
    assert sum(c.size for c in partition.classes()) == 300


def test_tube_coloring_is_proper(rng):
    delta = Scale(5).delta
    tubes = random_tubes(rng, 200)
    partition = color_partition_tubes(tubes, delta)
    for i, j in overlapping_tube_pairs(tubes, delta):
        assert partition.colors[i] != partition.colors[j]
    assert partition.n_classes <= partition.max_degree


def test_empty_partitions():
    assert color_partition_balls(np.zeros((0, 2)), 0.1).n_classes == 0
    assert color_partition_tubes(np.zeros((0, 3)), 0.1).n_classes == 0


def _shallow_config(rng, k: int, n_tubes: int, per_tube: int) -> Configuration:
    """Tubes with |slope| < 1 and balls placed on their midlines."""
    thetas = rng.uniform(-math.pi / 4 + 0.01, math.pi / 4 - 0.01, n_tubes)
    tubes = np.stack([rng.uniform(0.3, 0.7, n_tubes), rng.uniform(0.3, 0.7, n_tubes), thetas], axis=1)
    along = rng.uniform(-0.3, 0.3, size=(n_tubes, per_tube))
    balls = np.stack([
        (tubes[:, 0:1] + along * np.cos(thetas)[:, None]).ravel(),
        (tubes[:, 1:2] + along * np.sin(thetas)[:, None]).ravel(),
    ], axis=1)
    return Configuration.at_scale(Scale(k), balls, tubes)


def _midlines(config: Configuration) -> np.ndarray:
    slopes = np.tan(config.tube_params[:, 2])
    return np.stack([slopes, config.tube_params[:, 1] - slopes * config.tube_params[:, 0]], axis=1)


def test_dualize_is_an_involution(rng):
    config = _shallow_config(rng, 6, 20, 5)
    dual = dualize(config)
    assert dual.n_balls == config.n_tubes
    assert dual.n_tubes == config.n_balls
    assert dual.ball_radius == config.tube_width
    back = dualize(dual)
    np.testing.assert_allclose(back.ball_centers, config.ball_centers, atol=1e-12)
    np.testing.assert_allclose(_midlines(back), _midlines(config), atol=1e-12)


def test_dual_incidences_within_thickening(rng):
    config = _shallow_config(rng, 7, 30, 8)
    original = count_brute(config).total
    assert original >= 30 * 8
    dual = count_brute(thicken(dualize(config), 4)).total
    assert dual >= original


def test_dualize_rejects_steep_tubes():
    config = Configuration.at_scale(Scale(5), [[0.5, 0.5]], [[0.5, 0.5, math.pi / 2]])
    with pytest.raises(BusinessException) as exc:
        dualize(config)
    assert exc.value.code == "SLOPE_OUT_OF_RANGE"


def test_duality_groups_cover_every_tube(rng):
    config = _random_config(rng, 6, 300, 200)
    groups = duality_groups(config)
    assert sum(part.n_tubes for _, part in groups) == config.n_tubes
    total = 0
    for rotation, part in groups:
        assert part.n_balls == config.n_balls
        assert np.all(np.abs(np.tan(part.tube_params[:, 2])) <= math.tan(math.pi / 16) + 1e-9)
        dualize(part)
        total += count_brute(part).total
    assert total == count_brute(config).total


@pytest.mark.parametrize("seed", range(50))
def test_moment_J_satisfies_holder(seed):
    rng = np.random.RandomState(seed)
    config = _random_config(rng, 5, int(rng.randint(50, 400)), int(rng.randint(20, 200)))
    report = count_grid(config)
    assert report.total > 0
    alpha, b = float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.0, 1.0))
    J = moment_J(report, alpha, b)
    # J^α ≥ I^{b+α} / |P|^b, compared in logs
    lhs = alpha * math.log(J)
    rhs = (b + alpha) * math.log(report.total) - b * math.log(config.n_balls)
    assert lhs >= rhs - 1e-9


@pytest.mark.parametrize("S", [2, 4, 8])
def test_thickened_balls_keep_spacing(rng, S):
    k, beta = 7, float(rng.uniform(0.2, 2.0))
    config = _random_config(rng, k, 600, 1)
    K_beta = ball_profile_dyadic(config.ball_centers, config.scale, beta).K
    thick = thicken(config, S)
    coarse = Scale(k - int(math.log2(S)))
    assert thick.ball_radius == pytest.approx(coarse.delta)
    assert ball_profile_dyadic(thick.ball_centers, coarse, beta).K <= 64 * S ** beta * K_beta


def test_dualize_sign_convention():
    scale = Scale(6)
    config = Configuration.at_scale(scale, [[0.3, 0.2]], [[0.5, 0.6, math.atan(0.5)]])
    dual = dualize(config)
    assert dual.meta["duality"] == "ball (a, b) <-> midline y = a x - b"
    # tube y = 0.5 x + 0.35 becomes the ball (0.5, -0.35)
    np.testing.assert_allclose(dual.ball_centers, [[0.5, -0.35]], atol=1e-12)
    # ball (0.3, 0.2) becomes the tube y = 0.3 x - 0.2
    np.testing.assert_allclose(dual.tube_params, [[0.0, -0.2, math.atan(0.3)]], atol=1e-12)


def test_dual_pairs_stay_incident_at_four_times_the_width(rng):
    scale = Scale(8)
    delta = scale.delta
    n_tubes = 80
    thetas = rng.uniform(-math.pi / 4 + 0.01, math.pi / 4 - 0.01, n_tubes)
    tubes = np.stack([rng.uniform(0.3, 0.7, n_tubes), rng.uniform(0.3, 0.7, n_tubes), thetas], axis=1)
    along = rng.uniform(-0.3, 0.3, n_tubes)
    across = rng.uniform(-1.4, 1.4, n_tubes) * delta
    balls = np.stack([
        tubes[:, 0] + along * np.cos(thetas) - across * np.sin(thetas),
        tubes[:, 1] + along * np.sin(thetas) + across * np.cos(thetas),
    ], axis=1)
    config = Configuration.at_scale(scale, balls, tubes)
    mask = incidence_mask(balls, config.ball_radius, tubes, config.tube_width, config.tube_length)
    pairs = np.argwhere(mask)
    assert len(pairs) >= 50
    pairs = pairs[rng.choice(len(pairs), size=50, replace=False)]

    dual = dualize(config)
    for i, j in pairs:
        # ball i ↦ tube i, tube j ↦ ball j
        assert incidence_mask(
            dual.ball_centers[j], dual.ball_radius, dual.tube_params[i], 4 * dual.tube_width, dual.tube_length
        )[0, 0]
