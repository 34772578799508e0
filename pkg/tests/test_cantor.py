import numpy as np
import pytest

from inclab.core.error_codes import BusinessException
from inclab.engine.cantor import (
    LOWER_CONSTANT,
    UPPER_CONSTANT,
    build_Pw,
    cantor_generate,
    frostman_report,
    survivors_at,
    tube_hits_Pw,
)
from inclab.engine.experiments import fit_slope
from inclab.engine.geometry import Scale, Tube


def test_full_interval_survives():
    c = cantor_generate(6, 1.0)
    assert c.points == list(range(65))
    assert c.n_intervals == 64


def test_zero_dimension_keeps_endpoints():
    c = cantor_generate(7, 0.0)
    assert c.points == [0, 128]


def test_survivor_counts():
    assert survivors_at(0, 0.5) == 1
    assert survivors_at(4, 0.5) == 4
    assert survivors_at(3, 1.0) == 8
    assert survivors_at(5, 0.5) == 6


def test_points_contain_both_endpoints():
    for s in (0.2, 0.5, 0.9):
        c = cantor_generate(9, s)
        assert c.points[0] == 0
        assert c.points[-1] == 512
        assert c.points == sorted(set(c.points))


def test_known_small_set():
    # heaviest nodes split first, leftmost on ties
    assert cantor_generate(10, 0.3).points == [0, 8, 64, 68, 512, 514, 528, 529, 1024]


@pytest.mark.parametrize("s", [0.3, 0.5, 0.8])
def test_frostman_invariants_exhaustive(s):
    c = cantor_generate(10, s)
    report = frostman_report(c)
    assert report.ok
    assert report.max_upper_ratio <= UPPER_CONSTANT
    assert report.min_lower_ratio >= LOWER_CONSTANT
    assert 0.5 * 1024 ** s <= len(c) <= 4 * 1024 ** s
    assert len(report.levels) == 11


def test_half_dimension_size_range():
    c = cantor_generate(8, 0.5)
    assert 8 <= len(c) <= 64
    assert frostman_report(c).ok


@pytest.mark.parametrize("s", [0.3, 0.5, 0.8])
def test_box_counting_slope(s):
    ks = list(range(5, 12))
    fit = fit_slope(ks, [cantor_generate(k, s).n_intervals for k in ks])
    assert fit.slope == pytest.approx(s, abs=0.1)


def test_generation_is_deterministic():
    assert cantor_generate(9, 0.65).points == cantor_generate(9, 0.65).points


def test_exponent_outside_unit_interval():
    with pytest.raises(BusinessException) as exc:
        cantor_generate(5, 1.5)
    assert exc.value.code == "INVALID_EXPONENT"


def test_product_set_full_grid():
    scale = Scale(5)
    Pw = build_Pw(5, 1.0, 1.0)
    assert len(Pw) == (scale.D - 1) ** 2


def test_product_set_endpoint_cross():
    Pw = build_Pw(5, 1.0, 0.0)
    m = np.rint(Pw.centers / Pw.scale.delta).astype(int)
    assert len(Pw) == 2 * 31 - 1
    assert np.all((m[:, 0] == 1) | (m[:, 1] == 1))


def test_product_set_size_bound():
    scale = Scale(8)
    w = 0.25
    Pw = build_Pw(8, w, 0.5)
    assert len(Pw) <= 4 * (w / scale.delta) ** 1.5
    # a marked column is full, every other column holds only the marked rows
    m = np.rint(Pw.centers / scale.delta).astype(int)
    columns, per_column = np.unique(m[:, 0], return_counts=True)
    marks = columns[per_column == 63]
    assert 1 in marks
    assert len(Pw) == 63 ** 2 - (63 - len(marks)) ** 2


def test_product_set_translation():
    Pw = build_Pw(6, 0.25, 0.5, 0.5, 0.25)
    assert Pw.centers[:, 0].min() > 0.5
    assert Pw.centers[:, 1].min() > 0.25
    back = Pw.translated(0.0, 0.0)
    np.testing.assert_allclose(back.centers, build_Pw(6, 0.25, 0.5).centers)


@pytest.mark.parametrize("w", [0.0, 3 * 2.0 ** -6, 2.0])
def test_product_set_rejects_bad_side(w):
    with pytest.raises(BusinessException) as exc:
        build_Pw(6, w, 0.5)
    assert exc.value.code == "INVALID_SIDE"


def test_tube_hits_product_set():
    scale = Scale(6)
    delta = scale.delta
    Pw = build_Pw(6, 0.5, 1.0)
    assert tube_hits_Pw(Tube(0.9, 0.9, 0.0, delta), build_Pw(6, 0.25, 0.5)) == 0
    # horizontal tube on row 16 meets rows 15..17 of the full grid
    assert tube_hits_Pw(Tube(0.25, 0.25, 0.0, delta), Pw) == 3 * 31
    assert tube_hits_Pw(Tube(0.25, 0.25, 0.0, delta), Pw) >= 0.5 / delta

