import numpy as np
import pytest

from inclab.core.error_codes import BusinessException
from inclab.engine.constructions import construct
from inclab.engine.experiments import surface_grid, sweep
from inclab.engine.geometry import Scale
from inclab.engine.incidence import count_grid, thicken
from inclab.engine.serialization import (
    configuration_from_json,
    configuration_to_json,
    format_value,
    load_configuration,
    profile_csv,
    read_sweep_csv,
    save_configuration,
    surface_csv,
    sweep_csv,
    write_json,
    write_text,
)
from inclab.engine.spacing import ball_profile_dyadic


def test_format_value():
    assert format_value(3) == "3"
    assert format_value(3.0) == "3"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(True) == "1"
    assert format_value(float("nan")) == "nan"
    assert format_value("bundle") == "bundle"


def test_configuration_file_round_trip(tmp_path):
    config = construct(1, 6, 1.0, 1.0)
    path = save_configuration(config, tmp_path / "cfg.json")
    loaded = load_configuration(path)
    np.testing.assert_array_equal(loaded.ball_centers, config.ball_centers)
    np.testing.assert_array_equal(loaded.tube_params, config.tube_params)
    assert loaded.meta["construction"] == 1
    assert loaded.meta["alpha"] == 1.0
    assert count_grid(loaded).total == count_grid(config).total


def test_thickened_configuration_keeps_radius():
    config = thicken(construct(3, 6, 0.5, 1.8), 2)
    loaded = configuration_from_json(configuration_to_json(config))
    assert loaded.ball_radius == config.ball_radius
    assert loaded.tube_width == config.tube_width
    assert loaded.thickening == 2


def test_missing_file(tmp_path):
    with pytest.raises(BusinessException) as exc:
        load_configuration(tmp_path / "missing.json")
    assert exc.value.code == "RESOURCE_NOT_FOUND"


def test_malformed_file(tmp_path):
    path = write_text('{"k": 0, "balls": "nope"}', tmp_path / "bad.json")
    with pytest.raises(BusinessException) as exc:
        load_configuration(path)
    assert exc.value.code == "INVALID_INPUT"


def test_sweep_csv_is_reproducible():
    first = sweep_csv(sweep(3, 0.5, 1.8, 6, 9, profiles=False))
    second = sweep_csv(sweep(3, 0.5, 1.8, 6, 9, profiles=False, threads=1))
    assert first == second
    header, *rows = first.splitlines()
    assert header == "k,D,alpha,beta,n_balls,n_tubes,I,K_alpha_meas,K_beta_meas"
    assert len(rows) == 4
    assert rows[0].startswith("6,64,0.5,1.8,")


def test_sweep_csv_timings_and_ratios():
    result = sweep(3, 0.5, 1.8, 6, 9)
    header = sweep_csv(result, timings=True).splitlines()[0].split(",")
    assert header[-2:] == ["ratio_balls_dominate", "seconds"]
    assert "seconds" not in sweep_csv(result)


def test_read_sweep_csv(tmp_path):
    result = sweep(3, 0.5, 1.8, 6, 9, profiles=False)
    path = write_text(sweep_csv(result), tmp_path / "sweep.csv")
    ks, values = read_sweep_csv(path)
    assert ks == [6, 7, 8, 9]
    assert values == [float(row.I) for row in result.rows]


def test_read_sweep_csv_needs_columns(tmp_path):
    path = write_text("alpha,beta\n1,1\n", tmp_path / "other.csv")
    with pytest.raises(BusinessException) as exc:
        read_sweep_csv(path)
    assert exc.value.code == "INVALID_INPUT"


def test_profile_and_surface_tables():
    scale = Scale(4)
    profile = ball_profile_dyadic(np.array([[0.5, 0.5]]), scale, 1.0)
    lines = profile_csv(profile).splitlines()
    assert lines[0] == "level_n,w,max_count,implied_K,witness"
    assert len(lines) == scale.k + 2
    assert lines[1] == "4,0.0625,0,0,"
    assert lines[-1] == '0,1,1,0.0625,"square(0,0,1)"'
    table = surface_csv(surface_grid(2)).splitlines()
    assert table[0] == "alpha,beta,f,region"
    assert table[1] == "0,0,0,trivial"
    assert table[-1] == "2,2,3,cone"


def test_profile_csv_reports_witness_squares():
    scale = Scale(5)
    d = scale.delta
    profile = ball_profile_dyadic(np.array([[0.5 + d, 0.5 + d], [0.5 + 3 * d, 0.5 + d]]), scale, 1.0)
    rows = profile_csv(profile).splitlines()[1:]
    assert rows[1].endswith(',"square(0.5,0.5,0.0625)"')
    assert rows[2] == '3,0.125,2,0.5,"square(0.5,0.5,0.125)"'


def test_write_json_is_sorted_and_newline_terminated(tmp_path):
    path = write_json({"b": 1, "a": [1.5]}, tmp_path / "out.json")
    assert path.read_text(encoding="utf-8") == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'
