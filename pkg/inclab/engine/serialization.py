"""JSON configuration files and fixed-precision CSV tables."""
import csv
import io
import json
import logging
from pathlib import Path
from typing import Iterable, Sequence, Union

from pydantic import ValidationError

from inclab.core.error_codes import BusinessException, ErrorCode
from inclab.engine.geometry import Configuration
from inclab.engine.spacing import SpacingProfile
from inclab.schemas.configuration import ConfigurationPayload


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SWEEP_COLUMNS = ["k", "D", "alpha", "beta", "n_balls", "n_tubes", "I", "K_alpha_meas", "K_beta_meas"]
PROFILE_COLUMNS = ["level_n", "w", "max_count", "implied_K", "witness"]
SURFACE_COLUMNS = ["alpha", "beta", "f", "region"]
FURSTENBERG_COLUMNS = ["k", "n_tubes", "n_balls", "sum_pt", "max_pt_K", "general_ratio"]
SUMPRODUCT_COLUMNS = ["k", "n_A", "n_B", "n_C", "n_X", "n_Y", "lhs", "rhs"]


def format_value(value) -> str:
    """Integers verbatim, floats at 17 significant digits."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def configuration_to_json(config: Configuration) -> str:
    return ConfigurationPayload.from_configuration(config).model_dump_json(indent=2)


def configuration_from_json(text: str) -> Configuration:
    try:
        payload = ConfigurationPayload.model_validate_json(text)
    except ValidationError as exc:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"malformed configuration: {exc.error_count()} errors")
    return payload.to_configuration()


def save_configuration(config: Configuration, path: PathLike) -> Path:
    path = Path(path)
    try:
        path.write_text(configuration_to_json(config), encoding="utf-8")
    except OSError as exc:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"cannot write {path}: {exc.strerror}")
    logger.info("saved configuration |P|=%d |T|=%d to %s", config.n_balls, config.n_tubes, path)
    return path


def load_configuration(path: PathLike) -> Configuration:
    path = Path(path)
    if not path.is_file():
        raise BusinessException(ErrorCode.RESOURCE_NOT_FOUND, f"no configuration file at {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"cannot read {path}: {exc.strerror}")
    return configuration_from_json(text)


def write_json(data: dict, path: PathLike) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"cannot write {path}: {exc.strerror}")
    return path


def _csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def sweep_csv(result, timings: bool = False) -> str:
    """
    One row per k. Wall-clock seconds vary between runs, so the column is
    only written with timings=True; default output is reproducible byte for byte.
    """
    bound_names = sorted(result.rows[0].bound_ratios) if result.rows else []
    columns = SWEEP_COLUMNS + [f"ratio_{name}" for name in bound_names] + (["seconds"] if timings else [])
    rows = []
    for r in result.rows:
        row = [r.k, r.D, r.alpha, r.beta, r.n_balls, r.n_tubes, r.I, r.K_alpha_meas, r.K_beta_meas]
        row += [r.bound_ratios[name] for name in bound_names]
        if timings:
            row.append(r.seconds)
        rows.append(row)
    return _csv_text(columns, rows)


def profile_csv(profile: SpacingProfile) -> str:
    rows = ([lv.level_n, lv.w, lv.max_count, lv.implied_K, lv.witness] for lv in profile.levels)
    return _csv_text(PROFILE_COLUMNS, rows)


def surface_csv(points: list[dict]) -> str:
    return _csv_text(SURFACE_COLUMNS, ([p[c] for c in SURFACE_COLUMNS] for p in points))


def furstenberg_csv(report) -> str:
    return _csv_text(FURSTENBERG_COLUMNS, ([getattr(r, c) for c in FURSTENBERG_COLUMNS] for r in report.rows))


def sumproduct_csv(result) -> str:
    return _csv_text(SUMPRODUCT_COLUMNS, ([getattr(r, c) for c in SUMPRODUCT_COLUMNS] for r in result.rows))


def write_text(text: str, path: PathLike) -> Path:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise BusinessException(ErrorCode.INVALID_INPUT, f"cannot write {path}: {exc.strerror}")
    return path


def read_sweep_csv(path: PathLike) -> tuple[list[int], list[float]]:
    """(k, I) columns of a sweep table, for refitting."""
    path = Path(path)
    if not path.is_file():
        raise BusinessException(ErrorCode.RESOURCE_NOT_FOUND, f"no sweep table at {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "k" not in reader.fieldnames or "I" not in reader.fieldnames:
            raise BusinessException(ErrorCode.INVALID_INPUT, f"{path} lacks k and I columns")
        pairs = [(int(row["k"]), float(row["I"])) for row in reader]
    pairs.sort()
    return [k for k, _ in pairs], [value for _, value in pairs]
