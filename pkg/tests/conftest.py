import os

import numpy as np
import pytest


# Ensure settings are loaded with test-friendly defaults before importing inclab modules.
os.environ.setdefault("APP_ENV", "test")
os.environ.setdefault("DATABASE_URL", "sqlite+pysqlite:////tmp/inclab_test.db")


@pytest.fixture(autouse=True)
def _reset_db():
    # Import after env vars are set.
    from inclab.db.session import Base, engine

    # Ensure all models are registered in metadata.
    from inclab.models import sweep_run  # noqa: F401

    Base.metadata.drop_all(bind=engine)
    Base.metadata.create_all(bind=engine)
    yield


@pytest.fixture
def app():
    from inclab.main import app as fastapi_app

    return fastapi_app


@pytest.fixture
def rng():
    return np.random.RandomState(20240517)


def odd_lattice_centers(rng, k: int, n: int) -> np.ndarray:
    """n distinct ball centers on the lattice (δ(2ℤ+1))² at scale δ = 2^-k."""
    side = 2 ** (k - 1)
    cells = rng.choice(side * side, size=min(n, side * side), replace=False)
    ix, iy = np.divmod(cells, side)
    delta = 2.0 ** -k
    return np.stack([(2 * ix + 1) * delta, (2 * iy + 1) * delta], axis=1)


def random_tubes(rng, m: int) -> np.ndarray:
    """m tubes with centers in the unit square and directions in [0, π)."""
    return np.stack([rng.uniform(0, 1, m), rng.uniform(0, 1, m), rng.uniform(0, np.pi, m)], axis=1)
