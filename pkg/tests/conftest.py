import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from gblab.config import ComplexSettings
from gblab.config import FlatformSettings
from gblab.config import HazzidakisSettings
from gblab.config import PfaffianSettings
from gblab.config import RunConfig
from gblab.fixtures import round_sphere
from gblab.forms import ChartGrid
from gblab.frames import FrameConnection


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def plane_grid() -> ChartGrid:
    return ChartGrid.uniform(2, 0.0, 1.0, 33)


@pytest.fixture(scope="session")
def sphere() -> FrameConnection:
    # the round unit sphere on a chart that includes both poles
    return round_sphere(101)


@pytest.fixture(scope="session")
def quick_config() -> RunConfig:
    """A configuration small enough to run the cheaper suites in a unit test."""
    return RunConfig(
        seed=7,
        timestamp=False,
        pfaffian=PfaffianSettings(samples=5, max_dim=6),
        complex=ComplexSettings(adjoint_max_n=3, cycle_max_n=3, character_max_n=3, homology_max_n=3),
        flatform=FlatformSettings(instances=2, max_n=3),
        hazzidakis=HazzidakisSettings(
            resolution=257,
            mus=(1.0,),
            convergence_resolutions=(65, 129, 257),
            samples=100_000,
            tiling_tolerance=2e-2,
            symmetric_tolerance=2e-2,
            rectangles=3,
        ),
    )


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Any], Path]:
    """Write a payload as JSON under ``tmp_path`` and return the path."""

    def write(name: str, payload: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return write
