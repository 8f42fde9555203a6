"""Run configuration: built-in defaults, a TOML file, ``GBLAB_SEED`` and command-line flags.

Precedence, lowest first: the defaults below, the file given with ``--config``, the
``GBLAB_SEED`` environment variable, explicit flags. A file holds top-level ``key = value``
pairs and one optional table per suite::

    seed = 7
    jobs = 4

    [hazzidakis]
    resolution = 257
    tolerance = 1e-5
"""

import dataclasses
import logging
import os
import tomllib
from collections.abc import Mapping
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from typing import Any
from typing import Final

from gblab.errors import ConfigError

logger = logging.getLogger(__name__)

SEED_VARIABLE: Final[str] = "GBLAB_SEED"
FORMATS: Final[tuple[str, ...]] = ("json", "csv", "text")
SUITES: Final[tuple[str, ...]] = ("pfaffian", "forms", "frames", "thom", "complex", "flatform", "hazzidakis")


def _check_positive(settings: Any) -> None:
    for item in dataclasses.fields(settings):
        value = getattr(settings, item.name)
        values = value if isinstance(value, tuple) else (value,)
        for entry in values:
            if isinstance(entry, bool) or not isinstance(entry, (int, float)):
                continue
            if entry <= 0:
                raise ConfigError(f"{type(settings).__name__}.{item.name} must be positive, got {value}")


@dataclass(frozen=True)
class PfaffianSettings:
    samples: int = 100
    max_dim: int = 10
    tolerance: float = 1e-9
    conjugation_tolerance: float = 1e-8
    definition_tolerance: float = 1e-10

    def __post_init__(self) -> None:
        _check_positive(self)


@dataclass(frozen=True)
class FormsSettings:
    resolution: int = 201
    sphere_tolerance: float = 1e-3
    derivative_resolution: int = 65
    derivative_tolerance: float = 1e-8
    stokes_tolerance: float = 1e-10

    def __post_init__(self) -> None:
        _check_positive(self)


@dataclass(frozen=True)
class FramesSettings:
    resolution: int = 201
    gauss_bonnet_tolerance: float = 1e-3
    flat_tolerance: float = 1e-10
    curvature_tolerance: float = 1e-3
    hypersurface_resolution: int = 101
    principal_resolution: int = 129

    def __post_init__(self) -> None:
        _check_positive(self)


@dataclass(frozen=True)
class ThomSettings:
    normalization_resolutions: tuple[int, ...] = (121, 121, 61, 25)
    normalization_tolerance: float = 1e-8
    resolution: int = 201
    index_scale: float = 40.0
    index_tolerance: float = 1e-5
    disk_resolution: int = 64
    disk_tolerance: float = 1e-6
    ball_resolution: int = 201
    ball_tolerance: float = 1e-4
    transgression_resolution: int = 33
    transgression_tolerance: float = 1e-3
    rays_resolution: int = 25
    rays_tolerance: float = 1e-8

    def __post_init__(self) -> None:
        _check_positive(self)


@dataclass(frozen=True)
class ComplexSettings:
    adjoint_max_n: int = 5
    cycle_max_n: int = 6
    character_max_n: int = 8
    homology_max_n: int = 6

    def __post_init__(self) -> None:
        _check_positive(self)


@dataclass(frozen=True)
class FlatformSettings:
    instances: int = 100
    max_n: int = 8
    recovery_tolerance: float = 1e-8
    residual_tolerance: float = 1e-7
    flatness_tolerance: float = 1e-8

    def __post_init__(self) -> None:
        _check_positive(self)


@dataclass(frozen=True)
class HazzidakisSettings:
    resolution: int = 513
    tolerance: float = 1e-6
    mus: tuple[float, ...] = (0.5, 1.0, 2.0)
    convergence_resolutions: tuple[int, ...] = (65, 129, 257, 513)
    convergence_constant: float = 10.0
    samples: int = 1_000_000
    tiling_tolerance: float = 4e-3
    symmetric_tolerance: float = 2e-3
    residual_tolerance: float = 1e-3
    rectangles: int = 20

    def __post_init__(self) -> None:
        _check_positive(self)


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on; echoed in every report."""

    seed: int = 0xC0FFEE
    format: str = "json"
    jobs: int = 1
    timestamp: bool = True
    pfaffian: PfaffianSettings = field(default_factory=PfaffianSettings)
    forms: FormsSettings = field(default_factory=FormsSettings)
    frames: FramesSettings = field(default_factory=FramesSettings)
    thom: ThomSettings = field(default_factory=ThomSettings)
    complex: ComplexSettings = field(default_factory=ComplexSettings)
    flatform: FlatformSettings = field(default_factory=FlatformSettings)
    hazzidakis: HazzidakisSettings = field(default_factory=HazzidakisSettings)

    def __post_init__(self) -> None:
        if self.format not in FORMATS:
            raise ConfigError(f"Output format must be one of {FORMATS}, got {self.format!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {self.jobs}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")

    def suite(self, name: str) -> Any:
        if name not in SUITES:
            raise ConfigError(f"Unknown suite {name!r}; choose from {SUITES}")
        return getattr(self, name)

    def with_resolution(self, suite: str, resolution: int) -> "RunConfig":
        """Override the main grid resolution of a suite; suites without one are unchanged."""
        settings = self.suite(suite)
        if not hasattr(settings, "resolution"):
            logger.warning("suite %s has no grid resolution, --resolution ignored", suite)
            return self
        return dataclasses.replace(self, **{suite: dataclasses.replace(settings, resolution=resolution)})

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def _coerce(owner: str, key: str, value: Any, default: Any) -> Any:
    expected = type(default)
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"{owner}.{key} must be a list, got {value!r}")
        return tuple(_coerce(owner, key, entry, default[0]) for entry in value) if default else tuple(value)
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, bool) != isinstance(default, bool) or not isinstance(value, expected):
        raise ConfigError(f"{owner}.{key} must be of type {expected.__name__}, got {value!r}")
    return value


def _apply(owner: str, settings: Any, table: Mapping[str, Any]) -> Any:
    known = {item.name: getattr(settings, item.name) for item in dataclasses.fields(settings)}
    changes = {}
    for key, value in table.items():
        if key not in known:
            raise ConfigError(f"Unknown configuration key {owner}.{key}")
        if key in SUITES:
            if not isinstance(value, dict):
                raise ConfigError(f"[{key}] must be a table")
            changes[key] = _apply(key, known[key], value)
        else:
            changes[key] = _coerce(owner, key, value, known[key])
    return dataclasses.replace(settings, **changes)


def parse_seed(text: str) -> int:
    """Decimal or ``0x`` prefixed seed."""
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(f"Seed must be an integer, got {text!r}") from None


def load_config(
    path: Path | None = None,
    environ: Mapping[str, str] | None = None,
    **overrides: Any,
) -> RunConfig:
    """Resolve a :class:`RunConfig`.

    Args:
        path: Optional TOML file.
        environ: Environment to read ``GBLAB_SEED`` from, ``os.environ`` by default.
        overrides: Top-level fields set on the command line; ``None`` values are skipped.

    Raises:
        ConfigError: the file is unreadable, malformed, has unknown keys or bad values.
    """
    config = RunConfig()
    if path is not None:
        try:
            with path.open("rb") as handle:
                table = tomllib.load(handle)
        except OSError as err:
            raise ConfigError(f"Cannot read configuration {path}: {err}") from err
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(f"Malformed configuration {path}: {err}") from err
        config = _apply("config", config, table)
        logger.info("loaded configuration from %s", path)
    environ = os.environ if environ is None else environ
    if SEED_VARIABLE in environ:
        config = dataclasses.replace(config, seed=parse_seed(environ[SEED_VARIABLE]))
        logger.debug("seed %d taken from %s", config.seed, SEED_VARIABLE)
    changes = {key: value for key, value in overrides.items() if value is not None}
    if changes:
        known = {item.name for item in dataclasses.fields(RunConfig)}
        unknown = sorted(set(changes) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration overrides {unknown}")
        config = dataclasses.replace(config, **changes)
    return config
