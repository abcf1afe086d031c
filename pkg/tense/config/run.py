"""
Run configuration for the command line.

A run file is JSON deep-merged over ``DEFAULTS['run']``; see the package
defaults for the full schema.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from tense import DEFAULTS
from tense.config.service import deep_merge
from tense.covkernel import KernelSpec
from tense.embedding.surface import EmbeddingSurface
from tense.emulator.adjust import PriorSpec, TrainingSet
from tense.errors import ConfigError
from tense.models import geometry as geo
from tense.models.functions import TEST_FUNCTIONS
from tense.models.surfaces import surface_from_config
from tense.nscov import NsCovSpec
from tense.types import Box


MODES = ("tense", "stationary")

# surface used when only a test function is named
DEFAULT_SURFACES = {
    "toy1": "toy1",
    "toy2": "toy2",
    "curved": "curved",
    "smooth": "flat",
}


@dataclass
class RunConfig:
    raw: dict[str, Any]
    source: str | None = None
    surface: EmbeddingSurface = field(init=False)

    def __post_init__(self):
        self._validate()
        self.surface = self._resolve_surface()
        box = self.box
        if not (box[1] > box[0] and box[3] > box[2]):
            raise ConfigError(f"Grid box {box} is empty")

    @classmethod
    def from_dict(cls, overrides: dict[str, Any] | None = None, source: str | None = None) -> 'RunConfig':
        return cls(deep_merge(DEFAULTS['run'], overrides or {}), source)

    @classmethod
    def from_file(cls, path: str | Path) -> 'RunConfig':
        path = Path(path)
        try:
            overrides = json.loads(path.read_text())
        except FileNotFoundError as err:
            raise ConfigError(f"Config file not found: {path}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"Config file {path} is not valid JSON: {err}") from err
        if not isinstance(overrides, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")
        return cls.from_dict(overrides, str(path))

    def __getitem__(self, key: str) -> Any:
        return self.raw[key]

    def updated(self, overrides: dict[str, Any]) -> 'RunConfig':
        return RunConfig(deep_merge(self.raw, overrides), self.source)

    # region validation
    def _validate(self) -> None:
        raw = self.raw
        function = raw.get('function')
        if function is not None:
            if geo.canonical_name(function) not in TEST_FUNCTIONS:
                raise ConfigError(
                    f"Unknown function '{function}', expected one of {sorted(TEST_FUNCTIONS)}"
                )
        if raw.get('mode') not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {raw.get('mode')!r}")

        grid = raw['grid']
        for key in ('nx', 'ny'):
            if not isinstance(grid.get(key), int) or grid[key] < 2:
                raise ConfigError(f"grid.{key} must be an integer of at least 2, got {grid.get(key)!r}")
        for key in ('candidates', 'eval_grid'):
            sizes = raw['design'].get(key)
            if not (isinstance(sizes, list) and len(sizes) == 2 and all(isinstance(v, int) and v >= 2 for v in sizes)):
                raise ConfigError(f"design.{key} must be [nx, ny] with sizes of at least 2, got {sizes!r}")

        prior = raw['prior']
        for key in ('theta', 'alpha3'):
            if not (isinstance(prior.get(key), (int, float)) and prior[key] > 0):
                raise ConfigError(f"prior.{key} must be positive, got {prior.get(key)!r}")
        if prior.get('sigma') is not None and not prior['sigma'] > 0:
            raise ConfigError(f"prior.sigma must be positive, got {prior['sigma']!r}")

    def _resolve_surface(self) -> EmbeddingSurface:
        spec = self.raw.get('surface')
        if spec is None:
            function = self.function
            if function is None:
                raise ConfigError("Config needs a 'surface' or a 'function'")
            spec = DEFAULT_SURFACES[function]
        try:
            return surface_from_config(spec)
        except ValueError as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(f"Invalid surface: {err}") from err

    # region accessors
    @property
    def function(self) -> str | None:
        name = self.raw.get('function')
        return None if name is None else geo.canonical_name(name)

    @property
    def mode(self) -> str:
        return self.raw['mode']

    @property
    def box(self) -> Box:
        box = self.raw['grid'].get('box')
        if box is None:
            return self.surface.domain
        if len(box) != 4:
            raise ConfigError(f"grid.box must be [xmin, xmax, ymin, ymax], got {box!r}")
        return tuple(float(v) for v in box) # type: ignore

    @property
    def seed(self) -> int:
        return int(self.raw['seed'])

    @property
    def output_dir(self) -> Path:
        return Path(self.raw['output']['dir'])

    def kernel(self) -> KernelSpec | NsCovSpec:
        prior = self.raw['prior']
        if self.mode == "tense":
            return NsCovSpec(
                sigma=1.0,
                theta=float(prior['theta']),
                alpha3=float(prior['alpha3']),
                surface=self.surface,
            )
        return KernelSpec.isotropic(
            float(prior['theta']),
            family=prior.get('family'),
            nu=prior.get('nu'),
        )

    def prior(self, data: TrainingSet | None = None) -> PriorSpec:
        """
        Prior from the config; a null mean or sigma takes the sample mean
        or SD of the non-ghost runs, else 0 and 1.
        """
        cfg = self.raw['prior']
        values = np.empty(0) if data is None else data.values[~data.ghost_mask]
        mean = cfg.get('mean')
        if mean is None:
            mean = float(values.mean()) if len(values) else 0.0
        sigma = cfg.get('sigma')
        if sigma is None:
            sigma = float(values.std(ddof=1)) if len(values) > 1 else 0.0
            if not sigma > 0:
                sigma = 1.0
        return PriorSpec(
            mean=float(mean),
            sigma=float(sigma),
            kernel=self.kernel(),
            nugget=float(cfg['nugget']),
        )
