"""
Package configuration.

Layers, later ones winning:

1. ``config.defaults.json`` shipped with the package
2. ``~/.tense.json``
3. ``.tense.json`` in the working directory or up to five parents
4. environment variables (see ``ENV_OVERRIDES``)
5. ``update_runtime`` calls

Every load and runtime update is validated; a bad value raises
``ConfigError`` naming the key and the layer it came from.
"""
import json
import logging
import os
from pathlib import Path
from typing import Any, Callable, Mapping

from tense.errors import ConfigError


logger = logging.getLogger(__name__)

CONFIG_FILENAME = ".tense.json"
MAX_NUGGET_FRACTION = 1e-2

# variable -> (key path, parser)
ENV_OVERRIDES: dict[str, tuple[tuple[str, ...], Callable[[str], Any]]] = {
    "TENSE_NUM_THREADS": (("threads",), int),
}


class ConfigService:
    def __init__(self, environ: dict[str, str] | None = None):
        self._config: dict[str, Any] | None = None
        self._sources: list[str] = []
        self._environ = environ

    def __repr__(self) -> str:
        return f"ConfigService(loaded={self._config is not None}, sources={len(self._sources)})"

    def __getitem__(self, key):
        return self.config[key]

    def get(self, key, default=None):
        return self.config.get(key, default)

    @property
    def config(self) -> dict[str, Any]:
        self._ensure_loaded()
        return self._config # type: ignore

    @property
    def sources(self) -> list[str]:
        self._ensure_loaded()
        return self._sources.copy()

    def reload(self) -> None:
        self._config = None
        self._sources = []

    def update_runtime(self, updates: dict[str, Any]) -> None:
        """Merge ``updates`` over the loaded config; nothing changes if they fail validation."""
        merged = deep_merge(self.config, updates)
        validate_config(merged, "runtime update")
        self._config = merged
        self._sources.append("runtime")

    def _load_config(self) -> None:
        sources = []
        defaults_path = Path(__file__).parent / "config.defaults.json"
        config = read_layer(defaults_path)
        sources.append(str(defaults_path))

        user_path = Path('~', CONFIG_FILENAME).expanduser()
        project_path = find_project_config()
        for path in (user_path, project_path):
            if path is None or not path.is_file():
                continue
            config = deep_merge(config, read_layer(path))
            validate_config(config, str(path))
            sources.append(str(path))

        env_config = env_overrides(os.environ if self._environ is None else self._environ)
        if env_config:
            config = deep_merge(config, env_config)
            validate_config(config, "environment")
            sources.append("environment")
        else:
            validate_config(config, str(defaults_path))

        logger.debug("Loaded config from %s", ", ".join(sources))
        self._config = config
        self._sources = sources

    def _ensure_loaded(self) -> None:
        if self._config is None:
            self._load_config()


def read_layer(path: Path) -> dict[str, Any]:
    try:
        layer = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"Config file {path} is not valid JSON: {err}") from err
    if not isinstance(layer, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return layer


def env_overrides(environ: Mapping[str, str]) -> dict[str, Any]:
    """Nested config fragment from the variables in ``ENV_OVERRIDES`` that are set."""
    fragment: dict[str, Any] = {}
    for name, (keys, parse) in ENV_OVERRIDES.items():
        raw = environ.get(name)
        if raw is None:
            continue
        try:
            value = parse(raw)
        except ValueError as err:
            raise ConfigError(f"{name} must parse as {parse.__name__}, got {raw!r}") from err
        node = fragment
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value
    return fragment


# region validation
def _positive(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and value > 0


def _check(ok: bool, key: str, value: Any, expected: str, source: str) -> None:
    if not ok:
        raise ConfigError(f"{key} must be {expected}, got {value!r} (from {source})")


def _check_bounds(bounds: Any, key: str, source: str) -> None:
    ok = (
        isinstance(bounds, list) and len(bounds) == 2
        and all(_positive(b) for b in bounds) and bounds[0] < bounds[1]
    )
    _check(ok, key, bounds, "[lo, hi] with 0 < lo < hi", source)


def validate_config(config: dict[str, Any], source: str = "config") -> None:
    """
    Check the numerical sections that library functions read their
    defaults from, and the ``run.prior`` block the command line builds
    priors from.
    """
    emulator = config['emulator']
    for key in ('escalation_start', 'max_nugget', 'chunk_size'):
        _check(_positive(emulator.get(key)), f"emulator.{key}", emulator.get(key), "positive", source)
    nugget = emulator.get('nugget')
    _check(
        isinstance(nugget, (int, float)) and 0 <= nugget <= MAX_NUGGET_FRACTION,
        "emulator.nugget", nugget, f"in [0, {MAX_NUGGET_FRACTION}]", source,
    )

    sampling = config['sampling']
    _check(_positive(sampling.get('jitter_start')), "sampling.jitter_start", sampling.get('jitter_start'), "positive", source)
    _check(
        _positive(sampling.get('jitter_max')) and sampling['jitter_max'] >= sampling['jitter_start'],
        "sampling.jitter_max", sampling.get('jitter_max'), "at least sampling.jitter_start", source,
    )
    _check(
        _positive(sampling.get('jitter_factor')) and sampling['jitter_factor'] > 1,
        "sampling.jitter_factor", sampling.get('jitter_factor'), "greater than 1", source,
    )

    nscov = config['nscov']
    for key in ('alpha3', 'psd_tolerance'):
        _check(_positive(nscov.get(key)), f"nscov.{key}", nscov.get(key), "positive", source)

    _check_bounds(config['mle'].get('bounds'), "mle.bounds", source)
    nn_k = config['design'].get('nn_k')
    _check(nn_k is None or (isinstance(nn_k, int) and nn_k >= 1), "design.nn_k", nn_k, "null or a positive integer", source)

    precision = config['output'].get('precision')
    _check(isinstance(precision, int) and 1 <= precision <= 17, "output.precision", precision, "an integer in [1, 17]", source)
    threads = config.get('threads')
    _check(isinstance(threads, int) and threads >= 1, "threads", threads, "a positive integer", source)

    run = config['run']
    prior = run['prior']
    for key in ('theta', 'alpha3'):
        _check(_positive(prior.get(key)), f"run.prior.{key}", prior.get(key), "positive", source)
    _check(prior.get('sigma') is None or _positive(prior['sigma']), "run.prior.sigma", prior.get('sigma'), "null or positive", source)
    _check(
        isinstance(prior.get('nugget'), (int, float)) and 0 <= prior['nugget'] <= MAX_NUGGET_FRACTION,
        "run.prior.nugget", prior.get('nugget'), f"in [0, {MAX_NUGGET_FRACTION}]", source,
    )
    _check(run.get('mode') in ("tense", "stationary"), "run.mode", run.get('mode'), "'tense' or 'stationary'", source)
    _check_bounds(run['mle'].get('bounds'), "run.mle.bounds", source)
# endregion


def deep_merge(base: dict[str, Any], update: dict[str, Any]) -> dict:
    """
    Merge ``update`` into a copy of ``base``; nested dicts merge key by
    key, anything else in ``update`` replaces the base value.
    """
    merged = base.copy()
    for key, update_val in update.items():
        if isinstance(update_val, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], update_val)
        else:
            merged[key] = update_val
    return merged


def find_project_config(max_levels: int = 5) -> Path | None:
    """Nearest ``.tense.json`` from the working directory upwards, stopping at home."""
    current_dir = Path.cwd()
    home_dir = Path.home()
    for _ in range(max_levels + 1):
        config_path = current_dir / CONFIG_FILENAME
        if config_path.is_file():
            return config_path
        if current_dir == current_dir.parent or current_dir == home_dir:
            break
        current_dir = current_dir.parent
    return None
