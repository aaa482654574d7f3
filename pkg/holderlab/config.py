"""Load and validate experiment configuration files."""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Any, NamedTuple

import voluptuous as vol
import yaml

from .const import (
    CONF_EXPERIMENT_ID,
    CONF_EXPERIMENTS,
    CONF_SEED,
    CONF_TOLERANCES,
    DEFAULT_ADVERSARIAL_STEPS,
    DEFAULT_DIMS,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DOI_TOL,
    EXPERIMENT_PREFIX,
    GROWTH_TOL,
    MODE_INTERPOLATING,
    MODE_LITERAL,
    SETTING_SELFADJOINT,
    SETTING_UNITARY,
    SKIP_TOL,
)
from .exceptions import ConfigError, HolderLabError
from .experiments import EXPERIMENT_CLASSES
from .functions import CATALOG
from .models import ExperimentConfig, Tolerances
from .modulus import MODULI

_LOGGER = logging.getLogger(__name__)

DEFAULT_SUITE = Path(__file__).parent / "default_suite.yaml"

SEED_RANGE = vol.All(vol.Coerce(int), vol.Range(min=0, max=2**64 - 1))
POSITIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=1))
POSITIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
REAL = vol.Coerce(float)
COMPLEX = vol.Any(vol.All([REAL], vol.Length(min=2, max=2)), REAL)
RANK = vol.Any(vol.In(["half", "full"]), POSITIVE_INT)


def _experiment_id(value: Any) -> str:
    name = str(value).removeprefix(EXPERIMENT_PREFIX)
    if name not in EXPERIMENT_CLASSES:
        raise vol.Invalid(f"unknown experiment {value!r}")
    return name


TOLERANCES_SCHEMA = vol.Schema(
    {
        vol.Optional("slope_tol"): POSITIVE_FLOAT,
        vol.Optional("growth_tol", default=GROWTH_TOL): POSITIVE_FLOAT,
        vol.Optional("skip_tol", default=SKIP_TOL): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=1)
        ),
        vol.Optional("doi_tol", default=DOI_TOL): POSITIVE_FLOAT,
    }
)

EXPERIMENT_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_EXPERIMENT_ID): _experiment_id,
        vol.Optional("dims", default=list(DEFAULT_DIMS)): vol.All(
            [POSITIVE_INT], vol.Length(min=1)
        ),
        vol.Optional("trials_per_dim", default=DEFAULT_TRIALS): POSITIVE_INT,
        vol.Optional(CONF_SEED): SEED_RANGE,
        vol.Optional("function_id"): vol.In(sorted(CATALOG)),
        vol.Optional("alpha"): POSITIVE_FLOAT,
        vol.Optional("sigma"): POSITIVE_FLOAT,
        vol.Optional("levels"): vol.All(vol.Coerce(int), vol.Range(min=0, max=24)),
        vol.Optional("coefficients"): vol.Any({vol.Coerce(int): COMPLEX}, [COMPLEX]),
        vol.Optional("n"): POSITIVE_INT,
        vol.Optional("p"): vol.All(vol.Coerce(float), vol.Range(min=1)),
        vol.Optional("sigmas"): vol.All([POSITIVE_FLOAT], vol.Length(min=1)),
        vol.Optional("degrees"): vol.All([POSITIVE_INT], vol.Length(min=1)),
        vol.Optional("ranks"): vol.All([RANK], vol.Length(min=1)),
        vol.Optional("mode", default=MODE_INTERPOLATING): vol.In([MODE_LITERAL, MODE_INTERPOLATING]),
        vol.Optional("setting", default=SETTING_UNITARY): vol.In([SETTING_UNITARY, SETTING_SELFADJOINT]),
        vol.Optional("modulus_id"): vol.In(sorted(MODULI)),
        vol.Optional("beta"): POSITIVE_FLOAT,
        vol.Optional("weak_hypothesis", default=False): bool,
        vol.Optional("fejer_degree"): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Optional("spectrum_radius"): POSITIVE_FLOAT,
        vol.Optional("spectral_gap"): vol.All(vol.Coerce(float), vol.Range(min=0)),
        vol.Optional("interval"): vol.All([REAL], vol.Length(min=2, max=2)),
        vol.Optional("perturbation_scales"): vol.All([POSITIVE_FLOAT], vol.Length(min=1)),
        vol.Optional("adversarial_steps", default=DEFAULT_ADVERSARIAL_STEPS): vol.All(
            vol.Coerce(int), vol.Range(min=0)
        ),
        vol.Optional(CONF_TOLERANCES, default={}): TOLERANCES_SCHEMA,
    }
)

SUITE_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_SEED): SEED_RANGE,
        vol.Optional(CONF_EXPERIMENTS, default=[]): vol.Any(None, [dict]),
    }
)


def _complex(value: Any) -> complex:
    if isinstance(value, list):
        return complex(value[0], value[1])
    return complex(value)


def _coefficient_pairs(value: Any) -> tuple[tuple[int, complex], ...]:
    items = value.items() if isinstance(value, dict) else enumerate(value)
    return tuple(sorted((int(k), _complex(c)) for k, c in items))


def to_config(data: dict[str, Any], seed: int) -> ExperimentConfig:
    """Turn one validated mapping into an ExperimentConfig."""
    tolerances = Tolerances(**data[CONF_TOLERANCES])
    optional_tuples = ("sigmas", "degrees", "ranks", "interval", "perturbation_scales")
    values = {key: value for key, value in data.items() if key != CONF_TOLERANCES}
    for key in optional_tuples:
        if key in values:
            values[key] = tuple(values[key])
    if "coefficients" in values:
        values["coefficients"] = _coefficient_pairs(values["coefficients"])
    values["dims"] = tuple(values["dims"])
    values[CONF_SEED] = values.get(CONF_SEED, seed)
    return ExperimentConfig(tolerances=tolerances, **values)


def _node_line(root: yaml.Node | None, path: list[Any]) -> int | None:
    """Return the 1-based line of the YAML node at ``path``, or of its closest parent."""
    node, line = root, None
    for part in path:
        if node is None:
            break
        line = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            match = next(
                ((key, value) for key, value in node.value if str(key.value) == str(part)),
                None,
            )
            if match is None:
                break
            key_node, node = match
            line = key_node.start_mark.line + 1
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            node = node.value[part]
            line = node.start_mark.line + 1
        else:
            break
    if line is None and root is not None:
        line = root.start_mark.line + 1
    return line


def _key(path: list[Any]) -> str:
    key = ""
    for part in path:
        key += f"[{part}]" if isinstance(part, int) else (f".{part}" if key else str(part))
    return key


def read_config(path: str | Path) -> tuple[str, str]:
    """Return the text of a configuration file and its sha256 digest."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError as err:
        raise ConfigError(f"Configuration file {path} does not exist") from err
    except OSError as err:
        raise ConfigError(f"Cannot read configuration file {path}: {err}") from err
    return raw.decode("utf-8"), hashlib.sha256(raw).hexdigest()


class Suite(NamedTuple):
    seed: int
    experiments: list[ExperimentConfig]


def load_suite(text: str, seed: int | None = None) -> Suite:
    """Parse and validate a configuration document.

    ``seed`` overrides every seed in the document.
    """
    if seed is not None:
        try:
            seed = SEED_RANGE(seed)
        except vol.Invalid as err:
            raise ConfigError(f"Seed override {seed} is out of range", key=CONF_SEED) from err
    try:
        document = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        raise ConfigError(
            f"Configuration is not valid YAML: {getattr(err, 'problem', err)}",
            line=mark.line + 1 if mark else None,
        ) from err
    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError("Configuration must be a mapping with an experiments list", line=1)

    try:
        suite = SUITE_SCHEMA(document)
    except vol.Invalid as err:
        raise ConfigError(err.msg, key=_key(err.path), line=_node_line(root, err.path)) from err

    default_seed = suite.get(CONF_SEED, DEFAULT_SEED)
    configs = []
    for index, entry in enumerate(suite[CONF_EXPERIMENTS] or []):
        path: list[Any] = [CONF_EXPERIMENTS, index]
        try:
            data = EXPERIMENT_SCHEMA(entry)
        except vol.MultipleInvalid as err:
            first = err.errors[0]
            full = path + list(first.path)
            raise ConfigError(first.msg, key=_key(full), line=_node_line(root, full)) from err
        except vol.Invalid as err:
            full = path + list(err.path)
            raise ConfigError(err.msg, key=_key(full), line=_node_line(root, full)) from err
        if seed is not None:
            data[CONF_SEED] = seed
        config = to_config(data, default_seed)
        check_config(config, path, root)
        configs.append(config)
    _LOGGER.debug("Loaded %s experiment configurations", len(configs))
    return Suite(default_seed if seed is None else seed, configs)


def check_config(config: ExperimentConfig, path: list[Any], root: yaml.Node | None = None) -> None:
    """Instantiate the experiment once so that semantic errors surface at load time."""
    from .registry import build_experiment

    try:
        build_experiment(config)
    except HolderLabError as err:
        raise ConfigError(str(err), key=_key(path), line=_node_line(root, path)) from err


def parse_config(path: str | Path | None = None, seed: int | None = None) -> list[ExperimentConfig]:
    """Load the experiments of a configuration file, the packaged suite by default."""
    text, _ = read_config(path or DEFAULT_SUITE)
    return load_suite(text, seed).experiments
