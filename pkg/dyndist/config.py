"""Engine configuration: defaults, scenario files and command-line flags, later sources overriding earlier ones."""

from os import path
from typing import Any, Dict, Final, List, Optional, Sequence, Tuple

from flatdict import FlatDict
from yaml import YAMLError, full_load

from .complexity import default_parameters
from .errors import ConfigError
from .ff_poly import DEFAULT_PRIME, MAX_PRIME_BITS, is_prime
from .polymatrix import STRASSEN_THRESHOLD
from .types import Mode


SCENARIO_KEYS: Final[Tuple[str, ...]] = ("batches", "runs_per_batch")

DEFAULTS: Final[Dict[str, Any]] = {
    "mode": Mode.apsp,
    "epsilon": 0.5,
    "s": None,
    "mu": None,
    "nu": None,
    "seed": 0,
    "prime": DEFAULT_PRIME,
    "oracle_check": False,
    "csv_out": None,
    "graph": None,
    "stream": None,
    "hitting_constant": 3.0,
    "closeness_constant": 4.0,
    "strassen_threshold": STRASSEN_THRESHOLD,
    "wrapped": True,
}

_FLOATS: Final = ("epsilon", "s", "mu", "nu", "hitting_constant", "closeness_constant")
_INTS: Final = ("seed", "prime", "strassen_threshold")
_BOOLS: Final = ("oracle_check", "wrapped")
_PATHS: Final = ("csv_out", "graph", "stream")


def _key(name: str) -> str:
    key = name.split(":")[-1].lstrip("-").replace("-", "_")
    if key not in DEFAULTS:
        raise ConfigError(f"Unknown setting '{name}'")
    return key


def _convert(key: str, value: Any) -> Any:
    if value is None:
        return None
    try:
        if key == "mode":
            return value if isinstance(value, Mode) else Mode(str(value))
        if key in _FLOATS:
            return float(value)
        if key in _INTS:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if key in _BOOLS:
            if isinstance(value, str):
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                return value.lower() in ("true", "1", "yes")
            return bool(value)
    except ValueError:
        raise ConfigError(f"Invalid value '{value}' for {key}")
    return str(value)


class EngineConfig:
    """Every setting of one replay."""

    mode: Mode
    epsilon: float
    s: Optional[float]
    mu: Optional[float]
    nu: Optional[float]
    seed: int
    prime: int
    oracle_check: bool
    csv_out: Optional[str]
    graph: Optional[str]
    stream: Optional[str]
    hitting_constant: float
    closeness_constant: float
    strassen_threshold: int
    wrapped: bool

    def __init__(self, **settings: Any):
        """Create a configuration from the defaults and ``settings``.

        Raises:
            ConfigError: On an unknown setting or an invalid value.
        """
        for key, value in DEFAULTS.items():
            setattr(self, key, value)
        self.update(settings)

    def update(self, settings: Dict[str, Any]):
        """Override settings; keys may be flattened scenario keys like ``oracle:epsilon`` or flag names.

        Raises:
            ConfigError: On an unknown setting or an invalid value.
        """
        for name, value in settings.items():
            key = _key(name)
            setattr(self, key, _convert(key, value))
        self.validate()

    def with_overrides(self, settings: Dict[str, Any]) -> "EngineConfig":
        """A copy with ``settings`` applied."""
        result = EngineConfig(**self.as_dict())
        result.update(settings)
        return result

    def as_dict(self) -> Dict[str, Any]:
        """All settings by name."""
        return {key: getattr(self, key) for key in DEFAULTS}

    def validate(self):
        """Check every value.

        Raises:
            ConfigError: If a value is out of range.
        """
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        for name in ("s", "mu", "nu"):
            value = getattr(self, name)
            if value is not None and not 0 <= value <= 1:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if self.prime.bit_length() > MAX_PRIME_BITS:
            raise ConfigError(f"prime must be below 2^{MAX_PRIME_BITS}, got {self.prime}")
        if not is_prime(self.prime):
            raise ConfigError(f"{self.prime} is not prime")
        if self.hitting_constant <= 0 or self.closeness_constant <= 0:
            raise ConfigError("Sampling constants must be positive")
        if self.strassen_threshold < 1:
            raise ConfigError(f"strassen_threshold must be at least 1, got {self.strassen_threshold}")

    def check_files(self):
        """Check that the input files are given and exist.

        Raises:
            ConfigError: If a file is missing.
        """
        if self.mode == Mode.complexity:
            return
        for name in ("graph", "stream"):
            file = getattr(self, name)
            if not file:
                raise ConfigError(f"No {name} file given")
            if not path.exists(file):
                raise ConfigError(f"{name.capitalize()} file {file} not found")

    def parameters(self) -> Tuple[float, float, Optional[float]]:
        """``s``, ``mu`` and ``nu``, balanced for the mode where not set."""
        balanced = default_parameters(self.mode)
        s = self.s if self.s is not None else balanced.get("s", 0.5)
        mu = self.mu if self.mu is not None else balanced.get("mu", 0.5)
        nu = self.nu if self.nu is not None else balanced.get("nu")
        return s, mu, nu

    @staticmethod
    def from_yaml(file: str) -> Tuple["EngineConfig", Dict[str, Any]]:
        """Load a scenario file.

        Settings may be nested; they are flattened with ``:`` and only the last part of each key is used. Relative
        file names are resolved against the scenario's directory. ``batches`` and ``runs_per_batch`` are returned
        separately for the runner.

        Raises:
            ConfigError: If the file cannot be read or holds invalid settings.
        """
        try:
            with open(file, "r", encoding="utf-8") as stream:
                definition = full_load(stream) or {}
        except (OSError, YAMLError) as e:
            raise ConfigError(f"Cannot read scenario {file}: {e}")
        if not isinstance(definition, dict):
            raise ConfigError(f"Scenario {file} is not a mapping")

        scenario = {key: definition.pop(key) for key in SCENARIO_KEYS if key in definition}
        settings = dict(FlatDict(definition, delimiter=":"))
        directory = path.dirname(path.abspath(file))
        for name, value in settings.items():
            if _key(name) in _PATHS and value and not path.isabs(str(value)):
                settings[name] = path.join(directory, str(value))
        return EngineConfig(**settings), scenario

    @staticmethod
    def from_argv(argv: Sequence[str]) -> Tuple["EngineConfig", Dict[str, Any]]:
        """Build the configuration from command-line arguments.

        ``--config=<file>`` loads a scenario first; every other ``--flag=value`` or ``--flag value`` overrides it.
        A boolean flag without a value is set. ``-v``, ``-d`` and their long forms are left to the caller.

        Raises:
            ConfigError: On an unknown flag or an invalid value.
        """
        flags: List[Tuple[str, Optional[str]]] = []
        arguments = list(argv)
        i = 0
        while i < len(arguments):
            argument = arguments[i]
            i += 1
            if argument in ("-v", "--verbose", "-d", "--debug") or not argument.startswith("--"):
                continue
            if "=" in argument:
                name, value = argument.split("=", 1)
            else:
                name, value = argument, None
                if name == "--config" or _key(name) not in _BOOLS:
                    if i >= len(arguments):
                        raise ConfigError(f"Flag {name} needs a value")
                    value = arguments[i]
                    i += 1
            flags.append((name, value))

        config, scenario = EngineConfig(), {}
        for name, value in flags:
            if name == "--config":
                config, scenario = EngineConfig.from_yaml(str(value))
        for name, value in flags:
            if name != "--config":
                key = _key(name)
                config.update({key: True if value is None and key in _BOOLS else value})
        return config, scenario
