"""Sweep configuration for cholreg.

A config file is flat ``key = value`` text; ``#`` starts a comment and
list values are comma-separated::

    p = 200
    n = 120
    cond = 4, 16, 64, 256, 1024
    eta = 0.25, 0.4
    estimators = Oracle, RCF, LWLS
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from ..core.estimators import EstimatorKind
from .logger import ConfigError, ValidationError, get_logger
from .validation import validate_sweep_config

logger = get_logger(__name__)


@dataclass(frozen=True)
class SweepConfig:
    """Validated parameters of one experiment sweep."""

    p: int
    n_values: Tuple[int, ...]
    cond_values: Tuple[float, ...]
    eta_values: Tuple[float, ...]
    estimators: Tuple[EstimatorKind, ...]
    trials: int
    seed: int
    out: Path
    workers: int = 1
    deterministic: bool = False

    @property
    def grid_size(self) -> int:
        return (len(self.n_values) * len(self.cond_values)
                * len(self.eta_values) * len(self.estimators))


def _int_list(text: str) -> List[int]:
    return [int(item) for item in _split(text)]


def _float_list(text: str) -> List[float]:
    return [float(item) for item in _split(text)]


def _kind_list(text: str) -> List[EstimatorKind]:
    return [EstimatorKind.parse(item) for item in _split(text)]


def _boolean(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _split(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


_PARSERS: Dict[str, Callable[[str], Any]] = {
    "p": int,
    "n": _int_list,
    "cond": _float_list,
    "eta": _float_list,
    "estimators": _kind_list,
    "trials": int,
    "seed": int,
    "out": Path,
    "workers": int,
    "deterministic": _boolean,
}

PRESETS: Dict[str, Dict[str, str]] = {
    # Loss versus condition number at n = 120
    "cond-sweep": {"n": "120", "cond": "4, 16, 64, 256, 1024", "eta": "0.25, 0.4"},
    # Loss versus sample count at cond = 256
    "n-sweep": {"n": "40, 60, 80, 100, 120, 140, 160, 180", "cond": "256",
                "eta": "0.25, 0.4"},
    # Loss versus spectrum shape at n = 120, cond = 256
    "eta-sweep": {"n": "120", "cond": "256", "eta": "0.1, 0.2, 0.3, 0.4, 0.5, 0.6"},
}


class Config:
    """Resolves sweep settings from defaults, a preset, a file and overrides.

    Later sources win: defaults, then ``preset``, then ``config_file``, then
    ``apply_overrides``/``set_config``.
    """

    def __init__(self, config_file: Optional[Path] = None,
                 preset: Optional[str] = None):
        self.config_file = config_file
        self.config = self._create_default_config()
        if preset:
            self.apply_preset(preset)
        if config_file:
            self._load_config()

    def _create_default_config(self) -> Dict[str, Any]:
        """Create default configuration (the loss-versus-condition grid)."""
        return {
            "p": 200,
            "n": [120],
            "cond": [4.0, 16.0, 64.0, 256.0, 1024.0],
            "eta": [0.25, 0.4],
            "estimators": [EstimatorKind.ORACLE, EstimatorKind.RCF,
                           EstimatorKind.LWLS],
            "trials": 200,
            "seed": 1,
            "out": Path("risk.csv"),
            "workers": 1,
            "deterministic": False,
        }

    def _load_config(self) -> None:
        """Load configuration from file."""
        try:
            text = self.config_file.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read config file {self.config_file}: {e}")

        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(
                    f"{self.config_file}:{lineno}: expected 'key = value', got {raw!r}"
                )
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                self.set_config(key, value)
            except ConfigError as e:
                raise ConfigError(f"{self.config_file}:{lineno}: {e}")
        logger.debug(f"Loaded configuration from {self.config_file}")

    def apply_preset(self, name: str) -> None:
        if name not in PRESETS:
            raise ConfigError(
                f"Unknown preset '{name}' (choose from {', '.join(sorted(PRESETS))})"
            )
        for key, value in PRESETS[name].items():
            self.set_config(key, value)

    def apply_overrides(self, overrides: Mapping[str, Optional[str]]) -> None:
        """Apply command-line values; ``None`` entries are skipped."""
        for key, value in overrides.items():
            if value is not None:
                self.set_config(key, value)

    def get_config(self, key: str, default: Any = None) -> Any:
        """Get configuration value."""
        return self.config.get(key, default)

    def set_config(self, key: str, value: Any) -> None:
        """Set configuration value; strings are parsed by key."""
        if key not in _PARSERS:
            raise ConfigError(f"Unknown configuration key '{key}'")
        if isinstance(value, str):
            try:
                value = _PARSERS[key](value)
            except (ValueError, ValidationError) as e:
                raise ConfigError(f"Invalid value for '{key}': {e}")
        self.config[key] = value

    def to_sweep_config(self) -> SweepConfig:
        """Build and validate the sweep configuration."""
        c = self.config
        sweep = SweepConfig(
            p=c["p"],
            n_values=tuple(c["n"]),
            cond_values=tuple(float(v) for v in c["cond"]),
            eta_values=tuple(float(v) for v in c["eta"]),
            estimators=tuple(c["estimators"]),
            trials=c["trials"],
            seed=c["seed"],
            out=Path(c["out"]),
            workers=c["workers"],
            deterministic=bool(c["deterministic"]),
        )
        try:
            validate_sweep_config(sweep)
        except ValidationError as e:
            raise ConfigError(str(e))
        return sweep
