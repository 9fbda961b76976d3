"""
Engine settings: defaults, environment overrides, and smell-detector parameters.
"""

import json
import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from core.errors import ConfigError

logger = logging.getLogger(__name__)

# Absence markers recognised at ingestion, in match order
DEFAULT_NULL_TOKENS: tuple[str, ...] = ("", "NULL", "null", "NaN", "N/A")

# Currency-scale tolerance for numeric equality in rules
DEFAULT_TOLERANCE = 0.005

ENV_PREFIX = "DATATRIAGE_"


@dataclass(frozen=True)
class SmellParams:
    """Thresholds for the data-smell detectors."""

    iqr_k: float = 1.5
    z_max: float = 3.0
    freq_threshold: float = 0.5
    min_n: int = 8
    type_majority: float = 0.9

    def __post_init__(self):
        """Clamp well-typed but out-of-range values."""
        object.__setattr__(self, "iqr_k", max(0.0, float(self.iqr_k)))
        object.__setattr__(self, "z_max", max(0.0, float(self.z_max)))
        object.__setattr__(self, "freq_threshold", min(1.0, max(0.0, float(self.freq_threshold))))
        object.__setattr__(self, "min_n", max(1, int(self.min_n)))
        object.__setattr__(self, "type_majority", min(1.0, max(0.5, float(self.type_majority))))

    def merged(self, overrides: Mapping[str, Any]) -> "SmellParams":
        """Return a copy with overrides applied.

        Raises:
            ConfigError: unknown key or a value that is not a number.
        """
        known = {f.name: f.type for f in fields(self)}
        changes: dict[str, Any] = {}
        for key, value in overrides.items():
            if key not in known:
                raise ConfigError(f"Unknown smell parameter '{key}'")
            if isinstance(value, bool) or not isinstance(value, int | float):
                raise ConfigError(f"Smell parameter '{key}' must be a number, got {value!r}")
            if key == "min_n" and value != int(value):
                raise ConfigError(f"Smell parameter 'min_n' must be an integer, got {value!r}")
            changes[key] = int(value) if key == "min_n" else float(value)
        return replace(self, **changes)


def parse_smell_params_arg(text: str) -> dict[str, Any]:
    """Read a --smell-params value: inline JSON object or a path to a JSON file."""
    stripped = text.strip()
    if not stripped.startswith("{"):
        path = Path(stripped)
        try:
            stripped = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read smell params file {path}: {e}") from e
    try:
        value = json.loads(stripped)
    except json.JSONDecodeError as e:
        raise ConfigError(f"--smell-params is not valid JSON: {e}") from e
    if not isinstance(value, dict):
        raise ConfigError("--smell-params must be a JSON object")
    return value


class SettingsManager:
    """Reads engine defaults, letting DATATRIAGE_* environment variables override them."""

    def __init__(self, environ: Mapping[str, str] | None = None):
        self.environ = os.environ if environ is None else environ

    def value(self, key: str, default: str | None = None) -> str | None:
        """Raw environment value for a settings key (without prefix)."""
        return self.environ.get(ENV_PREFIX + key.upper(), default)

    def get_null_tokens(self) -> tuple[str, ...]:
        """Get the null token list (comma-separated in DATATRIAGE_NULL_TOKENS)."""
        raw = self.value("null_tokens")
        if raw is None:
            return DEFAULT_NULL_TOKENS
        tokens = tuple(dict.fromkeys(raw.split(",")))
        return tokens or DEFAULT_NULL_TOKENS

    def get_tolerance(self) -> float:
        """Get the default numeric-equality tolerance."""
        try:
            raw = self.value("tolerance")
            if raw is None:
                return DEFAULT_TOLERANCE
            return max(0.0, float(raw))
        except ValueError:
            logger.warning("Ignoring non-numeric %sTOLERANCE", ENV_PREFIX)
            return DEFAULT_TOLERANCE

    def get_smell_params(self) -> SmellParams:
        """Get smell parameters with environment overrides applied."""
        params = SmellParams()
        overrides: dict[str, Any] = {}
        for f in fields(SmellParams):
            raw = self.value(f.name)
            if raw is None:
                continue
            try:
                overrides[f.name] = int(raw) if f.name == "min_n" else float(raw)
            except ValueError as e:
                raise ConfigError(f"{ENV_PREFIX}{f.name.upper()} must be a number") from e
        return params.merged(overrides)

    def get_max_workers(self) -> int:
        """Get the table-loading worker count."""
        try:
            raw = self.value("max_workers")
            if raw is None:
                return 4
            return max(1, min(32, int(raw)))
        except ValueError:
            return 4
