from __future__ import annotations

import os
from threading import Lock
from typing import (
    Any,
    Literal,
    Optional,
)

from dotenv import load_dotenv
from loguru import logger
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
)

from fusionblocks.exceptions import ConfigError

ENV_PREFIX = 'FUSION_BLOCKS_'

# environment suffix -> settings field
_ENV_FIELDS = {
    'Q_ORDER': 'q_order',
    'Z_WINDOW': 'z_window',
    'DEGREE_BOUND': 'degree_bound',
    'TOLERANCE': 'tolerance',
    'FORMAT': 'output_format',
    'THREADS': 'threads',
}


class Settings(BaseModel):
    """
    Runtime configuration shared by the library and the command line.

    Attributes:
        q_order (int): Default q-truncation order of series and trace computations.
        z_window (int): Default half-width of z-windows for Laurent expansions.
        degree_bound (int): Largest state degree swept by identity checks.
        tolerance (float): Integrality tolerance of the numeric Verlinde oracle.
        output_format (str): ``text`` or ``json``.
        threads (int): Upper bound on worker threads.
    """

    model_config = ConfigDict(frozen=True, extra='forbid')

    q_order: int = Field(default=8, gt=0)
    z_window: int = Field(default=6, gt=0)
    degree_bound: int = Field(default=6, gt=0)
    tolerance: float = 1e-6
    output_format: Literal['text', 'json'] = 'text'
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, gt=0)

    @field_validator('tolerance')
    @classmethod
    def _tolerance_range(cls, value: float) -> float:
        if not 0.0 < value <= 1e-3:
            raise ValueError(f'tolerance must lie in (0, 1e-3], got {value}')
        return value

    @classmethod
    def from_env(cls, env_file: Optional[str] = None, **overrides: Any) -> 'Settings':
        """
        Build settings from a ``.env`` file, the process environment and explicit overrides.

        Explicit overrides win over the environment, which wins over the ``.env`` file.

        Args:
            env_file (Optional[str]): Path of a dotenv file. Default searches the working directory.
            **overrides (Any): Field values taking precedence; ``None`` values are ignored.

        Returns:
            Settings: The validated settings.
        """
        load_dotenv(env_file, override=False)
        values: dict[str, Any] = {}
        for suffix, field in _ENV_FIELDS.items():
            raw = os.environ.get(ENV_PREFIX + suffix)
            if raw is not None and raw != '':
                values[field] = raw
        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            settings = cls(**values)
        except ValidationError as e:
            raise ConfigError(f'Invalid settings: {e}') from e
        logger.debug('Resolved settings {}', settings.model_dump())
        return settings


_settings: Optional[Settings] = None
_lock: Lock = Lock()


def get_settings() -> Settings:
    """Return the process-wide settings, resolving them from the environment on first use."""
    global _settings
    if _settings is None:
        with _lock:
            if _settings is None:
                _settings = Settings.from_env()
    return _settings


def set_settings(settings: Optional[Settings]) -> None:
    """Replace (or with ``None`` reset) the process-wide settings."""
    global _settings
    with _lock:
        _settings = settings
