"""Runtime settings, read from the environment."""

import os
from functools import lru_cache

from pydantic import BaseModel, Field, ValidationError

from .errors import ConfigError

DEFAULT_ORDER_CAP = 12
DEFAULT_AROMATIC_CAP = 8

ENV_ORDER_CAP = "BSERIES_ORDER_CAP"
ENV_AROMATIC_CAP = "BSERIES_AROMATIC_CAP"


class Settings(BaseModel):
    """Caps and tolerances shared by the library and the CLI."""

    order_cap: int = Field(default=DEFAULT_ORDER_CAP, ge=1, le=20, description="Largest tree order")
    aromatic_cap: int = Field(default=DEFAULT_AROMATIC_CAP, ge=1, le=10, description="Largest aromatic size")
    analytic_tol: float = Field(default=1e-8, gt=0)
    finite_difference_tol: float = Field(default=1e-4, gt=0)
    floating_condition_tol: float = Field(default=1e-12, gt=0)
    solver_tol: float = Field(default=1e-12, gt=0)
    solver_max_iter: int = Field(default=200, ge=1)


_explicit: dict[str, object] = {}


def set_overrides(**values: object) -> None:
    """Explicit values that win over the environment; None entries are ignored.

    Replaces any earlier overrides.
    """
    _explicit.clear()
    _explicit.update({k: v for k, v in values.items() if v is not None})
    get_settings.cache_clear()


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings with environment and explicit overrides applied.

    Cached; call ``get_settings.cache_clear()`` after changing the environment.
    """
    overrides: dict[str, object] = {}
    if os.getenv(ENV_ORDER_CAP):
        overrides["order_cap"] = os.environ[ENV_ORDER_CAP]
    if os.getenv(ENV_AROMATIC_CAP):
        overrides["aromatic_cap"] = os.environ[ENV_AROMATIC_CAP]
    overrides.update(_explicit)
    try:
        return Settings(**overrides)
    except ValidationError as e:
        raise ConfigError(f"invalid environment setting: {e}") from e
