import os
from typing import Any, Dict, Mapping, Optional

from pydantic import BaseModel, Field, ValidationError

from .core import UsageError

ENV_PREFIX = "JAMLAB_"
DEFAULT_SEED = 20080101


def _machine_threads() -> int:
    return os.cpu_count() or 1


class Settings(BaseModel):
    """
    Run-wide defaults. Every field can be overridden by an environment
    variable named JAMLAB_<FIELD>, e.g. JAMLAB_THREADS=4.
    """

    threads: int = Field(default_factory=_machine_threads, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    oracle_limit: int = Field(default=9, ge=1, le=10)
    exact_n_cap: int = Field(default=64, ge=1)
    t_horizon: float = Field(default=30.0, gt=0)
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        environ = os.environ if environ is None else environ
        values: Dict[str, Any] = {}
        for name in cls.model_fields:
            key = ENV_PREFIX + name.upper()
            if key in environ:
                values[name] = environ[key]

        try:
            return cls(**values)
        except ValidationError as e:
            problems = "; ".join(
                f"{ENV_PREFIX}{str(err['loc'][0]).upper()}: {err['msg']}" for err in e.errors()
            )
            raise UsageError(f"invalid environment: {problems}") from e
