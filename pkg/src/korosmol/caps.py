"""Resource caps and shared exception types.

Dense arrays (frequency boxes, sampling grids, node sets) are bounded by a
global value cap so that a mistyped level cannot exhaust desk-scale memory.
The default cap is 2**26 values; the environment variable ``KOROSMOL_CAP_MB``
overrides it, interpreted as megabytes of complex128 storage.
"""

import os

DEFAULT_CAP_VALUES = 2**26
_BYTES_PER_VALUE = 16  # complex128


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds the configured value cap."""


class UnsupportedSmoothnessError(ValueError):
    """The smoothness parameter is outside the admissible range for this path."""


def max_values(override: int | None = None) -> int:
    """Current value cap: explicit override, else KOROSMOL_CAP_MB, else default."""
    if override is not None:
        return int(override)
    env = os.environ.get("KOROSMOL_CAP_MB")
    if env is not None:
        return max(1, int(env) * 2**20 // _BYTES_PER_VALUE)
    return DEFAULT_CAP_VALUES


def check_values(n: int, context: str, override: int | None = None) -> None:
    cap = max_values(override)
    if n > cap:
        raise ResourceLimitError(
            f"{context} needs {n} values, exceeding the cap of {cap} "
            f"(override with KOROSMOL_CAP_MB)"
        )
