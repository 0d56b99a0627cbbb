"""Memory budget shared by the enumerators and the sampler.

The budget is expressed in bytes and converted to an entry cap using a
per-structure cost estimate.  Override with ``MONKEYZIPF_MEMORY_BUDGET``
(bytes; ``k``/``M``/``G`` suffixes accepted).
"""

from __future__ import annotations

import os

DEFAULT_BUDGET = 2 * 1024**3
ENV_VAR = "MONKEYZIPF_MEMORY_BUDGET"


class BudgetExceeded(MemoryError):
    pass


def _parse_bytes(text: str) -> int:
    text = text.strip()
    mult = {"k": 1024, "m": 1024**2, "g": 1024**3}.get(text[-1:].lower())
    if mult:
        return int(float(text[:-1]) * mult)
    return int(float(text))


def memory_budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if not raw:
        return DEFAULT_BUDGET
    try:
        value = _parse_bytes(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR}={raw!r} is not a byte count") from None
    if value <= 0:
        raise ValueError(f"{ENV_VAR} must be positive")
    return value


def check(entries: int, bytes_per_entry: int, what: str) -> None:
    cap = memory_budget() // bytes_per_entry
    if entries > cap:
        raise BudgetExceeded(
            f"{what} needs ~{entries:,} entries; budget allows {cap:,} "
            f"({memory_budget():,} bytes, set {ENV_VAR} to raise it)")
