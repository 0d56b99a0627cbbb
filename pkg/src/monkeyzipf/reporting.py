"""CSV conventions shared by every output file.

Each file opens with ``# meta:`` comment lines carrying enough provenance
(keyboard fingerprint, seed, PRNG id, versions) to re-run it.
"""

from __future__ import annotations

import csv
import platform
from typing import Iterable, Mapping

import numpy as np

from . import __version__
from .rng import prng_id


def versions() -> str:
    return f"monkeyzipf-{__version__};numpy-{np.__version__};python-{platform.python_version()}"


def meta_lines(**fields) -> list[str]:
    fields.setdefault("prng", prng_id())
    fields.setdefault("versions", versions())
    return [f"# meta: {k}={v}" for k, v in fields.items() if v is not None]


def read_meta(path) -> dict[str, str]:
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("# meta:"):
                break
            key, _, value = line[len("# meta:"):].strip().partition("=")
            meta[key] = value
    return meta


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable], meta: Iterable[str] = ()) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in meta:
            fh.write(line + "\n")
        w = csv.writer(fh)
        w.writerow(list(header))
        w.writerows(rows)


def read_csv(path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def format_block(values: Mapping[str, object]) -> str:
    """Key/value summary block, one ``key: value`` per line."""
    return "\n".join(f"{k}: {v}" for k, v in values.items())
