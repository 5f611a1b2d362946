"""On-disk caches for coefficient tables and character tables.

Files are JSON: a metadata header plus the payload, with a sha256 checksum
of the payload stored in the header.  A file whose checksum does not match
is discarded and regenerated.  Writes go through a temp file and rename.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

SCHEMA = 1
DELTA_GENERATOR = "eta-cube^8/kronecker-v1"


def _digest(payload) -> str:
    blob = json.dumps(payload, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def cache_key(*parts) -> str:
    """Content key: hash of the identifying fields, so a change in any of
    them (generator version, modulus, ...) lands in a different file."""
    return hashlib.sha256("|".join(map(str, parts)).encode()).hexdigest()[:16]


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write(path: Path, header: dict, payload) -> None:
    header = dict(header, schema=SCHEMA, checksum=_digest(payload))
    atomic_write_text(path, json.dumps({"header": header, "values": payload}))


def _read(path: Path):
    """(header, payload) or None if unreadable or tampered."""
    try:
        doc = json.loads(path.read_text())
        header, payload = doc["header"], doc["values"]
    except (OSError, ValueError, KeyError, TypeError):
        log.warning("cache file %s unreadable; regenerating", path)
        return None
    if header.get("schema") != SCHEMA or header.get("checksum") != _digest(payload):
        log.warning("cache file %s failed checksum; regenerating", path)
        return None
    return header, payload


def delta_cache_path(cache_dir) -> Path:
    return Path(cache_dir) / f"delta-{cache_key('delta', DELTA_GENERATOR)}.json"


def cached_delta_coefficients(n_max: int, cache_dir) -> list[int]:
    """tau(1..n_max), reusing (and if needed extending) the cached table."""
    from .forms import extend_delta_coefficients, generate_delta_coefficients

    path = delta_cache_path(cache_dir)
    hit = _read(path) if path.exists() else None
    if hit is not None:
        header, payload = hit
        have = int(header["n_max"])
        if have >= n_max:
            log.info("coefficient cache hit: %s (n_max=%d)", path, have)
            return [int(v) for v in payload[:n_max]]
        log.info("extending coefficient cache %s from %d to %d", path, have, n_max)
        values = extend_delta_coefficients([int(v) for v in payload], n_max)
        status = "extended"
    else:
        values = generate_delta_coefficients(n_max)
        status = "generated"
    header = {"form": "delta", "generator": DELTA_GENERATOR, "n_max": n_max, "status": status}
    _write(path, header, [str(v) for v in values])
    return values


def cache_status(cache_dir) -> dict:
    """Header of the coefficient cache (or {} when absent/invalid)."""
    path = delta_cache_path(cache_dir)
    hit = _read(path) if path.exists() else None
    return hit[0] if hit else {}


def cached_character_table(q: int, cache_dir):
    from .characters import CharacterTable, build_table

    path = Path(cache_dir) / f"chars-{q}-{cache_key('chars', q)}.json"
    if path.exists():
        hit = _read(path)
        if hit is not None:
            header, payload = hit
            log.info("character-table cache hit: %s", path)
            dlog = np.asarray(payload, dtype=np.int64)
            dlog.setflags(write=False)
            roots = np.exp(2j * np.pi * np.arange(q - 1) / (q - 1))
            roots.setflags(write=False)
            return CharacterTable(modulus=q, generator=int(header["generator"]), dlog=dlog, roots=roots)
    table = build_table(q)
    _write(path, {"modulus": q, "generator": table.generator}, [int(v) for v in table.dlog])
    return table
