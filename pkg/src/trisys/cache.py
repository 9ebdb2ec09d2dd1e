"""Persistent enumeration cache: one record file plus manifest per
(n, predicate).

The record file stores each class representative in the standard system text
format, preceded by an annotation line with the automorphism order and
predicate flags.  The manifest records the tool version, exact totals and a
SHA-256 checksum of the record file; reads refuse to proceed when the
checksum does not match.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

from .counting import EnumRecord
from .core import parse, serialize
from .report import TOOL_VERSION

_FLAG_NAMES = ("f5free", "k4mfree", "cancellative", "tripartite")


class CacheError(ValueError):
    pass


class CacheMissing(CacheError):
    pass


class CacheCorrupt(CacheError):
    pass


def _paths(cache_dir, n: int, predicate: str) -> tuple[Path, Path]:
    base = Path(cache_dir)
    stem = f"{predicate}_n{n}"
    return base / f"{stem}.records", base / f"{stem}.manifest.json"


def _record_block(rec: EnumRecord) -> str:
    flags = " ".join(f"{name}={int(getattr(rec, name))}" for name in _FLAG_NAMES)
    return f"record aut={rec.aut_order} {flags}\n" + serialize(rec.system)


def write_cache(cache_dir, n: int, predicate: str, records) -> dict:
    """Persist records plus manifest; returns the manifest."""
    records = list(records)
    rec_path, man_path = _paths(cache_dir, n, predicate)
    rec_path.parent.mkdir(parents=True, exist_ok=True)
    body = "\n".join(_record_block(r) for r in records)
    data = body.encode()
    fact = math.factorial(n)
    manifest = {
        "format": 1,
        "tool_version": TOOL_VERSION,
        "n": n,
        "predicate": predicate,
        "class_count": len(records),
        "labeled_total": str(sum(fact // r.aut_order for r in records)),
        "sha256": hashlib.sha256(data).hexdigest(),
    }
    rec_path.write_bytes(data)
    man_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest


def read_cache(cache_dir, n: int, predicate: str) -> tuple[list[EnumRecord], dict]:
    """Load records for (n, predicate), verifying the manifest checksum."""
    rec_path, man_path = _paths(cache_dir, n, predicate)
    if not rec_path.exists() or not man_path.exists():
        raise CacheMissing(
            f"no cache for ({n}, {predicate}) in {cache_dir}; "
            f"run: trisys enumerate --n {n} --predicate {predicate} --cache-dir {cache_dir}"
        )
    data = rec_path.read_bytes()
    manifest = json.loads(man_path.read_text())
    digest = hashlib.sha256(data).hexdigest()
    if digest != manifest.get("sha256"):
        raise CacheCorrupt(
            f"checksum mismatch for {rec_path}; the cache is corrupt - "
            f"delete it and re-run enumeration"
        )
    records = _parse_records(data.decode(), n)
    if len(records) != manifest.get("class_count"):
        raise CacheCorrupt(f"manifest class_count disagrees with {rec_path}")
    fact = math.factorial(n)
    total = sum(fact // r.aut_order for r in records)
    if str(total) != manifest.get("labeled_total"):
        raise CacheCorrupt(f"manifest labeled_total disagrees with {rec_path}")
    return records, manifest


def _parse_records(text: str, n: int) -> list[EnumRecord]:
    records = []
    blocks = [b for b in text.split("\n\n") if b.strip()]
    for block in blocks:
        lines = block.splitlines()
        head = lines[0].split()
        if not head or head[0] != "record":
            raise CacheError(f"malformed record header: {lines[0]!r}")
        fields = dict(item.split("=", 1) for item in head[1:])
        system = parse("\n".join(lines[1:]) + "\n")
        if system.n != n:
            raise CacheError(f"record has n={system.n}, expected {n}")
        slots = tuple(
            r for r in range(system.mask.bit_length()) if system.mask >> r & 1
        )
        records.append(
            EnumRecord(
                key=(n, slots),
                edge_count=system.edge_count,
                aut_order=int(fields["aut"]),
                f5free=fields["f5free"] == "1",
                k4mfree=fields["k4mfree"] == "1",
                cancellative=fields["cancellative"] == "1",
                tripartite=fields["tripartite"] == "1",
                system=system,
            )
        )
    return records
