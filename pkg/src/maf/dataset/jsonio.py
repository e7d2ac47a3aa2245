"""Canonical JSON serialization and schema helpers."""

from __future__ import annotations

import json
import os
from typing import Any

from maf.errors import ArtifactMissing, SchemaError

SCHEMA_VERSION = 1


def dumps(obj: Any) -> str:
    """Stable text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def dump(path, obj: Any) -> None:
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
    os.replace(tmp, path)


def load(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ArtifactMissing("file not found", path) from None
    except IsADirectoryError:
        raise ArtifactMissing("expected a file, found a directory", path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", path) from None


def field(doc: Any, key: str, kind, path, nullable: bool = False) -> Any:
    """Fetch ``doc[key]`` and check its type, raising :class:`SchemaError` otherwise."""
    if not isinstance(doc, dict):
        raise SchemaError(f"expected an object holding {key!r}", path)
    if key not in doc:
        raise SchemaError(f"missing key {key!r}", path)
    value = doc[key]
    if value is None and nullable:
        return None
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise SchemaError(f"{key!r} should be {getattr(kind, '__name__', kind)}, got {value!r:.40}", path)
    return value


def check_version(doc: Any, path) -> None:
    version = field(doc, "schema_version", int, path)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version}", path)
