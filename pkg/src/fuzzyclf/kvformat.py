"""Human-readable key-value text files for models and metric reports.

One ``key = value`` pair per line, ``#`` starts a comment line. Every file
opens with ``format = fuzzyclf-kv`` and ``schema_version = 1``. Arrays are
written as whitespace-separated ``repr`` floats (lossless) with a companion
``<key>.shape`` entry.
"""
from __future__ import annotations

from typing import Any, Mapping

import numpy as np

FORMAT = "fuzzyclf-kv"
SCHEMA_VERSION = 1


class KVFormatError(ValueError):
    pass


def _encode(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        if "\n" in value:
            raise KVFormatError("values may not contain newlines")
        return value
    raise TypeError(f"cannot encode {type(value).__name__}")


def dumps_kv(entries: Mapping[str, Any], header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {line}" for line in header.splitlines())
    lines.append(f"format = {FORMAT}")
    lines.append(f"schema_version = {SCHEMA_VERSION}")
    for key, value in entries.items():
        if "=" in key or not key.strip():
            raise KVFormatError(f"invalid key {key!r}")
        if isinstance(value, (np.ndarray, list, tuple)):
            arr = np.asarray(value)
            lines.append(f"{key}.shape = {' '.join(str(d) for d in arr.shape)}")
            flat = arr.ravel()
            if arr.dtype.kind in "iub":
                body = " ".join(str(int(v)) for v in flat)
            else:
                body = " ".join(repr(float(v)) for v in flat)
            lines.append(f"{key} = {body}")
        else:
            lines.append(f"{key} = {_encode(value)}")
    return "\n".join(lines) + "\n"


def write_kv(path, entries: Mapping[str, Any], header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_kv(entries, header))


def loads_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise KVFormatError(f"line {line_no}: expected 'key = value'")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    if out.get("format") != FORMAT:
        raise KVFormatError(f"not a {FORMAT} file")
    version = out.get("schema_version")
    if version != str(SCHEMA_VERSION):
        raise KVFormatError(f"unsupported schema_version {version!r}")
    return out


def read_kv(path) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        return loads_kv(fh.read())


def get_array(entries: Mapping[str, str], key: str, dtype=float) -> np.ndarray:
    try:
        raw = entries[key]
        shape = tuple(int(d) for d in entries[f"{key}.shape"].split())
    except KeyError as exc:
        raise KVFormatError(f"missing entry {exc.args[0]!r}") from None
    values = np.array([dtype(v) for v in raw.split()], dtype=dtype)
    if values.size != int(np.prod(shape)):
        raise KVFormatError(f"{key}: {values.size} values do not fit shape {shape}")
    return values.reshape(shape)


def get(entries: Mapping[str, str], key: str, cast=str):
    try:
        raw = entries[key]
    except KeyError:
        raise KVFormatError(f"missing entry {key!r}") from None
    if cast is bool:
        return raw == "true"
    return cast(raw)
