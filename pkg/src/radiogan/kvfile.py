"""Tiny ``key=value`` text-file reader/writer.

This one format backs the recording sidecars, run metadata, config files,
manifests, and validation reports: UTF-8 text, one ``key=value`` pair per
line, ``#`` comment lines and blank lines ignored, values kept verbatim.
"""

from __future__ import annotations

from pathlib import Path


def format_kv(mapping: dict) -> str:
    return "".join(f"{key}={value}\n" for key, value in mapping.items())


def parse_kv(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def write_kv(path: str | Path, mapping: dict) -> None:
    Path(path).write_text(format_kv(mapping), encoding="utf-8")


def read_kv(path: str | Path) -> dict[str, str]:
    return parse_kv(Path(path).read_text(encoding="utf-8"))
