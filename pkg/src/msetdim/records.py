"""Deterministic CSV/JSON emission with embedded run configuration.

Every CSV starts with a `# {json}` comment carrying the exact configuration
and master seed; readers shipped here round-trip that header.  Floats print
with 12 significant digits and all output uses \\n newlines, so identical
configurations produce byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def config_json(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def write_csv(
    path: str,
    header: Sequence[str],
    rows: Iterable[Sequence],
    config: dict | None = None,
    extra_comments: Sequence[str] = (),
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if config is not None:
            fh.write(f"# {config_json(config)}\n")
        for comment in extra_comments:
            fh.write(f"# {comment}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def read_csv(path: str) -> tuple[dict | None, list[str], list[list[str]]]:
    """Inverse of write_csv: (embedded config or None, header, rows)."""
    config = None
    header: list[str] = []
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if config is None and body.startswith("{"):
                    config = json.loads(body)
                continue
            if not header:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    return config, header, rows


def write_json(path: str, payload: dict, config: dict | None = None) -> None:
    doc = dict(payload)
    if config is not None:
        doc = {"config": config, **payload}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2))
        fh.write("\n")


def write_json_lines(path: str, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
