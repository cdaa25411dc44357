"""Number formatting and CSV/JSON-shaped text helpers."""

from __future__ import annotations

import json
import math
from typing import Iterable, Mapping, Sequence


def fmt(value) -> str:
    """Render ints verbatim and reals in scientific notation, 17 significant digits."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.16e}"


def header_lines(command: str, config: Mapping[str, object]) -> list[str]:
    lines = [f"# wtl {command}"]
    for key in sorted(config):
        lines.append(f"# {key} = {config[key]}")
    return lines


def csv_text(columns: Sequence[str], rows: Iterable[Sequence], header: Sequence[str] = ()) -> str:
    out = list(header)
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(fmt(v) for v in row))
    return "\n".join(out) + "\n"


def _jsonable(obj):
    if isinstance(obj, float) or isinstance(obj, int) and not isinstance(obj, bool):
        return _Raw(fmt(obj))
    if isinstance(obj, Mapping):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


class _Raw(str):
    pass


def json_text(document: Mapping, header: Sequence[str] = ()) -> str:
    """JSON with numbers written through :func:`fmt` so reals keep 17 digits."""
    placeholder = {}

    def encode(o):
        if isinstance(o, _Raw):
            key = f"@@{len(placeholder)}@@"
            placeholder[key] = str(o)
            return key
        if isinstance(o, dict):
            return {k: encode(v) for k, v in o.items()}
        if isinstance(o, list):
            return [encode(v) for v in o]
        return o

    body = json.dumps(encode(_jsonable(document)), indent=2)
    for key, raw in placeholder.items():
        literal = raw if raw not in ("nan", "inf", "-inf") else {"nan": "NaN", "inf": "Infinity", "-inf": "-Infinity"}[raw]
        body = body.replace(f'"{key}"', literal)
    return "\n".join([*header, body]) + "\n"


def strip_header(text: str) -> str:
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))


def read_json_document(text: str) -> dict:
    return json.loads(strip_header(text))


def parse_header(text: str) -> dict[str, str]:
    """Recover the resolved ``key = value`` config from an output file header."""
    config = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if "=" in body:
            key, _, value = body.partition("=")
            config[key.strip()] = value.strip()
    return config
