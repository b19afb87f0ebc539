"""
Utility functions shared across padicla: exact rational formatting,
byte-stable report writers and the key-value config reader.
"""

import csv
import io
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from padicla.padic import ExtVal

logger = logging.getLogger(__name__)

SCHEMA_TAG = "padicla/1"


def fmt_rational(value: Any) -> Optional[str]:
    """
    Render an exact rational as "num/den" (or "num" for integers).

    Args:
        value: int, Fraction, ExtVal or None

    Returns:
        str or None: ExtVal renders through str() so saturation stays visible
    """
    if value is None:
        return None
    if isinstance(value, ExtVal):
        return str(value)
    return str(Fraction(value))


def parse_rational(text: str) -> Fraction:
    """Parse "num/den", "num" or a parenthesized form of either."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not an exact rational: {text!r}") from e


def to_jsonable(value: Any) -> Any:
    """Recursively turn Fractions and valuations into strings."""
    if isinstance(value, (Fraction, ExtVal)):
        return fmt_rational(value)
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def dumps_json(payload: Any) -> str:
    """Byte-stable JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n"


def dumps_csv(rows: Sequence[Mapping[str, Any]], columns: Optional[List[str]] = None) -> str:
    """Flat CSV with "\\n" line endings and a fixed column order."""
    if columns is None:
        columns = sorted({key for row in rows for key in row})
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in columns})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (Fraction, ExtVal)):
        return fmt_rational(value)
    return value


def write_text(path: str, content: str) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="") as handle:
        handle.write(content)
    logger.info(f"Wrote {target}")
    return target


def write_json(path: str, payload: Any) -> Path:
    return write_text(path, dumps_json(payload))


def read_config_file(path: str) -> Dict[str, str]:
    """
    Read a key-value config file.

    Lines are ``key = value``; ``#`` starts a comment; blank lines are
    ignored. Keys are normalized to snake_case so ``lambda-grid`` and
    ``lambda_grid`` are the same key.

    Args:
        path: location of the file

    Returns:
        dict: raw string values, validated later by RunConfig
    """
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            values[key.strip().replace("-", "_")] = value.strip()
    return values
