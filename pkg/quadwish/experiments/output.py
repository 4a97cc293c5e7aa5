# quadwish/experiments/output.py

"""
Flat-file output for experiment results.

CSV files start with a block of ``# key=value`` metadata lines followed by
the header row. Floats are written with ``repr`` so identical runs produce
byte-identical files. Files are written atomically (temp file +
``os.replace``); without a path the text goes to stdout.
"""

from __future__ import annotations

import csv
import io
import os
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence

from quadwish.log import get_logger

logger = get_logger()


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(
    metadata: Mapping[str, Any],
    fieldnames: Sequence[str],
    rows: Iterable[Mapping[str, Any]],
) -> str:
    """Metadata comment block, header, then one line per row."""
    buf = io.StringIO(newline="")
    for key, value in metadata.items():
        buf.write(f"# {key}={_cell(value)}\n")
    writer = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row[k]) for k in fieldnames})
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    """Write file atomically to prevent partial files."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_name(path.name + ".tmp")
    with open(tmp_path, "w", encoding="utf-8", newline="") as tmp:
        tmp.write(text)
    os.replace(tmp_path, path)


def emit(text: str, path: Optional[Path]) -> None:
    """Write ``text`` to ``path`` or, when no path is given, to stdout."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    write_atomic(path, text)
    logger.info("Wrote %s (%d bytes)", path, len(text.encode("utf-8")))


def read_csv(path: Path) -> Dict[str, Any]:
    """
    Parse a file written by `render_csv`.

    Returns ``{"metadata": {...}, "rows": [dict, ...]}`` with all values as
    strings.
    """
    metadata: Dict[str, str] = {}
    body = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for line in f:
            if line.startswith("# ") and not body:
                key, _, value = line[2:].rstrip("\n").partition("=")
                metadata[key] = value
            else:
                body.append(line)
    return {"metadata": metadata, "rows": list(csv.DictReader(body))}
