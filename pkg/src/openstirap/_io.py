"""CSV output shared by trajectories and sweeps."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path


def fmt(x) -> str:
    """Format a number with 12 significant digits."""
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def atomic_write_text(path, text: str) -> Path:
    """Write ``text`` to ``path`` via a temporary file; nothing is left on failure."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> Path:
    return atomic_write_text(path, csv_text(header, rows))
