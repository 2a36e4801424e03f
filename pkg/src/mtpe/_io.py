"""Small file helpers shared by the writer modules."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path


def atomic_write_text(path: Path | str, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file + rename in the same directory.

    A crashed run leaves either the old file or the new one, never a
    truncated mix of both.
    """
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def write_jsonl(path: Path | str, lines: list[str]) -> None:
    """Write pre-serialized JSON lines atomically, one record per line."""
    atomic_write_text(path, "".join(line + "\n" for line in lines))
