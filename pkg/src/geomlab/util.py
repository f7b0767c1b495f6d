"""Small shared utilities: deterministic parallel map, atomic writes, float formatting."""

from __future__ import annotations

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "GEOMLAB_THREADS"


def worker_count() -> int:
    """Worker cap from the GEOMLAB_THREADS environment variable (default 1)."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn, items, workers=None):
    """Map ``fn`` over ``items`` with results in input order.

    Tasks must be independent and deterministic; the merge is by index, so the
    result is identical for any worker count.
    """
    items = list(items)
    n = workers if workers is not None else worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def format_float(x) -> str:
    """Render a float at 17 significant digits (round-trip safe)."""
    return f"{float(x):.17g}"


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` atomically (temp file + rename)."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".geomlab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
