"""File formats and deterministic JSON output."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import MalformedInput

__all__ = ["load_matrix", "load_subset", "dumps", "worker_count", "ordered_map"]


def load_matrix(path) -> np.ndarray:
    """Raw distance matrix from a file.

    ``*.json`` files hold ``{"n": int, "dist": [[...], ...]}``.  Anything else
    is read as CSV point coordinates, one point per row (an optional header
    row is skipped), and turned into Euclidean distances.  The result is not
    validated as a metric.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict) or "dist" not in data or "n" not in data:
            raise MalformedInput(f"{path}: expected an object with 'n' and 'dist'")
        try:
            dist = np.array(data["dist"], dtype=np.float64)
        except (TypeError, ValueError):
            raise MalformedInput(f"{path}: 'dist' is not a numeric matrix") from None
        if dist.shape != (data["n"], data["n"]):
            raise MalformedInput(f"{path}: 'dist' has shape {dist.shape}, n={data['n']}")
        return dist
    rows = [r for r in text.splitlines() if r.strip()]
    try:
        pts = np.loadtxt(rows, delimiter=",", ndmin=2)
    except ValueError:
        try:
            pts = np.loadtxt(rows[1:], delimiter=",", ndmin=2)
        except ValueError as exc:
            raise MalformedInput(f"{path}: unreadable CSV ({exc})") from None
    if pts.size == 0 or not np.isfinite(pts).all():
        raise MalformedInput(f"{path}: empty or non-finite coordinates")
    d = cdist(pts, pts)
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    return d


def load_subset(path, n: int) -> list:
    """JSON list of point indices (or ``{"subset": [...]}``), checked against ``n``."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc})") from None
    if isinstance(data, dict):
        data = data.get("subset", data.get("indices"))
    if not isinstance(data, list) or not all(isinstance(i, int) and not isinstance(i, bool)
                                             for i in data):
        raise MalformedInput(f"{path}: expected a list of integer indices")
    bad = [i for i in data if not 0 <= i < n]
    if bad:
        raise MalformedInput(f"{path}: indices out of range for n={n}: {bad[:5]}")
    return sorted(set(data))


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats, no NaN/inf."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_default) + "\n"


def worker_count() -> int:
    """Verification thread cap from ``DYADIC_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("DYADIC_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn, items) -> list:
    """``list(map(fn, items))``, threaded up to :func:`worker_count`; result
    order always follows ``items``."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
