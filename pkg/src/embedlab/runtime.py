"""Deterministic execution plumbing: seeded work splitting and an
order-preserving parallel map. Results are merged in submission order, so
verdicts and values are independent of the thread count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = ["parallel_map", "spawn_seeds", "canonical_json"]


def parallel_map(fn, items, threads: int = 1):
    """Map fn over items, preserving input order in the result list."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def spawn_seeds(master_seed: int, count: int):
    """Independent child seeds derived deterministically from one master."""
    seq = np.random.SeedSequence(int(master_seed))
    return [int(child.generate_state(1)[0]) for child in seq.spawn(count)]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"
