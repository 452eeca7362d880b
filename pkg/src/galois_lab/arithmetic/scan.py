"""Range scan for primes p ≡ 1 mod 4 where condition (ii) fails.

The checkpoint is JSON lines, one per prime processed, in increasing p:
{"p", "e", "k_indices", "lambda", "a", "cond_ii_fails"} with integers as
decimal strings.  A run resumes after the last complete line; a torn final
line from an interrupted write is discarded.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Iterator

from sympy import primerange

from .criteria import irregular_report

log = logging.getLogger(__name__)

REQUIRED_KEYS = {"p", "e", "k_indices", "lambda", "a", "cond_ii_fails"}


def scan_record(p: int, method: str = "voronoi") -> dict:
    return irregular_report(p, method).to_json()


def read_checkpoint(path: str) -> list[dict]:
    """Complete records from a checkpoint; truncates a torn trailing line in place."""
    if not os.path.exists(path):
        return []
    records = []
    good_bytes = 0
    with open(path, "rb") as fh:
        for raw in fh:
            if not raw.endswith(b"\n"):
                break
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError:
                break
            if not REQUIRED_KEYS <= rec.keys():
                break
            records.append(rec)
            good_bytes += len(raw)
    if good_bytes != os.path.getsize(path):
        log.warning("discarding torn checkpoint tail in %s", path)
        with open(path, "r+b") as fh:
            fh.truncate(good_bytes)
    return records


def iter_scan(limit: int, checkpoint: str | None = None, jobs: int = 1,
              method: str = "voronoi", start: int = 5) -> Iterator[dict]:
    """Records for every prime p ≡ 1 mod 4 with start <= p <= limit, in order."""
    if limit < 5:
        raise ValueError("scan limit must be >= 5")
    done = read_checkpoint(checkpoint) if checkpoint else []
    last = start - 1
    for rec in done:
        p = int(rec["p"])
        if p > limit:
            break
        if p >= start:
            yield rec
        last = p
    todo = [p for p in primerange(max(last + 1, start), limit + 1) if p % 4 == 1]
    if not todo:
        return
    sink = open(checkpoint, "a", encoding="utf-8") if checkpoint else None
    try:
        work = partial(scan_record, method=method)
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = pool.map(work, todo, chunksize=8)
                yield from _emit(results, sink)
        else:
            yield from _emit(map(work, todo), sink)
    finally:
        if sink:
            sink.close()


def _emit(results, sink) -> Iterator[dict]:
    for rec in results:
        if sink:
            sink.write(json.dumps(rec, sort_keys=True) + "\n")
            sink.flush()
        yield rec


def exception_rows(records) -> list[tuple[int, int]]:
    rows = []
    for rec in records:
        p = int(rec["p"])
        a = int(rec["a"])
        for k in rec["k_indices"]:
            if (int(k) - 1) % a == 0:
                rows.append((p, int(k)))
    return sorted(rows)


def scan_exception_table(limit: int, checkpoint: str | None = None, jobs: int = 1,
                         method: str = "voronoi") -> list[tuple[int, int]]:
    """All (p, k_i) with p ≡ 1 mod 4, p <= limit, and a | (k_i - 1)."""
    return exception_rows(iter_scan(limit, checkpoint, jobs, method))
