import json
import os
import subprocess
import sys
import time

import pytest

from galois_lab.arithmetic.scan import iter_scan, read_checkpoint, scan_exception_table


def test_small_tables():
    assert scan_exception_table(100) == []
    assert scan_exception_table(300) == [(257, 93)]
    assert scan_exception_table(300, method="recurrence") == [(257, 93)]


def test_limit_guard():
    with pytest.raises(ValueError):
        scan_exception_table(4)


def test_checkpoint_format(tmp_path):
    cp = tmp_path / "scan.jsonl"
    scan_exception_table(300, checkpoint=str(cp))
    lines = cp.read_text().splitlines()
    recs = [json.loads(l) for l in lines]
    ps = [int(r["p"]) for r in recs]
    assert ps == sorted(ps) and all(p % 4 == 1 for p in ps)
    assert all(isinstance(v, str) for r in recs for k, v in r.items() if k in ("p", "e", "a", "lambda"))
    assert lines == [json.dumps(r, sort_keys=True) for r in recs]


def test_resume_extends_checkpoint(tmp_path):
    cp = str(tmp_path / "scan.jsonl")
    scan_exception_table(200, checkpoint=cp)
    n200 = len(read_checkpoint(cp))
    assert scan_exception_table(400, checkpoint=cp) == [(257, 93)]
    full = tmp_path / "full.jsonl"
    scan_exception_table(400, checkpoint=str(full))
    assert open(cp).read() == full.read_text()
    assert len(read_checkpoint(cp)) > n200
    # a smaller limit reuses the stored prefix
    assert scan_exception_table(150, checkpoint=cp) == []


def test_torn_tail_is_dropped(tmp_path):
    cp = tmp_path / "scan.jsonl"
    scan_exception_table(300, checkpoint=str(cp))
    good = cp.read_text()
    cp.write_text(good + '{"p": "30')
    assert scan_exception_table(300, checkpoint=str(cp)) == [(257, 93)]
    assert cp.read_text() == good


def test_parallel_matches_serial(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert scan_exception_table(1500, checkpoint=str(a), jobs=2) == scan_exception_table(
        1500, checkpoint=str(b), jobs=1)
    assert a.read_text() == b.read_text()


def test_resume_after_kill(tmp_path):
    cp = tmp_path / "killed.jsonl"
    code = ("from galois_lab.arithmetic.scan import scan_exception_table;"
            f"scan_exception_table(6000, checkpoint={str(cp)!r}, method='recurrence')")
    proc = subprocess.Popen([sys.executable, "-c", code])
    deadline = time.time() + 60
    while time.time() < deadline and (not cp.exists() or cp.stat().st_size < 2000):
        time.sleep(0.05)
    proc.kill()
    proc.wait()
    partial = len(cp.read_text().splitlines())
    assert partial > 0
    resumed = scan_exception_table(6000, checkpoint=str(cp))
    ref = tmp_path / "ref.jsonl"
    assert resumed == scan_exception_table(6000, checkpoint=str(ref)) == [(257, 93), (3329, 1951)]
    assert cp.read_text() == ref.read_text()
    assert partial < len(ref.read_text().splitlines())


def test_iter_scan_ordered():
    ps = [int(r["p"]) for r in iter_scan(500)]
    assert ps == sorted(ps)
    assert ps[0] == 5
