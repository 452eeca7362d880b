"""Command-line entry point: check-prime, scan, witness, verify, selftest.

Every command builds a JSON document first; the human-readable text is
rendered from that document.  Exit codes: 0 ok, 1 verification failure or
refusal, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from sympy import isprime

from .arithmetic.bernoulli import METHODS
from .arithmetic.classnumber import imag_quadratic_class_number, quadratic_route_check
from .arithmetic.criteria import check_theorem_conditions, eligible_m_classes, irregular_report
from .arithmetic.scan import exception_rows, iter_scan
from .certificate import MAX_PRECISION, build_witness, verify_certificate
from .lie import LieElement
from .selftest import PROFILES, check_names, run_selftest

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


# -- commands ------------------------------------------------------------------

def _require_odd_prime(p: int) -> None:
    if p < 2 or not isprime(p):
        raise UsageError(f"{p} is not prime")
    if p == 2:
        raise UsageError("p = 2 is not covered by either route")


def check_prime_doc(p: int, m: int | None, method: str = "voronoi") -> dict:
    _require_odd_prime(p)
    if m is not None and m < 1:
        raise UsageError("--m must be >= 1")
    if p % 4 == 3:
        doc = {"p": str(p), "route": "quadratic", "m": "all" if m is None else str(m)}
        if p == 3:
            doc.update(verdict="eligible", notes=["Q(sqrt(-3)) is 3-rational"])
            return doc
        cn = imag_quadratic_class_number(p)
        ok = quadratic_route_check(p)
        doc.update(discriminant=str(cn.discriminant), class_number=str(cn.h),
                   p_divides_h=not ok, verdict="eligible" if ok else "blocked_by_class_number",
                   notes=["eligible for every m >= 1"] if ok else [])
        return doc
    if m is None:
        rep = irregular_report(p, method)
        classes = eligible_m_classes(rep.lam)
        ok_ii = not rep.failing_indices()
        return {"p": str(p), "route": "cyclotomic", "m": None,
                "irregularity": rep.to_json(), "cond_ii": ok_ii,
                "failing_k": [str(k) for k in rep.failing_indices()],
                "eligible_m": classes if ok_ii else {},
                "verdict": "eligible_classes" if ok_ii else "blocked_by_ii"}
    if m < 3:
        return {"p": str(p), "route": "cyclotomic", "m": str(m), "verdict": "out_of_theorem",
                "notes": ["the cyclotomic criteria need m >= 3"]}
    doc = check_theorem_conditions(p, m, method).to_json()
    doc["route"] = "cyclotomic"
    return doc


def scan_doc(limit: int, checkpoint: str | None, jobs: int, method: str) -> dict:
    if limit < 5:
        raise UsageError("--limit must be >= 5")
    if jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        records = list(iter_scan(limit, checkpoint, jobs, method))
    except OSError as exc:
        raise UsageError(f"cannot use checkpoint {checkpoint!r}: {exc.strerror}") from exc
    rows = exception_rows(records)
    return {"limit": str(limit), "method": method, "primes_scanned": str(len(records)),
            "rows": [{"p": str(p), "k": str(k)} for p, k in rows]}


def _load_pair(path: str, m: int, p: int) -> tuple[LieElement, LieElement]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return tuple(LieElement(m, p, tuple(tuple(int(x) for x in r) for r in data[key]))
                     for key in ("z1", "z2"))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read generator pair from {path}: {exc}") from exc


def witness_doc(p: int, m: int, N: int, force: bool, method: str,
                pair_path: str | None = None) -> tuple[dict, int]:
    _require_odd_prime(p)
    if m < 2:
        raise UsageError("m must be >= 2")
    if not 2 <= N <= MAX_PRECISION:
        raise UsageError(f"infeasible precision N={N}; allowed range is 2..{MAX_PRECISION}")
    pair = _load_pair(pair_path, m, p) if pair_path else None
    try:
        cert = build_witness(p, m, N, force=force, method=method, pair=pair)
    except PermissionError as exc:
        return {"p": str(p), "m": str(m), "refused": True, "reason": str(exc)}, EXIT_FAIL
    return cert.to_json(), EXIT_OK if cert.passed else EXIT_FAIL


def verify_doc(path: str) -> tuple[dict, int]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read certificate {path}: {exc}") from exc
    try:
        checks = verify_certificate(data)
    except (KeyError, TypeError, ValueError) as exc:
        return {"certificate": path, "checks": [], "matches_stored": False,
                "error": f"malformed certificate: {exc}"}, EXIT_FAIL
    stored = {c["name"]: c["passed"] for c in data.get("verified", [])}
    fresh = {c.name: c.passed for c in checks}
    ok = all(fresh.values()) and stored == fresh
    return {"certificate": path, "checks": [c.to_json() for c in checks],
            "matches_stored": stored == fresh}, EXIT_OK if ok else EXIT_FAIL


def selftest_doc(profile: str, only: list[str] | None) -> tuple[dict, int]:
    if only:
        unknown = sorted(set(only) - set(check_names()))
        if unknown:
            raise UsageError(f"unknown check(s): {', '.join(unknown)}")
    results = run_selftest(profile, only)
    ok = all(r.passed for r in results)
    return {"profile": profile, "passed": ok, "checks": [r.to_json() for r in results]}, \
        EXIT_OK if ok else EXIT_FAIL


# -- human rendering -----------------------------------------------------------

def render_check_prime(doc: dict) -> str:
    lines = [f"p = {doc['p']}: {doc['route']} route, verdict {doc['verdict']}"]
    if "class_number" in doc:
        lines.append(f"  h({doc['discriminant']}) = {doc['class_number']}")
    if "irregularity" in doc:
        irr = doc["irregularity"]
        lines.append(f"  lambda = {irr['lambda']}, a = {irr['a']}, "
                     f"class-group indices k = {', '.join(irr['k_indices']) or 'none'}")
    if doc.get("failing_k"):
        lines.append(f"  condition (ii) fails at k = {', '.join(doc['failing_k'])}")
    if doc.get("cond_i") is False:
        lines.append(f"  condition (i) fails: v_2 = {doc['m_valuation']} < lambda = {doc['lambda']}")
    for kind, cls in sorted(doc.get("eligible_m", {}).items()):
        lines.append(f"  eligible {kind} m: {cls}")
    lines += [f"  note: {n}" for n in doc.get("notes", [])]
    return "\n".join(lines)


def render_scan(doc: dict) -> str:
    lines = [f"scanned {doc['primes_scanned']} primes p ≡ 1 mod 4 up to {doc['limit']}",
             f"{'p':>8}  {'k':>8}"]
    lines += [f"{r['p']:>8}  {r['k']:>8}" for r in doc["rows"]]
    if not doc["rows"]:
        lines.append("(no exceptions)")
    return "\n".join(lines)


def _render_checks(checks: list[dict]) -> list[str]:
    return [f"  [{'ok' if c['passed'] else 'FAIL'}] {c['name']}" for c in checks]


def render_witness(doc: dict) -> str:
    if doc.get("refused"):
        return f"refused: {doc['reason']}"
    route = doc["route"] if doc["a"] is None else f"{doc['route']} (a = {doc['a']})"
    lines = [f"witness p = {doc['p']}, m = {doc['m']}, N = {doc['precision']}, route {route}"]
    if doc["forced"]:
        lines.append("  WARNING: outside the proven region (--force)")
    lines += _render_checks(doc["verified"])
    return "\n".join(lines)


def render_verify(doc: dict) -> str:
    lines = [f"certificate {doc['certificate']}"] + _render_checks(doc["checks"])
    if "error" in doc:
        lines.append(f"  {doc['error']}")
    if not doc["matches_stored"]:
        lines.append("  stored results differ from re-verification")
    return "\n".join(lines)


def render_selftest(doc: dict) -> str:
    lines = [f"selftest ({doc['profile']}): {'pass' if doc['passed'] else 'FAIL'}"]
    for c in doc["checks"]:
        lines.append(f"  [{'ok' if c['passed'] else 'FAIL'}] {c['name']} ({c['seconds']} s)")
    return "\n".join(lines)


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="galois-lab",
                                 description="Finite-level checks for p-adic Galois representations.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print the JSON document")
        return sp

    def method(sp):
        sp.add_argument("--method", choices=METHODS, default="voronoi",
                        help="Bernoulli number algorithm (default: voronoi)")

    sp = common(sub.add_parser("check-prime", help="eligibility of a prime"))
    sp.add_argument("p", type=int)
    sp.add_argument("--m", type=int, default=None, help="matrix size")
    method(sp)

    sp = common(sub.add_parser("scan", help="table of primes where condition (ii) fails"))
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--checkpoint", default=None, help="JSON-lines file, resumed if present")
    sp.add_argument("--jobs", type=int, default=1)
    method(sp)

    sp = common(sub.add_parser("witness", help="emit a verified witness certificate"))
    sp.add_argument("p", type=int)
    sp.add_argument("m", type=int)
    sp.add_argument("N", type=int, nargs="?", default=None, help="precision (default 4)")
    sp.add_argument("-N", "--precision", type=int, dest="precision", default=None)
    sp.add_argument("--force", action="store_true", help="emit even outside the proven region")
    sp.add_argument("--pair", default=None, help="JSON file with integer matrices z1, z2")
    sp.add_argument("--out", default=None, help="also write the certificate to this file")
    method(sp)

    sp = common(sub.add_parser("verify", help="re-verify a certificate file"))
    sp.add_argument("certificate")

    sp = common(sub.add_parser("selftest", help="run the invariant suites"))
    sp.add_argument("profile", nargs="?", choices=PROFILES, default="quick")
    sp.add_argument("--only", action="append", default=None, metavar="CHECK")
    return ap


def _precision(args) -> int:
    if args.N is not None and args.precision is not None and args.N != args.precision:
        raise UsageError("conflicting precisions given")
    return args.N if args.N is not None else args.precision if args.precision is not None else 4


def run(args) -> int:
    status = EXIT_OK
    if args.command == "check-prime":
        doc, render = check_prime_doc(args.p, args.m, args.method), render_check_prime
    elif args.command == "scan":
        doc, render = scan_doc(args.limit, args.checkpoint, args.jobs, args.method), render_scan
    elif args.command == "witness":
        doc, status = witness_doc(args.p, args.m, _precision(args), args.force, args.method, args.pair)
        render = render_witness
        if args.out and not doc.get("refused"):
            try:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(dumps(doc) + "\n")
            except OSError as exc:
                raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
    elif args.command == "verify":
        doc, status = verify_doc(args.certificate)
        render = render_verify
    else:
        doc, status = selftest_doc(args.profile, args.only)
        render = render_selftest
    print(dumps(doc) if args.json else render(doc))
    if args.command == "witness" and not doc.get("refused") and status != EXIT_OK:
        failed = [c["name"] for c in doc["verified"] if not c["passed"]]
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
    if args.command == "witness" and doc.get("forced"):
        print("warning: certificate emitted outside the proven region", file=sys.stderr)
    return status


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except UsageError as exc:
        print(f"galois-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
