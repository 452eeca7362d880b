"""Desk-scale invariant suites, run by ``galois-lab selftest``.

Each check looks module attributes up at call time, so a monkeypatched
function (e.g. a sabotaged bracket) is exercised by the suite.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from sympy import bernoulli, primerange

from . import characters, lie, padic, uniform
from .arithmetic import bernoulli as bern
from .arithmetic import classnumber, scan

PROFILES = ("quick", "full")


@dataclass
class SelfTestResult:
    name: str
    passed: bool
    seconds: float
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "seconds": f"{self.seconds:.3f}", "detail": self.detail}


CheckFn = Callable[[str], tuple[bool, dict]]
_REGISTRY: list[tuple[str, CheckFn]] = []


def _check(name: str):
    def deco(fn: CheckFn) -> CheckFn:
        _REGISTRY.append((name, fn))
        return fn
    return deco


def check_names() -> list[str]:
    return [n for n, _ in _REGISTRY]


@_check("padic.ring_axioms")
def _ring_axioms(profile: str):
    rng = random.Random(1)
    bad = 0
    for p, N in ((2, 5), (3, 4), (7, 3)):
        ctx = padic.PadicContext(p, N)
        for _ in range(50):
            a, b, c = (padic.PadicScalar(ctx, rng.randrange(ctx.modulus)) for _ in range(3))
            bad += (a * (b + c)) != (a * b + a * c)
            bad += (a * b) * c != a * (b * c)
            if a.valuation() == 0:
                bad += a * a.inverse() != padic.PadicScalar(ctx, 1)
    return bad == 0, {"failures": str(bad)}


@_check("lie.bracket_closure")
def _closure(profile: str):
    dims = {}
    ok = True
    for p in (3, 5, 7):
        for m in range(2, 7):
            d = lie.bracket_closure(list(lie.standard_generators(m, p))).dim
            dims[f"{p},{m}"] = str(d)
            ok &= d == m * m - 1
    # sign-sensitive value for the m = 2 pair
    p = 3
    x, y = lie.standard_generators(2, p)
    want = (lie.elementary(2, p, 2, 1) - lie.elementary(2, p, 1, 2)).scale(2 * p)
    val_ok = lie.bracket(x, y) == want
    return ok and val_ok, {"dims": dims, "m2_bracket_value": val_ok}


@_check("lie.powerful")
def _powerful(profile: str):
    rng = random.Random(2)
    ok = True
    for p in (2, 3, 5):
        s = p ** (1 + padic.epsilon(p))
        for m in (2, 3):
            for _ in range(20):
                a, b = (lie.LieElement(m, p, tuple(tuple(s * rng.randrange(-9, 10) for _ in range(m))
                                                   for _ in range(m))) for _ in range(2))
                ok &= all(v % (s * s) == 0 for v in lie.bracket(a, b).flat())
    return ok, {}


@_check("uniform.exp_log_round_trip")
def _round_trip(profile: str):
    rng = random.Random(3)
    count = 100
    bad = 0
    for p, m, N in ((3, 2, 4), (5, 3, 4), (7, 2, 6)):
        s = p ** (1 + padic.epsilon(p))
        for _ in range(count):
            x = lie.LieElement(m, p, tuple(tuple(s * rng.randrange(p ** N) for _ in range(m))
                                           for _ in range(m)))
            bad += not uniform.congruent_mod(uniform.log_mat(uniform.exp_mat(x, N)), x, N)
    return bad == 0, {"failures": str(bad), "per_case": str(count)}


@_check("uniform.filtration")
def _filtration(profile: str):
    p, m, N = 3, 2, 3
    G = uniform.congruence_kernel(uniform.CongruenceSubgroupLevel(p, m, 1, N), sl_only=True)
    series = uniform.p_central_series(G)
    ok = True
    for k in range(1, N + 1):
        cong = uniform.congruence_kernel(uniform.CongruenceSubgroupLevel(p, m, k, N), sl_only=True)
        ok &= series.term(k) == cong
        ok &= uniform.exp_lattice_image(p, m, N, k, sl_only=True) == cong
    return ok, {"orders": [str(o) for o in series.orders()]}


@_check("uniform.embedding_ingredients")
def _embedding(profile: str):
    p, m, N = 3, 2, 3
    G = uniform.congruence_kernel(uniform.CongruenceSubgroupLevel(p, m, 1, N), sl_only=True)
    series = uniform.p_central_series(G)
    gp = uniform.generated_subgroup([uniform.exp_mat(z, N) for z in lie.standard_generators(m, p)])
    d = uniform.p_rank(gp)
    rep = uniform.decalage_check(gp, series, 1)
    rank = uniform.proper_solution_rank_check(gp, rep.terms)
    return d == 2 and rep.passed and rank.passed, {
        "p_rank": str(d), "decalage": rep.passed, "rank_check": rank.passed}


@_check("characters.delta_actions")
def _actions(profile: str):
    ok = True
    for m in range(2, 9):
        z = lie.standard_generators(m, 5)
        ok &= characters.verify_delta_action(characters.quadratic_action(5, m), *z).passed
    for p, a in ((13, 3), (17, 1)):
        for m in range(3, 9):
            z = lie.standard_generators(m, p)
            ok &= characters.verify_delta_action(characters.cyclotomic_action(p, m, a), *z).passed
    return ok, {}


@_check("characters.obstruction")
def _obstruction(profile: str):
    rng = random.Random(4)
    ok = True
    for _ in range(200):
        mod = rng.randrange(2, 30)
        T = characters.CharacterVector.from_exponents(mod, [rng.randrange(mod) for _ in range(rng.randrange(4))])
        M = characters.CharacterVector.from_exponents(mod, [rng.randrange(mod) for _ in range(rng.randrange(6))])
        ok &= (characters.obstruction_dimension(T, M) == 0) == characters.orthogonal(T, M)
    return ok, {}


@_check("arithmetic.bernoulli_exact")
def _bernoulli_exact(profile: str):
    bad = []
    for p in primerange(5, 120):
        want = {n: int(bernoulli(n).p * pow(bernoulli(n).q, -1, p)) % p for n in range(2, p - 2, 2)}
        for method in bern.METHODS:
            if bern.bernoulli_mod_p(p, method) != want:
                bad.append(f"{p}:{method}")
    return not bad, {"mismatches": bad}


@_check("arithmetic.dual_method")
def _dual(profile: str):
    limit = 5000 if profile == "full" else 1000
    bad = [str(p) for p in primerange(5, limit + 1)
           if bern.irregular_indices(p, "recurrence") != bern.irregular_indices(p, "voronoi")]
    return not bad, {"limit": str(limit), "mismatches": bad}


@_check("arithmetic.quadratic_route")
def _quadratic(profile: str):
    bad = [str(p) for p in primerange(5, 1001) if not classnumber.quadratic_route_check(p)]
    spots = {23: 3, 163: 1, 47: 5, 71: 7}
    spot_ok = all(classnumber.imag_quadratic_class_number(p).h == h for p, h in spots.items())
    return not bad and spot_ok, {"failing_primes": bad, "spot_values": spot_ok}


@_check("arithmetic.scan_table")
def _scan(profile: str):
    limit, want = (12000, [(257, 93), (3329, 1951), (11777, 8879)]) if profile == "full" \
        else (300, [(257, 93)])
    got = scan.scan_exception_table(limit)
    return got == want, {"limit": str(limit), "rows": [[str(p), str(k)] for p, k in got]}


def run_selftest(profile: str = "quick", only: list[str] | None = None) -> list[SelfTestResult]:
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES}")
    results = []
    for name, fn in _REGISTRY:
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = fn(profile)
        except Exception as exc:  # a crash is a named failure, not a traceback
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        results.append(SelfTestResult(name, bool(ok), time.perf_counter() - t0, detail))
    return results
