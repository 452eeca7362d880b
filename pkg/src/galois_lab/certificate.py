"""Witness certificates: the generator pair, its exponentials, the Delta action,
and named checks that can be re-run from the serialized form alone."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .arithmetic.classnumber import imag_quadratic_class_number, quadratic_route_check
from .arithmetic.criteria import check_theorem_conditions, two_adic_split
from .characters import DeltaAction, cyclotomic_action, quadratic_action, verify_delta_action
from .errors import EnumerationError, GaloisLabError
from .lie import LieElement, bracket_closure, standard_generators
from .padic import PadicContext, PadicMatrix, epsilon
from .uniform import (congruent_mod, exp_mat, generated_subgroup, log_mat, max_elements,
                      p_rank)

MAX_PRECISION = 64
# enumerated p-rank is a cross-check only; keep it cheap
ENUMERATION_CAP = 50_000

CHECK_NAMES = ("generation_dimension", "action_eigenvalues", "exp_log_round_trip",
               "sl_membership", "p_rank")


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class WitnessCertificate:
    p: int
    m: int
    route: str
    a: int | None
    N: int
    z1: LieElement
    z2: LieElement
    g1: PadicMatrix
    g2: PadicMatrix
    action: DeltaAction
    eligibility: dict
    forced: bool = False
    custom_pair: bool = False
    verified: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.verified) and all(c.passed for c in self.verified)

    def failed_checks(self) -> list[str]:
        return [c.name for c in self.verified if not c.passed]

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "m": str(self.m),
            "route": self.route,
            "a": None if self.a is None else str(self.a),
            "precision": str(self.N),
            "z1": _mat_json(self.z1.mat),
            "z2": _mat_json(self.z2.mat),
            "g1": _mat_json(self.g1.rows()),
            "g2": _mat_json(self.g2.rows()),
            "action_matrix": _mat_json(self.action.matrix),
            "action_exponents": [str(e) for e in self.action.exponents],
            "eligibility": self.eligibility,
            "forced": self.forced,
            "custom_pair": self.custom_pair,
            "verified": [c.to_json() for c in self.verified],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)


def _mat_json(rows) -> list[list[str]]:
    return [[str(int(x)) for x in r] for r in rows]


def _mat_parse(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in r) for r in rows)


def route_for(p: int) -> tuple[str, int | None]:
    if p % 4 == 3:
        return "quadratic", None
    return "cyclotomic", two_adic_split(p - 1)[1]


def action_for(route: str, p: int, m: int, a: int | None) -> DeltaAction:
    if route == "quadratic":
        return quadratic_action(p, m)
    return cyclotomic_action(p, m, a)


def eligibility_for(p: int, m: int, method: str = "voronoi") -> dict:
    route, _ = route_for(p)
    if route == "quadratic":
        if p == 3:
            return {"route": route, "verdict": "eligible",
                    "notes": ["Q(sqrt(-3)) is 3-rational"]}
        cn = imag_quadratic_class_number(p)
        ok = quadratic_route_check(p)
        return {"route": route, "verdict": "eligible" if ok else "blocked_by_class_number",
                "discriminant": str(cn.discriminant), "class_number": str(cn.h)}
    if m < 3:
        return {"route": route, "verdict": "out_of_theorem",
                "notes": ["the cyclotomic criteria need m >= 3"]}
    out = check_theorem_conditions(p, m, method).to_json()
    out["route"] = route
    return out


def run_checks(p: int, m: int, N: int, z1: LieElement, z2: LieElement,
               g1: PadicMatrix, g2: PadicMatrix, action: DeltaAction,
               custom_pair: bool = False) -> list[Check]:
    """Named verifications.  A user-supplied pair only has to consist of
    eigenvectors; the standard pair must show the expected weights."""
    def generation():
        span = bracket_closure([z1, z2])
        return span.dim == m * m - 1, {"dim": str(span.dim), "expected": str(m * m - 1)}

    def action_check():
        rep = verify_delta_action(action, z1, z2)
        ok = all(rep.eigenvectors) and rep.numeric_ok if custom_pair else rep.passed
        return ok, {"weights": [None if w is None else str(w) for w in rep.weights],
                    "expected": [str(w) for w in rep.expected]}

    def round_trip():
        ok_exp = exp_mat(z1, N) == g1 and exp_mat(z2, N) == g2
        ok_log = congruent_mod(log_mat(g1), z1, N) and congruent_mod(log_mat(g2), z2, N)
        return ok_exp and ok_log, {"exp_matches": ok_exp, "log_matches": ok_log}

    def sl():
        ok = z1.is_sl() and z2.is_sl() and g1.det().residue == 1 and g2.det().residue == 1
        return ok, {}

    return [_guarded("generation_dimension", generation),
            _guarded("action_eigenvalues", action_check),
            _guarded("exp_log_round_trip", round_trip),
            _guarded("sl_membership", sl),
            _guarded("p_rank", lambda: _rank_check(p, m, N, g1, g2))]


def _guarded(name: str, fn) -> Check:
    """A check that raises on malformed data counts as failed."""
    try:
        ok, detail = fn()
    except (GaloisLabError, ValueError, ArithmeticError) as exc:
        return Check(name, False, {"error": f"{type(exc).__name__}: {exc}"})
    return Check(name, ok, detail)


def _rank_check(p: int, m: int, N: int, g1: PadicMatrix, g2: PadicMatrix) -> tuple[bool, dict]:
    """p-rank of <g1, g2>: images in G_1/G_2 must be F_p-independent; when the
    ambient Sl_m^(1) mod p^N is small enough the group is enumerated too."""
    eps = epsilon(p)
    s = p ** (1 + eps)
    vecs = []
    for g in (g1, g2):
        ident = PadicMatrix.identity(g.ctx, m).entries
        vecs.append([((a - b) // s) % p for a, b in zip(g.entries, ident)])
    level_rank = _fp_rank(vecs, p)
    detail = {"level_rank": str(level_rank)}
    passed = level_rank == 2
    ambient = p ** ((m * m - 1) * (N - 1 - eps))
    if ambient <= min(ENUMERATION_CAP, max_elements()):
        try:
            G = generated_subgroup([g1, g2])
            d = p_rank(G)
            detail["enumerated_rank"] = str(d)
            detail["order"] = str(G.order)
            passed = passed and d == 2
        except EnumerationError:
            detail["enumerated_rank"] = None
    else:
        detail["enumerated_rank"] = None
    return passed, detail


def _fp_rank(vectors: list[list[int]], p: int) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c] % p:
                f = rows[r][c]
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def build_witness(p: int, m: int, N: int, force: bool = False,
                  method: str = "voronoi",
                  pair: tuple[LieElement, LieElement] | None = None) -> WitnessCertificate:
    """Assemble and verify a certificate.  Raises PermissionError when the
    prime/dimension is not covered by a proven route and ``force`` is off."""
    if p == 2:
        raise ValueError("witnesses need an odd prime")
    if m < 2:
        raise ValueError("witnesses need m >= 2")
    if not 2 <= N <= MAX_PRECISION:
        raise ValueError(f"precision N must lie in [2, {MAX_PRECISION}]")
    route, a = route_for(p)
    elig = eligibility_for(p, m, method)
    if elig["verdict"] != "eligible" and not force:
        raise PermissionError(f"p={p}, m={m} is not eligible ({elig['verdict']}); use --force")
    z1, z2 = pair if pair is not None else standard_generators(m, p)
    if z1.m != m or z2.m != m or z1.p != p or z2.p != p:
        raise ValueError("supplied pair does not live in gl_m over this prime")
    g1, g2 = exp_mat(z1, N), exp_mat(z2, N)
    action = action_for(route, p, m, a)
    cert = WitnessCertificate(p, m, route, a, N, z1, z2, g1, g2, action, elig,
                              forced=elig["verdict"] != "eligible",
                              custom_pair=pair is not None)
    cert.verified = run_checks(p, m, N, z1, z2, g1, g2, action, cert.custom_pair)
    return cert


def verify_certificate(data: dict | str) -> list[Check]:
    """Re-run every check using only the serialized certificate."""
    if isinstance(data, str):
        data = json.loads(data)
    p, m, N = int(data["p"]), int(data["m"]), int(data["precision"])
    a = None if data.get("a") is None else int(data["a"])
    ctx = PadicContext(p, N)
    z1 = LieElement(m, p, _mat_parse(data["z1"]))
    z2 = LieElement(m, p, _mat_parse(data["z2"]))
    g1 = PadicMatrix.from_rows(ctx, _mat_parse(data["g1"]))
    g2 = PadicMatrix.from_rows(ctx, _mat_parse(data["g2"]))
    route = data["route"]
    action = action_for(route, p, m, a)
    if _mat_parse(data["action_matrix"]) != action.matrix:
        return [Check("action_matrix", False, {"reason": "serialized action matrix does not match route"})]
    return run_checks(p, m, N, z1, z2, g1, g2, action, bool(data.get("custom_pair")))


def check_vector(checks: list[Check]) -> list[tuple[str, bool]]:
    return [(c.name, c.passed) for c in checks]
