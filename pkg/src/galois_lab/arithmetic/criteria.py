"""Eligibility conditions for the cyclotomic route (p ≡ 1 mod 4).

Class-group characters of Q(zeta_p) are read off Bernoulli numbers through
Herbrand-Ribet: the omega^k component (k odd, 3 <= k <= p-2) is nontrivial
exactly when p | B_(p-k).  Only presence is detected, not multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sympy import isprime

from ..padic import val_p
from .bernoulli import irregular_indices


@dataclass(frozen=True)
class IrregularityReport:
    p: int
    lam: int
    a: int
    class_char_indices: tuple[int, ...]

    @property
    def e(self) -> int:
        return len(self.class_char_indices)

    def failing_indices(self) -> tuple[int, ...]:
        """k_i with a | (k_i - 1): the ones violating condition (ii)."""
        return tuple(k for k in self.class_char_indices if (k - 1) % self.a == 0)

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "e": str(self.e),
            "k_indices": [str(k) for k in self.class_char_indices],
            "lambda": str(self.lam),
            "a": str(self.a),
            "cond_ii_fails": bool(self.failing_indices()),
        }


def two_adic_split(n: int) -> tuple[int, int]:
    """n = 2^lam * a with a odd."""
    lam = val_p(n, 2)
    return lam, n >> lam


def irregular_report(p: int, method: str = "recurrence") -> IrregularityReport:
    if p < 5 or not isprime(p):
        raise ValueError(f"irregular_report needs a prime p >= 5, got {p}")
    lam, a = two_adic_split(p - 1)
    ks = tuple(sorted(p - n for n in irregular_indices(p, method)))
    return IrregularityReport(p, lam, a, ks)


VERDICTS = ("eligible", "blocked_by_i", "blocked_by_ii", "out_of_theorem")


@dataclass
class EligibilityReport:
    p: int
    m: int
    verdict: str
    cond_i: bool | None = None
    cond_ii: bool | None = None
    lam: int | None = None
    a: int | None = None
    m_valuation: int | None = None
    failing_k: tuple[int, ...] = ()
    irregularity: IrregularityReport | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "p": str(self.p),
            "m": str(self.m),
            "verdict": self.verdict,
            "cond_i": self.cond_i,
            "cond_ii": self.cond_ii,
            "lambda": None if self.lam is None else str(self.lam),
            "a": None if self.a is None else str(self.a),
            "m_valuation": None if self.m_valuation is None else str(self.m_valuation),
            "failing_k": [str(k) for k in self.failing_k],
            "notes": list(self.notes),
        }
        if self.irregularity is not None:
            out["irregularity"] = self.irregularity.to_json()
        return out


def condition_i(m: int, lam: int) -> tuple[bool, int]:
    """v_2(m-1) >= lam for odd m, v_2(m-2) >= lam for even m."""
    shift = 1 if m % 2 else 2
    v = val_p(m - shift, 2)
    return v >= lam, v


def check_theorem_conditions(p: int, m: int, method: str = "recurrence",
                             report: IrregularityReport | None = None) -> EligibilityReport:
    """Evaluate conditions (i) and (ii) for the cyclotomic route.

    When both conditions fail the verdict is ``blocked_by_i``.
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if p % 4 != 1:
        return EligibilityReport(p, m, "out_of_theorem", notes=[
            "p ≢ 1 mod 4: use the imaginary quadratic route"])
    if m < 3:
        raise ValueError("the cyclotomic criteria need m >= 3")
    report = report or irregular_report(p, method)
    ok_i, v = condition_i(m, report.lam)
    failing = report.failing_indices()
    ok_ii = not failing
    if not ok_i:
        verdict = "blocked_by_i"
    elif not ok_ii:
        verdict = "blocked_by_ii"
    else:
        verdict = "eligible"
    return EligibilityReport(p, m, verdict, ok_i, ok_ii, report.lam, report.a, v, failing, report)


def eligible_m_classes(lam: int) -> dict[str, str]:
    """Residue classes of m >= 3 passing condition (i)."""
    mod = 2 ** lam
    return {
        "odd": f"m ≡ 1 mod {mod}",
        "even": f"m ≡ 2 mod {mod}",
    }
