"""Characters of a cyclic group Delta acting through powers of the Teichmüller character.

All irreducible characters in play are omega^j, so a character is stored as
a multiset of exponents j mod (p - 1).  Only exponent arithmetic matters for
the checks here; no Teichmüller lifts are ever computed.  Where a concrete
matrix is useful, omega(s) is realised mod p by the smallest primitive root.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping

from sympy import primitive_root

from .errors import ContextMismatchError
from .lie import LieElement, _matmul


@dataclass(frozen=True)
class CharacterVector:
    """Multiset of omega-exponents modulo ``modulus`` (= p - 1)."""

    modulus: int
    items: tuple[tuple[int, int], ...]

    @classmethod
    def from_exponents(cls, modulus: int, exponents: Iterable[int] | Mapping[int, int]) -> "CharacterVector":
        if modulus < 1:
            raise ValueError("modulus must be positive")
        counts: Counter = Counter()
        if isinstance(exponents, Mapping):
            for e, mult in exponents.items():
                if mult < 0:
                    raise ValueError("multiplicities must be non-negative")
                counts[e % modulus] += mult
        else:
            for e in exponents:
                counts[e % modulus] += 1
        return cls(modulus, tuple(sorted((e, c) for e, c in counts.items() if c > 0)))

    def multiplicity(self, exponent: int) -> int:
        return dict(self.items).get(exponent % self.modulus, 0)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(e for e, _ in self.items)

    @property
    def dimension(self) -> int:
        return sum(c for _, c in self.items)

    def counts(self) -> dict[int, int]:
        return dict(self.items)

    def dual(self) -> "CharacterVector":
        return CharacterVector.from_exponents(self.modulus, {-e: c for e, c in self.items})

    def _check(self, other: "CharacterVector"):
        if self.modulus != other.modulus:
            raise ContextMismatchError(f"character moduli differ: {self.modulus} vs {other.modulus}")


def mirror_index(k: int, p: int) -> int:
    """omega^k in the class group <-> omega^(1-k) in the torsion module."""
    return (1 - k) % (p - 1)


def adjoint_weights(p: int, m: int, a: int) -> CharacterVector:
    """Character of gl_m mod p under conjugation by diag(omega^(i a)): {(i - j) a}."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return CharacterVector.from_exponents(
        p - 1, ((i - j) * a for i in range(1, m + 1) for j in range(1, m + 1)))


def orthogonal(M: CharacterVector, N: CharacterVector) -> bool:
    M._check(N)
    return not (M.support & N.support)


def obstruction_dimension(T: CharacterVector, M: CharacterVector) -> int:
    """dim_Fp (T^ ⊗ M)^Delta = sum_r mult_T(r) mult_M(r)."""
    T._check(M)
    mt = T.counts()
    return sum(mt.get(r, 0) * c for r, c in M.items)


def frank_character(p: int) -> CharacterVector:
    """1 + omega + omega^3 + ... + omega^(p-2): the free part mod p over Q(zeta_p)."""
    if p < 3 or p % 2 == 0:
        raise ValueError("frank_character needs an odd prime")
    return CharacterVector.from_exponents(p - 1, [0] + list(range(1, p - 1, 2)))


# -- explicit Delta actions ------------------------------------------------------

@dataclass(frozen=True)
class DeltaAction:
    """Diagonal action matrix of a generator s of Delta.

    ``kind`` is "quadratic" (A = diag(1, -1, 1, ...), Delta of order 2) or
    "cyclotomic" (A_a(s) = diag(omega^(i a)(s))).  ``exponents`` holds the
    diagonal as exponents: mod 2 for the quadratic case, mod p - 1 otherwise.
    ``matrix`` is the integer diagonal; in the cyclotomic case it is the mod-p
    image with omega(s) = smallest primitive root.
    """

    p: int
    m: int
    kind: str
    a: int | None
    exponents: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]

    @property
    def modulus(self) -> int:
        return 2 if self.kind == "quadratic" else self.p - 1

    def order(self) -> int:
        g = self.modulus
        for e in self.exponents:
            g = gcd(g, e)
        return self.modulus // g if self.exponents else 1


def quadratic_action(p: int, m: int) -> DeltaAction:
    """A = sum (-1)^(i+1) E_ii (for m = 2 this is E_11 - E_22)."""
    exps = tuple((i + 1) % 2 for i in range(1, m + 1))
    diag = [(-1) ** e for e in exps]
    return DeltaAction(p, m, "quadratic", None, exps,
                       tuple(tuple(diag[i] if i == j else 0 for j in range(m)) for i in range(m)))


def cyclotomic_action(p: int, m: int, a: int) -> DeltaAction:
    """A_a(s) = sum omega^(i a)(s) E_ii."""
    if a % 2 == 0:
        raise ValueError("twist exponent a must be odd")
    g = primitive_root(p)
    exps = tuple((i * a) % (p - 1) for i in range(1, m + 1))
    diag = [pow(g, e, p) for e in exps]
    return DeltaAction(p, m, "cyclotomic", a, exps,
                       tuple(tuple(diag[i] if i == j else 0 for j in range(m)) for i in range(m)))


def standard_weights(action: DeltaAction) -> tuple[int, int]:
    """Expected eigen-characters on the standard pair (z1, z2).

    Quadratic: (-1, +1) as signs.  Cyclotomic: exponents (-a, a(m-1)) for
    odd m and (-a, a(m-2)) for even m.
    """
    if action.kind == "quadratic":
        return (-1, 1)
    a, m, mod = action.a, action.m, action.modulus
    return ((-a) % mod, (a * (m - 1 if m % 2 else m - 2)) % mod)


@dataclass
class DeltaActionReport:
    kind: str
    weights: tuple[int | None, int | None]
    expected: tuple[int, int]
    eigenvectors: tuple[bool, bool]
    numeric_ok: bool

    @property
    def passed(self) -> bool:
        return all(self.eigenvectors) and self.numeric_ok and self.weights == self.expected


def _weight(action: DeltaAction, z: LieElement) -> int | None:
    """Common exponent (e_i - e_j) over the support of z, or None if z is no eigenvector."""
    mod = action.modulus
    ws = {(action.exponents[i] - action.exponents[j]) % mod
          for i in range(z.m) for j in range(z.m) if z.mat[i][j]}
    if len(ws) != 1:
        return None
    return ws.pop()


def _numeric_check(action: DeltaAction, z: LieElement, weight: int) -> bool:
    """Conjugate by the concrete diagonal and compare with the predicted scalar."""
    A = action.matrix
    m = z.m
    if action.kind == "quadratic":
        conj = _matmul(_matmul(A, z.mat), A)  # A is an involution
        scalar = -1 if weight else 1
        return conj == tuple(tuple(scalar * x for x in r) for r in z.mat)
    p = action.p
    g = primitive_root(p)
    inv = tuple(tuple(pow(A[i][i], -1, p) if i == j else 0 for j in range(m)) for i in range(m))
    conj = _matmul(_matmul(A, z.mat), inv)
    scalar = pow(g, weight, p)
    # compare the unit parts mod p: z has entries p * (small integers)
    scale = _content(z)
    return all((c // scale - scalar * (x // scale)) % p == 0 if x else c % (scale * p) == 0
               for rc, rz in zip(conj, z.mat) for c, x in zip(rc, rz))


def _content(z: LieElement) -> int:
    g = 0
    for x in z.flat():
        g = gcd(g, x)
    return g or 1


def verify_delta_action(action: DeltaAction, z1: LieElement, z2: LieElement,
                        expected: tuple[int, int] | None = None) -> DeltaActionReport:
    """Check that z1, z2 are eigenvectors of conjugation by ``action``.

    Weights are reported as signs (+1/-1) for the quadratic action and as
    omega-exponents mod p - 1 for the cyclotomic one.  ``expected`` defaults
    to :func:`standard_weights`.
    """
    if not (action.m == z1.m == z2.m):
        raise ContextMismatchError("action and generators have different sizes")
    if expected is None:
        expected = standard_weights(action)
    raw = (_weight(action, z1), _weight(action, z2))
    numeric = all(w is None or _numeric_check(action, z, w) for z, w in zip((z1, z2), raw))
    if action.kind == "quadratic":
        shown = tuple(None if w is None else (-1 if w else 1) for w in raw)
    else:
        shown = raw
    return DeltaActionReport(action.kind, shown, tuple(expected),
                             tuple(w is not None for w in raw), numeric)
