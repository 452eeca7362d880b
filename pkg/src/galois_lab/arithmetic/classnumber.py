"""Class numbers of imaginary quadratic fields Q(sqrt(-p)) via reduced forms."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import isprime


@dataclass(frozen=True)
class QuadraticClassNumber:
    discriminant: int
    h: int
    method: str = "reduced-forms"


def fundamental_discriminant(p: int) -> int:
    """Discriminant of Q(sqrt(-p)): -p if p ≡ 3 mod 4, else -4p."""
    return -p if p % 4 == 3 else -4 * p


def count_reduced_forms(D: int) -> int:
    """Number of reduced primitive forms (a, b, c) of discriminant D < 0.

    Reduced: |b| <= a <= c, and b >= 0 whenever |b| == a or a == c.
    """
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    h = 0
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if _gcd3(a, b, c) != 1:
                continue
            h += 1
        a += 1
    return h


def _gcd3(a: int, b: int, c: int) -> int:
    return gcd(gcd(a, abs(b)), c)


def imag_quadratic_class_number(p: int) -> QuadraticClassNumber:
    if p < 3 or not isprime(p):
        raise ValueError(f"p={p} must be an odd prime")
    D = fundamental_discriminant(p)
    return QuadraticClassNumber(D, count_reduced_forms(D))


def quadratic_route_check(p: int) -> bool:
    """True iff p does not divide h(Q(sqrt(-p)))."""
    if p <= 3:
        raise ValueError("the quadratic route needs p > 3")
    return imag_quadratic_class_number(p).h % p != 0
