import pytest
from sympy import jacobi_symbol, legendre_symbol, primerange

from galois_lab.arithmetic.classnumber import (count_reduced_forms, fundamental_discriminant,
                                               imag_quadratic_class_number, quadratic_route_check)


def dirichlet_class_number(p):
    """h(D) = -(1/|D|) sum_{a<|D|} chi_D(a) a for a fundamental D < -4."""
    D = fundamental_discriminant(p)
    n = -D
    if p % 4 == 3:
        chi = lambda a: legendre_symbol(a % p, p) if a % p else 0
    else:
        chi = lambda a: jacobi_symbol((-p) % a, a) if a % 2 else 0
    s = sum(chi(a) * a for a in range(1, n))
    assert s % n == 0
    return -s // n


@pytest.mark.parametrize("p,h", [(23, 3), (163, 1), (3, 1), (5, 2), (7, 1), (11, 1),
                                 (47, 5), (71, 7), (13, 2), (17, 4), (41, 8), (199, 9)])
def test_spot_values(p, h):
    assert imag_quadratic_class_number(p).h == h


def test_discriminant_branches():
    assert fundamental_discriminant(23) == -23
    assert fundamental_discriminant(5) == -20
    assert imag_quadratic_class_number(5).discriminant == -20


@pytest.mark.parametrize("p", [p for p in primerange(5, 1000)][::7])
def test_forms_match_dirichlet_formula(p):
    assert imag_quadratic_class_number(p).h == dirichlet_class_number(p)


def test_route_check_to_1000():
    assert all(quadratic_route_check(p) for p in primerange(5, 1001))
    assert quadratic_route_check(5) and quadratic_route_check(23) and quadratic_route_check(7)


def test_errors():
    with pytest.raises(ValueError):
        count_reduced_forms(5)
    with pytest.raises(ValueError):
        quadratic_route_check(3)
