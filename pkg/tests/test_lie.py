import itertools

import pytest
import sympy
from hypothesis import given, strategies as st

from galois_lab.errors import ClosureError, ContextMismatchError, NormalizationError
from galois_lab.lie import (INF, LieElement, bracket, bracket_closure, elementary, fp_independent,
                            normalize_generators, rational_rank, standard_generators, w_valuation)
from galois_lab.padic import epsilon


def closure_oracle(gens):
    """Span closure with sympy: add all pairwise commutators of a basis until the rank stabilises."""
    mats = [sympy.Matrix(g.mat) for g in gens]
    rank = 0
    while True:
        flat = sympy.Matrix([list(M) for M in mats]) if mats else sympy.zeros(0, 1)
        basis_rows = flat.rowspace()
        if len(basis_rows) == rank:
            return rank
        rank = len(basis_rows)
        m = gens[0].m
        basis = [sympy.Matrix(m, m, list(r)) for r in basis_rows]
        mats = basis + [A * B - B * A for A, B in itertools.combinations(basis, 2)]


def lie_st(p, m, lo=-20, hi=20):
    s = p ** (1 + epsilon(p))
    return st.lists(st.integers(lo, hi), min_size=m * m, max_size=m * m).map(
        lambda v: LieElement(m, p, tuple(tuple(s * v[i * m + j] for j in range(m)) for i in range(m))))


def test_membership_enforced():
    with pytest.raises(ValueError):
        LieElement(2, 3, ((1, 0), (0, 0)))
    with pytest.raises(ValueError):
        LieElement(2, 2, ((2, 0), (0, 0)))  # p = 2 needs divisibility by 4
    LieElement(2, 2, ((4, 0), (0, -4)))


def test_bracket_examples():
    p = 5
    x, y = standard_generators(2, p)
    assert bracket(x, y) == (elementary(2, p, 2, 1) - elementary(2, p, 1, 2)).scale(2 * p)
    assert bracket(x, x).is_zero()
    assert bracket(elementary(3, p, 1, 2), elementary(3, p, 2, 3)) == elementary(3, p, 1, 3).scale(p)


def test_bracket_p2_scaling():
    # for p = 2 the scaled basis is 4 E_ij, so [E12(2), E23(2)] = 4 E13(2)
    assert bracket(elementary(3, 2, 1, 2), elementary(3, 2, 2, 3)) == elementary(3, 2, 1, 3).scale(4)


def test_bracket_context_mismatch():
    with pytest.raises(ContextMismatchError):
        bracket(elementary(2, 3, 1, 2), elementary(2, 5, 1, 2))


def test_standard_generators_examples():
    p = 7
    E = lambda m, i, j: elementary(m, p, i, j)
    assert standard_generators(2, p) == (E(2, 1, 2) + E(2, 2, 1), E(2, 1, 1) - E(2, 2, 2))
    assert standard_generators(3, p) == (E(3, 1, 2) + E(3, 2, 3), E(3, 3, 1))
    assert standard_generators(4, p) == (E(4, 1, 2) + E(4, 2, 3) + E(4, 3, 4), E(4, 3, 1) + E(4, 4, 2))
    with pytest.raises(ValueError):
        standard_generators(1, p)


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_generation_dimension(p, m):
    assert bracket_closure(list(standard_generators(m, p))).dim == m * m - 1


@pytest.mark.parametrize("m", [2, 3, 4])
def test_generation_matches_sympy_oracle(m):
    gens = list(standard_generators(m, 3))
    assert bracket_closure(gens).dim == closure_oracle(gens)


def test_closure_small_cases():
    z1, _ = standard_generators(3, 5)
    # [z1, z1] = 0, so z1 alone spans a one-dimensional subalgebra
    assert bracket_closure([z1]).dim == closure_oracle([z1]) == 1
    assert bracket_closure([LieElement.zero(3, 5)]).dim == 0
    assert bracket_closure(list(standard_generators(5, 3))).dim == 24


def test_closure_guard():
    with pytest.raises(ClosureError):
        bracket_closure(list(standard_generators(3, 3)), max_dim=4)


def test_closure_is_deterministic_and_contains_generators():
    gens = list(standard_generators(4, 3))
    a, b = bracket_closure(gens), bracket_closure(gens)
    assert a == b
    assert all(a.contains(g) for g in gens)
    assert a.contains(bracket(*gens))


@given(lie_st(3, 2), lie_st(3, 2), lie_st(3, 2))
def test_jacobi(a, b, c):
    total = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
    assert total.is_zero()


@given(st.sampled_from([2, 3, 5]).flatmap(lambda p: st.tuples(lie_st(p, 3), lie_st(p, 3))))
def test_powerful(pair):
    a, b = pair
    s = a.p ** (1 + epsilon(a.p))
    assert all(v % (s * s) == 0 for v in bracket(a, b).flat())


@given(st.lists(lie_st(3, 3, -3, 3), min_size=1, max_size=3), lie_st(3, 3, -3, 3))
def test_closure_monotone(gens, extra):
    assert bracket_closure(gens + [extra]).dim >= bracket_closure(gens).dim


@given(lie_st(5, 3), lie_st(5, 3))
def test_closure_agrees_with_oracle_random(a, b):
    assert bracket_closure([a, b]).dim == closure_oracle([a, b])


def test_w_valuation():
    p = 5
    z1, _ = standard_generators(3, p)
    assert w_valuation(z1) == 0
    assert w_valuation(elementary(3, p, 1, 2).scale(p * p)) == 2
    assert w_valuation(LieElement.zero(3, p)) == INF


def _check_normalized(x, y, k):
    assert w_valuation(x) == w_valuation(y) == k
    assert fp_independent(x, y, k)


def test_normalize_examples():
    p = 5
    x = (elementary(2, p, 1, 2) + elementary(2, p, 2, 1)).scale(p)
    y = elementary(2, p, 1, 1) - elementary(2, p, 2, 2)
    assert normalize_generators(x, y) == (x, y.scale(p), 1)
    z1, z2 = standard_generators(3, p)
    assert normalize_generators(z1, z2) == (z1, z2, 0)
    with pytest.raises(NormalizationError):
        normalize_generators(z1, z1)


@given(lie_st(3, 2, -10, 10), lie_st(3, 2, -10, 10))
def test_normalize_postconditions(x, y):
    if rational_rank([x, y]) < 2:
        with pytest.raises(NormalizationError):
            normalize_generators(x, y)
        return
    x2, y2, k = normalize_generators(x, y)
    _check_normalized(x2, y2, k)


def test_normalize_needs_subtraction():
    p = 3
    x = elementary(2, p, 1, 2) + elementary(2, p, 2, 1).scale(p)
    y = elementary(2, p, 1, 2)
    x2, y2, k = normalize_generators(x, y)
    _check_normalized(x2, y2, k)
    assert k == 1
