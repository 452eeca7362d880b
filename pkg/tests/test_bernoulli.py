import pytest
from sympy import bernoulli, primerange

from galois_lab.arithmetic.bernoulli import METHODS, bernoulli_mod_p, irregular_indices


def exact_mod_p(p):
    out = {}
    for n in range(2, p - 2, 2):
        b = bernoulli(n)
        out[n] = int(b.p) * pow(int(b.q), -1, p) % p
    return out


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("p", list(primerange(5, 130)))
def test_against_exact_rationals(method, p):
    assert bernoulli_mod_p(p, method) == exact_mod_p(p)


@pytest.mark.parametrize("method", METHODS)
def test_examples(method):
    assert irregular_indices(37, method) == [32]
    assert irregular_indices(13, method) == []
    assert 164 in irregular_indices(257, method)
    assert irregular_indices(157, method) == [62, 110]


def test_small_primes_have_no_range():
    assert bernoulli_mod_p(3) == {}
    assert bernoulli_mod_p(2, "voronoi") == {}


def test_unknown_method():
    with pytest.raises(ValueError):
        bernoulli_mod_p(11, "magic")


def test_dual_methods_agree_to_2000():
    for p in primerange(5, 2000):
        assert bernoulli_mod_p(p, "recurrence") == bernoulli_mod_p(p, "voronoi"), p


def test_irregular_primes_below_200():
    known = [37, 59, 67, 101, 103, 131, 149, 157]
    assert [p for p in primerange(5, 200) if irregular_indices(p, "voronoi")] == known
