import itertools

import pytest
from hypothesis import given, strategies as st

from galois_lab.errors import DomainError, EnumerationError
from galois_lab.lie import LieElement, elementary, standard_generators
from galois_lab.padic import PadicContext, PadicMatrix, det_int, epsilon, identity_flat
from galois_lab.uniform import (CongruenceSubgroupLevel, FiniteMatrixGroup, congruence_kernel,
                                congruent_mod, decalage_check, exp_lattice_image, exp_mat,
                                generated_subgroup, group_level, log_mat, p_central_series, p_rank,
                                power_map_image_sizes, proper_solution_rank_check, quotient_orders)


def kernel_oracle(p, m, k, N, sl_only):
    """All matrices mod p^N that are ≡ I mod p^(k+eps) (and det 1), by brute force."""
    q = p ** N
    step = p ** (k + epsilon(p))
    ident = identity_flat(m)
    out = set()
    for e in itertools.product(range(q), repeat=m * m):
        if any((a - b) % step for a, b in zip(e, ident)):
            continue
        if sl_only and det_int([e[i * m:(i + 1) * m] for i in range(m)]) % q != 1:
            continue
        out.add(e)
    return frozenset(out)


def lie_st(p, m, N):
    s = p ** (1 + epsilon(p))
    return st.lists(st.integers(0, p ** N), min_size=m * m, max_size=m * m).map(
        lambda v: LieElement(m, p, tuple(tuple(s * v[i * m + j] for j in range(m)) for i in range(m))))


# -- exp / log ------------------------------------------------------------------

def test_exp_examples():
    p = 5
    x = elementary(2, p, 1, 1) - elementary(2, p, 2, 2)
    assert exp_mat(x, 2) == PadicMatrix.diagonal(PadicContext(5, 2), [6, 21])
    assert exp_mat(LieElement.zero(3, 7), 4).is_identity()
    ctx = PadicContext(3, 3)
    assert exp_mat(elementary(2, 3, 1, 2), 3) == PadicMatrix.from_rows(ctx, [[1, 3], [0, 1]])


def test_exp_matches_exact_rational_series():
    from fractions import Fraction
    p, N = 3, 5
    x = elementary(2, p, 1, 2).scale(2) + elementary(2, p, 2, 1) - elementary(2, p, 1, 1).scale(4)
    X = [[Fraction(v) for v in r] for r in x.mat]
    total = [[Fraction(int(i == j)) for j in range(2)] for i in range(2)]
    power = [[Fraction(int(i == j)) for j in range(2)] for i in range(2)]
    fact = 1
    for n in range(1, 40):
        power = [[sum(power[i][k] * X[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        fact *= n
        total = [[total[i][j] + power[i][j] / fact for j in range(2)] for i in range(2)]
    q = p ** N
    want = [[v.numerator * pow(v.denominator, -1, q) % q for v in r] for r in total]
    assert exp_mat(x, N).rows() == want


def test_log_examples():
    ctx = PadicContext(5, 4)
    assert log_mat(PadicMatrix.identity(ctx, 3)).is_zero()
    z = PadicMatrix.from_rows(ctx, [[1, 5], [0, 1]])
    assert log_mat(z) == elementary(2, 5, 1, 2)
    z1, _ = standard_generators(3, 5)
    assert congruent_mod(log_mat(exp_mat(z1, 4)), z1, 4)


def test_log_domain_error():
    with pytest.raises(DomainError):
        log_mat(PadicMatrix.diagonal(PadicContext(3, 3), [2, 1]))
    # p = 2 needs z ≡ I mod 4
    with pytest.raises(DomainError):
        log_mat(PadicMatrix.from_rows(PadicContext(2, 4), [[3, 0], [0, 1]]))


@pytest.mark.parametrize("p,m,N", [(3, 2, 4), (5, 3, 4), (7, 2, 6), (2, 2, 6), (3, 3, 8)])
def test_round_trip(rng, p, m, N):
    s = p ** (1 + epsilon(p))
    for _ in range(100):
        x = LieElement(m, p, tuple(tuple(s * rng.randrange(p ** N) for _ in range(m)) for _ in range(m)))
        g = exp_mat(x, N)
        assert g.congruent_to_identity(1 + epsilon(p))
        assert congruent_mod(log_mat(g), x, N)
        assert exp_mat(log_mat(g), N) == g


@given(st.sampled_from([(3, 2, 4), (5, 2, 3), (2, 2, 6)]).flatmap(
    lambda c: st.tuples(st.just(c), lie_st(*c), st.integers(0, 3))))
def test_exp_of_p_power_multiple(data):
    (p, m, N), x, j = data
    assert exp_mat(x.scale(p ** j), N) == exp_mat(x, N) ** (p ** j)


def test_group_level_offset():
    # algebra valuation 0 lands in group level 1
    z1, _ = standard_generators(3, 5)
    assert group_level(exp_mat(z1, 4)) == 1
    assert group_level(exp_mat(z1.scale(25), 4)) == 3


# -- congruence kernels and generated groups -------------------------------------

@pytest.mark.parametrize("p,m,k,N,sl,order", [
    (3, 2, 1, 2, True, 27),
    (3, 2, 2, 2, False, 1),
    (5, 2, 1, 2, False, 5 ** 4),
    (2, 2, 1, 3, True, 8),
    (3, 2, 1, 3, True, 3 ** 6),
])
def test_congruence_kernel(p, m, k, N, sl, order):
    G = congruence_kernel(CongruenceSubgroupLevel(p, m, k, N), sl_only=sl)
    assert G.order == order
    assert G.element_set == kernel_oracle(p, m, k, N, sl)
    assert all(G.verify().values())


def test_enumeration_guard(monkeypatch):
    with pytest.raises(EnumerationError) as exc:
        congruence_kernel(CongruenceSubgroupLevel(7, 3, 1, 4))
    assert exc.value.estimated_order == 7 ** 27
    monkeypatch.setenv("GALOIS_LAB_MAX_ELEMENTS", "10")
    with pytest.raises(EnumerationError):
        congruence_kernel(CongruenceSubgroupLevel(3, 2, 1, 2), sl_only=True)
    with pytest.raises(EnumerationError):
        generated_subgroup([exp_mat(z, 3) for z in standard_generators(2, 3)])


@pytest.mark.parametrize("p,m,N", [(3, 2, 2), (3, 2, 3), (5, 2, 2), (2, 2, 4)])
def test_filtration_identity(p, m, N):
    for k in range(1, N + 1):
        for sl in (False, True):
            lvl = CongruenceSubgroupLevel(p, m, k, N)
            assert exp_lattice_image(p, m, N, k, sl) == congruence_kernel(lvl, sl)


def test_generated_subgroup_examples():
    ctx = PadicContext(3, 2)
    assert generated_subgroup([PadicMatrix.identity(ctx, 2)]).order == 1
    z1, z2 = standard_generators(2, 3)
    g1, g2 = exp_mat(z1, 2), exp_mat(z2, 2)
    assert generated_subgroup([g1]).order == 3
    # at N = 2 the kernel is abelian, so two generators give only p^2 elements
    both = generated_subgroup([g1, g2])
    assert both.order == 9
    assert both.is_subset(congruence_kernel(CongruenceSubgroupLevel(3, 2, 1, 2), sl_only=True))
    # one more digit makes the bracket visible
    G3 = generated_subgroup([exp_mat(z1, 3), exp_mat(z2, 3)])
    assert G3.order == 243
    assert all(G3.verify().values())


def test_generated_subgroup_domain():
    ctx = PadicContext(3, 2)
    with pytest.raises(DomainError):
        generated_subgroup([PadicMatrix.diagonal(ctx, [2, 5])])


def test_generated_subgroup_deterministic():
    gens = [exp_mat(z, 3) for z in standard_generators(2, 3)]
    assert generated_subgroup(gens).elements == generated_subgroup(gens).elements


# -- ranks and central series ------------------------------------------------------

def test_p_rank_examples():
    K = congruence_kernel(CongruenceSubgroupLevel(3, 2, 1, 2), sl_only=True)
    assert p_rank(K) == 3
    gp = generated_subgroup([exp_mat(z, 3) for z in standard_generators(2, 3)])
    assert p_rank(gp) == 2
    trivial = FiniteMatrixGroup(PadicContext(3, 2), 2, [identity_flat(2)])
    assert p_rank(trivial) == 0


def test_p_rank_elementary_abelian_oracle():
    # p_rank of an elementary abelian group is log_p of its order
    K = congruence_kernel(CongruenceSubgroupLevel(5, 2, 1, 2))
    assert p_rank(K) == 4


def test_central_series_matches_congruence_levels():
    p, m, N = 3, 2, 3
    G = congruence_kernel(CongruenceSubgroupLevel(p, m, 1, N), sl_only=True)
    series = p_central_series(G)
    assert series.orders() == [3 ** 6, 3 ** 3, 1]
    for k in (1, 2, 3):
        assert series.term(k) == congruence_kernel(CongruenceSubgroupLevel(p, m, k, N), sl_only=True)


@pytest.mark.parametrize("p,N,dim", [(3, 3, 3), (2, 5, 3)])
def test_uniform_quotients(p, N, dim):
    G = congruence_kernel(CongruenceSubgroupLevel(p, 2, 1, N), sl_only=True)
    series = p_central_series(G)
    levels = N - 1 - epsilon(p)
    assert quotient_orders(series) == [p ** dim] * levels
    assert power_map_image_sizes(series) == [(p ** dim, p ** dim)] * (levels - 1)


def test_central_series_quotients_elementary_abelian():
    G = generated_subgroup([exp_mat(z, 3) for z in standard_generators(2, 3)])
    series = p_central_series(G)
    p, m, q = 3, 2, 27
    from galois_lab.uniform import _commutator, _power
    for A, B in zip(series.terms, series.terms[1:]):
        assert all(_power(x, p, m, q) in B for x in A.elements)
        assert all(_commutator(a, b, A.inv(a), A.inv(b), m, q) in B
                   for a in A.generators for b in A.generators)


def test_series_small_cases():
    trivial = FiniteMatrixGroup(PadicContext(3, 2), 2, [identity_flat(2)])
    assert len(p_central_series(trivial).terms) == 1
    z1, _ = standard_generators(2, 3)
    g = exp_mat(z1, 3)
    assert not (g ** 3).is_identity()
    cyc = generated_subgroup([g])
    assert cyc.order == 9
    assert len(p_central_series(cyc).terms) >= 3


# -- induced filtration -----------------------------------------------------------

def _setup(N=3):
    G = congruence_kernel(CongruenceSubgroupLevel(3, 2, 1, N), sl_only=True)
    series = p_central_series(G)
    gp = generated_subgroup([exp_mat(z, N) for z in standard_generators(2, 3)])
    return G, series, gp


def test_decalage_standard():
    G, series, gp = _setup()
    rep = decalage_check(gp, series, 1)
    assert rep.passed, rep.failures()
    assert rep.levels == [243, 27, 1]
    assert rep.cutoff == 3
    rank = proper_solution_rank_check(gp, rep.terms)
    assert rank.passed and all(a == b == 2 for _, a, b in rank.ranks)


def test_decalage_full_kernel_degenerates():
    G, series, _ = _setup()
    rep = decalage_check(G, series, 1)
    assert rep.passed
    assert rep.levels == series.orders()


def test_decalage_corrupted_series():
    G, series, gp = _setup()
    # replace G_2 by a non-normal, non-closed subset
    bogus = FiniteMatrixGroup(G.ctx, 2, [identity_flat(2), exp_mat(standard_generators(2, 3)[0], 3).entries])
    from galois_lab.uniform import CentralSeries
    bad = CentralSeries(G, [series.terms[0], bogus, series.terms[2]])
    rep = decalage_check(gp, bad, 1)
    assert not rep.passed
    assert ("subgroup", 2) in rep.failures()


def test_decalage_requires_containment():
    G, series, gp = _setup()
    with pytest.raises(ValueError):
        decalage_check(gp, series, 2)


def test_rank_check_vacuous_and_cyclic():
    K = congruence_kernel(CongruenceSubgroupLevel(3, 2, 1, 2), sl_only=True)
    assert proper_solution_rank_check(K, p_central_series(K).terms).passed
    cyc = generated_subgroup([exp_mat(standard_generators(2, 3)[0], 3)])
    rc = proper_solution_rank_check(cyc, p_central_series(cyc).terms)
    assert rc.passed
    assert all(a == b == 1 for _, a, b in rc.ranks)
