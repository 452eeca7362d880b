"""Finite-precision shadows of uniform pro-p matrix groups.

exp/log between gl_m and Gl_m^1, explicit enumeration of congruence kernels
and generated subgroups of GL_m(Z/p^N), the p-descending central series, and
the finite-level ingredients of the lifting argument (p-ranks, the induced
filtration G'_[n] = G' ∩ G_(n+k-1)).

Everything group-theoretic works on row-major residue tuples; that tuple is
the canonical element key.  Enumeration refuses to go past
``max_elements()`` (default 10**6, env ``GALOIS_LAB_MAX_ELEMENTS``).

The finite-precision version of "the G'_[n] intersect trivially" is checked
as "some G'_[n] is trivial at precision N"; the infinite statement is not
claimed.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DomainError, EnumerationError
from .lie import LieElement
from .padic import (PadicContext, PadicMatrix, det_int, epsilon, identity_flat, inverse_flat,
                    mul_flat, val_p, val_p_factorial)

DEFAULT_MAX_ELEMENTS = 10 ** 6

Flat = tuple[int, ...]


def max_elements() -> int:
    env = os.environ.get("GALOIS_LAB_MAX_ELEMENTS")
    return int(env) if env else DEFAULT_MAX_ELEMENTS


# -- exp / log -----------------------------------------------------------------

def exp_terms(p: int, N: int) -> int:
    """Number of series terms (beyond n = 0) that can matter mod p^N.

    v_p(x^n / n!) >= n(1+eps) - (n-1)/(p-1) for x in gl_m; the bound is
    increasing in n, so the first n where it reaches N works for all later
    n.  One guard term is added.
    """
    eps = epsilon(p)
    n = 1
    while n * (1 + eps) * (p - 1) - (n - 1) < N * (p - 1):
        n += 1
    return n + 1


def log_terms(p: int, N: int) -> int:
    """Series length for log: v_p((z-1)^n / n) >= n(1+eps) - floor(log_p n)."""
    eps = epsilon(p)
    n = 1
    while n * (1 + eps) - _floor_log(n, p) < N:
        n += 1
    return n + 1


def _floor_log(n: int, p: int) -> int:
    e = 0
    while p ** (e + 1) <= n:
        e += 1
    return e


def exp_mat(x: LieElement, N: int) -> PadicMatrix:
    """exp(x) = sum x^n / n! reduced mod p^N."""
    p, m = x.p, x.m
    if p == 2 and N < 2:
        raise DomainError("p = 2 needs precision N >= 2")
    ctx = PadicContext(p, N)
    T = exp_terms(p, N)
    headroom = val_p_factorial(T, p)
    Q = p ** (N + headroom)
    q = ctx.modulus
    xf = tuple(a % Q for a in x.flat())
    power = identity_flat(m)
    total = list(power)
    fact = 1
    for n in range(1, T + 1):
        power = mul_flat(power, xf, m, Q)
        fact *= n
        v = val_p(fact, p)
        unit_inv = pow(fact // p ** v, -1, q)
        d = p ** v
        for i, a in enumerate(power):
            if a % d:
                raise DomainError("x is outside the convergence domain of exp")
            total[i] += (a // d) * unit_inv
    return PadicMatrix(ctx, m, tuple(total))


def log_mat(z: PadicMatrix) -> LieElement:
    """log(z) = sum (-1)^(n+1) (z-1)^n / n, as a LieElement with entries in [0, p^N)."""
    ctx, m = z.ctx, z.m
    p, N = ctx.p, ctx.N
    eps = epsilon(p)
    if N < 1 + eps or not z.congruent_to_identity(1 + eps):
        raise DomainError(f"log needs z ≡ I mod p^{1 + eps}")
    T = log_terms(p, N)
    headroom = _floor_log(T, p)
    Q = p ** (N + headroom)
    q = ctx.modulus
    y = tuple((a - b) % Q for a, b in zip(z.entries, identity_flat(m)))
    power = identity_flat(m)
    total = [0] * (m * m)
    for n in range(1, T + 1):
        power = mul_flat(power, y, m, Q)
        v = val_p(n, p)
        d = p ** v
        coeff = pow(n // d, -1, q) * (1 if n % 2 else -1)
        for i, a in enumerate(power):
            if a % d:
                raise DomainError("log numerator not divisible at working precision")
            total[i] += (a // d) * coeff
    return LieElement(m, p, tuple(tuple(total[i * m + j] % q for j in range(m)) for i in range(m)))


def congruent_mod(x: LieElement, y: LieElement, N: int) -> bool:
    q = x.p ** N
    return all((a - b) % q == 0 for a, b in zip(x.flat(), y.flat()))


def group_level(g: PadicMatrix) -> int:
    """Largest k with g in Gl_m^(k), i.e. g ≡ I mod p^(k+eps); capped at N - eps."""
    eps = epsilon(g.ctx.p)
    k = 0
    while k + 1 + eps <= g.ctx.N and g.congruent_to_identity(k + 1 + eps):
        k += 1
    return k


# -- finite groups -----------------------------------------------------------------

def _commutator(a: Flat, b: Flat, ainv: Flat, binv: Flat, m: int, q: int) -> Flat:
    return mul_flat(mul_flat(ainv, binv, m, q), mul_flat(a, b, m, q), m, q)


def _power(a: Flat, e: int, m: int, q: int) -> Flat:
    result = identity_flat(m)
    base = a
    while e:
        if e & 1:
            result = mul_flat(result, base, m, q)
        base = mul_flat(base, base, m, q)
        e >>= 1
    return result


class FiniteMatrixGroup:
    """An explicitly enumerated finite subgroup of GL_m(Z/p^N).

    ``elements`` is a tuple of row-major residue tuples in a deterministic
    order (BFS order for generated groups).  ``generators`` is computed
    greedily on demand when the group was not built from generators.
    """

    def __init__(self, ctx: PadicContext, m: int, elements: Sequence[Flat],
                 generators: Sequence[Flat] | None = None):
        self.ctx = ctx
        self.m = m
        self.elements = tuple(elements)
        self.element_set = frozenset(self.elements)
        if generators is not None:
            self.__dict__["generators"] = tuple(generators)

    def __len__(self):
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        if isinstance(g, PadicMatrix):
            g = g.entries
        return g in self.element_set

    def __eq__(self, other):
        if not isinstance(other, FiniteMatrixGroup):
            return NotImplemented
        return (self.ctx, self.m, self.element_set) == (other.ctx, other.m, other.element_set)

    def __hash__(self):
        return hash((self.ctx, self.m, self.element_set))

    def __repr__(self):
        return f"FiniteMatrixGroup(p={self.ctx.p}, N={self.ctx.N}, m={self.m}, order={self.order})"

    def is_trivial(self) -> bool:
        return self.order == 1

    def matrices(self) -> list[PadicMatrix]:
        return [PadicMatrix(self.ctx, self.m, e) for e in self.elements]

    def mul(self, a: Flat, b: Flat) -> Flat:
        return mul_flat(a, b, self.m, self.ctx.modulus)

    def inv(self, a: Flat) -> Flat:
        return inverse_flat(a, self.m, self.ctx.p, self.ctx.modulus)

    @cached_property
    def generators(self) -> tuple[Flat, ...]:
        """Greedy generating set: scan elements, keep those outside the span so far."""
        gens: list[Flat] = []
        span = [identity_flat(self.m)]
        current = set(span)
        for e in self.elements:
            if e not in current:
                gens.append(e)
                span = _closure(self.ctx, self.m, gens, start=span)
                current = set(span)
                if len(current) == self.order:
                    break
        return tuple(gens)

    def is_subset(self, other: "FiniteMatrixGroup") -> bool:
        return self.element_set <= other.element_set

    def intersection(self, other: "FiniteMatrixGroup") -> "FiniteMatrixGroup":
        return FiniteMatrixGroup(self.ctx, self.m,
                                 [e for e in self.elements if e in other.element_set])

    def verify(self) -> dict[str, bool]:
        """Post-enumeration invariants; a generated finite set closed under
        right multiplication by generators that contains the identity is a group."""
        p, eps = self.ctx.p, epsilon(self.ctx.p)
        ident = identity_flat(self.m)
        checks = {
            "contains_identity": ident in self.element_set,
            "closed_under_generators": all(
                self.mul(e, g) in self.element_set for e in self.elements for g in self.generators),
            "closed_under_inverse": all(self.inv(g) in self.element_set for g in self.generators),
            "pro_p_level": all(
                PadicMatrix(self.ctx, self.m, e).congruent_to_identity(1 + eps) for e in self.elements),
            "order_is_p_power": _is_power_of(self.order, p),
        }
        return checks


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _log_p_exact(n: int, p: int) -> int:
    d = 0
    while n % p == 0:
        n //= p
        d += 1
    if n != 1:
        raise ArithmeticError("quotient order is not a power of p")
    return d


def _closure(ctx: PadicContext, m: int, gens: Sequence[Flat],
             start: Iterable[Flat] | None = None, limit: int | None = None) -> list[Flat]:
    """BFS closure under right multiplication by ``gens``; deterministic order."""
    limit = max_elements() if limit is None else limit
    q = ctx.modulus
    if start is None:
        order = [identity_flat(m)]
    else:
        order = list(start)
    seen = set(order)
    i = 0
    while i < len(order):
        e = order[i]
        for g in gens:
            h = mul_flat(e, g, m, q)
            if h not in seen:
                seen.add(h)
                order.append(h)
                if len(order) > limit:
                    raise EnumerationError(
                        f"subgroup closure exceeded the element bound {limit}",
                        estimated_order=len(order))
        i += 1
    return order


def _subgroup_from(ctx: PadicContext, m: int, candidates: Iterable[Flat],
                   base: Sequence[Flat] = ()) -> FiniteMatrixGroup:
    """Subgroup generated by ``base`` and ``candidates``, adding only new generators."""
    gens = list(base)
    elements = _closure(ctx, m, gens)
    current = set(elements)
    for c in candidates:
        if c not in current:
            gens.append(c)
            elements = _closure(ctx, m, gens, start=elements)
            current = set(elements)
    return FiniteMatrixGroup(ctx, m, elements, gens)


def _normal_closure(H: FiniteMatrixGroup, G: FiniteMatrixGroup) -> FiniteMatrixGroup:
    while True:
        extra = []
        for g in G.generators:
            ginv = G.inv(g)
            for h in H.generators:
                c = G.mul(G.mul(g, h), ginv)
                if c not in H.element_set and c not in extra:
                    extra.append(c)
        if not extra:
            return H
        H = _subgroup_from(H.ctx, H.m, extra, base=H.generators)


def _as_flat(g, ctx: PadicContext) -> Flat:
    if isinstance(g, PadicMatrix):
        if g.ctx != ctx:
            raise ValueError(f"generator over {g.ctx} does not match {ctx}")
        return g.entries
    return tuple(int(a) % ctx.modulus for a in g)


def generated_subgroup(gens: Sequence[PadicMatrix], ctx: PadicContext | None = None) -> FiniteMatrixGroup:
    """The subgroup of GL_m(Z/p^N) generated by ``gens`` (each ≡ I mod p^(1+eps))."""
    if not gens:
        raise ValueError("need at least one generator")
    ctx = ctx or gens[0].ctx
    m = gens[0].m
    eps = epsilon(ctx.p)
    flat = []
    for g in gens:
        if not PadicMatrix(ctx, m, _as_flat(g, ctx)).congruent_to_identity(1 + eps):
            raise DomainError("generators must be ≡ I mod p^(1+eps)")
        f = _as_flat(g, ctx)
        if f not in flat:
            flat.append(f)
    elements = _closure(ctx, m, flat)
    return FiniteMatrixGroup(ctx, m, elements, flat)


@dataclass(frozen=True)
class CongruenceSubgroupLevel:
    """ker(GL_m(Z/p^N) -> GL_m(Z/p^(k+eps)))."""

    p: int
    m: int
    k: int
    N: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("level k must be >= 1")
        if self.m < 1:
            raise ValueError("m must be >= 1")

    def estimated_order(self, sl_only: bool) -> int:
        free = max(self.N - self.k - epsilon(self.p), 0)
        dim = self.m * self.m - (1 if sl_only else 0)
        return self.p ** (free * dim)


def congruence_kernel(level: CongruenceSubgroupLevel, sl_only: bool = False,
                      limit: int | None = None) -> FiniteMatrixGroup:
    """Enumerate Gl_m^(k) (or Sl_m^(k)) at precision N.

    For the SL variant the (m, m) entry is solved from det = 1; the cofactor
    is a unit because every candidate is ≡ I mod p.
    """
    p, m, k, N = level.p, level.m, level.k, level.N
    limit = max_elements() if limit is None else limit
    est = level.estimated_order(sl_only)
    if est > limit:
        raise EnumerationError(
            f"enumeration infeasible: estimated order {est} exceeds bound {limit}",
            estimated_order=est)
    ctx = PadicContext(p, N)
    q = ctx.modulus
    step = p ** (k + epsilon(p))
    ident = identity_flat(m)
    if step >= q:
        return FiniteMatrixGroup(ctx, m, [ident], [])
    ranges = [range(0, q, step)] * (m * m - (1 if sl_only else 0))
    elements = []
    for offs in itertools.product(*ranges):
        if sl_only:
            e = [ident[i] + offs[i] for i in range(m * m - 1)] + [1]
            rows = [e[i * m:(i + 1) * m] for i in range(m)]
            base = det_int(rows)
            minor = det_int([r[:m - 1] for r in rows[:m - 1]])
            # det is affine in the last entry with slope = minor
            rest = base - minor
            e[-1] = (1 - rest) * pow(minor, -1, q) % q
            elements.append(tuple(a % q for a in e))
        else:
            elements.append(tuple((ident[i] + offs[i]) % q for i in range(m * m)))
    return FiniteMatrixGroup(ctx, m, elements)


def exp_lattice_image(p: int, m: int, N: int, k: int, sl_only: bool = False) -> FiniteMatrixGroup:
    """The set exp(p^(k-1) gl_m) (or sl_m) at precision N, enumerated directly."""
    ctx = PadicContext(p, N)
    q = ctx.modulus
    step = p ** (k + epsilon(p))
    free = m * m - (1 if sl_only else 0)
    est = (q // step if step < q else 1) ** free
    if est > max_elements():
        raise EnumerationError(f"enumeration infeasible: {est} algebra elements", estimated_order=est)
    if step >= q:
        return FiniteMatrixGroup(ctx, m, [identity_flat(m)], [])
    seen = {}
    for offs in itertools.product(range(0, q, step), repeat=free):
        vals = list(offs)
        if sl_only:
            vals.append(-sum(vals[i * m + i] for i in range(m - 1)))
        x = LieElement(m, p, tuple(tuple(vals[i * m:(i + 1) * m]) for i in range(m)))
        seen.setdefault(exp_mat(x, N).entries, None)
    return FiniteMatrixGroup(ctx, m, list(seen))


# -- p-descending central series and ranks -------------------------------------

def frattini(G: FiniteMatrixGroup) -> FiniteMatrixGroup:
    """G^p [G, G]."""
    m, q = G.m, G.ctx.modulus
    gens = G.generators
    invs = [G.inv(g) for g in gens]
    cands = [_power(x, G.ctx.p, m, q) for x in G.elements]
    for (a, ai), (b, bi) in itertools.combinations(zip(gens, invs), 2):
        cands.append(_commutator(a, b, ai, bi, m, q))
    H = _subgroup_from(G.ctx, m, cands)
    return _normal_closure(H, G)


def quotient_rank(G: FiniteMatrixGroup, N: FiniteMatrixGroup | None = None) -> int:
    """d_p(G/N) = log_p |G| / |Phi(G) N| for N normal in G (N = 1 by default)."""
    if G.is_trivial():
        return 0
    phi = frattini(G)
    if N is not None and not N.is_trivial():
        phi = _subgroup_from(G.ctx, G.m, N.generators, base=phi.generators)
    if G.order % phi.order:
        raise ArithmeticError("subgroup order does not divide group order")
    return _log_p_exact(G.order // phi.order, G.ctx.p)


def p_rank(group: FiniteMatrixGroup) -> int:
    """dim over F_p of G / G^p[G, G]."""
    return quotient_rank(group)


@dataclass
class CentralSeries:
    group: FiniteMatrixGroup
    terms: list[FiniteMatrixGroup]

    def orders(self) -> list[int]:
        return [t.order for t in self.terms]

    def term(self, n: int) -> FiniteMatrixGroup:
        """G_n with 1-based index; trivial past the end."""
        if n <= len(self.terms):
            return self.terms[n - 1]
        return self.terms[-1]


def next_central_term(G: FiniteMatrixGroup, Gn: FiniteMatrixGroup) -> FiniteMatrixGroup:
    """G_n^p [G, G_n], as a subgroup closure followed by normal closure in G."""
    m, q, p = G.m, G.ctx.modulus, G.ctx.p
    cands = [_power(x, p, m, q) for x in Gn.elements]
    for g in G.generators:
        gi = G.inv(g)
        for x in Gn.generators:
            cands.append(_commutator(g, x, gi, G.inv(x), m, q))
    H = _subgroup_from(G.ctx, m, cands)
    return _normal_closure(H, G)


def p_central_series(group: FiniteMatrixGroup) -> CentralSeries:
    terms = [group]
    while not terms[-1].is_trivial():
        terms.append(next_central_term(group, terms[-1]))
    return CentralSeries(group, terms)


def quotient_orders(series: CentralSeries) -> list[int]:
    return [a.order // b.order for a, b in zip(series.terms, series.terms[1:])]


def coset_key(x: Flat, H: FiniteMatrixGroup) -> Flat:
    return min(H.mul(x, h) for h in H.elements)


def power_map_image_sizes(series: CentralSeries) -> list[tuple[int, int]]:
    """For each n with G_(n+2) defined: (|G_n/G_(n+1)|, |image of x -> x^p in G_(n+1)/G_(n+2)|).

    Equal numbers mean the p-power map between consecutive quotients is
    injective (hence bijective when the quotient orders agree).
    """
    out = []
    T = series.terms
    p, m, q = series.group.ctx.p, series.group.m, series.group.ctx.modulus
    for n in range(len(T) - 2):
        Gn, Gn1, Gn2 = T[n], T[n + 1], T[n + 2]
        reps = {coset_key(x, Gn1): x for x in Gn.elements}
        images = {coset_key(_power(x, p, m, q), Gn2) for x in reps.values()}
        out.append((len(reps), len(images)))
    return out


# -- induced filtration on a subgroup ----------------------------------------------

@dataclass
class DecalageReport:
    k: int
    levels: list[int]
    checks: list[tuple[str, int, bool]] = field(default_factory=list)
    cutoff: int | None = None
    terms: list[FiniteMatrixGroup] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks)

    def failures(self) -> list[tuple[str, int]]:
        return [(name, n) for name, n, ok in self.checks if not ok]


def induced_filtration(gprime: FiniteMatrixGroup, ambient: CentralSeries, k: int) -> list[FiniteMatrixGroup]:
    """G'_[n] = G' ∩ G_(n+k-1), for n = 1 .. until the ambient series ends."""
    out = []
    n = 1
    while n + k - 1 <= len(ambient.terms):
        out.append(gprime.intersection(ambient.terms[n + k - 2]))
        n += 1
    return out


def decalage_check(gprime: FiniteMatrixGroup, ambient_series: CentralSeries, k: int) -> DecalageReport:
    """Verify the induced filtration: normal, elementary abelian steps, trivial action, trivial floor."""
    if k < 1 or k > len(ambient_series.terms):
        raise ValueError(f"level k={k} outside the ambient series")
    if not gprime.is_subset(ambient_series.terms[k - 1]):
        raise ValueError(f"G' is not contained in the ambient term G_{k}")
    p, m, q = gprime.ctx.p, gprime.m, gprime.ctx.modulus
    terms = induced_filtration(gprime, ambient_series, k)
    report = DecalageReport(k=k, levels=[t.order for t in terms], terms=terms)
    add = report.checks.append
    for n, T in enumerate(terms, start=1):
        closed = len(T) > 0 and len(_closure(T.ctx, m, list(T.elements), start=T.elements)) == len(T)
        add(("subgroup", n, closed))
        if not closed:
            continue
        add(("normal", n, all(
            gprime.mul(gprime.mul(g, h), gprime.inv(g)) in T.element_set
            for g in gprime.generators for h in T.generators)))
    for n in range(1, len(terms)):
        A, B = terms[n - 1], terms[n]
        add(("nested", n, B.is_subset(A)))
        if not (_ok(report, "subgroup", n) and _ok(report, "subgroup", n + 1)):
            continue
        elem = all(_power(x, p, m, q) in B.element_set for x in A.elements)
        ab = all(_commutator(a, b, A.inv(a), A.inv(b), m, q) in B.element_set
                 for a, b in itertools.combinations(A.generators, 2))
        add(("elementary_abelian", n, elem and ab))
        add(("trivial_action", n, all(
            _commutator(g, x, gprime.inv(g), A.inv(x), m, q) in B.element_set
            for g in gprime.generators for x in A.elements)))
    floor = next((n for n, T in enumerate(terms, start=1) if T.is_trivial()), None)
    report.cutoff = floor
    add(("trivial_floor", len(terms), floor is not None))
    return report


def _ok(report: DecalageReport, name: str, n: int) -> bool:
    return all(ok for nm, i, ok in report.checks if nm == name and i == n)


@dataclass
class RankCheck:
    ranks: list[tuple[int, int, int]]  # (n, d_p(G'/G'_[n]), d_p(G'/G'_[n+1]))

    @property
    def passed(self) -> bool:
        return all(a == b for _, a, b in self.ranks)

    def __bool__(self):
        return self.passed


def proper_solution_rank_check(gprime: FiniteMatrixGroup, series: Sequence[FiniteMatrixGroup]) -> RankCheck:
    """d_p(G'/G'_[n+1]) == d_p(G'/G'_[n]) for every computable n >= 2.

    ``series`` is the induced filtration [G'_[1], G'_[2], ...] (e.g. the
    ``terms`` of a DecalageReport).  Past the last listed term the filtration
    is taken to be trivial.
    """
    trivial = FiniteMatrixGroup(gprime.ctx, gprime.m, [identity_flat(gprime.m)], [])
    levels = list(series)
    out = []
    n = 2
    while n <= len(levels):
        upper = levels[n - 1]
        lower = levels[n] if n < len(levels) else trivial
        out.append((n, quotient_rank(gprime, upper), quotient_rank(gprime, lower)))
        if upper.is_trivial():
            break
        n += 1
    return RankCheck(out)
