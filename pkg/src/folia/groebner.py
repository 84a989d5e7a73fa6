"""Buchberger's algorithm and the ideal computations built on it."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .polyring import (
    ORDER_KEYS,
    Polynomial,
    VariableContext,
    common_context,
    monomial_div,
    monomial_divides,
    monomial_lcm,
    monomials_up_to,
)

MAX_DIMENSION_VARS = 12


class MissingBasis(RuntimeError):
    pass


class UnsupportedSize(ValueError):
    pass


@dataclass(frozen=True)
class MonomialOrder:
    tag: str = "grevlex"

    def __post_init__(self):
        if self.tag not in ORDER_KEYS:
            raise ValueError(f"unknown monomial order {self.tag!r}")

    @property
    def key(self):
        return ORDER_KEYS[self.tag]


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


@dataclass(frozen=True)
class Ideal:
    """Generators plus, once computed, a reduced Groebner basis."""

    ctx: VariableContext
    generators: tuple
    basis: tuple | None = None
    order: MonomialOrder | None = None

    @classmethod
    def of(cls, gens: Sequence[Polynomial], ctx: VariableContext | None = None) -> Ideal:
        gens = tuple(gens)
        found = common_context(gens)
        if ctx is None:
            if found is None:
                raise ValueError("an ideal with no generators needs an explicit context")
            ctx = found
        elif found is not None:
            ctx.check(found)
        return cls(ctx, gens)

    def is_unit(self) -> bool:
        b = self.require_basis()
        return len(b) == 1 and b[0].is_constant()

    def require_basis(self) -> tuple:
        if self.basis is None:
            raise MissingBasis("ideal has no cached basis; call groebner_basis() first")
        return self.basis

    def __str__(self):
        polys = self.basis if self.basis is not None else self.generators
        return "(" + ", ".join(map(str, polys)) + ")"


@dataclass(frozen=True)
class DimensionReport:
    dimension: int
    witness: tuple = field(default=())


def _lead(p: Polynomial, key):
    m = max(p.terms, key=key)
    return m, p.terms[m]


def reduce_full(p: Polynomial, basis: Sequence[Polynomial], key, leads=None) -> Polynomial:
    """Complete multivariate division remainder of p by basis."""
    if leads is None:
        leads = [_lead(g, key) for g in basis]
    terms = dict(p.terms)
    rem = {}
    while terms:
        m = max(terms, key=key)
        c = terms[m]
        for g, (lm, lc) in zip(basis, leads):
            if monomial_divides(lm, m):
                q = monomial_div(m, lm)
                f = c / lc
                for gm, gc in g.terms.items():
                    t = tuple(a + b for a, b in zip(gm, q))
                    s = terms.get(t)
                    s = -f * gc if s is None else s - f * gc
                    if s:
                        terms[t] = s
                    else:
                        terms.pop(t, None)
                break
        else:
            rem[m] = c
            del terms[m]
    return Polynomial._raw(p.ctx, rem)


def _spoly(f: Polynomial, g: Polynomial, key) -> Polynomial:
    fm, fc = _lead(f, key)
    gm, gc = _lead(g, key)
    lcm = monomial_lcm(fm, gm)
    return f.mul_term(monomial_div(lcm, fm), f.ctx.one / fc) - g.mul_term(
        monomial_div(lcm, gm), g.ctx.one / gc
    )


def _interreduce(polys: list[Polynomial], key) -> list[Polynomial]:
    """Reduced basis from any Groebner basis: minimalize, then tail-reduce."""
    polys = [p.monic(key) for p in polys if p]
    polys.sort(key=lambda p: key(p.leading_monomial(key)))
    minimal: list[Polynomial] = []
    for p in polys:
        lm = p.leading_monomial(key)
        if not any(monomial_divides(q.leading_monomial(key), lm) for q in minimal):
            minimal = [q for q in minimal if not monomial_divides(lm, q.leading_monomial(key))]
            minimal.append(p)
    out = []
    for i, p in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        lm, lc = _lead(p, key)
        tail = Polynomial._raw(p.ctx, {m: c for m, c in p.terms.items() if m != lm})
        tail = reduce_full(tail, others, key) if others else tail
        out.append(Polynomial._raw(p.ctx, {lm: lc, **tail.terms}))
    out.sort(key=lambda p: key(p.leading_monomial(key)), reverse=True)
    return out


def buchberger(gens: Sequence[Polynomial], key) -> list[Polynomial]:
    """Buchberger with the coprime and chain criteria, normal pair selection."""
    G: list[Polynomial] = []
    leads: list = []
    pairs: set[tuple[int, int]] = set()

    def add(p):
        p = p.monic(key)
        G.append(p)
        leads.append(_lead(p, key))
        j = len(G) - 1
        for i in range(j):
            pairs.add((i, j))

    for g in sorted((g for g in gens if g), key=lambda p: key(p.leading_monomial(key))):
        r = reduce_full(g, G, key, leads) if G else g
        if r:
            if r.is_constant():
                return [Polynomial.constant(r.ctx, 1)]
            add(r)

    while pairs:
        i, j = min(pairs, key=lambda ij: (key(monomial_lcm(leads[ij[0]][0], leads[ij[1]][0])), ij))
        pairs.discard((i, j))
        mi, mj = leads[i][0], leads[j][0]
        lcm = monomial_lcm(mi, mj)
        if all(a == 0 or b == 0 for a, b in zip(mi, mj)):
            continue
        if _chain_criterion(i, j, lcm, leads, pairs):
            continue
        r = reduce_full(_spoly(G[i], G[j], key), G, key, leads)
        if r:
            if r.is_constant():
                return [Polynomial.constant(r.ctx, 1)]
            add(r)
    return G


def _chain_criterion(i, j, lcm, leads, pairs) -> bool:
    for k, (mk, _) in enumerate(leads):
        if k in (i, j) or not monomial_divides(mk, lcm):
            continue
        if (min(i, k), max(i, k)) in pairs or (min(j, k), max(j, k)) in pairs:
            continue
        return True
    return False


def groebner_basis(I: Ideal, order: MonomialOrder = GREVLEX) -> Ideal:
    if I.basis is not None and I.order == order:
        return I
    key = order.key
    G = _interreduce(buchberger(I.generators, key), key)
    return Ideal(I.ctx, I.generators, tuple(G), order)


def normal_form(p: Polynomial, I: Ideal) -> Polynomial:
    basis = I.require_basis()
    I.ctx.check(p.ctx)
    if not basis:
        return p
    return reduce_full(p, basis, I.order.key)


def ideal_membership(p: Polynomial, I: Ideal) -> bool:
    if I.basis is None:
        I = groebner_basis(I)
    return not normal_form(p, I)


def leading_monomials(I: Ideal) -> list:
    key = I.order.key
    return [g.leading_monomial(key) for g in I.require_basis()]


def ideal_dimension(I: Ideal) -> DimensionReport:
    n = I.ctx.nvars
    if n > MAX_DIMENSION_VARS:
        raise UnsupportedSize(f"dimension search is limited to {MAX_DIMENSION_VARS} variables, got {n}")
    I = groebner_basis(I) if I.basis is None else I
    if I.is_unit():
        return DimensionReport(-1, ())
    leads = leading_monomials(I)
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in leads]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = set(subset)
            if all(not sup <= s for sup in supports):
                return DimensionReport(size, tuple(I.ctx.variables[i] for i in subset))
    return DimensionReport(0, ())


def standard_monomials(I: Ideal, n: int) -> list:
    """Monomials of degree <= n outside the grevlex leading-term ideal."""
    if I.basis is None or I.order != GREVLEX:
        I = groebner_basis(Ideal(I.ctx, I.generators), GREVLEX)
    leads = leading_monomials(I)
    return [m for m in monomials_up_to(I.ctx.nvars, n)
            if not any(monomial_divides(l, m) for l in leads)]


def hilbert_h(I: Ideal, n: int) -> int:
    if n < 0:
        raise ValueError("degree must be non-negative")
    return len(standard_monomials(I, n))


def divide(p: Polynomial, divisors: Sequence[Polynomial], order: MonomialOrder = GREVLEX):
    """Multivariate division: (quotients, remainder) with p = sum(q_i*g_i) + r."""
    key = order.key
    ctx = p.ctx
    leads = [_lead(g, key) for g in divisors]
    quots = [dict() for _ in divisors]
    terms = dict(p.terms)
    rem = {}
    while terms:
        m = max(terms, key=key)
        c = terms[m]
        for k, (g, (lm, lc)) in enumerate(zip(divisors, leads)):
            if monomial_divides(lm, m):
                q = monomial_div(m, lm)
                f = c / lc
                quots[k][q] = quots[k].get(q, ctx.zero) + f
                for gm, gc in g.terms.items():
                    t = tuple(a + b for a, b in zip(gm, q))
                    s = terms.get(t)
                    s = -f * gc if s is None else s - f * gc
                    if s:
                        terms[t] = s
                    else:
                        terms.pop(t, None)
                break
        else:
            rem[m] = c
            del terms[m]
    return [Polynomial(ctx, q) for q in quots], Polynomial._raw(ctx, rem)
