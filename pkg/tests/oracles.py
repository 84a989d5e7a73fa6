"""Independent reference computations built on sympy, used only by the tests."""

from itertools import combinations

import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from folia.polyring import Polynomial, monomials_up_to


def to_sympy(p: Polynomial, symbols):
    expr = sympy.Integer(0)
    for m, c in p.terms.items():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for s, e in zip(symbols, m):
            term *= s**e
        expr += term
    return expr


def bounded_membership(p: Polynomial, gens, bound: int) -> bool:
    """Is p = sum(q_i * g_i) with deg(q_i) <= bound - deg(g_i)?  Plain linear algebra."""
    n = p.ctx.nvars
    rows = {m: i for i, m in enumerate(monomials_up_to(n, bound))}
    columns = []
    for g in gens:
        room = bound - g.degree()
        for mono in monomials_up_to(n, room) if room >= 0 else []:
            col = [QQ(0)] * len(rows)
            for m, c in g.terms.items():
                col[rows[tuple(a + b for a, b in zip(m, mono))]] = QQ(int(c.numerator), int(c.denominator))
            columns.append(col)
    target = [QQ(0)] * len(rows)
    for m, c in p.terms.items():
        if m not in rows:
            return False
        target[rows[m]] = QQ(int(c.numerator), int(c.denominator))
    if not columns:
        return not p
    A = DomainMatrix([list(r) for r in zip(*columns)], (len(rows), len(columns)), QQ)
    Ab = DomainMatrix([list(r) + [t] for r, t in zip(zip(*columns), target)],
                      (len(rows), len(columns) + 1), QQ)
    return A.rank() == Ab.rank()


def brute_kernel(point, F, n: int, depth: int):
    """Kernel of f -> D_I(f)(point) over all words with |I| <= depth, via sympy matrices."""
    ctx = F[0].ctx
    basis = monomials_up_to(ctx.nvars, n)
    layer = [Polynomial.monomial(ctx, m) for m in basis]
    rows = [[p.evaluate(point) for p in layer]]
    layers = [layer]
    for _ in range(depth):
        nxt = []
        for imgs in layers:
            for d in F:
                nxt.append([d(p) for p in imgs])
        layers = nxt
        rows += [[p.evaluate(point) for p in imgs] for imgs in layers]
    K = ctx.domain
    M = DomainMatrix(rows, (len(rows), len(basis)), K)
    return M.rank(), len(basis)


def all_subsets(n):
    for k in range(n + 1):
        yield from combinations(range(n), k)
