"""Extactic polynomials, Darboux polynomials and rational first integrals.

The cofactor search is restricted to constant cofactors of fields that
map F_deg into itself; this covers diagonal linear fields such as
p*x d/dx + q*y d/dy, where x and y are Darboux with cofactors p and q and
x^q / y^p is a first integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from sympy import QQ, divisors
from sympy.polys.rings import ring

from .foliation import Derivation, FoliationSpec
from .groebner import UnsupportedSize, divide
from .linalg import charpoly, det_by_minors, nullspace
from .polyring import Polynomial, monomials_up_to

MAX_EXTACTIC_SIZE = 10
MAX_COFACTOR_DIM = 60


@dataclass(frozen=True)
class DarbouxPair:
    f: Polynomial
    cofactor: Polynomial

    def holds_for(self, d: Derivation) -> bool:
        return d(self.f) - self.cofactor * self.f == 0


@dataclass(frozen=True)
class RationalFirstIntegral:
    numerator: Polynomial
    denominator: Polynomial
    factors: tuple = ()  # (polynomial, integer exponent) pairs it was built from

    def __post_init__(self):
        if not self.denominator:
            raise ZeroDivisionError("first integral with zero denominator")

    def degree(self) -> int:
        return max(self.numerator.degree(), self.denominator.degree())

    def __str__(self):
        num, den = str(self.numerator), str(self.denominator)
        if self.denominator == 1:
            return num
        if len(self.numerator.terms) > 1:
            num = f"({num})"
        if len(self.denominator.terms) > 1:
            den = f"({den})"
        return f"{num}/{den}"


def extactic_polynomial(d: Derivation, n: int) -> Polynomial:
    """det(d^i(v_j)) over the monomials v_j of degree <= n, descending grevlex."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    ctx = d.ctx
    basis = [Polynomial.monomial(ctx, m) for m in monomials_up_to(ctx.nvars, n)]
    m = len(basis)
    if m > MAX_EXTACTIC_SIZE:
        raise UnsupportedSize(f"extactic matrix would be {m}x{m}; limit is {MAX_EXTACTIC_SIZE}")
    rows = [basis]
    for _ in range(1, m):
        rows.append([d(p) for p in rows[-1]])
    return det_by_minors(rows, Polynomial.constant(ctx, 1), Polynomial.zero(ctx))


def darboux_cofactor_check(f: Polynomial, d: Derivation) -> Polynomial | None:
    if not f:
        raise ValueError("Darboux check needs a non-zero polynomial")
    (q,), r = divide(d(f), [f])
    return None if r else q


def _rational(ctx, c) -> Fraction:
    return ctx.to_rational(c)


def rational_roots(coeffs: Sequence[Fraction]) -> tuple[list[Fraction], int]:
    """Distinct rational roots (ascending) and the degree left after deflating them.

    ``coeffs`` runs from the highest degree down.
    """
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    roots: list[Fraction] = []
    if len(coeffs) <= 1:
        return roots, 0
    if coeffs[-1] == 0:
        roots.append(Fraction(0))
        while coeffs[-1] == 0:
            coeffs.pop()
    scale = lcm(*(c.denominator for c in coeffs))
    ints = [int(c * scale) for c in coeffs]
    g = 0
    for a in ints:
        g = gcd(g, a)
    ints = [a // g for a in ints]
    for p in divisors(abs(ints[-1])):
        for q in divisors(abs(ints[0])):
            if gcd(p, q) != 1:
                continue
            for cand in (Fraction(p, q), Fraction(-p, q)):
                hit = False
                while len(ints) > 1:
                    quot, rem = _synthetic(ints, cand)
                    if rem != 0:
                        break
                    hit = True
                    ints = quot
                if hit:
                    roots.append(cand)
    return sorted(roots), len(ints) - 1


def _synthetic(coeffs, r: Fraction):
    out = [Fraction(coeffs[0])]
    for c in coeffs[1:]:
        out.append(out[-1] * r + c)
    rem = out.pop()
    # keep integer coefficients after deflating by (q*t - p)
    q = r.denominator
    scaled = [c * q for c in out]
    if all(c.denominator == 1 for c in scaled):
        g = 0
        for c in scaled:
            g = gcd(g, int(c))
        return [int(c) // (g or 1) for c in scaled], rem
    return out, rem


def constant_cofactor_search(d: Derivation, deg: int, notes: list | None = None) -> list[DarbouxPair]:
    """Darboux polynomials of degree <= deg with constant cofactors.

    Flags reasons for an empty or partial answer in ``notes``.
    """
    if deg < 1:
        raise ValueError("degree must be at least 1")
    notes = notes if notes is not None else []
    ctx = d.ctx
    monos = monomials_up_to(ctx.nvars, deg)
    dim = len(monos)
    if dim > MAX_COFACTOR_DIM:
        raise UnsupportedSize(f"dim F_{deg} = {dim} exceeds {MAX_COFACTOR_DIM}")
    if not all(a.is_rational() for a in d.components):
        notes.append("field has parameter coefficients; cofactor search skipped")
        return []
    images = [d(Polynomial.monomial(ctx, m)) for m in monos]
    if any(p.degree() > deg for p in images):
        notes.append(f"field does not map F_{deg} into itself; cofactor search skipped")
        return []
    index = {m: j for j, m in enumerate(monos)}
    K = ctx.domain
    T = [[K.zero] * dim for _ in range(dim)]
    for j, p in enumerate(images):
        for m, c in p.terms.items():
            T[index[m]][j] = c
    poly = [_rational(ctx, c) for c in charpoly(T, K)]
    roots, leftover = rational_roots(poly)
    if leftover:
        notes.append("non-rational spectrum present")
    pairs = []
    for lam in roots:
        lam_k = ctx.scalar(lam)
        shifted = [[T[i][j] - (lam_k if i == j else K.zero) for j in range(dim)] for i in range(dim)]
        for vec in nullspace(shifted, dim, K):
            f = Polynomial(ctx, {monos[j]: v for j, v in enumerate(vec) if v})
            if f.is_constant():
                continue
            pair = DarbouxPair(f, Polynomial.constant(ctx, lam))
            assert pair.holds_for(d)
            pairs.append(pair)
    return pairs


def _cofactor_matrix(cofactors: Sequence[Sequence[Polynomial]]) -> list[list]:
    """Rows indexed by (generator, monomial), one column per Darboux polynomial."""
    rows = []
    for j in range(len(cofactors[0])):
        monos = sorted({m for ks in cofactors for m in ks[j].terms}, reverse=True)
        rows += [[ks[j].coefficient(m) for ks in cofactors] for m in monos]
    return rows


def _integer_relation(ctx, matrix, size: int) -> list[int] | None:
    kernel = nullspace(matrix, size, ctx.domain)
    if not kernel:
        return None
    vec = [_rational(ctx, c) for c in kernel[0]]
    scale = lcm(*(v.denominator for v in vec))
    ints = [int(v * scale) for v in vec]
    g = 0
    for a in ints:
        g = gcd(g, a)
    ints = [a // g for a in ints]
    if next(a for a in ints if a) < 0:
        ints = [-a for a in ints]
    return ints


def _assemble(fs: Sequence[Polynomial], ints: Sequence[int]) -> RationalFirstIntegral:
    ctx = fs[0].ctx
    num = Polynomial.constant(ctx, 1)
    den = Polynomial.constant(ctx, 1)
    for f, e in zip(fs, ints):
        if e > 0:
            num = num * f ** e
        elif e < 0:
            den = den * f ** (-e)
    factors = tuple((f, e) for f, e in zip(fs, ints) if e)
    num, den = _cancel(num, den)
    return RationalFirstIntegral(num, den, factors)


def combine_cofactors(pairs: Sequence[DarbouxPair]) -> RationalFirstIntegral | None:
    """prod f_i^m_i for the canonical integer relation sum m_i k_i = 0."""
    if not pairs:
        raise ValueError("need at least one Darboux pair")
    ints = _integer_relation(pairs[0].f.ctx, _cofactor_matrix([[p.cofactor] for p in pairs]), len(pairs))
    if ints is None:
        return None
    return _assemble([p.f for p in pairs], ints)


def _cancel(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Divide out the polynomial gcd over Q in at most two variables."""
    ctx = num.ctx
    if ctx.nvars > 2 or not (num.is_rational() and den.is_rational()):
        return num, den
    R, *_ = ring(",".join(ctx.variables), QQ)

    def there(p):
        return R.from_dict({m: QQ.convert(ctx.to_rational(c)) for m, c in p.terms.items()})

    _, a, b = there(num).cofactors(there(den))
    lc = b.LC
    back = lambda e: Polynomial(ctx, {m: Fraction(int((c / lc).numerator), int((c / lc).denominator))
                                      for m, c in e.terms()})
    return back(a), back(b)


def verify_first_integral(fi: RationalFirstIntegral, F) -> bool:
    if isinstance(F, Derivation):
        F = [F]
    num, den = fi.numerator, fi.denominator
    return all(d(num) * den - num * d(den) == 0 for d in F)


def find_first_integrals(F, deg: int = 1, notes: list | None = None) -> list[RationalFirstIntegral]:
    """Cofactor search per generator; keep what verifies against every generator."""
    notes = notes if notes is not None else []
    if isinstance(F, Derivation):
        F = FoliationSpec.of([F])
    found: list[RationalFirstIntegral] = []
    for d in F:
        pairs = constant_cofactor_search(d, deg, notes)
        if not pairs:
            continue
        fi = combine_cofactors(pairs)
        if fi is None:
            continue
        if verify_first_integral(fi, F) and all(str(fi) != str(g) for g in found):
            found.append(fi)
    if len(F) > 1 and not found:
        fi = _joint_integral(F, deg, notes)
        if fi is not None and verify_first_integral(fi, F):
            found.append(fi)
    return found


def _joint_integral(F, deg: int, notes: list) -> RationalFirstIntegral | None:
    """One integer relation for the Darboux polynomials shared by every generator."""
    fs, cofactors = [], []
    for pair in constant_cofactor_search(F[0], deg, notes):
        ks = [pair.cofactor] + [darboux_cofactor_check(pair.f, d) for d in list(F)[1:]]
        if all(k is not None for k in ks):
            fs.append(pair.f)
            cofactors.append(ks)
    if not fs:
        return None
    ints = _integer_relation(fs[0].ctx, _cofactor_matrix(cofactors), len(fs))
    return None if ints is None else _assemble(fs, ints)
