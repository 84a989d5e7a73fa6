"""Sparse multivariate polynomials with exact coefficients.

Coefficients live in one of two fields: the rationals, or the field of
rational functions in a list of named parameters.  Both are backed by
sympy's domain objects (``QQ`` and ``QQ.frac_field``), which give exact,
canonically reduced elements.  Everything else, including the term
storage, is plain dictionaries keyed by exponent tuples.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import sympy
from sympy.polys.domains import QQ

Monomial = tuple  # exponent vector, one slot per variable


class ContextMismatch(ValueError):
    pass


class PoleError(ZeroDivisionError):
    pass


def grevlex_key(m: Monomial):
    return (sum(m), tuple(-e for e in reversed(m)))


def lex_key(m: Monomial):
    return m


ORDER_KEYS: dict[str, Callable] = {"grevlex": grevlex_key, "lex": lex_key}


def monomials_up_to(nvars: int, degree: int) -> list[Monomial]:
    """All exponent vectors of total degree <= degree, descending in grevlex."""
    out: list[Monomial] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            for e in range(remaining + 1):
                out.append(prefix + (e,))
            return
        for e in range(remaining + 1):
            rec(prefix + (e,), remaining - e, slots - 1)

    if nvars == 0:
        return [()]
    rec((), degree, nvars)
    out.sort(key=grevlex_key, reverse=True)
    return out


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class VariableContext:
    """Ordered variable names plus optional parameter names.

    With parameters, the coefficient field is Q(params); otherwise Q.
    """

    def __init__(self, variables: Sequence[str], params: Sequence[str] = ()):
        variables = tuple(variables)
        params = tuple(params)
        names = variables + params
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate names in context: {names}")
        self.variables = variables
        self.params = params
        self.nvars = len(variables)
        if params:
            self.domain = QQ.frac_field(*sympy.symbols(params))
        else:
            self.domain = QQ
        self._key = (variables, params)

    def __eq__(self, other):
        return isinstance(other, VariableContext) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.params:
            return f"VariableContext({list(self.variables)}, params={list(self.params)})"
        return f"VariableContext({list(self.variables)})"

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def scalar(self, value):
        """Coerce an int, Fraction, rational string or domain element."""
        if isinstance(value, Fraction):
            return self.domain.convert(QQ(value.numerator, value.denominator))
        if isinstance(value, str):
            f = Fraction(value)
            return self.domain.convert(QQ(f.numerator, f.denominator))
        return self.domain.convert(value)

    def param(self, name: str):
        """The parameter ``name`` as a scalar of the coefficient field."""
        return self.domain.gens[self.params.index(name)]

    def without_params(self) -> VariableContext:
        return VariableContext(self.variables) if self.params else self

    def var_index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def check(self, other: VariableContext):
        if self != other:
            raise ContextMismatch(f"context mismatch: {self!r} vs {other!r}")

    # ---- scalar helpers -------------------------------------------------

    def is_rational(self, c) -> bool:
        """True when the scalar involves no parameter."""
        if not self.params:
            return True
        return c.denom.is_ground and c.numer.is_ground

    def to_rational(self, c) -> Fraction:
        if self.params:
            if not self.is_rational(c):
                raise ValueError(f"scalar {c} involves parameters")
            q = QQ.convert(c.numer.LC) / QQ.convert(c.denom.LC) if c.numer else QQ.zero
        else:
            q = c
        return Fraction(int(q.numerator), int(q.denominator))

    def lower_scalar(self, c, target: VariableContext):
        """Move a parameter-free scalar into ``target``'s domain."""
        if self.domain is target.domain:
            return c
        return target.scalar(self.to_rational(c))

    def specialize_scalar(self, c, assignment: Mapping[str, object]):
        """Substitute rationals for parameters; returns an element of QQ."""
        if not self.params:
            return c
        need = [self.params[i] for i in _used_params(c, len(self.params))
                if self.params[i] not in assignment]
        if need:
            raise KeyError(f"no value for parameter(s) {need}")
        ring = c.numer.ring
        pairs = [(ring.gens[i], QQ.convert(_as_qq(assignment[p])))
                 for i, p in enumerate(self.params) if p in assignment]
        num = c.numer.subs(pairs) if pairs else c.numer
        den = c.denom.subs(pairs) if pairs else c.denom
        if not den:
            shown = {p: str(assignment[p]) for p in self.params if p in assignment}
            raise PoleError(f"denominator {c.denom.as_expr()} vanishes at {shown}")
        return QQ.convert(num.LC) / QQ.convert(den.LC)

    def format_scalar(self, c) -> str:
        neg, body, _ = self._scalar_parts(c)
        return "-" + body if neg else body

    def _scalar_parts(self, c):
        """(negative, magnitude text, atomic) for coefficient rendering."""
        if self.is_rational(c):
            q = self.to_rational(c)
            neg = q < 0
            q = abs(q)
            text = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
            return neg, text, q.denominator == 1
        pctx = _param_context(self.params)
        num = _poly_from_ring_element(pctx, c.numer)
        den = _poly_from_ring_element(pctx, c.denom)
        lead = num.leading_coefficient()
        neg = lead < 0
        if neg:
            num = -num
        num_text = str(num)
        if den == Polynomial.constant(pctx, 1):
            atomic = len(num.terms) == 1 and num.leading_coefficient() == 1
            return neg, (num_text if atomic else f"({num_text})"), atomic
        return neg, f"({num_text})/({den})", False


def _as_qq(v):
    if isinstance(v, Fraction):
        return QQ(v.numerator, v.denominator)
    if isinstance(v, str):
        f = Fraction(v)
        return QQ(f.numerator, f.denominator)
    return v


def _used_params(c, k):
    used = set()
    for part in (c.numer, c.denom):
        for mon in part.monoms():
            used.update(i for i in range(k) if mon[i])
    return sorted(used)


_PARAM_CONTEXTS: dict = {}


def _param_context(params):
    ctx = _PARAM_CONTEXTS.get(params)
    if ctx is None:
        ctx = _PARAM_CONTEXTS[params] = VariableContext(params)
    return ctx


def _poly_from_ring_element(pctx: VariableContext, element) -> Polynomial:
    return Polynomial(pctx, {m: QQ.convert(c) for m, c in element.terms()})


class Polynomial:
    """Immutable sparse polynomial: a dict from exponent tuples to nonzero scalars."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VariableContext, terms: Mapping | None = None):
        self.ctx = ctx
        K = ctx.domain
        self.terms = {}
        for m, c in (terms or {}).items():
            if not K.of_type(c):
                c = ctx.scalar(c)
            if c:
                self.terms[tuple(m)] = c
        self._hash = None

    @classmethod
    def _raw(cls, ctx, terms):
        p = object.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        p._hash = None
        return p

    # ---- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls._raw(ctx, {})

    @classmethod
    def constant(cls, ctx, c):
        c = ctx.scalar(c)
        return cls._raw(ctx, {(0,) * ctx.nvars: c} if c else {})

    @classmethod
    def variable(cls, ctx, var):
        i = ctx.var_index(var) if isinstance(var, str) else var
        if not 0 <= i < ctx.nvars:
            raise IndexError(f"variable index {i} out of range for {ctx.nvars} variables")
        m = tuple(1 if j == i else 0 for j in range(ctx.nvars))
        return cls._raw(ctx, {m: ctx.one})

    @classmethod
    def monomial(cls, ctx, exps: Monomial, coeff=1):
        c = ctx.scalar(coeff)
        return cls._raw(ctx, {tuple(exps): c} if c else {})

    def gens(self):
        return [Polynomial.variable(self.ctx, i) for i in range(self.ctx.nvars)]

    # ---- basic queries --------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def leading_term(self, key=grevlex_key):
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def leading_monomial(self, key=grevlex_key):
        return max(self.terms, key=key)

    def leading_coefficient(self, key=grevlex_key):
        return self.terms[max(self.terms, key=key)]

    def sorted_terms(self, key=grevlex_key):
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def coefficient(self, m: Monomial):
        return self.terms.get(tuple(m), self.ctx.zero)

    def constant_term(self):
        return self.terms.get((0,) * self.ctx.nvars, self.ctx.zero)

    def variables_used(self) -> set[int]:
        return {i for m in self.terms for i, e in enumerate(m) if e}

    # ---- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self.ctx.check(other.ctx)
            return other
        return Polynomial.constant(self.ctx, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = c
            else:
                s = s + c
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return Polynomial._raw(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = -c
            else:
                s = s - c
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return Polynomial._raw(self.ctx, terms)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(self.ctx.scalar(other))
        self.ctx.check(other.ctx)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = terms.get(m)
                terms[m] = c1 * c2 if s is None else s + c1 * c2
        return Polynomial._raw(self.ctx, {m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c):
        if not c:
            return Polynomial._raw(self.ctx, {})
        return Polynomial._raw(self.ctx, {m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono: Monomial, c):
        """Multiply by the single term c*x^mono."""
        return Polynomial._raw(
            self.ctx,
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self.terms.items()},
        )

    def monic(self, key=grevlex_key):
        if not self.terms:
            return self
        return self.scale(self.ctx.one / self.leading_coefficient(key))

    def diff(self, i: int) -> Polynomial:
        if not 0 <= i < self.ctx.nvars:
            raise IndexError(f"variable index {i} out of range for {self.ctx.nvars} variables")
        terms = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                terms[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Polynomial._raw(self.ctx, terms)

    def evaluate(self, point: Sequence):
        if len(point) != self.ctx.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.ctx.nvars}")
        K = self.ctx.domain
        vals = [K.convert(v) if not isinstance(v, Fraction) else self.ctx.scalar(v) for v in point]
        powers = [dict() for _ in vals]
        total = K.zero
        for m, c in self.terms.items():
            t = c
            for i, e in enumerate(m):
                if e:
                    pw = powers[i].get(e)
                    if pw is None:
                        pw = powers[i][e] = vals[i] ** e
                    t = t * pw
            total = total + t
        return total

    def specialize(self, assignment: Mapping[str, object]) -> Polynomial:
        base = self.ctx.without_params()
        terms = {}
        for m, c in self.terms.items():
            v = self.ctx.specialize_scalar(c, assignment)
            if v:
                terms[m] = v
        return Polynomial._raw(base, terms)

    def to_context(self, ctx: VariableContext) -> Polynomial:
        """Re-home into a context with the same variables (adding or dropping params)."""
        if ctx == self.ctx:
            return self
        if ctx.variables != self.ctx.variables:
            raise ContextMismatch(f"cannot move {self.ctx!r} polynomial into {ctx!r}")
        if ctx.params:
            return Polynomial._raw(ctx, {m: _lift(self.ctx, c, ctx) for m, c in self.terms.items()})
        return Polynomial._raw(ctx, {m: self.ctx.lower_scalar(c, ctx) for m, c in self.terms.items()})

    def is_rational(self) -> bool:
        return all(self.ctx.is_rational(c) for c in self.terms.values())

    # ---- comparison / hashing -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.ctx, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    # ---- rendering ------------------------------------------------------

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Polynomial({self.format()!r})"

    def format(self, key=grevlex_key) -> str:
        if not self.terms:
            return "0"
        parts = []
        names = self.ctx.variables
        for idx, (m, c) in enumerate(self.sorted_terms(key)):
            neg, mag, atomic = self.ctx._scalar_parts(c)
            factors = []
            for name, e in zip(names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if factors and mag == "1":
                body = "*".join(factors)
            else:
                body = "*".join([mag] + factors)
            if idx == 0:
                parts.append("-" + body if neg else body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)


def _lift(src: VariableContext, c, dst: VariableContext):
    if src.params == dst.params:
        return c
    if src.params:
        # re-express through the shared parameter names
        return dst.domain.from_sympy(src.domain.to_sympy(c))
    return dst.domain.convert(c)


# ---- functional surface ---------------------------------------------------


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    a.ctx.check(b.ctx)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(p: Polynomial, var_index: int) -> Polynomial:
    return p.diff(var_index)


def evaluate(p: Polynomial, point: Sequence):
    return p.evaluate(point)


def specialize_params(p: Polynomial, assignment: Mapping[str, object]) -> Polynomial:
    return p.specialize(assignment)


def polys_in(ctx: VariableContext, *names: str) -> list[Polynomial]:
    """Convenience: the named variables as polynomials."""
    return [Polynomial.variable(ctx, n) for n in names]


def common_context(polys: Iterable[Polynomial]) -> VariableContext | None:
    ctx = None
    for p in polys:
        if ctx is None:
            ctx = p.ctx
        else:
            ctx.check(p.ctx)
    return ctx
