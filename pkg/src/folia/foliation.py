"""Polynomial vector fields, Lie brackets and the contact order.

A word is a tuple of generator indices in composition order: the word
``(i1, ..., ik)`` stands for ``D[i1] o ... o D[ik]``, so ``D[ik]`` is
applied first.  Words of equal length are enumerated breadth-first: the
children of an earlier node come before the children of a later one, and
children of one node are ordered by generator index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .groebner import Ideal, groebner_basis, normal_form
from .linalg import EchelonBasis
from .polyring import Polynomial, VariableContext, monomials_up_to

DEFAULT_WORD_CAP = 12
DEFAULT_SPAN_CAP = 64


@dataclass(frozen=True)
class Derivation:
    """The vector field sum(a_i * d/dx_i)."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a derivation needs at least one variable")
        ctx = comps[0].ctx
        if len(comps) != ctx.nvars:
            raise ValueError(f"expected {ctx.nvars} components, got {len(comps)}")
        for c in comps:
            ctx.check(c.ctx)
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_dict(cls, ctx: VariableContext, coeffs: dict) -> Derivation:
        """Build from {variable name: coefficient polynomial}."""
        comps = [Polynomial.zero(ctx) for _ in range(ctx.nvars)]
        for name, a in coeffs.items():
            i = ctx.var_index(name)
            comps[i] = comps[i] + a
        return cls(tuple(comps))

    @classmethod
    def zero(cls, ctx: VariableContext) -> Derivation:
        return cls(tuple(Polynomial.zero(ctx) for _ in range(ctx.nvars)))

    @property
    def ctx(self) -> VariableContext:
        return self.components[0].ctx

    def __call__(self, f: Polynomial) -> Polynomial:
        return apply_derivation(self, f)

    def __bool__(self):
        return any(self.components)

    def __add__(self, other: Derivation) -> Derivation:
        return Derivation(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: Derivation) -> Derivation:
        return Derivation(tuple(a - b for a, b in zip(self.components, other.components)))

    def times(self, g: Polynomial) -> Derivation:
        return Derivation(tuple(g * a for a in self.components))

    def degree(self) -> int:
        return max(a.degree() for a in self.components)

    def is_degree_preserving(self) -> bool:
        """True when every component is a linear form (maps F_n into F_n)."""
        return all(sum(m) == 1 for a in self.components for m in a.terms)

    def to_context(self, ctx: VariableContext) -> Derivation:
        return Derivation(tuple(a.to_context(ctx) for a in self.components))

    def __str__(self):
        parts = []
        for name, a in zip(self.ctx.variables, self.components):
            if not a:
                continue
            text = str(a)
            if len(a.terms) > 1 or text.startswith("-"):
                text = f"({text})"
            parts.append(f"{text} d/d{name}")
        return " + ".join(parts) if parts else "0 d/d" + self.ctx.variables[0]


def apply_derivation(d: Derivation, f: Polynomial) -> Polynomial:
    d.ctx.check(f.ctx)
    out = Polynomial.zero(f.ctx)
    for i, a in enumerate(d.components):
        if a:
            df = f.diff(i)
            if df:
                out = out + a * df
    return out


def lie_bracket(d1: Derivation, d2: Derivation) -> Derivation:
    d1.ctx.check(d2.ctx)
    return Derivation(tuple(d1(b) - d2(a) for a, b in zip(d1.components, d2.components)))


def apply_word(word: Sequence[int], f: Polynomial, gens: Sequence[Derivation]) -> Polynomial:
    for i in reversed(word):
        f = gens[i](f)
    return f


@dataclass(frozen=True)
class FoliationSpec:
    names: tuple
    derivations: tuple
    bracket_closed: bool = False
    closure_degree_cap: int = 0

    @classmethod
    def of(cls, derivations: Sequence[Derivation], names: Sequence[str] | None = None) -> FoliationSpec:
        derivations = tuple(derivations)
        if names is None:
            names = tuple(f"D{i + 1}" for i in range(len(derivations)))
        # a single field is trivially closed under brackets
        return cls(tuple(names), derivations, len(derivations) == 1)

    @property
    def ctx(self) -> VariableContext:
        return self.derivations[0].ctx

    def __len__(self):
        return len(self.derivations)

    def __iter__(self):
        return iter(self.derivations)

    def __getitem__(self, i):
        return self.derivations[i]

    def to_context(self, ctx: VariableContext) -> FoliationSpec:
        return FoliationSpec(self.names, tuple(d.to_context(ctx) for d in self.derivations),
                             self.bracket_closed, self.closure_degree_cap)


def _module_span(gens: Sequence[Derivation], degree_cap: int) -> EchelonBasis:
    ctx = gens[0].ctx
    span = EchelonBasis(ctx.domain)
    for mono in monomials_up_to(ctx.nvars, degree_cap):
        for d in gens:
            vec = {}
            for i, a in enumerate(d.components):
                for m, c in a.terms.items():
                    vec[(i, tuple(x + y for x, y in zip(m, mono)))] = c
            if vec:
                span.add(vec)
    return span


def _as_vector(d: Derivation) -> dict:
    return {(i, m): c for i, a in enumerate(d.components) for m, c in a.terms.items()}


def in_module(d: Derivation, gens: Sequence[Derivation], degree_cap: int) -> bool:
    """Whether d = sum(c_k * gens[k]) with every deg(c_k) <= degree_cap."""
    if not d:
        return True
    return _module_span(gens, degree_cap).contains(_as_vector(d))


def close_under_brackets(
    gens: Sequence[Derivation],
    degree_cap: int = 2,
    size_cap: int = 8,
    names: Sequence[str] | None = None,
) -> FoliationSpec:
    if not gens:
        raise ValueError("need at least one generator")
    current = list(gens)
    labels = list(names) if names is not None else [f"D{i + 1}" for i in range(len(gens))]
    checked: set[tuple[int, int]] = set()
    while True:
        span = _module_span(current, degree_cap)
        added = False
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                if (i, j) in checked:
                    continue
                checked.add((i, j))
                b = lie_bracket(current[i], current[j])
                if not b or span.contains(_as_vector(b)):
                    continue
                if len(current) >= size_cap:
                    return FoliationSpec(tuple(labels), tuple(current), False, degree_cap)
                current.append(b)
                labels.append(f"[{labels[i]},{labels[j]}]")
                added = True
                break
            if added:
                break
        if not added:
            return FoliationSpec(tuple(labels), tuple(current), True, degree_cap)


# ---- contact order ----------------------------------------------------------


@dataclass(frozen=True)
class Finite:
    order: int
    word: tuple

    kind = "finite"


@dataclass(frozen=True)
class Infinite:
    """f lies in I(F, Y).

    ``via == "span"``: the certificate spans a derivation-stable vector
    space containing f, inside I_Y.  ``via == "ideal"``: it is a Groebner
    basis of a derivation-stable ideal containing f, inside I_Y.
    """

    certificate: tuple
    via: str = "span"

    kind = "infinite"


@dataclass(frozen=True)
class AtLeast:
    bound: int

    kind = "at_least"


ContactOrderResult = Union[Finite, Infinite, AtLeast]


def _membership(Y, ctx: VariableContext):
    """A predicate deciding p in I_Y, for a point or an ideal."""
    if isinstance(Y, Ideal):
        I = Y if Y.basis is not None else groebner_basis(Y)
        return lambda p: not normal_form(p, I)
    coords = tuple(getattr(Y, "coords", Y))
    if len(coords) != ctx.nvars:
        raise ValueError(f"point has {len(coords)} coordinates, expected {ctx.nvars}")
    return lambda p: not p.evaluate(coords)


def _poly_order(m):
    return m


DEFAULT_IDEAL_ROUNDS = 8


def stable_ideal(gens: Sequence[Polynomial], F, inside, rounds: int = DEFAULT_IDEAL_ROUNDS):
    """Grow (gens) by derivatives until it is closed under every generator.

    ``inside`` decides membership in I_Y.  Returns (True, basis) when a
    stable ideal inside I_Y is reached, (False, None) when some derivative
    leaves I_Y, and (None, None) when ``rounds`` ran out first.  The chain
    of ideals is ascending, so enough rounds always settle it.
    """
    gens = [g for g in gens if g]
    if not gens:
        return True, ()
    for g in gens:
        if not inside(g):
            return False, None
    for _ in range(rounds):
        I = groebner_basis(Ideal.of(gens))
        new = []
        for b in I.basis:
            for d in F:
                h = d(b)
                if not inside(h):
                    return False, None
                r = normal_form(h, I)
                if r:
                    new.append(r)
        if not new:
            return True, I.basis
        gens = list(I.basis) + new
    return None, None


def stable_span(f: Polynomial, F, dim_cap: int = DEFAULT_SPAN_CAP) -> list[Polynomial] | None:
    """Basis of span{D_I(f)} when it is finite with at most dim_cap elements."""
    if dim_cap < 1:
        raise ValueError("dim_cap must be at least 1")
    if not f:
        return []
    span = EchelonBasis(f.ctx.domain, _poly_order)
    span.add(f.terms)
    basis = [f]
    i = 0
    while i < len(basis):
        p = basis[i]
        i += 1
        for d in F:
            q = d(p)
            if span.add(q.terms):
                basis.append(q)
                if len(basis) > dim_cap:
                    return None
    return basis


def contact_order(
    f: Polynomial,
    F,
    Y,
    word_cap: int = DEFAULT_WORD_CAP,
    span_cap: int = DEFAULT_SPAN_CAP,
    ideal_rounds: int = DEFAULT_IDEAL_ROUNDS,
) -> ContactOrderResult:
    """Least |I| with D_I(f) outside I_Y, by breadth-first search over words.

    Nodes whose polynomial lies in the span of earlier nodes are pruned:
    all their descendants are combinations of descendants of earlier
    nodes, so neither the order nor the first witness word changes.
    """
    gens = list(F)
    inside = _membership(Y, f.ctx)
    if not inside(f):
        return Finite(0, ())
    if not f:
        return Infinite(())
    span = EchelonBasis(f.ctx.domain, _poly_order)
    span.add(f.terms)
    kept = [f]
    frontier = [((), f)]
    for level in range(1, word_cap + 1):
        nxt = []
        for word, p in frontier:
            for i, d in enumerate(gens):
                q = d(p)
                if span.contains(q.terms):
                    continue
                w = (i,) + word
                if not inside(q):
                    return Finite(level, w)
                span.add(q.terms)
                kept.append(q)
                nxt.append((w, q))
        if not nxt:
            return Infinite(tuple(kept))
        frontier = nxt
    closure = stable_span(f, gens, span_cap)
    if closure is not None:
        if all(inside(p) for p in closure):
            return Infinite(tuple(closure))
        return AtLeast(word_cap + 1)
    ok, basis = stable_ideal(kept, gens, inside, ideal_rounds)
    if ok:
        return Infinite(tuple(basis), "ideal")
    return AtLeast(word_cap + 1)
