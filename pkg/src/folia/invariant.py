"""Degree-truncated invariant ideals I(F, x) and dimension estimates.

For a point x and the space F_n of polynomials of degree <= n, the
polynomials f in F_n with D_I(f)(x) = 0 for every word I form the kernel
of the matrix of functionals f -> D_I(f)(x).  Words are explored
breadth-first.  A level that adds no rank is not by itself proof that the
kernel is final (later words can still cut it down), so the search stops
only when one of the following holds:

* the rank is dim F_n (the kernel is zero);
* the children of a level are all linear combinations of earlier nodes,
  so every remaining functional is already in the row space;
* the ideal generated by the current kernel is closed under every
  generator and vanishes at x, which places the kernel inside I(F, x).

The third test is an ascending-chain argument and needs Groebner bases;
it is retried whenever a level fails to raise the rank.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass
from typing import Sequence

from .foliation import Derivation, FoliationSpec, stable_ideal
from .groebner import Ideal, groebner_basis, ideal_dimension
from .linalg import EchelonBasis, nullspace
from .polyring import Polynomial, VariableContext, monomials_up_to

DEFAULT_MAX_DEGREE = 4
DEFAULT_CERTIFY_ROUNDS = 8


class NotCertified(UserWarning):
    pass


@dataclass(frozen=True)
class EvalPoint:
    coords: tuple
    tag: str = "closed"
    name: str | None = None

    @classmethod
    def of(cls, ctx: VariableContext, coords: Sequence, name: str | None = None) -> EvalPoint:
        if len(coords) != ctx.nvars:
            raise ValueError(f"point has {len(coords)} coordinates, expected {ctx.nvars}")
        vals = tuple(ctx.scalar(c) for c in coords)
        generic = any(not ctx.is_rational(v) for v in vals)
        return cls(vals, "generic" if generic else "closed", name)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def label(self, ctx: VariableContext | None = None) -> str:
        if self.name:
            return self.name
        fmt = ctx.format_scalar if ctx is not None else str
        return "(" + ", ".join(fmt(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class FunctionalMatrix:
    degree: int
    basis: tuple  # monomials of F_n, descending grevlex
    rows: tuple  # row vectors over the coefficient field
    words: tuple  # word that produced each row
    rank: int
    certified: bool
    depth: int
    warnings: tuple = ()


@dataclass(frozen=True)
class InvariantEstimate:
    degree: int
    kernel: tuple
    ideal: Ideal
    dimension: int
    stabilized: bool
    certified: bool
    history: tuple = ()  # (n, dimension) for n = 0..degree
    warnings: tuple = ()


@dataclass(frozen=True)
class ProfileRow:
    point: EvalPoint
    dimension: int | None
    stabilized: bool | None
    certified: bool | None
    generators: tuple = ()
    error: str | None = None
    warnings: tuple = ()


def _as_spec(F) -> FoliationSpec:
    if isinstance(F, FoliationSpec):
        return F
    if isinstance(F, Derivation):
        F = [F]
    return FoliationSpec.of(list(F))


def _working(F: FoliationSpec, x: EvalPoint):
    """Drop parameters when neither the point nor the field needs them."""
    ctx = F.ctx
    if ctx.params and x.tag == "closed" and all(a.is_rational() for d in F for a in d.components):
        base = ctx.without_params()
        coords = tuple(ctx.lower_scalar(c, base) for c in x.coords)
        return F.to_context(base), coords, base
    return F, tuple(x.coords), ctx


def _certify(kernel: list[Polynomial], F: FoliationSpec, coords, rounds: int):
    """Whether the ideal of the kernel lies in I(F, x): (status, ideal of the kernel)."""
    ok, _ = stable_ideal(kernel, F, lambda p: not p.evaluate(coords), rounds)
    if not ok:
        return ok, None
    return True, groebner_basis(Ideal.of(kernel))


def _closure(x: EvalPoint, F, n: int, depth_cap: int | None, rounds: int):
    if n < 0:
        raise ValueError("truncation degree must be non-negative")
    F = _as_spec(F)
    home = F.ctx
    notes = []
    if not F.bracket_closed:
        notes.append("generators not certified bracket-closed")
    F, coords, ctx = _working(F, x)
    K = ctx.domain
    basis = monomials_up_to(ctx.nvars, n)
    dim = len(basis)
    if depth_cap is None:
        depth_cap = 4 * dim + 8

    echelon = EchelonBasis(K)
    node_span = EchelonBasis(K)
    rows, words = [], []
    frontier = [((), [Polynomial.monomial(ctx, m) for m in basis])]
    certified = False
    ideal = None
    depth = 0

    def kernel_polys():
        vecs = nullspace([r for r in rows], dim, K)
        return [Polynomial(ctx, {basis[j]: v for j, v in enumerate(vec) if v}) for vec in vecs]

    while True:
        grew = False
        for word, imgs in frontier:
            row = [p.evaluate(coords) for p in imgs]
            if echelon.add({j: v for j, v in enumerate(row) if v}):
                rows.append(row)
                words.append(word)
                grew = True
        if len(rows) == dim:
            certified = True
            break
        if not grew:
            ok, I = _certify(kernel_polys(), F, coords, rounds)
            if ok:
                certified, ideal = True, I
                break
        if depth >= depth_cap:
            notes.append(f"functional closure stopped at depth {depth} without certificate")
            break
        nxt = []
        for word, imgs in frontier:
            for i, d in enumerate(F):
                child = [d(p) for p in imgs]
                vec = {(j, m): c for j, p in enumerate(child) for m, c in p.terms.items()}
                if vec and node_span.add(vec):
                    nxt.append(((i,) + word, child))
        depth += 1
        if not nxt:
            certified = True
            break
        frontier = nxt

    kernel = kernel_polys()
    if ideal is None:
        ideal = groebner_basis(Ideal.of(kernel, ctx))
    if ctx != home:
        kernel = [k.to_context(home) for k in kernel]
        ideal = Ideal(home, tuple(g.to_context(home) for g in ideal.generators),
                      tuple(b.to_context(home) for b in ideal.basis), ideal.order)
    fm = FunctionalMatrix(n, tuple(basis), tuple(tuple(r) for r in rows), tuple(words),
                          len(rows), certified, depth, tuple(notes))
    return fm, kernel, ideal


def functional_matrix(x: EvalPoint, F, n: int, depth_cap: int | None = None,
                      rounds: int = DEFAULT_CERTIFY_ROUNDS) -> FunctionalMatrix:
    return _closure(x, F, n, depth_cap, rounds)[0]


def truncated_invariant_ideal(x: EvalPoint, F, n: int, depth_cap: int | None = None,
                              rounds: int = DEFAULT_CERTIFY_ROUNDS) -> list[Polynomial]:
    """Basis of I(F, x) intersected with F_n, in reduced row echelon form."""
    return _closure(x, F, n, depth_cap, rounds)[1]


def invariant_variety_estimate(x: EvalPoint, F, n_max: int = DEFAULT_MAX_DEGREE,
                               depth_cap: int | None = None,
                               rounds: int = DEFAULT_CERTIFY_ROUNDS) -> InvariantEstimate:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    F = _as_spec(F)
    nvars = F.ctx.nvars
    history = [(0, nvars)]
    certified = True
    notes: list[str] = []
    kernel, ideal = [], None
    for n in range(1, n_max + 1):
        fm, kernel, ideal = _closure(x, F, n, depth_cap, rounds)
        certified = certified and fm.certified
        for w in fm.warnings:
            if w not in notes:
                notes.append(w)
        history.append((n, ideal_dimension(ideal).dimension))
    if not certified:
        _warnings.warn("truncated kernel not certified; estimate may be too low", NotCertified)
    return InvariantEstimate(
        degree=n_max,
        kernel=tuple(kernel),
        ideal=ideal,
        dimension=history[-1][1],
        stabilized=history[-1][1] == history[-2][1],
        certified=certified,
        history=tuple(history),
        warnings=tuple(notes),
    )


def nf_profile(points: Sequence[EvalPoint], F, n_max: int = DEFAULT_MAX_DEGREE,
               depth_cap: int | None = None) -> list[ProfileRow]:
    if not points:
        raise ValueError("need at least one point")
    rows = []
    for x in points:
        try:
            est = invariant_variety_estimate(x, F, n_max, depth_cap)
        except (ArithmeticError, ValueError) as exc:
            rows.append(ProfileRow(x, None, None, None, error=f"{type(exc).__name__}: {exc}"))
            continue
        rows.append(ProfileRow(x, est.dimension, est.stabilized, est.certified,
                               est.ideal.basis, warnings=est.warnings))
    return rows
