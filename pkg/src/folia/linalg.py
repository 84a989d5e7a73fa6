"""Exact linear algebra over a sympy field domain.

Matrices are lists of rows; sparse vectors are dicts keyed by any
hashable, with a caller-supplied ordering on the keys.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence


class EchelonBasis:
    """Incrementally maintained basis of a span of sparse vectors.

    Each stored vector is normalized so its leading entry (smallest key
    under ``order``) is 1; membership is decided by head reduction.
    """

    def __init__(self, domain, order: Callable = lambda k: k):
        self.domain = domain
        self.order = order
        self.rows: dict[Hashable, dict] = {}  # pivot -> row

    def __len__(self):
        return len(self.rows)

    def _lead(self, vec: dict):
        return min(vec, key=self.order)

    def reduce(self, vec: dict) -> dict:
        """Return the head-reduced remainder; empty iff vec lies in the span."""
        vec = {k: v for k, v in vec.items() if v}
        while vec:
            p = self._lead(vec)
            row = self.rows.get(p)
            if row is None:
                return vec
            c = vec[p]
            for k, v in row.items():
                s = vec.get(k)
                s = -c * v if s is None else s - c * v
                if s:
                    vec[k] = s
                else:
                    vec.pop(k, None)
        return vec

    def add(self, vec: dict) -> bool:
        """Adjoin vec; True when it increased the dimension."""
        rem = self.reduce(vec)
        if not rem:
            return False
        p = self._lead(rem)
        inv = self.domain.one / rem[p]
        self.rows[p] = {k: v * inv for k, v in rem.items()}
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


def rref(matrix: Sequence[Sequence], domain) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    rows = [list(r) for r in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = domain.one / rows[r][col]
        prow = [v * inv if v else v for v in rows[r]]
        rows[r] = prow
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], prow)]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(matrix: Sequence[Sequence], domain) -> int:
    return len(rref(matrix, domain)[1])


def nullspace(matrix: Sequence[Sequence], ncols: int, domain) -> list[list]:
    """Kernel basis, itself returned in reduced row echelon form."""
    R, pivots = rref(matrix, domain) if matrix else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [domain.zero] * ncols
        v[f] = domain.one
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(v)
    if not basis:
        return []
    return rref(basis, domain)[0]


def solve(matrix: Sequence[Sequence], rhs: Sequence, domain):
    """One solution x of matrix*x = rhs, or None when inconsistent."""
    ncols = len(matrix[0]) if matrix else 0
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    R, pivots = rref(aug, domain)
    if ncols in pivots:
        return None
    x = [domain.zero] * ncols
    for row, p in zip(R, pivots):
        x[p] = row[ncols]
    return x


def charpoly(matrix: Sequence[Sequence], domain) -> list:
    """Characteristic polynomial det(t*I - A), coefficients highest degree first.

    Hessenberg reduction followed by the standard recurrence; O(n^3).
    """
    n = len(matrix)
    H = [list(r) for r in matrix]
    zero, one = domain.zero, domain.one
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if H[i][m - 1]), None)
        if piv is None:
            continue
        if piv != m:
            H[m], H[piv] = H[piv], H[m]
            for row in H:
                row[m], row[piv] = row[piv], row[m]
        inv = one / H[m][m - 1]
        for i in range(m + 1, n):
            u = H[i][m - 1] * inv
            if not u:
                continue
            for j in range(n):
                H[i][j] -= u * H[m][j]
            for row in H:
                row[m] += u * row[i]
    # p[k] holds the charpoly of the leading k x k block, lowest degree first
    p = [[one]]
    for k in range(1, n + 1):
        a = H[k - 1][k - 1]
        cur = [zero] + p[k - 1]
        for i in range(len(p[k - 1])):
            cur[i] -= a * p[k - 1][i]
        prod = one
        for i in range(1, k):
            prod *= H[k - i][k - i - 1]
            if not prod:
                break
            coef = prod * H[k - i - 1][k - 1]
            for j, c in enumerate(p[k - i - 1]):
                cur[j] -= coef * c
        p.append(cur)
    return list(reversed(p[n]))


def det_by_minors(matrix: Sequence[Sequence], one, zero):
    """Determinant by Laplace expansion with memoized column subsets.

    Works over any commutative ring (no division), O(n * 2^n) products.
    """
    n = len(matrix)
    if n == 0:
        return one
    # minors[S] = det of rows (n-|S| .. n-1) restricted to columns S
    minors = {0: one}
    for depth in range(1, n + 1):
        row = matrix[n - depth]
        nxt = {}
        for mask in _masks(n, depth):
            total = zero
            sign_pos = 0
            for c in range(n):
                bit = 1 << c
                if mask & bit:
                    entry = row[c]
                    sub = minors.get(mask ^ bit)
                    if entry and sub:
                        term = entry * sub
                        total = total + term if sign_pos % 2 == 0 else total - term
                    sign_pos += 1
            nxt[mask] = total
        minors = nxt
    return minors[(1 << n) - 1]


def _masks(n: int, k: int) -> Iterable[int]:
    from itertools import combinations

    for cols in combinations(range(n), k):
        m = 0
        for c in cols:
            m |= 1 << c
        yield m
