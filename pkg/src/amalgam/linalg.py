"""Exact sparse linear algebra over the Gaussian rationals.

Vectors are ``dict[int, GaussQ]`` with zero entries omitted.  Everything here
is row reduction; there is no floating point anywhere.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .scalars import GaussQ, ONE, ZERO, as_scalar

Vec = dict

__all__ = [
    "Vec",
    "vadd",
    "vsub",
    "vscale",
    "vaxpy",
    "vconj",
    "vdot",
    "dense",
    "sparse",
    "EchelonBasis",
    "rank",
    "nullspace",
    "solve",
    "span_intersection",
    "ldl_psd",
]


def vadd(u: Vec, v: Vec) -> Vec:
    out = dict(u)
    for k, c in v.items():
        s = out.get(k)
        s = c if s is None else s + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vaxpy(u: Vec, c, v: Vec) -> Vec:
    """u + c*v"""
    c = as_scalar(c)
    if not c:
        return dict(u)
    out = dict(u)
    for k, x in v.items():
        s = out.get(k)
        s = c * x if s is None else s + c * x
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vsub(u: Vec, v: Vec) -> Vec:
    return vaxpy(u, -ONE, v)


def vscale(c, v: Vec) -> Vec:
    c = as_scalar(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vconj(v: Vec) -> Vec:
    return {k: x.conj() for k, x in v.items()}


def vdot(u: Vec, v: Vec) -> GaussQ:
    """Bilinear pairing sum u_k v_k (no conjugation)."""
    if len(u) > len(v):
        u, v = v, u
    s = ZERO
    for k, x in u.items():
        y = v.get(k)
        if y is not None:
            s = s + x * y
    return s


def dense(v: Vec, n: int) -> list:
    return [v.get(k, ZERO) for k in range(n)]


def sparse(values: Iterable) -> Vec:
    out = {}
    for k, x in enumerate(values):
        x = as_scalar(x)
        if x:
            out[k] = x
    return out


class EchelonBasis:
    """Incrementally maintained reduced row-echelon basis of a span.

    With ``track=True`` every stored row remembers which combination of the
    inserted vectors produced it, so membership queries can return
    coordinates with respect to the inserted (independent) vectors.
    """

    def __init__(self, track: bool = False):
        self.rows: dict[int, Vec] = {}
        self.combos: dict[int, Vec] = {}
        self.track = track
        self.inserted: list[Vec] = []

    def __len__(self):
        return len(self.rows)

    def _reduce(self, v: Vec, combo: Vec | None):
        v = dict(v)
        for p in [k for k in v if k in self.rows]:
            c = v.get(p)
            if c is None:
                continue
            v = vaxpy(v, -c, self.rows[p])
            if combo is not None:
                combo = vaxpy(combo, -c, self.combos[p])
        return v, combo

    def reduce(self, v: Vec) -> Vec:
        return self._reduce(v, None)[0]

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v)

    def add(self, v: Vec) -> bool:
        """Insert v; return True if it enlarged the span."""
        combo = {len(self.inserted): ONE} if self.track else None
        r, combo = self._reduce(v, combo)
        if not r:
            return False
        p = min(r)
        inv = ONE / r[p]
        r = vscale(inv, r)
        if combo is not None:
            combo = vscale(inv, combo)
        for q, row in self.rows.items():
            c = row.get(p)
            if c is not None:
                self.rows[q] = vaxpy(row, -c, r)
                if combo is not None:
                    self.combos[q] = vaxpy(self.combos[q], -c, combo)
        self.rows[p] = r
        if combo is not None:
            self.combos[p] = combo
        self.inserted.append(dict(v))
        return True

    def coordinates(self, v: Vec) -> Vec | None:
        """Coefficients of v over the inserted vectors, or None if v is outside."""
        if not self.track:
            raise ValueError("coordinates need a tracking basis")
        combo: Vec = {}
        v = dict(v)
        for p in [k for k in v if k in self.rows]:
            c = v.get(p)
            if c is None:
                continue
            v = vaxpy(v, -c, self.rows[p])
            combo = vaxpy(combo, c, self.combos[p])
        if v:
            return None
        return combo

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def canonical_basis(self) -> list[Vec]:
        """Reduced echelon rows ordered by pivot: canonical for the span."""
        return [dict(self.rows[p]) for p in sorted(self.rows)]


def rank(vectors: Iterable[Vec]) -> int:
    eb = EchelonBasis()
    for v in vectors:
        eb.add(v)
    return len(eb)


def nullspace(rows: Sequence[Vec], ncols: int) -> list[Vec]:
    """Basis of {x : row . x = 0 for every row} (bilinear pairing)."""
    eb = EchelonBasis()
    for r in rows:
        eb.add(r)
    pivots = set(eb.rows)
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        x = {f: ONE}
        for p, row in eb.rows.items():
            c = row.get(f)
            if c is not None:
                x[p] = -c
        basis.append(x)
    return basis


def solve(rows: Sequence[Vec], rhs: Sequence, ncols: int) -> Vec | None:
    """One solution x of rows . x = rhs (free variables zero), or None."""
    aug_col = ncols
    eb = EchelonBasis()
    for r, b in zip(rows, rhs):
        b = as_scalar(b)
        row = dict(r)
        if b:
            row[aug_col] = b
        eb.add(row)
    if aug_col in eb.rows:
        return None
    x = {}
    for p, row in eb.rows.items():
        c = row.get(aug_col)
        if c:
            x[p] = c
    return x


def span_intersection(a: Sequence[Vec], b: Sequence[Vec]) -> list[Vec]:
    """Canonical echelon basis of span(a) ∩ span(b)."""
    if not a or not b:
        return []
    # x = sum s_i a_i = sum t_j b_j  <=>  (s, -t) in the kernel of [a | b]
    keys = sorted({k for v in list(a) + list(b) for k in v})
    na = len(a)
    rows = []
    for k in keys:
        row = {}
        for i, v in enumerate(a):
            c = v.get(k)
            if c:
                row[i] = c
        for j, v in enumerate(b):
            c = v.get(k)
            if c:
                row[na + j] = -c
        rows.append(row)
    eb = EchelonBasis()
    for kv in nullspace(rows, na + len(b)):
        x: Vec = {}
        for i, s in kv.items():
            if i < na:
                x = vaxpy(x, s, a[i])
        eb.add(x)
    return eb.canonical_basis()


def ldl_psd(gram: Sequence[Sequence]) -> tuple[bool, int, list[int]]:
    """Exact symmetric-pivoted LDL* of a Hermitian matrix.

    Returns ``(is_psd, rank, pivots)`` where ``pivots`` are the indices chosen
    as positive pivots, in elimination order (a basis of the form's
    non-degenerate part).
    """
    n = len(gram)
    a = [[as_scalar(x) for x in row] for row in gram]
    for i in range(n):
        for j in range(i, n):
            if a[i][j] != a[j][i].conj():
                raise ValueError(f"Gram matrix not Hermitian at ({i}, {j})")
    active = list(range(n))
    pivots: list[int] = []
    while active:
        # prefer the first positive diagonal entry
        piv = None
        for i in active:
            d = a[i][i]
            if d.im:
                raise ValueError("Hermitian diagonal must be real")
            if d.re < 0:
                return False, len(pivots), pivots
            if d.re > 0 and piv is None:
                piv = i
        if piv is None:
            # all remaining diagonals vanish: PSD forces the block to vanish
            for i in active:
                for j in active:
                    if a[i][j]:
                        return False, len(pivots), pivots
            break
        pivots.append(piv)
        active.remove(piv)
        d = a[piv][piv]
        col = {i: a[i][piv] for i in active if a[i][piv]}
        for i, ci in col.items():
            f = ci / d
            row_i = a[i]
            row_p = a[piv]
            for j in active:
                c = row_p[j]
                if c:
                    row_i[j] = row_i[j] - f * c
    return True, len(pivots), pivots
