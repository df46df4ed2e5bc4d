"""Finite-dimensional unital *-algebras over the Gaussian rationals.

An algebra is a basis with sparse structure constants, a unit vector, a
conjugate-linear star given on basis elements, and (when known) a faithful
normalized trace.  Matrix algebras use the matrix-unit basis e(i,j) with index
i*n + j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterable, Sequence

from .groups import FiniteGroup
from .linalg import EchelonBasis, Vec, span_intersection, vaxpy, vconj, vdot, vscale
from .scalars import ONE, ZERO, GaussQ, as_scalar

__all__ = [
    "AlgebraError",
    "NotAssociativeAlgebra",
    "NoTensorStructure",
    "NotUnitary",
    "SourceMismatch",
    "NotMorphism",
    "StarAlgebra",
    "SubalgebraSpan",
    "LinearMap",
    "ConditionalExpectation",
    "StarMorphism",
    "SquareReport",
    "matrix_algebra",
    "tensor",
    "direct_sum",
    "group_star_algebra",
    "scalars",
    "span_closure",
    "trace_expectation",
    "conjugate_expectation",
    "twisted_slice_map",
    "commuting_square_check",
    "nondegeneracy_check",
    "block_transpose",
    "biunitary_check",
    "permutation_biunitaries",
    "matrix_to_vec",
    "vec_to_matrix",
    "permutation_matrix",
]


class AlgebraError(ValueError):
    pass


class NotAssociativeAlgebra(AlgebraError):
    def __init__(self, triple):
        super().__init__(f"structure constants fail associativity on basis triple {triple}")
        self.witness = triple


class NoTensorStructure(AlgebraError):
    pass


class NotUnitary(AlgebraError):
    pass


class SourceMismatch(AlgebraError):
    pass


class NotMorphism(AlgebraError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class StarAlgebra:
    """Unital *-algebra with sparse structure constants.

    ``table[i][j]`` is the product of basis elements i and j as a sparse
    vector (absent means zero); ``star_images[i]`` is the star of basis
    element i.
    """

    def __init__(
        self,
        labels: Sequence[str],
        table: dict,
        unit: Vec,
        star_images: Sequence[Vec],
        trace: Vec | None = None,
        tensor_dims: tuple | None = None,
        check: bool = True,
    ):
        self.labels = tuple(labels)
        self.dim = len(self.labels)
        self.table = {i: {j: dict(v) for j, v in row.items() if v} for i, row in table.items()}
        self.unit = dict(unit)
        self.star_images = tuple(dict(v) for v in star_images)
        self.trace = None if trace is None else dict(trace)
        # (n, k) when the algebra is M_n (x) M_k in Kronecker order: index (n*k)*(a*k+i) + (b*k+j)
        self.tensor_dims = tensor_dims
        if len(self.star_images) != self.dim:
            raise AlgebraError("star must be given on every basis element")
        if check:
            self.check()

    # arithmetic

    def basis(self, i: int) -> Vec:
        return {i: ONE}

    def one(self) -> Vec:
        return dict(self.unit)

    def zero(self) -> Vec:
        return {}

    def mul_basis(self, i: int, j: int) -> Vec:
        return self.table.get(i, {}).get(j, {})

    def mul(self, x: Vec, y: Vec) -> Vec:
        out: Vec = {}
        for i, a in x.items():
            row = self.table.get(i)
            if not row:
                continue
            for j, b in y.items():
                v = row.get(j)
                if v:
                    out = vaxpy(out, a * b, v)
        return out

    def product(self, *xs: Vec) -> Vec:
        acc = self.one()
        for x in xs:
            acc = self.mul(acc, x)
        return acc

    def star(self, x: Vec) -> Vec:
        out: Vec = {}
        for i, c in x.items():
            out = vaxpy(out, c.conj(), self.star_images[i])
        return out

    def tau(self, x: Vec) -> GaussQ:
        if self.trace is None:
            raise AlgebraError("this algebra has no declared trace")
        return vdot(self.trace, x)

    def commutator(self, x: Vec, y: Vec) -> Vec:
        return vaxpy(self.mul(x, y), -ONE, self.mul(y, x))

    def is_commutative(self) -> bool:
        return all(
            self.mul_basis(i, j) == self.mul_basis(j, i) for i in range(self.dim) for j in range(i)
        )

    # validation

    def check(self) -> None:
        n = self.dim
        for i in range(n):
            e = {i: ONE}
            if self.mul(self.unit, e) != e or self.mul(e, self.unit) != e:
                raise AlgebraError(f"unit law fails on basis element {self.labels[i]}")
        for i in range(n):
            if self.star(self.star_images[i]) != {i: ONE}:
                raise AlgebraError(f"star is not involutive on {self.labels[i]}")
        self.check_associative()
        for i in range(n):
            for j in range(n):
                lhs = self.star(self.mul_basis(i, j))
                rhs = self.mul(self.star_images[j], self.star_images[i])
                if lhs != rhs:
                    raise AlgebraError(f"star is not an anti-homomorphism on ({i}, {j})")

    def check_associative(self) -> None:
        n = self.dim
        for i in range(n):
            row_i = self.table.get(i, {})
            for j in range(n):
                ij = row_i.get(j, {})
                for k in range(n):
                    lhs = self.mul(ij, {k: ONE})
                    rhs = self.mul({i: ONE}, self.mul_basis(j, k))
                    if lhs != rhs:
                        raise NotAssociativeAlgebra((i, j, k))

    def structure_equal(self, other: StarAlgebra) -> bool:
        return self.dim == other.dim and all(
            self.mul_basis(i, j) == other.mul_basis(i, j) for i in range(self.dim) for j in range(self.dim)
        )

    def __repr__(self):
        return f"StarAlgebra(dim={self.dim})"


def scalars() -> StarAlgebra:
    return StarAlgebra(["1"], {0: {0: {0: ONE}}}, {0: ONE}, [{0: ONE}], trace={0: ONE})


def matrix_algebra(n: int, tensor_dims: tuple | None = None) -> StarAlgebra:
    if n < 1:
        raise AlgebraError("matrix size must be positive")
    if tensor_dims is not None and tensor_dims[0] * tensor_dims[1] != n:
        raise AlgebraError("tensor factor sizes must multiply to n")
    labels = [f"e({i + 1},{j + 1})" for i in range(n) for j in range(n)]
    table = {}
    for i in range(n):
        for j in range(n):
            table[i * n + j] = {j * n + l: {i * n + l: ONE} for l in range(n)}
    unit = {i * n + i: ONE for i in range(n)}
    star = [{j * n + i: ONE} for i in range(n) for j in range(n)]
    tr = {i * n + i: GaussQ(1) / n for i in range(n)}
    return StarAlgebra(labels, table, unit, star, trace=tr, tensor_dims=tensor_dims, check=False)


def tensor(A: StarAlgebra, B: StarAlgebra) -> StarAlgebra:
    """Basis pairs (a, b) with index a*dim(B) + b; everything acts factorwise."""
    m = B.dim
    labels = [f"{la}⊗{lb}" for la in A.labels for lb in B.labels]
    table = {}
    for a1, rowA in A.table.items():
        for a2, va in rowA.items():
            for b1, rowB in B.table.items():
                for b2, vb in rowB.items():
                    prod = {}
                    for x, c in va.items():
                        for y, d in vb.items():
                            prod[x * m + y] = c * d
                    table.setdefault(a1 * m + b1, {})[a2 * m + b2] = prod
    unit = {x * m + y: c * d for x, c in A.unit.items() for y, d in B.unit.items()}
    star = []
    for a in range(A.dim):
        for b in range(B.dim):
            star.append({x * m + y: c * d for x, c in A.star_images[a].items() for y, d in B.star_images[b].items()})
    tr = None
    if A.trace is not None and B.trace is not None:
        tr = {x * m + y: c * d for x, c in A.trace.items() for y, d in B.trace.items()}
    return StarAlgebra(labels, table, unit, star, trace=tr, check=False)


def direct_sum(A: StarAlgebra, B: StarAlgebra) -> StarAlgebra:
    off = A.dim
    labels = [f"({l},0)" for l in A.labels] + [f"(0,{l})" for l in B.labels]
    table = {i: dict(row) for i, row in A.table.items()}
    for i, row in B.table.items():
        table[i + off] = {j + off: {k + off: c for k, c in v.items()} for j, v in row.items()}
    unit = dict(A.unit)
    unit.update({k + off: c for k, c in B.unit.items()})
    star = [dict(v) for v in A.star_images] + [{k + off: c for k, c in v.items()} for v in B.star_images]
    tr = None
    if A.trace is not None and B.trace is not None:
        half = GaussQ(1) / 2
        tr = {k: half * c for k, c in A.trace.items()}
        tr.update({k + off: half * c for k, c in B.trace.items()})
    return StarAlgebra(labels, table, unit, star, trace=tr, check=False)


def group_star_algebra(G: FiniteGroup) -> StarAlgebra:
    table = {x: {y: {G.mul[x][y]: ONE} for y in range(G.order)} for x in range(G.order)}
    labels = [G.label(x) for x in range(G.order)]
    star = [{G.inv[x]: ONE} for x in range(G.order)]
    return StarAlgebra(labels, table, {G.identity: ONE}, star, trace={G.identity: ONE}, check=False)


# matrices ----------------------------------------------------------------------


def matrix_to_vec(M: Sequence[Sequence]) -> Vec:
    n = len(M)
    out = {}
    for i, row in enumerate(M):
        if len(row) != n:
            raise AlgebraError("matrix must be square")
        for j, x in enumerate(row):
            x = as_scalar(x)
            if x:
                out[i * n + j] = x
    return out


def vec_to_matrix(v: Vec, n: int) -> list:
    M = [[ZERO] * n for _ in range(n)]
    for k, x in v.items():
        M[k // n][k % n] = x
    return M


def permutation_matrix(p: Sequence[int]) -> Vec:
    """Matrix with ones at (p[j], j), i.e. sending basis vector j to p[j]."""
    n = len(p)
    return {p[j] * n + j: ONE for j in range(n)}


# subalgebras ----------------------------------------------------------------------


class SubalgebraSpan:
    """Unital *-closed subspace of an algebra, kept as a reduced echelon basis."""

    def __init__(self, parent: StarAlgebra, vectors: Iterable[Vec], check: bool = True):
        self.parent = parent
        self._eb = EchelonBasis(track=False)
        for v in vectors:
            self._eb.add(v)
        self.basis = self._eb.canonical_basis()
        if check:
            self.check()

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, x: Vec) -> bool:
        return self._eb.contains(x)

    def check(self) -> None:
        A = self.parent
        if not self.contains(A.unit):
            raise AlgebraError("subalgebra span does not contain the unit")
        for x in self.basis:
            if not self.contains(A.star(x)):
                raise AlgebraError("subalgebra span is not star-closed")
            for y in self.basis:
                if not self.contains(A.mul(x, y)):
                    raise AlgebraError("subalgebra span is not closed under multiplication")

    def same_span(self, other: SubalgebraSpan) -> bool:
        return self.basis == other.basis

    def intersect(self, other: SubalgebraSpan) -> SubalgebraSpan:
        if self.parent is not other.parent:
            raise SourceMismatch("subalgebras of different algebras")
        return SubalgebraSpan(self.parent, span_intersection(self.basis, other.basis))

    def as_algebra(self) -> tuple[StarAlgebra, StarMorphism]:
        """The span as a standalone algebra in the basis ``self.basis``, with its inclusion."""
        A = self.parent
        eb = EchelonBasis(track=True)
        for v in self.basis:
            eb.add(v)
        n = self.dim
        table = {}
        for i, x in enumerate(self.basis):
            for j, y in enumerate(self.basis):
                c = eb.coordinates(A.mul(x, y))
                if c:
                    table.setdefault(i, {})[j] = c
        unit = eb.coordinates(A.unit)
        star = [eb.coordinates(A.star(x)) for x in self.basis]
        tr = None
        if A.trace is not None:
            tr = {i: A.tau(x) for i, x in enumerate(self.basis) if A.tau(x)}
        labels = [f"s{i + 1}" for i in range(n)]
        B = StarAlgebra(labels, table, unit, star, trace=tr, check=False)
        return B, StarMorphism(B, A, [dict(x) for x in self.basis])


def span_closure(A: StarAlgebra, gens: Iterable[Vec]) -> SubalgebraSpan:
    eb = EchelonBasis()
    members: list[Vec] = []

    def push(v):
        if eb.add(v):
            members.append(v)
            return True
        return False

    push(A.one())
    for g in gens:
        push(dict(g))
        push(A.star(g))
    k = 0
    while k < len(members):
        x = members[k]
        for y in list(members[: k + 1]):
            push(A.mul(x, y))
            push(A.mul(y, x))
        k += 1
    return SubalgebraSpan(A, members, check=False)


# maps ------------------------------------------------------------------------------


class LinearMap:
    """Linear map between algebras given by the images of basis vectors."""

    def __init__(self, source: StarAlgebra, images: Sequence[Vec], codomain: StarAlgebra | None = None):
        self.source = source
        self.codomain = codomain if codomain is not None else source
        self.images = [dict(v) for v in images]
        if len(self.images) != source.dim:
            raise AlgebraError("need an image for every basis vector")

    def __call__(self, x: Vec) -> Vec:
        out: Vec = {}
        for i, c in x.items():
            out = vaxpy(out, c, self.images[i])
        return out

    def compose(self, first: LinearMap) -> LinearMap:
        """self after first"""
        return LinearMap(first.source, [self(v) for v in first.images], self.codomain)

    def equals(self, other: LinearMap) -> bool:
        return self.images == other.images

    def rank(self) -> int:
        eb = EchelonBasis()
        for v in self.images:
            eb.add(v)
        return len(eb)

    def is_idempotent(self) -> bool:
        return all(self(v) == v for v in self.images)


class ConditionalExpectation(LinearMap):
    def __init__(self, source: StarAlgebra, target: SubalgebraSpan, images: Sequence[Vec], check: bool = True):
        if target.parent is not source:
            raise SourceMismatch("target must be a subalgebra of the source")
        super().__init__(source, images)
        self.target = target
        if check:
            self.check()

    def check(self) -> None:
        A = self.source
        for i, v in enumerate(self.images):
            if not self.target.contains(v):
                raise AlgebraError(f"image of basis element {A.labels[i]} leaves the target")
        for b in self.target.basis:
            if self(b) != b:
                raise AlgebraError("expectation is not the identity on its target")
        for i in range(A.dim):
            e = {i: ONE}
            if self(A.star(e)) != A.star(self.images[i]):
                raise AlgebraError(f"expectation does not commute with star at {A.labels[i]}")
            for b1 in self.target.basis:
                left = A.mul(b1, e)
                if self(left) != A.mul(b1, self.images[i]):
                    raise AlgebraError(f"left bimodule law fails at {A.labels[i]}")
                if self(A.mul(e, b1)) != A.mul(self.images[i], b1):
                    raise AlgebraError(f"right bimodule law fails at {A.labels[i]}")
        if A.trace is not None:
            for i in range(A.dim):
                if A.tau(self.images[i]) != A.trace.get(i, ZERO):
                    raise AlgebraError(f"expectation does not preserve the trace at {A.labels[i]}")


@dataclass
class StarMorphism:
    domain: StarAlgebra
    codomain: StarAlgebra
    images: list  # per domain basis element

    def __call__(self, x: Vec) -> Vec:
        out: Vec = {}
        for i, c in x.items():
            out = vaxpy(out, c, self.images[i])
        return out

    def rank(self) -> int:
        eb = EchelonBasis()
        for v in self.images:
            eb.add(v)
        return len(eb)

    def check(self) -> dict:
        """Verify unital, multiplicative and star laws exactly; report injectivity."""
        D, C = self.domain, self.codomain
        if self(D.unit) != C.unit:
            raise NotMorphism("map is not unital")
        for i in range(D.dim):
            if self(D.star_images[i]) != C.star(self.images[i]):
                raise NotMorphism(f"map does not commute with star at {D.labels[i]}", (i,))
            for j in range(D.dim):
                if self(D.mul_basis(i, j)) != C.mul(self.images[i], self.images[j]):
                    raise NotMorphism(f"map is not multiplicative on ({D.labels[i]}, {D.labels[j]})", (i, j))
        r = self.rank()
        return {"rank": r, "injective": r == D.dim}

    def compose(self, first: StarMorphism) -> StarMorphism:
        return StarMorphism(first.domain, self.codomain, [self(v) for v in first.images])

    def image(self) -> SubalgebraSpan:
        return SubalgebraSpan(self.codomain, self.images, check=False)


# expectations on M_n (x) M_k --------------------------------------------------------


def _dims(A: StarAlgebra) -> tuple:
    if not A.tensor_dims:
        raise NoTensorStructure("algebra has no declared tensor factorization")
    return A.tensor_dims


def _split(n: int, k: int, idx: int) -> tuple:
    N = n * k
    r, c = divmod(idx, N)
    a, i = divmod(r, k)
    b, j = divmod(c, k)
    return a, b, i, j


def _join(n: int, k: int, a: int, b: int, i: int, j: int) -> int:
    return (a * k + i) * (n * k) + (b * k + j)


def trace_expectation(A: StarAlgebra, side: str) -> ConditionalExpectation:
    """Slice map against the normalized trace of one tensor factor.

    side="first":  a(x)b -> tau(a) 1(x)b, onto 1 (x) M_k
    side="second": a(x)b -> tau(b) a(x)1, onto M_n (x) 1
    """
    n, k = _dims(A)
    images = []
    for idx in range(A.dim):
        a, b, i, j = _split(n, k, idx)
        if side == "first":
            img = {_join(n, k, c, c, i, j): GaussQ(1) / n for c in range(n)} if a == b else {}
        elif side == "second":
            img = {_join(n, k, a, b, c, c): GaussQ(1) / k for c in range(k)} if i == j else {}
        else:
            raise ValueError("side must be 'first' or 'second'")
        images.append(img)
    target = SubalgebraSpan(A, [v for v in images if v], check=False)
    return ConditionalExpectation(A, target, images)


def _check_unitary(A: StarAlgebra, u: Vec) -> None:
    us = A.star(u)
    if A.mul(us, u) != A.unit or A.mul(u, us) != A.unit:
        raise NotUnitary("element is not unitary")


def conjugate_expectation(E: ConditionalExpectation, u: Vec) -> ConditionalExpectation:
    """x -> u E(u* x u) u*, the expectation onto u T u*."""
    A = E.source
    _check_unitary(A, u)
    us = A.star(u)
    images = [A.product(u, E(A.product(us, {i: ONE}, u)), us) for i in range(A.dim)]
    target = SubalgebraSpan(A, [A.product(u, b, us) for b in E.target.basis], check=False)
    return ConditionalExpectation(A, target, images)


def twisted_slice_map(E: ConditionalExpectation, u: Vec) -> LinearMap:
    """x -> u E(x) u*, conjugating only the output.

    This is the literal formula E_u(a(x)b) = tau(b) u(a(x)1)u for a self-adjoint
    unitary u.  It lands in u T u* but is not idempotent in general, so it is
    returned as a plain linear map.
    """
    A = E.source
    _check_unitary(A, u)
    us = A.star(u)
    return LinearMap(A, [A.product(u, v, us) for v in E.images])


@dataclass
class SquareReport:
    ok: bool
    commute: bool
    onto_intersection: bool
    intersection_dim: int
    witness: dict = field(default_factory=dict)


def commuting_square_check(E1: LinearMap, E2: LinearMap) -> SquareReport:
    """E1 E2 = E2 E1 and the common composite is the projection onto target1 ∩ target2."""
    if E1.source is not E2.source:
        raise SourceMismatch("expectations act on different algebras")
    A = E1.source
    for name, E in (("E1", E1), ("E2", E2)):
        if not E.is_idempotent():
            bad = next(i for i, v in enumerate(E.images) if E(v) != v)
            return SquareReport(False, False, False, 0, {"not_idempotent": name, "basis": A.labels[bad]})
    T1 = getattr(E1, "target", None) or SubalgebraSpan(A, E1.images, check=False)
    T2 = getattr(E2, "target", None) or SubalgebraSpan(A, E2.images, check=False)
    meet = span_intersection(T1.basis, T2.basis)
    meet_eb = EchelonBasis()
    for v in meet:
        meet_eb.add(v)
    P = E1.compose(E2)
    Q = E2.compose(E1)
    for i in range(A.dim):
        if P.images[i] != Q.images[i]:
            return SquareReport(
                False,
                False,
                False,
                len(meet),
                {"basis": A.labels[i], "E1E2": P.images[i], "E2E1": Q.images[i]},
            )
    onto = all(meet_eb.contains(v) for v in P.images) and all(P(v) == v for v in meet)
    if not onto:
        bad = next((i for i, v in enumerate(P.images) if not meet_eb.contains(v)), None)
        wit = {"basis": A.labels[bad], "E1E2": P.images[bad]} if bad is not None else {}
        return SquareReport(False, True, False, len(meet), wit)
    return SquareReport(True, True, True, len(meet))


def nondegeneracy_check(A: StarAlgebra, S1: SubalgebraSpan, S2: SubalgebraSpan) -> dict:
    """Ranks of span{xy} and span{yx}; non-degenerate when both equal dim A."""
    r12, r21 = EchelonBasis(), EchelonBasis()
    for x in S1.basis:
        for y in S2.basis:
            r12.add(A.mul(x, y))
            r21.add(A.mul(y, x))
    return {
        "ok": len(r12) == A.dim and len(r21) == A.dim,
        "rank_xy": len(r12),
        "rank_yx": len(r21),
    }


def block_transpose(w: Vec, n: int, k: int) -> Vec:
    """Swap the outer (block) indices of an element of M_n (x) M_k."""
    out = {}
    for idx, c in w.items():
        a, b, i, j = _split(n, k, idx)
        out[_join(n, k, b, a, i, j)] = c
    return out


def biunitary_check(A: StarAlgebra, w: Vec) -> dict:
    n, k = _dims(A)

    def unitary(x):
        xs = A.star(x)
        return A.mul(xs, x) == A.unit and A.mul(x, xs) == A.unit

    u_ok = unitary(w)
    bt_ok = unitary(block_transpose(w, n, k))
    return {"ok": u_ok and bt_ok, "unitary": u_ok, "block_transpose_unitary": bt_ok}


def permutation_biunitaries(n: int, k: int) -> list[tuple]:
    """Every permutation of n*k points whose matrix is biunitary in M_n (x) M_k."""
    A = matrix_algebra(n * k, (n, k))
    return [p for p in permutations(range(n * k)) if biunitary_check(A, permutation_matrix(p))["ok"]]
