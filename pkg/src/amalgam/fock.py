"""GNS modules of conditional expectations and truncated free-product Fock modules.

Everything is exact.  A factor module E = xi B + E° is described by a small
protocol (inner products, left base action, the action of its algebra); the
Fock module only talks to that protocol, so the same code runs the plain
reduced free product over B and the two-level construction where every
factor is itself the L^2 space of an amalgamated product A_i *_{B_i} B.

Vectors of E° are sparse dicts over factor-specific keys.  Tensor words are
dicts over tuples of keys; the balancing relation of the internal tensor
product over B is never imposed explicitly, it is absorbed by working modulo
the null space of the (positive) scalarized inner product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .algebras import AlgebraError, ConditionalExpectation, StarAlgebra, StarMorphism, scalars
from .groups import FiniteGroup, GroupMorphism
from .linalg import EchelonBasis, Vec, ldl_psd, nullspace, solve
from .scalars import ONE, ZERO, GaussQ

__all__ = [
    "TraceNotFaithful",
    "BaseMismatch",
    "FactorIndexBad",
    "DepthExceeded",
    "BNotRealizable",
    "Expectation",
    "trace_state",
    "group_expectation",
    "ExpectationModule",
    "gns",
    "gns_faithful",
    "GNSFactor",
    "CompositeFactor",
    "FockModule",
    "fock_space",
    "lambda_rep",
    "free_expectation",
    "free_decomposition",
    "factor_expectation",
    "generalized_reduced_amalgam",
    "summand_count",
    "decomposition_audit",
]


class TraceNotFaithful(AlgebraError):
    pass


class BaseMismatch(AlgebraError):
    pass


class FactorIndexBad(AlgebraError):
    pass


class DepthExceeded(AlgebraError):
    def __init__(self, length, depth):
        super().__init__(f"word of length {length} exceeds depth {depth}")
        self.length = length
        self.depth = depth


class BNotRealizable(AlgebraError):
    pass


def _acc(out: dict, key, c) -> None:
    s = out.get(key)
    s = c if s is None else s + c
    if s:
        out[key] = s
    else:
        out.pop(key, None)


def _add_into(out: dict, c, v: dict) -> None:
    if c:
        for k, x in v.items():
            _acc(out, k, c * x)


# expectations onto a base ----------------------------------------------------------


@dataclass(eq=False)
class Expectation:
    """phi: A -> B together with the unital embedding iota: B -> A it retracts."""

    algebra: StarAlgebra
    base: StarAlgebra
    iota: StarMorphism
    images: list  # phi(basis element of A), as vectors of B

    def __call__(self, x: Vec) -> Vec:
        out: dict = {}
        for i, c in x.items():
            _add_into(out, c, self.images[i])
        return out

    def centered(self, x: Vec) -> Vec:
        out = dict(x)
        _add_into(out, -ONE, self.iota(self(x)))
        return out

    def kernel_basis(self) -> list[Vec]:
        rows = [dict() for _ in range(self.base.dim)]
        for j, img in enumerate(self.images):
            for k, c in img.items():
                rows[k][j] = c
        return nullspace(rows, self.algebra.dim)

    def check(self) -> None:
        A, B = self.algebra, self.base
        if self.iota.domain is not B or self.iota.codomain is not A:
            raise BaseMismatch("embedding does not go from the base into the algebra")
        if not self.iota.check()["injective"]:
            raise BaseMismatch("base embedding is not injective")
        for b in range(B.dim):
            if self(self.iota.images[b]) != {b: ONE}:
                raise AlgebraError(f"expectation is not the identity on the base at {B.labels[b]}")
        for a in range(A.dim):
            if self(A.star_images[a]) != B.star(self.images[a]):
                raise AlgebraError(f"expectation does not commute with star at {A.labels[a]}")
            for b in range(B.dim):
                ib = self.iota.images[b]
                if self(A.mul(ib, {a: ONE})) != B.mul({b: ONE}, self.images[a]):
                    raise AlgebraError(f"left bimodule law fails at {A.labels[a]}")
                if self(A.mul({a: ONE}, ib)) != B.mul(self.images[a], {b: ONE}):
                    raise AlgebraError(f"right bimodule law fails at {A.labels[a]}")

    @classmethod
    def from_conditional(cls, E: ConditionalExpectation, iota: StarMorphism) -> Expectation:
        """Turn E: A -> A (onto iota(B)) into B-valued form."""
        A = E.source
        rows = [dict() for _ in range(A.dim)]
        for col, img in enumerate(iota.images):
            for k, c in img.items():
                rows[k][col] = c
        images = []
        for v in E.images:
            sol = solve(rows, [v.get(k, ZERO) for k in range(A.dim)], iota.domain.dim)
            if sol is None:
                raise BaseMismatch("expectation leaves the image of the base")
            images.append(sol)
        return cls(A, iota.domain, iota, images)


def trace_state(A: StarAlgebra) -> Expectation:
    """The algebra's own trace, as an expectation onto the scalars."""
    if A.trace is None:
        raise TraceNotFaithful("algebra has no trace")
    C = scalars()
    iota = StarMorphism(C, A, [dict(A.unit)])
    images = [({0: A.trace[i]} if A.trace.get(i) else {}) for i in range(A.dim)]
    return Expectation(A, C, iota, images)


def group_expectation(f: GroupMorphism, A: StarAlgebra | None = None, B: StarAlgebra | None = None) -> Expectation:
    """C[G] -> C[H] for an injective f: H -> G, keeping the part supported on f(H)."""
    from .algebras import group_star_algebra

    H, G = f.domain, f.codomain
    A = A if A is not None else group_star_algebra(G)
    B = B if B is not None else group_star_algebra(H)
    where = {g: h for h, g in enumerate(f.map)}
    iota = StarMorphism(B, A, [{g: ONE} for g in f.map])
    images = [({where[g]: ONE} if g in where else {}) for g in range(G.order)]
    return Expectation(A, B, iota, images)


def _check_trace(B: StarAlgebra) -> None:
    if B.trace is None:
        raise TraceNotFaithful("base algebra carries no trace")
    gram = [[B.tau(B.mul(B.star({i: ONE}), {j: ONE})) for j in range(B.dim)] for i in range(B.dim)]
    ok, r, _ = ldl_psd(gram)
    if not ok or r != B.dim:
        raise TraceNotFaithful(f"trace Gram matrix has rank {r} of {B.dim}")


# GNS -----------------------------------------------------------------------------


@dataclass
class ExpectationModule:
    expectation: Expectation
    basis: list  # indices of A-basis elements whose classes form a basis of E
    gram: list  # scalarized Gram matrix on that basis
    null_space: list  # vectors of A with zero norm
    complement: list  # vectors of A spanning E° (a basis of ker phi)
    faithful: bool
    kernel_witness: Vec | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, x: Vec) -> list:
        """Coordinates of the class of x in the chosen basis."""
        A, phi = self.expectation.algebra, self.expectation
        B = self.expectation.base
        rhs = [B.tau(phi(A.mul(A.star({p: ONE}), x))) for p in self.basis]
        sol = solve([{j: g for j, g in enumerate(row) if g} for row in self.gram], rhs, len(self.basis))
        return [sol.get(k, ZERO) for k in range(len(self.basis))]

    def pi(self, a: Vec) -> list:
        """Matrix of the left action of a, columns indexed by the basis."""
        A = self.expectation.algebra
        cols = [self.coordinates(A.mul(a, {p: ONE})) for p in self.basis]
        n = len(self.basis)
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def _scalar_form(phi: Expectation):
    A, B = phi.algebra, phi.base
    return lambda x, y: B.tau(phi(A.mul(A.star(x), y)))


def gns(phi: Expectation) -> ExpectationModule:
    """Separate A by the null space of tau_B(phi(a* b)) and decide faithfulness of pi."""
    B = phi.base
    _check_trace(B)
    A = phi.algebra
    form = _scalar_form(phi)
    full = [[form({i: ONE}, {j: ONE}) for j in range(A.dim)] for i in range(A.dim)]
    ok, r, piv = ldl_psd(full)
    if not ok:
        raise AlgebraError("expectation is not positive on the basis Gram matrix")
    piv = sorted(piv)
    gram = [[full[i][j] for j in piv] for i in piv]
    null = nullspace([{j: c for j, c in enumerate(row) if c} for row in full], A.dim)
    witness = _pi_kernel(A, piv, full, form)
    return ExpectationModule(phi, piv, gram, null, phi.kernel_basis(), witness is None, witness)


def _pi_kernel(A: StarAlgebra, piv, full, form) -> Vec | None:
    """Some nonzero a with a x in the null space for every x, if one exists."""
    # a annihilates E iff form(e_p, a e_k) = 0 for all pivots p and basis k
    rows = []
    for k in range(A.dim):
        for p in piv:
            row = {}
            for j in range(A.dim):
                c = form({p: ONE}, A.mul({j: ONE}, {k: ONE}))
                if c:
                    row[j] = c
            if row:
                rows.append(row)
    kern = nullspace(rows, A.dim)
    return kern[0] if kern else None


def gns_faithful(E) -> dict:
    """Faithfulness of the GNS representation of an expectation (either flavour)."""
    if isinstance(E, ConditionalExpectation):
        A = E.source
        if A.trace is None:
            return {"faithful": None, "reason": "no trace on the algebra"}
        form = lambda x, y: A.tau(E(A.mul(A.star(x), y)))  # noqa: E731
    else:
        A = E.algebra
        form = _scalar_form(E)
    full = [[form({i: ONE}, {j: ONE}) for j in range(A.dim)] for i in range(A.dim)]
    ok, r, piv = ldl_psd(full)
    if not ok:
        return {"faithful": False, "reason": "form is not positive"}
    w = _pi_kernel(A, sorted(piv), full, form)
    return {"faithful": w is None, "rank": r, "witness": w}


# factor modules ---------------------------------------------------------------------


class GNSFactor:
    """E = L^2(A, phi) over B, with E° realised as ker phi inside A."""

    def __init__(self, phi: Expectation, name: str = ""):
        self.phi = phi
        self.algebra = phi.algebra
        self.base = phi.base
        self.name = name
        self._gens = None
        self._span = None

    def inner(self, x: dict, y: dict) -> Vec:
        A = self.algebra
        return self.phi(A.mul(A.star(x), y))

    def left(self, b: Vec, x: dict) -> dict:
        return self.algebra.mul(self.phi.iota(b), x)

    def right(self, x: dict, b: Vec) -> dict:
        return self.algebra.mul(x, self.phi.iota(b))

    def _split(self, y: Vec) -> tuple:
        beta = self.phi(y)
        z = dict(y)
        _add_into(z, -ONE, self.phi.iota(beta))
        return beta, z

    def act_xi(self, a, b: Vec) -> tuple:
        return self._split(self.algebra.mul(a, self.phi.iota(b)))

    def act_eo(self, a, x: dict) -> tuple:
        return self._split(self.algebra.mul(a, x))

    def spanning(self) -> list:
        if self._span is None:
            self._span = self.phi.kernel_basis()
        return self._span

    def generators(self) -> list:
        """A generating set of E° as a right B-module."""
        if self._gens is None:
            self._gens = _module_generators(self.spanning(), self.base, self.right)
        return self._gens

    def centered_basis(self) -> list:
        return [("a", x) for x in self.spanning()]

    def element(self, a):
        return a


def _module_generators(spanning: list, B: StarAlgebra, right) -> list:
    eb = EchelonBasis()
    gens = []
    target = EchelonBasis()
    for v in spanning:
        target.add(_index_keys(v))
    for v in spanning:
        grew = False
        for b in range(B.dim):
            if eb.add(_index_keys(right(v, {b: ONE}))):
                grew = True
        if grew:
            gens.append(v)
        if len(eb) == len(target):
            break
    return gens


_KEY_IDS: dict = {}


def _index_keys(v: dict) -> Vec:
    """Map arbitrary hashable keys to integers so EchelonBasis can handle them."""
    out = {}
    for k, c in v.items():
        i = _KEY_IDS.setdefault(k, len(_KEY_IDS))
        out[i] = c
    return out


# Fock module ---------------------------------------------------------------------------


class FockModule:
    """xi B plus alternating words E°_{i1} (x)_B ... (x)_B E°_{in}, n <= depth."""

    def __init__(self, base: StarAlgebra, factors: list, depth: int):
        if depth < 1:
            raise ValueError("depth must be at least 1")
        for f in factors:
            if f.base is not base and not f.base.structure_equal(base):
                raise BaseMismatch("all factors must share the base algebra")
        _check_trace(base)
        self.base = base
        self.factors = list(factors)
        self.depth = depth
        self.boundary = False
        self._basis_cache: dict = {}

    # shapes

    def shapes(self, max_len: int | None = None):
        top = self.depth if max_len is None else max_len
        out = [()]
        frontier = [()]
        for _ in range(top):
            nxt = []
            for s in frontier:
                for i in range(len(self.factors)):
                    if not s or s[-1] != i:
                        nxt.append(s + (i,))
            out += nxt
            frontier = nxt
        return out

    # vectors

    def xi(self, b: Vec | None = None) -> dict:
        return {(): dict(b if b is not None else self.base.unit)}

    def _left_word(self, beta: Vec, shape: tuple, keys: tuple, c, out: dict) -> None:
        """Add c * (beta acting on the first letter of the elementary tensor) to out."""
        f = self.factors[shape[0]]
        for k, x in f.left(beta, {keys[0]: ONE}).items():
            _acc(out.setdefault(shape, {}), (k,) + keys[1:], c * x)

    def lam(self, i: int, a, v: dict) -> dict:
        if not 0 <= i < len(self.factors):
            raise FactorIndexBad(f"no factor {i}")
        f = self.factors[i]
        out: dict = {}
        beta_xi, z_xi = None, None
        for shape, comp in v.items():
            if shape == ():
                beta, z = f.act_xi(a, comp)
                _add_into(out.setdefault((), {}), ONE, beta)
                for k, c in z.items():
                    _acc(out.setdefault((i,), {}), (k,), c)
            elif shape[0] != i:
                if beta_xi is None:
                    beta_xi, z_xi = f.act_xi(a, self.base.unit)
                for keys, c in comp.items():
                    if beta_xi:
                        self._left_word(beta_xi, shape, keys, c, out)
                    if z_xi:
                        if len(shape) >= self.depth:
                            self.boundary = True
                            continue
                        target = out.setdefault((i,) + shape, {})
                        for k, x in z_xi.items():
                            _acc(target, (k,) + keys, c * x)
            else:
                for keys, c in comp.items():
                    beta, z = f.act_eo(a, {keys[0]: ONE})
                    rest = keys[1:]
                    if beta:
                        if not rest:
                            _add_into(out.setdefault((), {}), c, beta)
                        else:
                            self._left_word(beta, shape[1:], rest, c, out)
                    target = out.setdefault(shape, {})
                    for k, x in z.items():
                        _acc(target, (k,) + rest, c * x)
        return {s: comp for s, comp in out.items() if comp}

    def apply_word(self, word, v: dict | None = None) -> dict:
        """lambda_{i1}(a1) ... lambda_{in}(an) v (rightmost letter first)."""
        v = self.xi() if v is None else v
        for i, a in reversed(list(word)):
            v = self.lam(i, a, v)
        return v

    def inner_elementary(self, shape: tuple, x: tuple, y: tuple) -> Vec:
        beta = None
        for i, kx, ky in zip(shape, x, y):
            f = self.factors[i]
            yv = {ky: ONE} if beta is None else f.left(beta, {ky: ONE})
            beta = f.inner({kx: ONE}, yv)
            if not beta:
                return {}
        return beta

    def inner(self, v: dict, w: dict) -> Vec:
        B = self.base
        out: dict = {}
        for shape, cv in v.items():
            cw = w.get(shape)
            if not cw:
                continue
            if shape == ():
                _add_into(out, ONE, B.mul(B.star(cv), cw))
                continue
            for kx, c1 in cv.items():
                for ky, c2 in cw.items():
                    _add_into(out, c1.conj() * c2, self.inner_elementary(shape, kx, ky))
        return out

    def norm2(self, v: dict) -> GaussQ:
        return self.base.tau(self.inner(v, v))

    def is_null(self, v: dict) -> bool:
        return not self.norm2(v)

    def sub(self, v: dict, w: dict) -> dict:
        out = {s: dict(c) for s, c in v.items()}
        for s, c in w.items():
            _add_into(out.setdefault(s, {}), -ONE, c)
        return {s: c for s, c in out.items() if c}

    # bases

    def spanning_tensors(self, shape: tuple) -> list:
        if shape == ():
            return [{(): {b: ONE}} for b in range(self.base.dim)]
        slots = [self.factors[i].generators() for i in shape[:-1]] + [self.factors[shape[-1]].spanning()]
        out = []
        for combo in product(*slots):
            t: dict = {(): ONE}
            for x in combo:
                nxt: dict = {}
                for keys, c in t.items():
                    for k, d in x.items():
                        _acc(nxt, keys + (k,), c * d)
                t = nxt
            if t:
                out.append({shape: t})
        return out

    def shape_basis(self, shape: tuple) -> tuple:
        """(basis vectors, Gram matrix on them, psd flag) for one shape."""
        hit = self._basis_cache.get(shape)
        if hit is not None:
            return hit
        span = self.spanning_tensors(shape)
        gram = [[self.base.tau(self.inner(x, y)) for y in span] for x in span]
        ok, r, piv = ldl_psd(gram) if span else (True, 0, [])
        piv = sorted(piv)
        res = ([span[p] for p in piv], [[gram[p][q] for q in piv] for p in piv], ok)
        self._basis_cache[shape] = res
        return res

    def shape_dims(self) -> dict:
        return {s: len(self.shape_basis(s)[0]) for s in self.shapes()}

    @property
    def dim(self) -> int:
        return sum(self.shape_dims().values())

    def gram_psd(self) -> bool:
        return all(self.shape_basis(s)[2] for s in self.shapes())

    def basis(self) -> list:
        out = []
        for s in self.shapes():
            out += [(s, v) for v in self.shape_basis(s)[0]]
        return out

    def coordinates(self, v: dict) -> dict:
        """Coordinates of v on basis(), shape by shape."""
        out = {}
        offset = 0
        for s in self.shapes():
            vecs, gram, _ = self.shape_basis(s)
            comp = v.get(s)
            if comp and vecs:
                piece = {s: comp}
                rhs = [self.base.tau(self.inner(e, piece)) for e in vecs]
                rows = [{j: g for j, g in enumerate(row) if g} for row in gram]
                sol = solve(rows, rhs, len(vecs))
                for j, c in sol.items():
                    out[offset + j] = c
            offset += len(vecs)
        return out


def fock_space(factors, B: StarAlgebra, depth: int) -> FockModule:
    return FockModule(B, factors, depth)


def lambda_rep(F: FockModule, i: int, a) -> tuple[list, bool]:
    """Matrix of lambda_i(a) on F.basis() (columns = images) and whether the boundary was touched."""
    F.boundary = False
    cols = [F.coordinates(F.lam(i, a, v)) for _, v in F.basis()]
    touched = F.boundary
    F.boundary = False
    return cols, touched


def free_expectation(F: FockModule, word) -> Vec:
    """(xi, lambda(a1) ... lambda(an) xi), exact for words no longer than the depth."""
    word = list(word)
    if len(word) > F.depth:
        raise DepthExceeded(len(word), F.depth)
    return dict(F.apply_word(word).get((), {}))


# words in the free product, without the Fock module --------------------------------------


def _merge(F: FockModule, word: list) -> list:
    out: list = []
    for i, a in word:
        if out and out[-1][0] == i:
            out[-1] = (i, F.factors[i].algebra.mul(out[-1][1], a))
        else:
            out.append((i, dict(a)))
    return out


def free_decomposition(F: FockModule, word) -> tuple:
    """Write a product of letters as b + sum of reduced words of centered letters.

    Returns (b, [(coefficient, reduced word)]).  Only plain GNS factors are
    supported: every letter must be an element of its factor's algebra.
    """
    memo: dict = {}
    return _decompose(F, _merge(F, list(word)), memo)


def _freeze(word):
    return tuple((i, tuple(sorted(a.items(), key=lambda kv: kv[0]))) for i, a in word)


def _decompose(F: FockModule, word: list, memo: dict):
    key = _freeze(word)
    if key in memo:
        return memo[key]
    B = F.base
    if not word:
        res = (dict(B.unit), [])
        memo[key] = res
        return res
    *prefix, (j, a) = word
    f = F.factors[j]
    beta = f.phi(a)
    centered = f.phi.centered(a)
    bvec: dict = {}
    terms: list = []
    # prefix * iota(phi(a))
    if beta:
        if prefix:
            pi, pa = prefix[-1]
            g = F.factors[pi]
            shifted = prefix[:-1] + [(pi, g.algebra.mul(pa, g.phi.iota(beta)))]
            b2, t2 = _decompose(F, shifted, memo)
        else:
            b2, t2 = beta, []
        _add_into(bvec, ONE, b2)
        terms += t2
    # prefix * a°
    if centered:
        b0, ws = _decompose(F, list(prefix), memo)
        if b0:
            lead = f.algebra.mul(f.phi.iota(b0), centered)
            if lead:
                terms.append((ONE, [(j, lead)]))
        for c, w in ws:
            if w[-1][0] != j:
                terms.append((c, w + [(j, centered)]))
            else:
                merged = w[:-1] + [(j, f.algebra.mul(w[-1][1], centered))]
                b3, t3 = _decompose(F, merged, memo)
                _add_into(bvec, c, b3)
                terms += [(c * d, u) for d, u in t3]
    res = (bvec, terms)
    memo[key] = res
    return res


def factor_expectation(F: FockModule, i0: int, word) -> Vec:
    """The canonical expectation of the free product onto factor i0, as an element of A_{i0}."""
    word = list(word)
    if len(word) > F.depth:
        raise DepthExceeded(len(word), F.depth)
    f0 = F.factors[i0]
    b, terms = free_decomposition(F, word)
    out = dict(f0.phi.iota(b))
    for c, w in terms:
        if len(w) == 1 and w[0][0] == i0:
            _add_into(out, c, w[0][1])
    return out


# two-level construction --------------------------------------------------------------


class CompositeFactor:
    """L^2(A_i *_{B_i} B, E_i) over B, truncated at an inner depth.

    Inner words alternate between A_i° (source 0) and B° (source 1) and are
    stored through the inner Fock module over B_i; a vector of E° is a word
    ending in an A_i° letter followed by a trailing element of B.  Keys are
    (inner shape, inner keys, index of a basis element of B).
    """

    def __init__(self, phi: Expectation, psi: Expectation, depth: int, name: str = ""):
        if phi.base is not psi.base and not phi.base.structure_equal(psi.base):
            raise BaseMismatch("phi_i and psi_i must land in the same B_i")
        self.phi, self.psi = phi, psi
        self.base = psi.algebra  # B
        self.small = phi.base  # B_i
        self.embed = psi.iota  # B_i -> B
        self.inner_fock = FockModule(self.small, [GNSFactor(phi, "A"), GNSFactor(psi, "B")], depth)
        self.depth = depth
        self.name = name
        self._gens = None
        self._span = None

    # conversion between inner Fock vectors and E

    def _normalize(self, v: dict, b: Vec) -> tuple:
        """(xi part in B, E° part) of the inner vector v followed by the trailing element b."""
        B = self.base
        xi_part: dict = {}
        eo: dict = {}
        stack = [(shape, keys, c, dict(b)) for shape, comp in v.items() for keys, c in comp.items()]
        while stack:
            shape, keys, c, tail = stack.pop()
            if not tail:
                continue
            if shape == ():
                continue
            if shape[-1] == 1:
                new_tail = B.mul({keys[-1]: ONE}, tail)
                if len(shape) == 1:
                    _add_into(xi_part, c, new_tail)
                else:
                    stack.append((shape[:-1], keys[:-1], c, new_tail))
            else:
                for bi, d in tail.items():
                    _acc(eo, (shape, keys, bi), c * d)
        scalar = v.get(())
        if scalar:
            _add_into(xi_part, ONE, B.mul(self.embed(scalar), b))
        return xi_part, eo

    def _inner_vec(self, key) -> tuple:
        shape, keys, bi = key
        return {shape: {keys: ONE}}, {bi: ONE}

    def _apply(self, a, v: dict, b: Vec) -> tuple:
        source, x = a
        w = self.inner_fock.lam(source, x, v)
        return self._normalize(w, b)

    def inner(self, x: dict, y: dict) -> Vec:
        B = self.base
        out: dict = {}
        for kx, c1 in x.items():
            for ky, c2 in y.items():
                if kx[0] != ky[0]:
                    continue
                m = self.inner_fock.inner_elementary(kx[0], kx[1], ky[1])
                if not m:
                    continue
                val = B.product(B.star({kx[2]: ONE}), self.embed(m), {ky[2]: ONE})
                _add_into(out, c1.conj() * c2, val)
        return out

    def left(self, b: Vec, x: dict) -> dict:
        out: dict = {}
        for key, c in x.items():
            v, tail = self._inner_vec(key)
            _, eo = self._apply((1, self.psi_element(b)), v, tail)
            _add_into(out, c, eo)
        return out

    def psi_element(self, b: Vec) -> Vec:
        return b

    def right(self, x: dict, b: Vec) -> dict:
        B = self.base
        out: dict = {}
        for (shape, keys, bi), c in x.items():
            for bj, d in B.mul({bi: ONE}, b).items():
                _acc(out, (shape, keys, bj), c * d)
        return out

    def act_xi(self, a, b: Vec) -> tuple:
        return self._apply(a, self.inner_fock.xi(), b)

    def act_eo(self, a, x: dict) -> tuple:
        xi_part: dict = {}
        eo: dict = {}
        for key, c in x.items():
            v, tail = self._inner_vec(key)
            p, q = self._apply(a, v, tail)
            _add_into(xi_part, c, p)
            _add_into(eo, c, q)
        return xi_part, eo

    def _inner_words(self, use_generators: bool) -> list:
        """Tensors of inner words ending in an A_i° letter (generators in every slot)."""
        fA, fB = self.inner_fock.factors
        out = []
        for shape in self.inner_fock.shapes():
            if not shape or shape[-1] != 0:
                continue
            slots = [(fA if i == 0 else fB).generators() for i in shape]
            for combo in product(*slots):
                t: dict = {(): ONE}
                for x in combo:
                    nxt: dict = {}
                    for keys, c in t.items():
                        for k, d in x.items():
                            _acc(nxt, keys + (k,), c * d)
                    t = nxt
                if t:
                    out.append((shape, t))
        return out

    def generators(self) -> list:
        if self._gens is None:
            unit = self.base.unit
            gens = []
            for shape, t in self._inner_words(True):
                v: dict = {}
                for keys, c in t.items():
                    for bi, d in unit.items():
                        _acc(v, (shape, keys, bi), c * d)
                gens.append(v)
            self._gens = gens
        return self._gens

    def spanning(self) -> list:
        if self._span is None:
            out = []
            for g in self.generators():
                for b in range(self.base.dim):
                    out.append(self.right(g, {b: ONE}))
            self._span = out
        return self._span


@dataclass
class ReducedAmalgam:
    fock: FockModule
    factors: list
    injective: list = field(default_factory=list)  # sigma_i injective at depth-0 compression

    def expectation(self, word) -> Vec:
        """word: list of (factor, (source, element)); source 0 = A_i, 1 = B."""
        return free_expectation(self.fock, word)


def generalized_reduced_amalgam(phis, psis, depth: int = 2, inner_depth: int | None = None) -> ReducedAmalgam:
    """Outer free product over B of the modules L^2(A_i *_{B_i} B, E_i).

    phis[i]: A_i -> B_i and psis[i]: B -> B_i, all psis sharing the algebra B.
    """
    if not phis or len(phis) != len(psis):
        raise ValueError("need one phi and one psi per factor")
    B = psis[0].algebra
    for psi in psis:
        if psi.algebra is not B and not psi.algebra.structure_equal(B):
            raise BaseMismatch("all psi_i must start at the same algebra B")
        if not psi.iota.check()["injective"]:
            raise BNotRealizable("B_i does not embed in B")
    for phi in list(phis) + list(psis):
        if not gns_faithful(phi)["faithful"]:
            raise AlgebraError("expectation without faithful GNS representation")
    d_in = depth if inner_depth is None else inner_depth
    factors = [CompositeFactor(phi, psi, d_in, name=str(i + 1)) for i, (phi, psi) in enumerate(zip(phis, psis))]
    F = FockModule(B, factors, depth)
    injective = []
    for i, phi in enumerate(phis):
        vecs = [F.lam(i, (0, {k: ONE}), F.xi()) for k in range(phi.algebra.dim)]
        gram = [[B.tau(F.inner(x, y)) for y in vecs] for x in vecs]
        _, r, _ = ldl_psd(gram)
        injective.append(r == phi.algebra.dim)
    return ReducedAmalgam(F, factors, injective)


def summand_count(phis, psis, depth: int, inner_depth: int | None = None) -> int:
    """Dimension predicted by the double direct-sum decomposition, free modules assumed.

    Each summand H°_{i1,k..} (x)_{B_i1} ... (x)_{B_i1} B (x)_B ... is counted by
    multiplying the dimensions of the spaces and dividing by the dimension of
    each algebra tensored over.  The complement dimensions come from separate
    GNS computations.
    """
    d_in = depth if inner_depth is None else inner_depth
    B = psis[0].algebra
    n = len(phis)
    hdim = []
    for phi, psi in zip(phis, psis):
        h1 = gns(phi).dim - phi.base.dim
        h2 = gns(psi).dim - psi.base.dim
        hdim.append((h1, h2, phi.base.dim))
    # dim of F_i° as a vector space, and the inner alternating patterns ending in k = 1
    from fractions import Fraction

    def inner_patterns():
        pats = []
        frontier = [()]
        for _ in range(d_in):
            nxt = []
            for p in frontier:
                for k in (1, 2):
                    if not p or p[-1] != k:
                        nxt.append(p + (k,))
            pats += nxt
            frontier = nxt
        return [p for p in pats if p[-1] == 1]

    fdim = []
    for h1, h2, bi in hdim:
        total = Fraction(0)
        for p in inner_patterns():
            val = Fraction(1)
            for k in p:
                val *= h1 if k == 1 else h2
            val /= Fraction(bi) ** (len(p) - 1)  # (x)_{B_i} between letters
            val = val * B.dim / bi  # (x)_{B_i} B
            total += val
        fdim.append(total)
    total = Fraction(B.dim)
    frontier = [((), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for word, val in frontier:
            for i in range(n):
                if word and word[-1] == i:
                    continue
                v = val * fdim[i] if not word else val * fdim[i] / B.dim
                nxt.append((word + (i,), v))
                total += v
        frontier = nxt
    if total.denominator != 1:
        raise AlgebraError("decomposition count is not an integer: modules are not free")
    return int(total)


def decomposition_audit(R: ReducedAmalgam, phis, psis, depth: int | None = None) -> dict:
    d = R.fock.depth if depth is None else depth
    built = R.fock.dim
    predicted = summand_count(phis, psis, d, R.factors[0].depth if R.factors else d)
    return {"ok": built == predicted, "module_dim": built, "counted_dim": predicted}
