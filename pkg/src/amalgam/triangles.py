"""Triangles of finite groups: fillability, reduction, angles and realizability."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .engine import (
    AmalgamFamily,
    AmalgamWord,
    CompleteTable,
    Edge,
    Overflow,
    TwoFactor,
    coset_enumeration,
    evaluate_word,
    normal_form,
    presentation_of_family,
    simplify_presentation,
)
from .groups import (
    FiniteGroup,
    GroupError,
    GroupMorphism,
    Subgroup,
    morphism_check,
    subgroup_generated,
    subgroup_intersect,
)

__all__ = [
    "GroupTriangle",
    "FillReport",
    "AngleReport",
    "AngleSumReport",
    "RealizationReport",
    "InvalidCore",
    "OddKernelLengthAnomaly",
    "NotFillable",
    "EDGE_KEYS",
    "check_fillable",
    "check_minimal",
    "reduce_family",
    "stallings_angle",
    "vertex_angle",
    "angle_sum_check",
    "check_free_product_vertex",
    "check_commuting_edges",
    "realize_triangle",
]

EDGE_KEYS = ((0, 1), (0, 2), (1, 2))


class InvalidCore(GroupError):
    pass


class OddKernelLengthAnomaly(GroupError):
    def __init__(self, length, witness):
        super().__init__(f"shortest kernel word has odd syllable length {length}")
        self.length = length
        self.witness = witness


class NotFillable(GroupError):
    def __init__(self, report):
        super().__init__(f"triangle is not fillable at vertex {report.vertex + 1}: {report.reason}")
        self.report = report


@dataclass(frozen=True, eq=False)
class GroupTriangle(AmalgamFamily):
    """Three vertices, the three edges between them, and a core group mapping into every edge."""

    core: FiniteGroup = None
    core_maps: dict = None  # edge key -> GroupMorphism(core -> edge group)

    def __post_init__(self):
        super().__post_init__()
        if len(self.vertices) != 3 or set(self.edges) != set(EDGE_KEYS):
            raise GroupError("a triangle needs three vertices and the edges (0,1), (0,2), (1,2)")
        if self.core is None or set(self.core_maps or {}) != set(EDGE_KEYS):
            raise GroupError("a triangle needs a core group with a map into each edge")
        for key, f in self.core_maps.items():
            if f.domain is not self.core or f.codomain is not self.edges[key].group:
                raise GroupError(f"core map for edge {key} has the wrong domain or codomain")

    def validate(self) -> None:
        super().validate()
        for key, f in self.core_maps.items():
            if not morphism_check(f).injective:
                raise GroupError(f"core map into edge {key} is not injective")

    def family(self) -> AmalgamFamily:
        return AmalgamFamily(self.vertices, dict(self.edges))

    def vertex_edges(self, i: int) -> tuple:
        """The two edge keys meeting at vertex i."""
        return tuple(k for k in EDGE_KEYS if i in k)

    def into_vertex(self, i: int, key) -> GroupMorphism:
        e = self.edges[key]
        return e.into_a if key[0] == i else e.into_b

    def edge_image(self, i: int, key) -> Subgroup:
        return self.into_vertex(i, key).image()

    def core_into_vertex(self, i: int, key) -> GroupMorphism:
        """Core -> vertex i through the given edge."""
        return self.into_vertex(i, key).compose(self.core_maps[key])


@dataclass(frozen=True)
class FillReport:
    ok: bool
    vertex: int | None = None
    edges: tuple = ()
    reason: str = ""


def check_fillable(t: GroupTriangle) -> FillReport:
    for i in range(3):
        e, f = t.vertex_edges(i)
        via_e = t.core_into_vertex(i, e)
        via_f = t.core_into_vertex(i, f)
        if via_e.map != via_f.map:
            return FillReport(False, i, (e, f), "the two paths from the core disagree")
        meet = subgroup_intersect(t.edge_image(i, e), t.edge_image(i, f))
        if meet.members != via_e.image().members:
            return FillReport(
                False,
                i,
                (e, f),
                f"edge images meet in {len(meet)} elements but the core has {t.core.order}",
            )
    return FillReport(True)


def check_minimal(t: AmalgamFamily) -> bool:
    return all(_generated_by_edges(t, i).members == tuple(range(G.order)) for i, G in enumerate(t.vertices))


def _generated_by_edges(fam: AmalgamFamily, i: int) -> Subgroup:
    gens = set()
    for j in fam.incident(i):
        gens.update(fam.edge_into(i, j).map)
    return subgroup_generated(fam.vertices[i], sorted(gens))


def reduce_family(fam: AmalgamFamily):
    """Replace each vertex by the subgroup its edge images generate.

    Returns a family of the same kind plus the inclusions of the new vertices
    into the old ones.
    """
    new_vertices, inclusions, positions = [], [], []
    for i in range(len(fam.vertices)):
        H, inc = _generated_by_edges(fam, i).as_group()
        new_vertices.append(H)
        inclusions.append(inc)
        positions.append({g: k for k, g in enumerate(inc.map)})
    edges = {}
    for (i, j), e in fam.edges.items():
        a = GroupMorphism(e.group, new_vertices[i], tuple(positions[i][g] for g in e.into_a.map))
        b = GroupMorphism(e.group, new_vertices[j], tuple(positions[j][g] for g in e.into_b.map))
        edges[(i, j)] = Edge(e.group, a, b)
    if isinstance(fam, GroupTriangle):
        out = GroupTriangle(tuple(new_vertices), edges, fam.core, dict(fam.core_maps))
    else:
        out = AmalgamFamily(tuple(new_vertices), edges)
    return out, tuple(inclusions)


# angles ----------------------------------------------------------------------


@dataclass(frozen=True)
class AngleReport:
    n: int | None  # None means infinity (no kernel at all)
    status: str  # "EXACT" or "LOWER_BOUND_ONLY"
    searched: int  # syllable lengths examined
    witness: tuple = ()  # ((side, element of G), ...) spelling a shortest kernel word

    @property
    def theta(self) -> tuple:
        """theta as (1, n) meaning pi/n, or (0, 1) for theta = 0."""
        if self.status == "EXACT" and self.n is None:
            return (0, 1)
        return (1, self.bound_n)

    @property
    def bound_n(self) -> int | None:
        if self.status == "EXACT":
            return self.n
        return self.searched // 2

    def upper_bound(self) -> Fraction:
        """Certified upper bound of theta / pi."""
        if self.status == "EXACT":
            return Fraction(0) if self.n is None else Fraction(1, self.n)
        return Fraction(1, self.searched // 2)

    def theta_text(self) -> str:
        if self.status == "EXACT":
            return "0" if self.n is None else f"pi/{self.n}"
        return f"<= pi/{self.searched // 2}"


def _coset_reps(G: FiniteGroup, H: Subgroup, K: Subgroup) -> list[int]:
    """Non-identity right coset representatives of K in H (minimum index per coset)."""
    seen, reps = set(), []
    for h in H.members:
        if h in seen:
            continue
        coset = {G.mul[k][h] for k in K.members}
        seen |= coset
        if G.identity not in coset:
            reps.append(min(coset))
    return reps


def stallings_angle(G: FiniteGroup, H1: Subgroup, H2: Subgroup, K: Subgroup, max_len: int = 12) -> AngleReport:
    """Shortest nontrivial kernel of H1 *_K H2 -> G, by breadth-first search over normal forms.

    States at syllable length L are pairs (image in G, side of the last
    letter); a repeated state set means no kernel word exists at any length.
    """
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    for S in (H1, H2, K):
        if S.parent is not G and not S.parent.same_table(G):
            raise InvalidCore("subgroups must live in the target group")
        if not S.is_closed():
            raise InvalidCore("not a subgroup")
    if not set(K.members) <= set(H1.members) & set(H2.members):
        raise InvalidCore("the core must lie in both subgroups")
    reps = (_coset_reps(G, H1, K), _coset_reps(G, H2, K))
    mul, e = G.mul, G.identity

    level: dict = {}
    for side in (0, 1):
        for t in reps[side]:
            for c in K.members:
                level.setdefault((mul[c][t], side), (None, c, t))
    history = [level]
    seen_sets = {frozenset(level): 1}
    length = 1
    while True:
        hit = next((s for s in ((e, 0), (e, 1)) if s in level), None)
        if hit is not None:
            witness = _trace(G, history, hit)
            if length % 2:
                raise OddKernelLengthAnomaly(length, witness)
            _verify_kernel_word(G, H1, H2, K, witness)
            return AngleReport(length // 2, "EXACT", length, witness)
        if not level:
            return AngleReport(None, "EXACT", length)
        if length >= max_len:
            return AngleReport(None, "LOWER_BOUND_ONLY", max_len)
        nxt: dict = {}
        for (x, side) in sorted(level):
            other = 1 - side
            for t in reps[other]:
                nxt.setdefault((mul[x][t], other), ((x, side), None, t))
        level = nxt
        length += 1
        history.append(level)
        key = frozenset(level)
        if key in seen_sets:
            # the reachable sets now cycle without ever containing the identity
            return AngleReport(None, "EXACT", length)
        seen_sets[key] = length


def _trace(G, history, state) -> tuple:
    """Letters (side, element of G) of the word ending in `state`; the core part is folded into the first."""
    letters = []
    for level in reversed(history):
        prev, c, t = level[state]
        letters.append((state[1], t if c is None else G.mul[c][t]))
        state = prev
    return tuple(reversed(letters))


def _verify_kernel_word(G, H1, H2, K, witness) -> None:
    """Check the witness is a reduced normal form of length L mapping to the identity."""
    amalgam, inc1, inc2 = TwoFactor.from_subgroups(G, H1, H2, K)
    pos = ({g: i for i, g in enumerate(inc1.map)}, {g: i for i, g in enumerate(inc2.map)})
    nf = normal_form(amalgam, AmalgamWord(tuple((side, pos[side][g]) for side, g in witness)))
    if nf.length != len(witness) or G.product(g for _, g in witness) != G.identity:
        raise AssertionError("angle search produced an invalid kernel witness")


def vertex_angle(t: GroupTriangle, i: int, max_len: int = 12) -> AngleReport:
    e, f = t.vertex_edges(i)
    G = t.vertices[i]
    K = t.core_into_vertex(i, e).image()
    return stallings_angle(G, t.edge_image(i, e), t.edge_image(i, f), K, max_len)


@dataclass(frozen=True)
class AngleSumReport:
    verdict: str  # "SUFFICIENT" or "INCONCLUSIVE"
    angles: tuple
    bound: Fraction  # certified upper bound of (theta_1 + theta_2 + theta_3) / pi


def angle_sum_check(t: GroupTriangle, max_len: int = 12) -> AngleSumReport:
    angles = tuple(vertex_angle(t, i, max_len) for i in range(3))
    total = sum((a.upper_bound() for a in angles), Fraction(0))
    return AngleSumReport("SUFFICIENT" if total <= 1 else "INCONCLUSIVE", angles, total)


# sufficient conditions ----------------------------------------------------------


def check_free_product_vertex(t: GroupTriangle) -> int | None:
    """A vertex that is the amalgam of its two edge images over the core, if any.

    A finite amalgam A *_C B exists only when A = C or B = C, and then it is
    the other factor; the vertex must also be generated by the two images.
    """
    for i in range(3):
        G = t.vertices[i]
        e, f = t.vertex_edges(i)
        core = t.core_into_vertex(i, e).image().members
        A, B = t.edge_image(i, e), t.edge_image(i, f)
        whole = tuple(range(G.order))
        for X, Y in ((A, B), (B, A)):
            if X.members == core and Y.members == whole:
                return i
    return None


def check_commuting_edges(t: GroupTriangle) -> tuple | None:
    """An edge (i, j) whose group commutes elementwise with the other edge at both ends."""
    for key in EDGE_KEYS:
        ok = True
        for v in key:
            G = t.vertices[v]
            other = next(k for k in t.vertex_edges(v) if k != key)
            mine = t.edge_image(v, key).members
            theirs = t.edge_image(v, other).members
            if any(G.mul[x][y] != G.mul[y][x] for x in mine for y in theirs):
                ok = False
                break
        if ok:
            return key
    return None


# the pipeline ------------------------------------------------------------------


@dataclass
class RealizationReport:
    verdict: str  # REALIZABLE | COLLAPSED | UNKNOWN | NOT_FILLABLE
    reasons: list = field(default_factory=list)
    fillable: FillReport | None = None
    minimal: bool | None = None
    reduced_orders: tuple = ()
    free_product_vertex: int | None = None
    commuting_edge: tuple | None = None
    angles: AngleSumReport | None = None
    angle_error: str | None = None
    enumeration: dict = field(default_factory=dict)
    group: FiniteGroup | None = None
    embeddings: tuple = ()  # per-vertex GroupMorphism into `group`
    witness: tuple | None = None  # (vertex, g, g') with equal images
    bounds: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


def _enumerate_family(fam: AmalgamFamily, max_cosets: int):
    """Enumerate the group presented by the family; return (table, per-vertex maps)."""
    p = presentation_of_family(fam)
    q, expr = simplify_presentation(p)
    table: CompleteTable = coset_enumeration(q, (), max_cosets)
    K = table.group
    gen_elem = []
    for g in range(p.ngens):
        acc = K.identity
        for x, s in expr[g]:
            y = table.gen_images[x]
            acc = K.mul[acc][y if s == 1 else K.inv[y]]
        gen_elem.append(acc)
    maps = []
    for v, G in enumerate(fam.vertices):
        m = tuple(K.identity if x == G.identity else gen_elem[p.letter_index[(v, x)]] for x in range(G.order))
        f = GroupMorphism(G, K, m)
        morphism_check(f)
        maps.append(f)
    # generator images generate the output group
    if subgroup_generated(K, sorted(set(gen_elem))).members != tuple(range(K.order)):
        raise AssertionError("enumerated group is not generated by the vertex images")
    return table, tuple(maps)


def _collapse_witness(fam: AmalgamFamily, maps) -> tuple | None:
    for v, f in enumerate(maps):
        G = fam.vertices[v]
        first = {}
        for x in range(G.order):
            y = f.map[x]
            if y in first:
                return (v, first[y], x)
            first[y] = x
    return None


def realize_triangle(t: GroupTriangle, max_len: int = 12, max_cosets: int = 10000) -> RealizationReport:
    rep = RealizationReport("UNKNOWN", bounds={"max_len": max_len, "max_cosets": max_cosets})
    fill = check_fillable(t)
    rep.fillable = fill
    if not fill.ok:
        rep.verdict = "NOT_FILLABLE"
        rep.reasons.append(fill.reason)
        return rep
    rep.minimal = check_minimal(t)
    reduced, inclusions = reduce_family(t)
    rep.reduced_orders = tuple(G.order for G in reduced.vertices)

    rep.free_product_vertex = check_free_product_vertex(reduced)
    rep.commuting_edge = check_commuting_edges(reduced)
    try:
        rep.angles = angle_sum_check(reduced, max_len)
    except OddKernelLengthAnomaly as exc:
        rep.angle_error = str(exc)

    outcome = None
    try:
        table, maps = _enumerate_family(t, max_cosets)
        rep.enumeration = {"family": "original", "order": table.order, "defined": table.defined}
        outcome = (t, table, maps, None)
    except Overflow as exc:
        rep.enumeration = {"family": "original", "overflow": exc.max_cosets}
        if not rep.minimal:
            try:
                table, maps = _enumerate_family(reduced, max_cosets)
                rep.enumeration = {
                    "family": "reduced",
                    "order": table.order,
                    "defined": table.defined,
                    "original_overflow": exc.max_cosets,
                }
                outcome = (reduced, table, maps, inclusions)
            except Overflow:
                rep.enumeration["reduced_overflow"] = max_cosets

    criteria = []
    if rep.free_product_vertex is not None:
        criteria.append(f"vertex {rep.free_product_vertex + 1} is the amalgam of its edge groups over the core")
    if rep.commuting_edge is not None:
        i, j = rep.commuting_edge
        criteria.append(f"edge {i + 1}{j + 1} commutes with the neighbouring edges at both ends")
        rep.notes.append(
            f"the generalized amalgam is a quotient of G{i + 1} *_E{i + 1}{j + 1} G{j + 1}"
        )
    if rep.angles is not None and rep.angles.verdict == "SUFFICIENT":
        criteria.append("angle sum at most pi")

    if outcome is not None:
        fam, table, maps, incs = outcome
        for (i, j), e in fam.edges.items():
            for h in range(e.group.order):
                if maps[i].map[e.into_a.map[h]] != maps[j].map[e.into_b.map[h]]:
                    raise AssertionError("enumerated maps disagree on an edge")
        wit = _collapse_witness(fam, maps)
        if wit is None:
            rep.verdict = "REALIZABLE"
            rep.reasons.append(
                "coset enumeration" if incs is None else "coset enumeration of the reduced family"
            )
            rep.reasons.extend(criteria)
            rep.group = table.group
            rep.embeddings = maps
        else:
            v, g, g2 = wit
            a = evaluate_word(fam, AmalgamWord(((v, g),)), maps)
            b = evaluate_word(fam, AmalgamWord(((v, g2),)), maps)
            if a != b:
                raise AssertionError("collapse witness failed its recheck")
            if incs is not None:
                g, g2 = incs[v].map[g], incs[v].map[g2]
            rep.verdict = "COLLAPSED"
            rep.witness = (v, g, g2)
            rep.group = table.group
            if incs is None:
                rep.embeddings = maps
            rep.reasons.append(
                "coset enumeration" if incs is None else "coset enumeration of the reduced family"
            )
            if criteria:
                rep.notes.append("sufficient criteria held but enumeration found a collapse: " + "; ".join(criteria))
    elif criteria:
        rep.verdict = "REALIZABLE"
        rep.reasons.extend(criteria)
    else:
        rep.verdict = "UNKNOWN"
    return rep
