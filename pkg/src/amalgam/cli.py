"""Command-line front end: parse a document, run one analysis, print a report."""

from __future__ import annotations

import argparse
import sys
import time
from itertools import product

from . import io
from .algebras import AlgebraError, commuting_square_check
from .engine import Edge, TwoFactor, count_normal_forms, normal_form
from .fock import (
    DepthExceeded,
    FockModule,
    GNSFactor,
    decomposition_audit,
    fock_space,
    free_expectation,
    generalized_reduced_amalgam,
    group_expectation,
    trace_state,
)
from .groups import GroupError, GroupMorphism, morphism_check, subgroup_generated
from .relations import (
    NotConfluent,
    NotFullMatrix,
    NotInjective,
    NotSimple,
    SpanDeficient,
    StarNotClosed,
    DiagramFails,
    block_sizes,
    build_relation_algebra,
    center,
    discover_rules,
    embed_vertices,
    matrix_units_discovery,
)
from .relations import DEFAULT_FAMILY_ORDER
from .scalars import ONE
from .triangles import realize_triangle, stallings_angle

DEFAULTS = {"depth": 4, "max_cosets": 10000, "angle_bound": 12}


class InputError(Exception):
    pass


def _vec_text(A, v) -> dict:
    return {A.labels[k]: c for k, c in sorted(v.items())}


# group ------------------------------------------------------------------------------------


def cmd_group_validate(args) -> dict:
    doc = io.load_document(args.file)
    G = io.parse_group(doc.get("group", doc))
    return {
        "verdicts": {
            "group": "ok",
            "order": G.order,
            "abelian": G.is_abelian(),
            "identity": G.label(G.identity),
            "element_orders": {G.label(x): G.element_order(x) for x in range(G.order)},
        }
    }


# triangles ---------------------------------------------------------------------------------


def _angle_tree(G, a) -> dict:
    out = {"theta": a.theta_text(), "status": a.status, "searched": a.searched}
    if a.witness:
        out["witness"] = [f"{side + 1}:{G.label(g)}" for side, g in a.witness]
    return out


def _vertex_pair(t, i):
    e, f = t.vertex_edges(i)
    G = t.vertices[i]
    K = t.core_into_vertex(i, e).image()
    return G, t.edge_image(i, e), t.edge_image(i, f), K


def cmd_triangle_analyze(args) -> dict:
    doc = io.load_document(args.file)
    t = io.parse_triangle(doc.get("triangle", doc))
    rep = realize_triangle(t, max_len=args.angle_bound, max_cosets=args.max_cosets)
    verdicts = {
        "verdict": rep.verdict,
        "reasons": list(rep.reasons),
        "fillable": rep.fillable.ok if rep.fillable else None,
        "minimal": rep.minimal,
        "vertex_orders": [G.order for G in t.vertices],
        "reduced_orders": list(rep.reduced_orders),
        "enumeration": dict(rep.enumeration),
        "notes": list(rep.notes),
    }
    if rep.angles is not None:
        verdicts["angles"] = {
            f"vertex_{i + 1}": _angle_tree(t.vertices[i], a) for i, a in enumerate(rep.angles.angles)
        }
        verdicts["angle_sum"] = {"verdict": rep.angles.verdict, "bound_over_pi": rep.angles.bound}
    if rep.angle_error:
        verdicts["angle_error"] = rep.angle_error
    if rep.group is not None:
        verdicts["amalgam_order"] = rep.group.order
        verdicts["injective"] = [morphism_check(f).injective for f in rep.embeddings]
    if rep.verdict != "NOT_FILLABLE":
        # size of the edge-pair amalgam at each vertex, up to the word depth
        counts = {}
        for i in range(3):
            G, H1, H2, K = _vertex_pair(t, i)
            two, _, _ = TwoFactor.from_subgroups(G, H1, H2, K)
            counts[f"vertex_{i + 1}"] = [count_normal_forms(two, n) for n in range(args.depth + 1)]
        verdicts["edge_pair_normal_forms"] = counts
    tree = {"verdicts": verdicts, "bounds": dict(rep.bounds, depth=args.depth)}
    if rep.witness is not None:
        v, g, h = rep.witness[:3]
        fam_vertices = t.vertices if rep.enumeration.get("family") != "reduced" else None
        if fam_vertices is not None:
            G = fam_vertices[v]
            tree["witnesses"] = {"collapse": {"vertex": v + 1, "elements": [G.label(g), G.label(h)]}}
        else:
            tree["witnesses"] = {"collapse": {"vertex": v + 1, "elements": [g, h], "family": "reduced"}}
    return tree


def _subgroup(G, gens):
    return subgroup_generated(G, [io._element(G, x) for x in gens])


def cmd_angle(args) -> dict:
    doc = io.load_document(args.file)
    G = io.parse_group(doc["group"])
    H1, H2 = _subgroup(G, doc["H1"]), _subgroup(G, doc["H2"])
    K = _subgroup(G, doc.get("K", []))
    if not (set(K.members) <= set(H1.members) and set(K.members) <= set(H2.members)):
        raise InputError("K must lie in both H1 and H2")
    a = stallings_angle(G, H1, H2, K, args.bound)
    return {
        "verdicts": dict(_angle_tree(G, a), orders=[G.order, len(H1.members), len(H2.members), len(K.members)]),
        "bounds": {"angle_bound": args.bound},
    }


# algebras ------------------------------------------------------------------------------------


def _diagonal_hints(t, R, A):
    """Products of diagonal matrix units, one per family, as projection candidates."""
    fams = R.families
    diag = []
    for key in fams:
        B = t.edges[key][0]
        n = int(round(B.dim ** 0.5))
        if n * n != B.dim:
            return None
        diag.append([R.letter(key, i * n + i) for i in range(n)])
    return [A.product(*combo) for combo in product(*diag)]


def cmd_algebra_amalgam(args) -> dict:
    doc = io.load_document(args.file)
    t = io.parse_algebra_triangle(doc)
    order = io.parse_family_order(doc) or DEFAULT_FAMILY_ORDER
    verdicts: dict = {"family_order": ["".join(str(x + 1) for x in k) for k in order]}
    tree = {"verdicts": verdicts}
    try:
        rules = discover_rules(t, order)
    except SpanDeficient as exc:
        verdicts["status"] = "SpanDeficient"
        tree["witnesses"] = {"vertex": exc.vertex + 1, "rank": exc.rank, "dim": exc.dim}
        return tree
    verdicts["rules"] = len(rules)
    try:
        R, A = build_relation_algebra(t, rules, order)
    except NotConfluent as exc:
        verdicts["status"] = "NotConfluent"
        verdicts["confluent"] = False
        tree["witnesses"] = {"word": str(exc.word)}
        return tree
    except StarNotClosed as exc:
        verdicts["status"] = "StarNotClosed"
        tree["witnesses"] = {"detail": str(exc)}
        return tree
    verdicts["confluent"] = True
    verdicts["dimension"] = A.dim
    try:
        _, reports = embed_vertices(t, R, A)
        verdicts["embeddings"] = {
            f"vertex_{r['vertex'] + 1}": {"rank": r["rank"], "dim": r["dim"], "diagrams": "ok"} for r in reports
        }
    except NotInjective as exc:
        verdicts["embeddings"] = {"status": "NotInjective", "vertex": exc.vertex + 1}
    except DiagramFails as exc:
        verdicts["embeddings"] = {"status": "DiagramFails", "edge": str(exc)}
    z = center(A)
    verdicts["center_dim"] = len(z)
    verdicts["simple"] = len(z) == 1
    if len(z) == 1:
        try:
            mu = matrix_units_discovery(A, hints=_diagonal_hints(t, R, A))
            verdicts["matrix_size"] = mu.n
            verdicts["star_compatible_units"] = mu.star_compatible
        except (NotFullMatrix, NotSimple) as exc:
            verdicts["matrix_size"] = None
            verdicts["matrix_units"] = f"{type(exc).__name__}: {exc}"
    else:
        verdicts["block_sizes"] = block_sizes(A)
    return tree


def cmd_square_check(args) -> dict:
    doc = io.load_document(args.file)
    A = io.parse_algebra(doc["algebra"])
    if not A.tensor_dims:
        raise InputError("square checks need a tensor algebra")
    Es = io.parse_expectations(doc["expectations"], A)
    out = {}
    for a, b in doc["pairs"]:
        if a not in Es or b not in Es:
            raise InputError(f"unknown expectation in pair {a}, {b}")
        r = commuting_square_check(Es[a], Es[b])
        entry = {"commuting_square": r.ok, "commute": r.commute, "intersection_dim": r.intersection_dim}
        if r.witness:
            entry["witness"] = {
                k: (_vec_text(A, v) if isinstance(v, dict) else v) for k, v in r.witness.items()
            }
        out[f"{a},{b}"] = entry
    return {"verdicts": {"pairs": out}}


# fock -------------------------------------------------------------------------------------------


def _basis_index(A, text: str, where: str) -> int:
    """A basis element by label, or by index written #k."""
    if text in A.labels:
        return A.labels.index(text)
    if text.startswith("#") and text[1:].isdigit() and int(text[1:]) < A.dim:
        return int(text[1:])
    raise InputError(f"unknown basis element {text!r} of {where}")


def _fock_setup(doc, depth):
    """Returns (F, letter parser, centered letters per factor, group data or None, extra verdicts)."""
    kind = doc.get("kind", "free")
    if kind == "free":
        algs = [io.parse_algebra(a) for a in doc["factors"]]
        if len(algs) < 2:
            raise InputError("need at least two factors")
        states = [trace_state(A) for A in algs]
        base = states[0].base
        F = fock_space([GNSFactor(s, name=str(i + 1)) for i, s in enumerate(states)], base, depth)

        def letter(i, text):
            return {_basis_index(algs[i], text, f"factor {i + 1}"): ONE}

        centered = [[(x,) for x in s.kernel_basis()] for s in states]
        groups = None
        if all("group" in a for a in doc["factors"]):
            groups = [io.parse_group(a["group"]) for a in doc["factors"]]
        return F, letter, centered, groups, {}
    if kind == "amalgam":
        t = io.parse_triangle(doc["triangle"])
        rep = realize_triangle(t)
        if rep.group is None or rep.verdict != "REALIZABLE":
            raise InputError(f"the triangle has no finite realization (verdict {rep.verdict})")
        from .algebras import group_star_algebra

        B = group_star_algebra(rep.group)
        phis, psis = [], []
        for i, spec in enumerate(doc["factors"]):
            Gi = t.vertices[i]
            Abig = io.parse_group(spec["group"])
            f = GroupMorphism(Gi, Abig, tuple(io._element(Abig, x) for x in spec["into"]))
            if not morphism_check(f).injective:
                raise InputError(f"factor {i + 1}: vertex group does not embed")
            phis.append(group_expectation(f))
            psis.append(group_expectation(rep.embeddings[i], B))
        R = generalized_reduced_amalgam(phis, psis, depth, doc.get("inner_depth"))
        F = R.fock

        def letter(i, text):
            if text.startswith("B:"):
                return (1, {_basis_index(B, text[2:], "the amalgam"): ONE})
            return (0, {_basis_index(phis[i].algebra, text, f"factor {i + 1}"): ONE})

        # centered letters of A_i *_{B_i} B over B: a° and a° b° (B itself is not centered)
        centered = []
        for phi, psi in zip(phis, psis):
            ka, kb = phi.kernel_basis(), psi.kernel_basis()
            centered.append([((0, a),) for a in ka] + [((0, a), (1, b)) for a in ka for b in kb])
        audit = decomposition_audit(R, phis, psis)
        extra = {"audit": audit, "factor_injective": list(R.injective), "amalgam_order": rep.group.order}
        return F, letter, centered, None, extra
    raise InputError(f"unknown fock document kind {kind!r}")


def parse_word(text: str, nfactors: int, letter) -> list:
    word = []
    for tok in text.split():
        i, sep, rest = tok.partition(":")
        if not sep or not i.isdigit():
            raise InputError(f"word letters are written factor:element, got {tok!r}")
        k = int(i) - 1
        if not 0 <= k < nfactors:
            raise InputError(f"factor {i} out of range")
        word.append((k, letter(k, rest)))
    return word


def _alternating(n: int, m: int):
    for idx in product(range(n), repeat=m):
        if all(a != b for a, b in zip(idx, idx[1:])):
            yield idx


def _moment(F: FockModule, word: list, length: int):
    """Moment of a word of `length` centered letters (a letter may be a product inside one factor)."""
    if length > F.depth:
        raise DepthExceeded(length, F.depth)
    return F.apply_word(word).get((), {})


def _group_word_table(F: FockModule, groups, depth: int) -> dict:
    """All words of length 1..depth in the non-identity elements, against the normal-form oracle."""
    G1, G2 = groups
    from .groups import trivial_group

    C = trivial_group()
    two = TwoFactor(G1, G2, Edge(C, GroupMorphism(C, G1, (G1.identity,)), GroupMorphism(C, G2, (G2.identity,))))
    letters = [(v, g) for v, G in enumerate(groups) for g in range(G.order) if g != G.identity]
    rows = []
    agree = True
    for m in range(1, depth + 1):
        for w in product(letters, repeat=m):
            val = free_expectation(F, [(v, {g: ONE}) for v, g in w])
            nf = normal_form(two, w)
            trivial = not nf.reps and nf.core == C.identity
            got = val.get(0)
            expect = ONE if trivial else None
            ok = (got == expect) and len(val) <= 1
            agree = agree and ok
            rows.append({"word": " ".join(f"{v + 1}:{groups[v].label(g)}" for v, g in w), "phi": got if got else 0, "identity": trivial})
    return {"words": len(rows), "agree": agree, "table": rows}


def cmd_fock_moments(args) -> dict:
    doc = io.load_document(args.file)
    depth = args.depth
    F, letter, centered, groups, extra = _fock_setup(doc, depth)
    verdicts: dict = dict(extra)
    verdicts["module_dim"] = F.dim
    verdicts["gram_psd"] = F.gram_psd()
    B = F.base
    if args.word is not None:
        word = parse_word(args.word, len(F.factors), letter)
        verdicts["word"] = args.word
        verdicts["moment"] = _vec_text(B, free_expectation(F, word))
    else:
        total = nonzero = 0
        for m in range(1, depth + 1):
            for idx in _alternating(len(F.factors), m):
                for letters in product(*(centered[i] for i in idx)):
                    total += 1
                    word = [(i, x) for i, parts in zip(idx, letters) for x in parts]
                    if _moment(F, word, m):
                        nonzero += 1
        verdicts["freeness"] = {"alternating_centered_words": total, "nonzero": nonzero, "all_zero": nonzero == 0}
        if groups is not None and len(groups) == 2:
            verdicts["group_words"] = _group_word_table(F, groups, depth)
    return {"verdicts": verdicts, "bounds": {"depth": depth}}


# entry point -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amalgam", description="Generalized amalgams of finite groups and algebras.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")
    sub = p.add_subparsers(dest="area", required=True)

    g = sub.add_parser("group").add_subparsers(dest="action", required=True)
    x = g.add_parser("validate", parents=[common])
    x.add_argument("file")
    x.set_defaults(func=cmd_group_validate, command="group validate")

    t = sub.add_parser("triangle").add_subparsers(dest="action", required=True)
    x = t.add_parser("analyze", parents=[common])
    x.add_argument("file")
    x.add_argument("--depth", type=int, default=DEFAULTS["depth"])
    x.add_argument("--max-cosets", type=int, default=DEFAULTS["max_cosets"])
    x.add_argument("--angle-bound", type=int, default=DEFAULTS["angle_bound"])
    x.set_defaults(func=cmd_triangle_analyze, command="triangle analyze")

    x = sub.add_parser("angle", parents=[common])
    x.add_argument("file")
    x.add_argument("--bound", type=int, default=DEFAULTS["angle_bound"])
    x.set_defaults(func=cmd_angle, command="angle")

    a = sub.add_parser("algebra").add_subparsers(dest="action", required=True)
    x = a.add_parser("amalgam", parents=[common])
    x.add_argument("file")
    x.set_defaults(func=cmd_algebra_amalgam, command="algebra amalgam")
    x = a.add_parser("square-check", parents=[common])
    x.add_argument("file")
    x.set_defaults(func=cmd_square_check, command="algebra square-check")

    f = sub.add_parser("fock").add_subparsers(dest="action", required=True)
    x = f.add_parser("moments", parents=[common])
    x.add_argument("file")
    x.add_argument("--depth", type=int, default=DEFAULTS["depth"])
    x.add_argument("--word", default=None, help='letters "factor:element" separated by spaces')
    x.set_defaults(func=cmd_fock_moments, command="fock moments")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("depth", "max_cosets", "angle_bound", "bound"):
        if getattr(args, name, 1) < 1 and name != "depth" or getattr(args, name, 0) < 0:
            print(f"error: --{name.replace('_', '-')} must be positive", file=sys.stderr)
            return 1
    start = time.perf_counter()
    try:
        tree = args.func(args)
    except DepthExceeded as exc:
        print(f"error: DepthExceeded: {exc}", file=sys.stderr)
        return 1
    except (io.DocumentError, InputError, GroupError, AlgebraError, KeyError, TypeError, ValueError, OSError) as exc:
        what = type(exc).__name__
        detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"error: {what}: {detail}", file=sys.stderr)
        return 1
    tree["command"] = args.command
    tree["inputs"] = {"file": io.digest(args.file)}
    if args.timings:
        tree["timings"] = {"ms": round((time.perf_counter() - start) * 1000)}
    sys.stdout.write(io.render_json(tree) if args.json else io.render_text(tree))
    return 0


if __name__ == "__main__":
    sys.exit(main())
