"""JSON input documents and the canonical structured-text report format.

Documents are JSON.  Scalars may be written as integers or as strings
"p/q", "a+bi" etc.  Group elements may be given by index or by label.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .algebras import (
    AlgebraError,
    StarAlgebra,
    StarMorphism,
    conjugate_expectation,
    group_star_algebra,
    matrix_algebra,
    matrix_to_vec,
    scalars,
    trace_expectation,
    twisted_slice_map,
)
from .engine import Edge
from .groups import (
    FiniteGroup,
    GroupError,
    GroupMorphism,
    cyclic_group,
    dihedral_group,
    direct_product,
    group_from_permutations,
    group_from_table,
    symmetric_group,
    trivial_group,
)
from .relations import EDGES, AlgebraTriangle
from .scalars import GaussQ, format_fraction, format_scalar, parse_scalar
from .triangles import GroupTriangle

__all__ = [
    "DocumentError",
    "load_document",
    "digest",
    "parse_group",
    "parse_triangle",
    "parse_algebra",
    "parse_vector",
    "parse_algebra_triangle",
    "parse_expectations",
    "parse_family_order",
    "render_text",
    "render_json",
    "canonical",
    "group_document",
    "triangle_document",
]

EDGE_NAMES = {"12": (0, 1), "13": (0, 2), "23": (1, 2)}


class DocumentError(ValueError):
    pass


def load_document(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: top level must be an object")
    return doc


def digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


# groups -------------------------------------------------------------------------------


def parse_group(doc) -> FiniteGroup:
    if not isinstance(doc, dict):
        raise DocumentError("a group must be an object")
    if "table" in doc:
        return group_from_table(doc["table"], labels=doc.get("labels"))
    if "permutations" in doc:
        perms = doc["permutations"]
        degree = doc.get("degree") or (len(perms[0]) if perms else 1)
        G, _ = group_from_permutations(perms, degree=degree)
        return G
    if "cyclic" in doc:
        return cyclic_group(int(doc["cyclic"]))
    if "symmetric" in doc:
        return symmetric_group(int(doc["symmetric"]))[0]
    if "dihedral" in doc:
        return dihedral_group(int(doc["dihedral"]))[0]
    if "trivial" in doc:
        return trivial_group()
    if "product" in doc:
        parts = [parse_group(g) for g in doc["product"]]
        if not parts:
            raise DocumentError("empty product")
        G = parts[0]
        for H in parts[1:]:
            G = direct_product(G, H)
        return G
    raise DocumentError("group needs one of: table, permutations, cyclic, symmetric, dihedral, trivial, product")


def _element(G: FiniteGroup, x) -> int:
    if isinstance(x, bool):
        raise DocumentError(f"bad element {x!r}")
    if isinstance(x, int):
        if not 0 <= x < G.order:
            raise DocumentError(f"element {x} out of range for a group of order {G.order}")
        return x
    if isinstance(x, str) and G.labels and x in G.labels:
        return G.labels.index(x)
    raise DocumentError(f"unknown element {x!r}")


def _morphism(H: FiniteGroup, G: FiniteGroup, images) -> GroupMorphism:
    if not isinstance(images, list) or len(images) != H.order:
        raise DocumentError(f"need {H.order} images, one per element of the edge group")
    return GroupMorphism(H, G, tuple(_element(G, x) for x in images))


def parse_triangle(doc) -> GroupTriangle:
    """{"vertices": [g1, g2, g3], "edges": {"12": {"group": g, "into": [imgs1, imgs2]}, ...}, "core": ...}"""
    verts = doc.get("vertices")
    if not isinstance(verts, list) or len(verts) != 3:
        raise DocumentError("a triangle needs exactly three vertices")
    V = tuple(parse_group(g) for g in verts)
    edges = {}
    for name, key in EDGE_NAMES.items():
        e = doc.get("edges", {}).get(name)
        if e is None:
            raise DocumentError(f"missing edge {name}")
        H = parse_group(e["group"])
        into = e.get("into")
        if not isinstance(into, list) or len(into) != 2:
            raise DocumentError(f"edge {name} needs two image lists")
        edges[key] = Edge(H, _morphism(H, V[key[0]], into[0]), _morphism(H, V[key[1]], into[1]))
    core = doc.get("core")
    if core is None:
        C = trivial_group()
        maps = {k: GroupMorphism(C, edges[k].group, (edges[k].group.identity,)) for k in EDGES}
    else:
        C = parse_group(core["group"])
        maps = {}
        for name, key in EDGE_NAMES.items():
            maps[key] = _morphism(C, edges[key].group, core["maps"][name])
    t = GroupTriangle(V, edges, C, maps)
    t.validate()
    return t


def group_document(G: FiniteGroup) -> dict:
    doc = {"table": [list(row) for row in G.mul]}
    if G.labels and len(set(G.labels)) == G.order:
        doc["labels"] = list(G.labels)
    return doc


def triangle_document(t: GroupTriangle) -> dict:
    """Inverse of parse_triangle (elements written by index)."""
    edges = {}
    for name, key in EDGE_NAMES.items():
        e = t.edges[key]
        edges[name] = {"group": group_document(e.group), "into": [list(e.into_a.map), list(e.into_b.map)]}
    core = {
        "group": group_document(t.core),
        "maps": {name: list(t.core_maps[key].map) for name, key in EDGE_NAMES.items()},
    }
    return {"vertices": [group_document(G) for G in t.vertices], "edges": edges, "core": core}


# algebras ------------------------------------------------------------------------------


def _scalar(x) -> GaussQ:
    try:
        return parse_scalar(x)
    except (ValueError, TypeError) as exc:
        raise DocumentError(f"bad scalar {x!r}: {exc}") from None


def parse_vector(doc, dim: int) -> dict:
    """{"index": scalar} or a dense list."""
    if isinstance(doc, list):
        if len(doc) != dim:
            raise DocumentError(f"dense vector needs {dim} entries")
        return {k: _scalar(x) for k, x in enumerate(doc) if _scalar(x)}
    if isinstance(doc, dict):
        out = {}
        for k, x in doc.items():
            i = int(k)
            if not 0 <= i < dim:
                raise DocumentError(f"index {i} out of range")
            c = _scalar(x)
            if c:
                out[i] = c
        return out
    raise DocumentError("vector must be a list or an object")


def _matrix(doc) -> dict:
    if not isinstance(doc, list) or not doc:
        raise DocumentError("matrix must be a non-empty list of rows")
    return matrix_to_vec([[_scalar(x) for x in row] for row in doc])


def parse_algebra(doc) -> StarAlgebra:
    if not isinstance(doc, dict):
        raise DocumentError("an algebra must be an object")
    if "matrix" in doc:
        return matrix_algebra(int(doc["matrix"]))
    if "tensor" in doc:
        n, k = (int(x) for x in doc["tensor"])
        return matrix_algebra(n * k, (n, k))
    if "scalars" in doc:
        return scalars()
    if "group" in doc:
        return group_star_algebra(parse_group(doc["group"]))
    if "dim" in doc:
        n = int(doc["dim"])
        labels = doc.get("labels") or [f"b{i}" for i in range(n)]
        table: dict = {}
        for entry in doc.get("structure", []):
            i, j, k, re = entry[:4]
            im = entry[4] if len(entry) > 4 else 0
            c = _scalar(re) + _scalar(im) * GaussQ(0, 1)
            table.setdefault(i, {}).setdefault(j, {})[k] = c
        star = [dict() for _ in range(n)]
        for entry in doc.get("star", []):
            i, k, re = entry[:3]
            im = entry[3] if len(entry) > 3 else 0
            star[i][k] = _scalar(re) + _scalar(im) * GaussQ(0, 1)
        unit = parse_vector(doc.get("unit", {}), n)
        trace = parse_vector(doc["trace"], n) if "trace" in doc else None
        return StarAlgebra(labels, table, unit, star, trace=trace)
    raise DocumentError("algebra needs one of: matrix, tensor, scalars, group, dim")


def _slot_images(B: StarAlgebra, A: StarAlgebra, spec) -> StarMorphism:
    from .algebra_fixtures import conjugated_embedding, slot_embedding

    if isinstance(spec, list):
        return StarMorphism(B, A, [parse_vector(v, A.dim) for v in spec])
    if isinstance(spec, dict) and "slot" in spec:
        if not A.tensor_dims:
            raise DocumentError("slot embeddings need a tensor vertex")
        f = slot_embedding(B, A, spec["slot"])
        if "conjugate" in spec:
            f = conjugated_embedding(f, _matrix(spec["conjugate"]))
        return f
    raise DocumentError("edge images must be a list of vectors or a slot description")


def parse_family_order(doc):
    order = doc.get("family_order")
    if order is None:
        return None
    try:
        keys = tuple(EDGE_NAMES[str(x)] for x in order)
    except KeyError as exc:
        raise DocumentError(f"unknown edge {exc.args[0]!r} in family_order") from None
    if sorted(keys) != sorted(EDGES):
        raise DocumentError("family_order must list each edge once")
    return keys


def parse_algebra_triangle(doc) -> AlgebraTriangle:
    verts = doc.get("vertices")
    if not isinstance(verts, list) or len(verts) != 3:
        raise DocumentError("an algebra triangle needs exactly three vertices")
    V = [parse_algebra(a) for a in verts]
    edges = {}
    names = {}
    for name, key in EDGE_NAMES.items():
        e = doc.get("edges", {}).get(name)
        if e is None:
            raise DocumentError(f"missing edge {name}")
        B = parse_algebra(e["algebra"])
        into = e.get("into")
        if not isinstance(into, list) or len(into) != 2:
            raise DocumentError(f"edge {name} needs two embeddings")
        edges[key] = (B, _slot_images(B, V[key[0]], into[0]), _slot_images(B, V[key[1]], into[1]))
        if "name" in e:
            names[key] = str(e["name"])
    C = scalars()
    core_maps = {k: StarMorphism(C, edges[k][0], [dict(edges[k][0].unit)]) for k in EDGES}
    t = AlgebraTriangle(V, edges, C, core_maps, names=names)
    try:
        t.validate()
    except AlgebraError as exc:
        raise DocumentError(f"edge maps: {exc}") from None
    return t


def parse_expectations(doc, A: StarAlgebra) -> dict:
    """Named expectations on a tensor algebra: {"slice": "first"|"second", "conjugate": matrix, "literal": bool}."""
    out = {}
    for name, spec in sorted(doc.items()):
        E = trace_expectation(A, spec["slice"])
        if "conjugate" in spec:
            u = _matrix(spec["conjugate"])
            E = twisted_slice_map(E, u) if spec.get("literal") else conjugate_expectation(E, u)
        out[name] = E
    return out


# reports -----------------------------------------------------------------------------------


def canonical(x):
    """Turn a report tree into plain JSON-able values with exact scalars as strings."""
    if isinstance(x, dict):
        return {str(k): canonical(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [canonical(v) for v in x]
    if isinstance(x, GaussQ):
        return format_scalar(x)
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    return str(x)


def _atom(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if v == "":
        return '""'
    return str(v)


def render_text(tree: dict) -> str:
    lines: list = []

    def walk(node, indent):
        pad = "  " * indent
        if isinstance(node, dict):
            for k in sorted(node):
                v = node[k]
                if isinstance(v, (dict, list)) and v:
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                elif isinstance(v, dict):
                    lines.append(f"{pad}{k}: {{}}")
                elif isinstance(v, list):
                    lines.append(f"{pad}{k}: []")
                else:
                    lines.append(f"{pad}{k}: {_atom(v)}")
        else:
            for v in node:
                if isinstance(v, (dict, list)) and v:
                    lines.append(f"{pad}-")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {_atom(v)}")

    walk(canonical(tree), 0)
    return "\n".join(lines) + "\n"


def render_json(tree: dict) -> str:
    return json.dumps(canonical(tree), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def group_error_text(exc: GroupError) -> str:
    return f"{type(exc).__name__}: {exc}"
