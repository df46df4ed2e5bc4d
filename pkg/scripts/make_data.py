"""Regenerate the JSON documents shipped in src/amalgam/data from the fixture builders."""

import json
from pathlib import Path

from amalgam.algebra_fixtures import U_MATRIX, V_MATRIX
from amalgam.fixtures import collapsing_triangle, padded, s3_triangle, z2_cubed_triangle
from amalgam.groups import cyclic_group, dihedral_group
from amalgam.io import triangle_document

OUT = Path(__file__).resolve().parent.parent / "src" / "amalgam" / "data"

ID2 = [[1, 0], [0, 1]]


def matrix(m):
    return [list(r) for r in m]


def dump(name, doc):
    (OUT / name).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def klein_images():
    D4, _ = dihedral_group(4)
    r = next(g for g in range(8) if D4.element_order(g) == 4)
    r2 = D4.mul[r][r]
    s = next(g for g in range(8) if D4.element_order(g) == 2 and g != r2)
    # Z2 x Z2 in index order (0,0), (0,1), (1,0), (1,1)
    return [D4.identity, s, r2, D4.mul[s][r2]]


def main():
    OUT.mkdir(exist_ok=True)
    dump("z2.json", {"group": {"table": [[0, 1], [1, 0]], "labels": ["e", "a"]}})
    dump("s3_permutations.json", {"group": {"permutations": [[1, 0, 2], [1, 2, 0]]}})
    # a Latin square with identity 0 that is not associative
    dump("broken_table.json", {"group": {"table": [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]}})

    dump("z2_cubed_triangle.json", triangle_document(z2_cubed_triangle()))
    dump("s3_triangle.json", triangle_document(s3_triangle()))
    dump("collapsing_triangle.json", triangle_document(collapsing_triangle()))
    dump("z2_cubed_padded.json", triangle_document(padded(z2_cubed_triangle(), cyclic_group(2))))

    dump("s3_angle.json", {"group": {"symmetric": 3}, "H1": ["(12)"], "H2": ["(13)"], "K": []})
    dump("klein_angle.json", {"group": {"product": [{"cyclic": 2}, {"cyclic": 2}]}, "H1": [2], "H2": [1], "K": []})

    u, v = matrix(U_MATRIX), matrix(V_MATRIX)
    M22, M2 = {"tensor": [2, 2]}, {"matrix": 2}
    dump(
        "biunitary_triangle.json",
        {
            "vertices": [M22, M22, M22],
            "edges": {
                "12": {"algebra": M2, "name": "u", "into": [{"slot": "first", "conjugate": u}, {"slot": "first", "conjugate": u}]},
                "13": {"algebra": M2, "name": "0", "into": [{"slot": "second"}, {"slot": "second"}]},
                "23": {"algebra": M2, "name": "v", "into": [{"slot": "first", "conjugate": v}, {"slot": "first", "conjugate": v}]},
            },
            "family_order": ["12", "23", "13"],
        },
    )
    dump(
        "tensor_triangle.json",
        {
            "vertices": [M22, M22, M22],
            "edges": {
                "12": {"algebra": M2, "name": "A3", "into": [{"slot": "second"}, {"slot": "second"}]},
                "13": {"algebra": M2, "name": "A2", "into": [{"slot": "first"}, {"slot": "second"}]},
                "23": {"algebra": M2, "name": "A1", "into": [{"slot": "first"}, {"slot": "first"}]},
            },
        },
    )
    diag = {"algebra": {"dim": 2, "labels": ["p", "q"], "unit": [1, 1], "structure": [[0, 0, 0, 1], [1, 1, 1, 1]], "star": [[0, 0, 1], [1, 1, 1]], "trace": ["1/2", "1/2"]},
            "into": [[{"0": 1}, {"3": 1}], [{"0": 1}, {"3": 1}]]}
    dump("span_deficient.json", {"vertices": [M2, M2, M2], "edges": {"12": diag, "13": diag, "23": diag}})

    dump(
        "biunitary_squares.json",
        {
            "algebra": M22,
            "expectations": {
                "E_u": {"slice": "second", "conjugate": u},
                "E_v": {"slice": "second", "conjugate": v},
                "E_0": {"slice": "first"},
                "E_u_literal": {"slice": "second", "conjugate": u, "literal": True},
            },
            "pairs": [["E_u", "E_0"], ["E_v", "E_0"], ["E_u", "E_v"], ["E_u_literal", "E_v"]],
        },
    )

    dump("z2_free.json", {"kind": "free", "factors": [{"group": {"cyclic": 2}}, {"group": {"cyclic": 2}}]})
    dump(
        "klein_dihedral.json",
        {
            "kind": "amalgam",
            "triangle": triangle_document(z2_cubed_triangle()),
            "factors": [{"group": {"dihedral": 4}, "into": klein_images()} for _ in range(3)],
        },
    )


if __name__ == "__main__":
    main()
