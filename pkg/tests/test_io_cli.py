import json
from pathlib import Path

import pytest

from amalgam import io
from amalgam.cli import main
from amalgam.fixtures import z2_cubed_triangle
from amalgam.triangles import realize_triangle

DATA = Path(__file__).resolve().parents[1] / "src" / "amalgam" / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)["verdicts"]


def test_group_validate(capsys):
    v = run_json(capsys, "group", "validate", DATA / "z2.json")
    assert v["order"] == 2 and v["abelian"]
    v = run_json(capsys, "group", "validate", DATA / "s3_permutations.json")
    assert v["order"] == 6 and not v["abelian"]


def test_broken_table_exits_one(capsys):
    code, out, err = run(capsys, "group", "validate", DATA / "broken_table.json")
    assert code == 1
    assert "NotAssociative" in err
    assert out == ""


def test_triangle_verdicts(capsys):
    v = run_json(capsys, "triangle", "analyze", DATA / "z2_cubed_triangle.json")
    assert v["verdict"] == "REALIZABLE" and v["amalgam_order"] == 8
    v = run_json(capsys, "triangle", "analyze", DATA / "s3_triangle.json", "--max-cosets", "200")
    assert v["verdict"] == "REALIZABLE"
    assert v["angle_sum"]["verdict"] == "SUFFICIENT"
    v = run_json(capsys, "triangle", "analyze", DATA / "collapsing_triangle.json")
    assert v["verdict"] == "COLLAPSED"
    v = run_json(capsys, "triangle", "analyze", DATA / "z2_cubed_padded.json")
    assert v["verdict"] == "REALIZABLE"


def test_overflow_is_unknown(capsys):
    code, out, _ = run(capsys, "triangle", "analyze", DATA / "collapsing_triangle.json", "--max-cosets", "1", "--json")
    tree = json.loads(out)
    assert code == 0
    assert tree["verdicts"]["verdict"] == "UNKNOWN"
    assert tree["bounds"]["max_cosets"] == 1


def test_angle_command(capsys):
    assert run_json(capsys, "angle", DATA / "s3_angle.json")["theta"] == "pi/3"
    assert run_json(capsys, "angle", DATA / "klein_angle.json")["theta"] == "pi/2"


def test_algebra_amalgam(capsys):
    v = run_json(capsys, "algebra", "amalgam", DATA / "tensor_triangle.json")
    assert v["simple"] and v["matrix_size"] == 8
    v = run_json(capsys, "algebra", "amalgam", DATA / "biunitary_triangle.json")
    assert v["dimension"] == 64 and v["center_dim"] == 4
    assert v["block_sizes"] == [4, 4, 4, 4]
    v = run_json(capsys, "algebra", "amalgam", DATA / "span_deficient.json")
    assert v["status"] == "SpanDeficient"


def test_square_check(capsys):
    pairs = run_json(capsys, "algebra", "square-check", DATA / "biunitary_squares.json")["pairs"]
    assert pairs["E_u,E_0"]["commuting_square"]
    assert pairs["E_v,E_0"]["commuting_square"]
    assert not pairs["E_u_literal,E_v"]["commuting_square"]


def test_fock_moments(capsys):
    v = run_json(capsys, "fock", "moments", DATA / "z2_free.json")
    assert v["freeness"]["all_zero"]
    assert len(v["group_words"]["table"]) == 30 and v["group_words"]["agree"]
    v = run_json(capsys, "fock", "moments", DATA / "z2_free.json", "--word", "1:1 1:1")
    assert v["moment"] == {"1": "1"}
    v = run_json(capsys, "fock", "moments", DATA / "z2_free.json", "--word", "1:1 2:1")
    assert v["moment"] == {}


def test_fock_depth_exceeded(capsys):
    code, _, err = run(capsys, "fock", "moments", DATA / "z2_free.json", "--depth", "2", "--word", "1:1 2:1 1:1")
    assert code == 1
    assert "DepthExceeded" in err


def test_output_is_deterministic(capsys):
    argv = ("triangle", "analyze", DATA / "z2_cubed_triangle.json")
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    assert "verdict: REALIZABLE" in first


def test_text_and_json_agree(capsys):
    argv = ("angle", DATA / "klein_angle.json")
    text = run(capsys, *argv)[1]
    tree = json.loads(run(capsys, *argv, "--json")[1])
    assert io.render_text(tree) == text


def test_inputs_carry_digest(capsys):
    code, out, _ = run(capsys, "group", "validate", DATA / "z2.json", "--json")
    tree = json.loads(out)
    assert tree["inputs"]["file"] == io.digest(DATA / "z2.json")
    assert tree["inputs"]["file"].startswith("sha256:")


def test_triangle_document_round_trip(tmp_path):
    t = z2_cubed_triangle()
    doc = io.triangle_document(t)
    path = tmp_path / "t.json"
    path.write_text(json.dumps(doc))
    back = io.parse_triangle(io.load_document(path))
    assert realize_triangle(back).verdict == realize_triangle(t).verdict
    assert io.triangle_document(back) == doc


@pytest.mark.parametrize(
    "content",
    ["{not json", json.dumps({"group": {"cyclic": -2}}), json.dumps({"edges": {}}), json.dumps([1, 2])],
)
def test_bad_documents_exit_one(capsys, tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    for argv in (("group", "validate", path), ("triangle", "analyze", path)):
        code, out, err = run(capsys, *argv)
        assert code == 1
        assert err.startswith("error:")


def test_missing_file_exits_one(capsys, tmp_path):
    code, _, err = run(capsys, "angle", tmp_path / "nope.json")
    assert code == 1 and err.startswith("error:")


def test_render_text_layout():
    text = io.render_text({"b": [1, "x"], "a": {"flag": True, "none": None, "empty": ""}})
    assert text.splitlines() == ["a:", "  empty: \"\"", "  flag: true", "  none: none", "b:", "  - 1", "  - x"]
