import json

import pytest

from typer.testing import CliRunner

from cli import EXIT_INVALID, EXIT_NOT_GKM, EXIT_OK, app
from conftest import CATALOG_DIR, CATALOG_IDS

runner = CliRunner()


def doc(entry_id: str) -> str:
    return str(CATALOG_DIR / f"{entry_id}.json")


def test_check_gkm_diagram():
    result = runner.invoke(app, ["check", doc("s6_su3")])
    assert result.exit_code == EXIT_OK
    assert "s6_su3: GKM (Case1), χ=2" in result.output
    assert "rank condition: holds" in result.output
    assert "lambda = " in result.output


def test_check_verbose_lists_fixed_points():
    result = runner.invoke(app, ["check", doc("2_6C"), "-v"])
    assert result.exit_code == EXIT_OK
    assert "fixed points:" in result.output
    assert "P3  [e]" in result.output


def test_check_not_gkm():
    result = runner.invoke(app, ["check", doc("s4_s3")])
    assert result.exit_code == EXIT_NOT_GKM
    assert "not GKM" in result.output


def test_check_with_parameter_binding():
    result = runner.invoke(app, ["check", doc("2_6D"), "-P", "p=0"])
    assert result.exit_code == EXIT_NOT_GKM
    assert "roots vanishing on t∩h: 2e1" in result.output

    result = runner.invoke(app, ["check", doc("2_6D"), "--param", "p=2"])
    assert result.exit_code == EXIT_OK


def test_malformed_parameter_binding():
    result = runner.invoke(app, ["check", doc("2_6D"), "-P", "p"])
    assert result.exit_code == EXIT_INVALID
    assert "Malformed parameter binding" in result.output

    result = runner.invoke(app, ["check", doc("2_6D"), "-P", "p=two"])
    assert result.exit_code == EXIT_INVALID


def test_invalid_documents(tmp_path):
    missing = runner.invoke(app, ["check", str(tmp_path / "nope.json")])
    assert missing.exit_code == EXIT_INVALID
    assert "Cannot read" in missing.output

    broken = tmp_path / "broken.json"
    broken.write_text('{"name": "x",')
    result = runner.invoke(app, ["check", str(broken)])
    assert result.exit_code == EXIT_INVALID
    assert "ParseError" in result.output


def test_invalid_environment(monkeypatch):
    monkeypatch.setenv("GKM_GEN_CAP", "lots")
    result = runner.invoke(app, ["check", doc("s6_su3")])
    assert result.exit_code == EXIT_INVALID
    assert "GKM_GEN_CAP" in result.output


def test_graph_dot_to_stdout():
    result = runner.invoke(app, ["graph", doc("cp3_u3")])
    assert result.exit_code == EXIT_OK
    assert result.output.startswith("graph")
    assert "--" in result.output


def test_graph_json_to_file(tmp_path):
    target = tmp_path / "2_6C.json"
    result = runner.invoke(app, ["graph", doc("2_6C"), "--format", "json", "-o", str(target)])
    assert result.exit_code == EXIT_OK
    written = json.loads(target.read_text())
    assert len(written["vertices"]) == 4
    assert len(written["edges"]) == 6
    assert not list(tmp_path.glob("*.tmp"))


def test_graph_rejects_unknown_format():
    result = runner.invoke(app, ["graph", doc("cp3_u3"), "-f", "svg"])
    assert result.exit_code == EXIT_INVALID


def test_graph_of_non_gkm_diagram():
    result = runner.invoke(app, ["graph", doc("s4_s3")])
    assert result.exit_code == EXIT_NOT_GKM


def test_betti():
    result = runner.invoke(app, ["betti", doc("s6_su3")])
    assert result.exit_code == EXIT_OK
    assert "b = 1,0,0,1" in result.output
    assert "betti.poincare_duality: ok" in result.output


def test_betti_with_parameter():
    result = runner.invoke(app, ["betti", doc("2_6D"), "-P", "p=2", "--max-degree", "6"])
    assert result.exit_code == EXIT_OK
    assert "checked to degree 6" in result.output


def test_betti_needs_dims(tmp_path):
    stripped = json.loads((CATALOG_DIR / "s6_su3.json").read_text())
    for group in ("G", "Kplus", "Kminus", "H"):
        stripped[group].pop("dim", None)
    path = tmp_path / "nodims.json"
    path.write_text(json.dumps(stripped))
    result = runner.invoke(app, ["betti", str(path)])
    assert result.exit_code == EXIT_INVALID
    assert "need dims" in result.output


def test_homogeneous_graph():
    result = runner.invoke(app, ["homogeneous", doc("op2_hom"), "--format", "json"])
    assert result.exit_code == EXIT_OK
    written = json.loads(result.output)
    assert len(written["vertices"]) == 3
    assert len(written["edges"]) == 12


def test_homogeneous_rank_mismatch(tmp_path):
    path = tmp_path / "unequal.json"
    path.write_text(
        json.dumps(
            {
                "name": "unequal",
                "rank": 2,
                "G": {"construct": {"family": "A", "n": 2}},
                "K": {"roots": [], "full_rank": False},
            }
        )
    )
    result = runner.invoke(app, ["homogeneous", str(path)])
    assert result.exit_code == EXIT_INVALID
    assert "RankMismatch" in result.output


def test_catalog_list():
    result = runner.invoke(app, ["catalog", "--list"])
    assert result.exit_code == EXIT_OK
    lines = result.output.strip().splitlines()
    assert len(lines) >= 18
    assert any(line.startswith("s6_su3") for line in lines)


def test_catalog_run_one():
    result = runner.invoke(app, ["catalog", "--run", "s6_su3"])
    assert result.exit_code == EXIT_OK
    assert "pass  s6_su3" in result.output
    assert "1 entries, 0 failed" in result.output


def test_catalog_run_all():
    result = runner.invoke(app, ["catalog", "--run-all"])
    assert result.exit_code == EXIT_OK
    assert "FAIL" not in result.output


def test_catalog_unknown_entry():
    result = runner.invoke(app, ["catalog", "--run", "no_such_entry"])
    assert result.exit_code == EXIT_INVALID
    assert "UnknownEntry" in result.output


def test_catalog_needs_exactly_one_mode():
    assert runner.invoke(app, ["catalog"]).exit_code == EXIT_INVALID
    assert runner.invoke(app, ["catalog", "--list", "--run-all"]).exit_code == EXIT_INVALID


def write_doc(tmp_path, entry_id, edit):
    document = json.loads((CATALOG_DIR / f"{entry_id}.json").read_text())
    edit(document)
    path = tmp_path / f"{entry_id}_edited.json"
    path.write_text(json.dumps(document))
    return str(path)


def drop_kminus_generators(document):
    del document["Kminus"]["weyl_generators"]
    document["Kminus"]["roots"] = [[2, 2], [-2, -2]]


def test_case_two_without_kminus_generators_is_invalid(tmp_path):
    path = write_doc(tmp_path, "2_6H", drop_kminus_generators)
    for command in ("check", "graph"):
        result = runner.invoke(app, [command, path])
        assert result.exit_code == EXIT_INVALID
        assert "weyl.kminus_generators_present" in result.output


def test_generator_of_infinite_order_is_invalid(tmp_path):
    def rotate(document):
        document["H"]["weyl_generators"] = [[["3/5", "-4/5"], ["4/5", "3/5"]]]

    result = runner.invoke(app, ["check", write_doc(tmp_path, "2_6C", rotate)])
    assert result.exit_code == EXIT_INVALID
    assert "weyl.generators_finite_order" in result.output


@pytest.mark.parametrize("entry_id", CATALOG_IDS)
def test_check_exit_code_matches_the_catalog(entry_id):
    sidecar = json.loads((CATALOG_DIR / f"{entry_id}.expected.json").read_text())
    for run in sidecar["runs"]:
        bindings = [arg for name, value in run["parameters"].items() for arg in ("-P", f"{name}={value}")]
        result = runner.invoke(app, ["check", doc(entry_id), *bindings])
        expected = EXIT_OK if run["expected"].get("is_gkm", True) else EXIT_NOT_GKM
        assert result.exit_code == expected, result.output


@pytest.mark.parametrize(
    "content",
    [
        "",
        "[]",
        '{"name": "x", "rank": 2}',
        '{"name": "x", "rank": "two", "G": {"roots": []}, "Kplus": {"roots": []}, "Kminus": {"roots": []}, "H": {"torus_span": []}}',
        '{"name": "x", "rank": 2, "G": {"roots": [[1, 2, 3]]}, "Kplus": {"roots": []}, "Kminus": {"roots": []}, "H": {"torus_span": [[1, 0]]}}',
        '{"name": "x", "rank": 2, "G": {"roots": [[2, 0]]}, "Kplus": {"roots": []}, "Kminus": {"roots": []}, "H": {"torus_span": [[1, 0]]}}',
    ],
)
def test_malformed_documents_exit_invalid(tmp_path, content):
    path = tmp_path / "malformed.json"
    path.write_text(content)
    for command in ("check", "graph", "betti"):
        assert runner.invoke(app, [command, str(path)]).exit_code == EXIT_INVALID
