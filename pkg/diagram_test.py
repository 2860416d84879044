import json

import pytest

from conftest import DIAGRAM_IDS, HOMOGENEOUS_IDS
from models.diagram import GroupDiagram, HomogeneousSpace
from services.diagram import (
    lambda_weight,
    load_json,
    parse_diagram,
    parse_document,
    parse_homogeneous,
    serialize_diagram,
    serialize_homogeneous,
    substitute_parameters,
    validate,
    weyl_group_of,
)
from services.errors import DimensionMismatch, ParseError, RankMismatch, SchemaError, UnsupportedRank
from services.ratlin import covector


def diagram_doc(**overrides):
    doc = {
        "name": "t2_sphere",
        "rank": 2,
        "G": {"roots": [[2, 0], [-2, 0]], "dim": 4},
        "Kplus": {"roots": [], "dim": 2},
        "Kminus": {"roots": [], "dim": 2},
        "H": {"torus_span": [[1, 0]], "dim": 1},
    }
    doc.update(overrides)
    return doc


def test_parse_catalog_diagram(load_catalog):
    d = load_catalog("s6_su3")
    assert isinstance(d, GroupDiagram)
    assert d.rank == 2
    assert len(d.G.roots) == 6
    assert d.manifold_dim == 6
    assert d.gram.matrix[0][1] != 0


def test_parse_document_dispatches_on_k(load_catalog):
    assert isinstance(load_catalog("hp3_hom"), HomogeneousSpace)
    assert isinstance(load_catalog("hp3_sp3sp1"), GroupDiagram)


def test_product_blocks_are_embedded_at_their_offsets(load_catalog):
    d = load_catalog("hp3_sp3sp1")
    assert covector([0, 0, 0, 2]) in d.G.roots
    assert covector([0, 0, 2, 0]) in d.Kminus.roots
    assert len(d.G.roots) == 20
    assert len(d.Kminus.roots) == 12


def test_invalid_json_reports_the_position():
    with pytest.raises(ParseError, match="line 1"):
        load_json('{"name": ')


def test_document_must_be_an_object():
    with pytest.raises(SchemaError):
        load_json("[1, 2]")


def test_schema_errors_name_the_field():
    doc = diagram_doc()
    del doc["H"]
    with pytest.raises(SchemaError, match="H"):
        parse_diagram(json.dumps(doc))
    with pytest.raises(SchemaError):
        parse_diagram(json.dumps(diagram_doc(rank=0)))


def test_root_length_must_match_rank():
    with pytest.raises(DimensionMismatch, match="G"):
        parse_diagram(json.dumps(diagram_doc(G={"roots": [[2, 0, 0], [-2, 0, 0]]})))


def test_construct_must_fit_the_rank():
    doc = diagram_doc(G={"construct": {"family": "B", "n": 3}})
    with pytest.raises(DimensionMismatch):
        parse_diagram(json.dumps(doc))
    doc = diagram_doc(G={"construct": {"family": "G2", "n": 3}})
    with pytest.raises(UnsupportedRank):
        parse_diagram(json.dumps(doc))


def test_dependent_torus_span_is_rejected():
    doc = diagram_doc(H={"torus_span": [[1, 0], [2, 0]]})
    with pytest.raises(SchemaError, match="H.torus_span"):
        parse_diagram(json.dumps(doc))


def test_parameters_use_defaults_and_bindings(load_catalog):
    assert load_catalog("2_6D").H.torus_span.basis == (covector([1, 1]),)
    d = load_catalog("2_6D", p=2)
    assert d.H.torus_span.basis == (covector([2, 1]),)
    assert dict(d.parameters) == {"p": 2}


def test_negated_placeholders():
    doc, bound = substitute_parameters({"x": ["$p", "-$p", "p"], "parameters": {"p": 3}})
    assert doc["x"] == [3, -3, "p"]
    assert bound == {"p": 3}


def test_unbound_parameter_names_the_path():
    doc = diagram_doc(H={"torus_span": [["$p", 1]], "dim": 1})
    with pytest.raises(SchemaError, match=r"unbound parameter 'p' at H.torus_span\[0\]\[0\]"):
        parse_diagram(json.dumps(doc))


def test_parameter_defaults_must_be_integers():
    with pytest.raises(SchemaError):
        substitute_parameters({"parameters": {"p": "one"}})


@pytest.mark.parametrize("entry_id", DIAGRAM_IDS)
def test_serialize_then_parse_is_the_identity(load_catalog, entry_id):
    d = load_catalog(entry_id)
    assert parse_diagram(serialize_diagram(d)) == d


@pytest.mark.parametrize("entry_id", HOMOGENEOUS_IDS)
def test_serialize_homogeneous_round_trip(load_catalog, entry_id):
    h = load_catalog(entry_id)
    assert parse_homogeneous(serialize_homogeneous(h)) == h


def test_serialized_parameters_are_bound(load_catalog):
    text = serialize_diagram(load_catalog("2_6A1", p=2, q=3))
    doc = json.loads(text)
    assert doc["parameters"] == {"p": 2, "q": 3}
    assert doc["H"]["torus_span"] == [[2, 3]]


def test_homogeneous_space_needs_equal_rank():
    doc = {
        "name": "s3",
        "rank": 1,
        "G": {"roots": [[2], [-2]], "dim": 3},
        "K": {"full_rank": False, "dim": 0},
    }
    with pytest.raises(RankMismatch):
        parse_homogeneous(json.dumps(doc))


def test_lambda_weight(load_catalog):
    assert lambda_weight(load_catalog("s6_su3")) == (1, 1)
    assert lambda_weight(load_catalog("2_6D", p=2)) == (1, -2)
    assert lambda_weight(load_catalog("cp3_u3")) == (0, 0, 1)
    assert lambda_weight(load_catalog("s2_circle")) == (1,)


def test_lambda_weight_with_trivial_torus_and_roots(load_catalog):
    with pytest.raises(RankMismatch):
        lambda_weight(load_catalog("s4_s3"))


def test_lambda_weight_needs_corank_one(load_catalog):
    with pytest.raises(RankMismatch):
        lambda_weight(load_catalog("1_6_reject"))


def test_weyl_group_of_uses_generators_then_roots(load_catalog):
    d = load_catalog("2_6C")
    assert weyl_group_of(d.Kminus, d.gram).order == 2
    assert weyl_group_of(d.G, d.gram).order == 4
    assert weyl_group_of(d.Kplus, d.gram).order == 1
    assert weyl_group_of(d.H, d.gram).order == 1


@pytest.mark.parametrize("entry_id", DIAGRAM_IDS)
def test_catalog_diagrams_validate(load_catalog, entry_id):
    report = validate(load_catalog(entry_id))
    assert report.passed, report.failures()


def test_validate_reports_roots_outside_g():
    doc = diagram_doc(Kplus={"roots": [[0, 2], [0, -2]], "dim": 4})
    report = validate(parse_diagram(json.dumps(doc)))
    assert not report.passed
    assert not report.get("roots.Kplus_in_G").passed


def test_validate_reports_dimension_problems():
    doc = diagram_doc(G={"roots": [[2, 0], [-2, 0]], "dim": 5})
    report = validate(parse_diagram(json.dumps(doc)))
    assert not report.get("dims.manifold_even").passed
    assert not report.get("dims.full_rank_identity").passed


def test_validate_reports_principal_torus_outside_k():
    doc = diagram_doc(
        Kminus={"full_rank": False, "torus_span": [[0, 1]], "dim": 1},
        H={"torus_span": [[1, 0]], "dim": 0},
    )
    report = validate(parse_diagram(json.dumps(doc)))
    assert not report.get("rank.H_torus_in_Kminus").passed


def test_validation_never_raises_on_bad_generators():
    doc = diagram_doc(Kminus={"full_rank": False, "weyl_generators": [[[1, 1], [0, 1]]], "dim": 3})
    report = validate(parse_diagram(json.dumps(doc)))
    assert not report.passed
    assert not report.get("gram.generators_preserved").passed


def test_parse_document_with_parameters(catalog_text):
    d = parse_document(catalog_text("2_6I"), {"p": 0})
    assert d.H.torus_span.basis == (covector([0, 1]),)


def test_validate_rejects_generators_of_infinite_order(catalog_text):
    doc = json.loads(catalog_text("2_6C"))
    doc["H"]["weyl_generators"] = [[["3/5", "-4/5"], ["4/5", "3/5"]]]
    report = validate(parse_diagram(json.dumps(doc)))
    assert report.get("gram.generators_preserved").passed
    assert not report.get("weyl.generators_finite_order").passed
    assert "H.weyl_generators[0]" in report.get("weyl.generators_finite_order").message
    assert not report.get("weyl.generation").passed


def test_validate_needs_generators_on_the_non_full_rank_side(catalog_text):
    doc = json.loads(catalog_text("2_6H"))
    del doc["Kminus"]["weyl_generators"]
    doc["Kminus"]["roots"] = [[2, 2], [-2, -2]]
    report = validate(parse_diagram(json.dumps(doc)))
    check = report.get("weyl.kminus_generators_present")
    assert not check.passed
    assert "Kminus" in check.message


def test_generators_are_optional_when_neither_side_is_full_rank(load_catalog):
    report = validate(load_catalog("1_6_reject"))
    assert report.get("weyl.kminus_generators_present").passed


def test_validate_reports_a_full_torus_on_a_non_full_rank_side(catalog_text):
    doc = json.loads(catalog_text("2_6C"))
    doc["Kminus"]["torus_span"] = [[1, 0], [0, 1]]
    report = validate(parse_diagram(json.dumps(doc)))
    assert not report.get("rank.bookkeeping").passed
    assert "rank 2" in report.get("rank.bookkeeping").message


def test_validate_reports_ranks_that_contradict_the_sphere(catalog_text):
    doc = json.loads(catalog_text("2_6C"))
    doc["Kminus"]["dim"] = 4
    report = validate(parse_diagram(json.dumps(doc)))
    assert not report.get("rank.bookkeeping").passed
    assert "implies 2" in report.get("rank.bookkeeping").message


def test_side_rank_falls_back_to_the_sphere_dimension(catalog_text):
    doc = json.loads(catalog_text("2_6C"))
    del doc["Kminus"]["torus_span"]
    d = parse_diagram(json.dumps(doc))
    assert d.Kminus.rank(d.rank) is None
    assert d.side_rank(d.Kminus) == 1
    assert d.side_rank(d.Kplus) == 2


def test_side_rank_is_unknown_without_dims(catalog_text):
    doc = json.loads(catalog_text("2_6C"))
    del doc["Kminus"]["torus_span"]
    del doc["Kminus"]["dim"]
    d = parse_diagram(json.dumps(doc))
    assert d.side_rank(d.Kminus) is None


def test_default_gram_is_block_diagonal_over_products(load_catalog):
    gram = load_catalog("5_6").gram.matrix
    assert gram[0][1] != 0
    assert gram[0][2] == gram[1][2] == gram[2][0] == 0
    assert gram[2][2] == 1
