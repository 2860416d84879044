import pytest

from models.cohomology import BettiResult
from models.graph import GkmGraph, Vertex
from services.cohomology import (
    EquivariantCohomology,
    betti_numbers,
    default_kernel_basis,
    ht_dimension,
    monomials,
    poincare_check,
)
from services.errors import FormalityViolation
from services.graph import build_graph, build_homogeneous_graph


def skewed_basis(label):
    """Another basis of the same kernel."""
    basis = list(default_kernel_basis(label))
    if len(basis) < 2:
        return [tuple(3 * c for c in v) for v in basis]
    mixed = tuple(a + b for a, b in zip(basis[0], basis[1]))
    return [mixed] + basis[1:]


def test_monomials_order():
    assert monomials(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert monomials(3, 0) == [(0, 0, 0)]
    assert len(monomials(4, 3)) == 20


@pytest.mark.parametrize(
    "entry_id,betti",
    [
        ("s6_su3", [1, 0, 0, 1]),
        ("s6_su2sq", [1, 0, 0, 1]),
        ("cp3_u3", [1, 1, 1, 1]),
        ("2_6D", [1, 2, 2, 1]),
        ("2_6C", [1, 1, 1, 1]),
        ("cp2_u2", [1, 1, 1]),
        ("dim4_torus", [1, 2, 1]),
        ("s2_circle", [1, 1]),
    ],
)
def test_betti_numbers(load_catalog, entry_id, betti):
    g = build_graph(load_catalog(entry_id))
    result = betti_numbers(g, g.n)
    assert result.betti == betti
    assert sum(result.betti) == len(g.vertices)


def test_hp3_encodings_agree(load_catalog):
    diagram = build_graph(load_catalog("hp3_sp3sp1"))
    homogeneous = build_homogeneous_graph(load_catalog("hp3_hom"))
    expected = [1, 0, 1, 0, 1, 0, 1]
    assert betti_numbers(diagram, 6).betti == expected
    assert betti_numbers(homogeneous, 6).betti == expected


def test_g2_over_su3_matches_the_sphere(load_catalog):
    g = build_homogeneous_graph(load_catalog("s6_g2_hom"))
    assert betti_numbers(g, g.n).betti == [1, 0, 0, 1]


def test_degree_zero_counts_components(load_catalog):
    assert ht_dimension(build_graph(load_catalog("cp3_u3")), 0) == 1
    assert ht_dimension(build_graph(load_catalog("cp3_u3")), -1) == 0


@pytest.mark.parametrize("entry_id", ["s6_su3", "cp3_u3", "2_6C", "2_6D"])
def test_kernel_basis_choice_does_not_matter(load_catalog, entry_id):
    g = build_graph(load_catalog(entry_id))
    default = EquivariantCohomology(g)
    skewed = EquivariantCohomology(g, skewed_basis)
    for d in range(g.n + 2):
        assert default.ht_dimension(d) == skewed.ht_dimension(d)


@pytest.mark.parametrize("entry_id", ["cp3_u3", "2_6D", "hp3_sp3sp1"])
def test_ht_dimensions_do_not_decrease(load_catalog, entry_id):
    g = build_graph(load_catalog(entry_id))
    cohomology = EquivariantCohomology(g)
    dims = [cohomology.ht_dimension(d) for d in range(g.n + 1)]
    assert dims == sorted(dims)


def test_rank_one_recursion(load_catalog):
    g = build_graph(load_catalog("s2_circle"))
    result = betti_numbers(g, 1)
    assert result.ht_dims == [1, 2]
    assert result.max_degree == 3


def test_max_degree_extends_the_check(load_catalog):
    g = build_graph(load_catalog("s6_su3"))
    result = betti_numbers(g, g.n, max_degree=7)
    assert result.max_degree == 7
    assert result.betti == [1, 0, 0, 1]


def test_edgeless_graph_is_not_formal():
    g = GkmGraph(
        name="two_points",
        rank=1,
        n=1,
        vertices=[
            Vertex(id="P0", orbit="Plus", coset_index=0, word="e"),
            Vertex(id="P1", orbit="Plus", coset_index=1, word="g1"),
        ],
    )
    with pytest.raises(FormalityViolation):
        betti_numbers(g, 1)


def test_poincare_check_reports_each_failure():
    report = poincare_check(BettiResult(betti=[1, 0, 1], r=1, n=2), 2, 3)
    assert report.get("betti.poincare_duality").passed
    assert not report.get("betti.euler_sum").passed
    report = poincare_check(BettiResult(betti=[2, 1, 0], r=1, n=2), 2, 3)
    assert not report.get("betti.poincare_duality").passed
    assert not report.get("betti.b0").passed
