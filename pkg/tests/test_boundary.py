import numpy as np
import pytest

from genmesh import corpora
from genmesh.boundary import (
    boundary_matches_regular,
    boundary_split_facets,
    chain_around,
    generalized_boundary,
    induced_boundary_orientation,
)
from genmesh.fracture import fractured_mesh
from genmesh.generalized import (
    GeneralizedMesh,
    check_orientation_compatibility,
    find_compatible_orientation,
    from_triangulation,
    relabeling_equivalent,
    submesh,
    validate,
)
from genmesh.meshgen import annulus_mesh, cube_mesh, square_mesh
from genmesh.simplicial import Triangulation, orientation_signs

from .conftest import A, B, letters
from .test_generalized import two_sided_segment


def corpus_meshes():
    out = {
        "decagon": fractured_mesh(corpora.decagon_slit()),
        "cross": fractured_mesh(corpora.cross()),
        "two-sided segment": two_sided_segment(),
        "square": from_triangulation(square_mesh(3, 2).triangulation),
        "cube": from_triangulation(cube_mesh(2).triangulation),
        "mobius": from_triangulation(corpora.mobius().triangulation),
    }
    for name in ("interior_triangle", "t_junction", "closed_sphere", "point_contact"):
        out[name] = fractured_mesh(getattr(corpora, name)())
    return out


CORPUS = corpus_meshes()


class TestSplitFacets:
    def test_decagon(self, m1):
        got = [(letters([f.facet])[0], f.element + 1) for f in boundary_split_facets(m1)]
        assert got == [("AB", 1), ("CD", 2), ("DE", 3), ("EF", 4), ("FG", 5),
                       ("AB", 6), ("GH", 7), ("HI", 8), ("IJ", 9), ("CJ", 10)]

    def test_two_sided_segment(self):
        assert boundary_split_facets(two_sided_segment()) == []

    def test_tetrahedron(self):
        assert len(boundary_split_facets(from_triangulation(Triangulation([[0, 1, 2, 3]])))) == 4


class TestChains:
    def test_around_B(self, m1):
        ch = chain_around(m1, (0, 2), [B])
        assert ch.elements == [0, 1, 2, 3, 4, 5]
        assert letters(ch.facets) == ["AB", "BC", "BD", "BE", "BF", "BG", "AB"]
        assert ch.end == (5, 1)

    def test_around_A(self, m1):
        ch = chain_around(m1, (0, 2), [A])
        assert ch.elements == [0, 9, 8, 7, 6, 5]
        assert ch.end == (5, 1)

    def test_reverse_chain(self, m3):
        for f in boundary_split_facets(m3):
            for v in f.facet:
                ch = chain_around(m3, f, [v])
                back = chain_around(m3, ch.end, [v])
                assert back.elements == ch.elements[::-1]
                assert back.end == ch.start

    def test_single_tetrahedron(self):
        m = from_triangulation(Triangulation([[0, 1, 2, 3]]))
        ch = chain_around(m, (0, 0), [1, 2])
        assert ch.elements == [0]
        assert [set(f) for f in ch.facets] == [{1, 2, 3}, {0, 1, 2}]

    def test_start_must_be_boundary(self, m1):
        with pytest.raises(ValueError):
            chain_around(m1, (0, 0), [B])


class TestGeneralizedBoundary:
    def test_decagon(self, m1):
        bd = generalized_boundary(m1)
        assert bd.n_elements == 10 and validate(bd).ok
        slit = [i for i, row in enumerate(bd.elt.tolist()) if set(row) == {A, B}]
        assert len(slit) == 2
        assert relabeling_equivalent(submesh(bd, slit), two_sided_segment()) is not None

    def test_origin_order(self, m3):
        bd = generalized_boundary(m3)
        k, a = bd.origin[:, 0], bd.origin[:, 1]
        assert np.all(m3.nei_elt[k, a] == -1)
        assert np.all(np.diff(k * 10 + a) > 0)

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_boundary_of_boundary_is_empty(self, name):
        bd = generalized_boundary(CORPUS[name])
        assert validate(bd).ok
        assert generalized_boundary(bd).n_elements == 0

    def test_closed_surface(self):
        sphere = corpora.closed_sphere().fracture_mesh
        assert generalized_boundary(from_triangulation(sphere.triangulation)).n_elements == 0

    def test_one_dimensional(self):
        bd = generalized_boundary(from_triangulation(Triangulation([[0, 1], [1, 2]])))
        assert sorted(bd.elt.ravel().tolist()) == [0, 2]
        assert np.all(bd.nei_elt == -1)

    def test_zero_dimensional(self):
        assert generalized_boundary(GeneralizedMesh(2, [[0], [1]])).n_elements == 0


class TestInducedOrientation:
    def test_decagon_outer_ccw_and_slit_opposite(self, m1):
        dec = corpora.decagon()
        signs = orientation_signs(dec.cells, dec.points)
        bd = generalized_boundary(m1)
        ib = induced_boundary_orientation(m1, signs)
        directed = [tuple(r) if s == 1 else tuple(r[::-1]) for r, s in zip(bd.elt.tolist(), ib)]
        slit = [e for e in directed if set(e) == {A, B}]
        assert sorted(slit) == [(A, B), (B, A)]
        for tail, head in directed:
            if {tail, head} != {A, B}:
                p, q = dec.points[tail], dec.points[head]
                assert p[0] * q[1] - p[1] * q[0] > 0

    @pytest.mark.parametrize("name", sorted(set(CORPUS) - {"mobius"}))
    def test_compatibility_is_inherited(self, name):
        mesh = CORPUS[name]
        signs = find_compatible_orientation(mesh)
        assert signs is not None and check_orientation_compatibility(mesh, signs)
        bd = generalized_boundary(mesh)
        assert check_orientation_compatibility(bd, induced_boundary_orientation(mesh, signs))

    def test_single_triangle_cyclic(self):
        m = from_triangulation(Triangulation([[0, 1, 2]]))
        bd = generalized_boundary(m)
        ib = induced_boundary_orientation(m, [1])
        directed = {tuple(r) if s == 1 else tuple(r[::-1]) for r, s in zip(bd.elt.tolist(), ib)}
        assert directed == {(0, 1), (1, 2), (2, 0)}


class TestRegularAgreement:
    @pytest.mark.parametrize("mesh", [square_mesh(4, 3), cube_mesh(3), annulus_mesh(3, 12)],
                             ids=["square", "ball", "annulus"])
    def test_regular_meshes(self, mesh):
        assert boundary_matches_regular(mesh)

    def test_closed_surface_vacuous(self):
        assert boundary_matches_regular(corpora.closed_sphere().fracture_mesh)
