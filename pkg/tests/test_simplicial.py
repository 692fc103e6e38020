import itertools

import numpy as np
import pytest

from genmesh.errors import DegenerateSimplexError
from genmesh.meshgen import cube_mesh, square_mesh
from genmesh.simplicial import (
    GeometricMesh,
    Simplex,
    Triangulation,
    consistently_oriented,
    induced_facet_orientation,
    is_branching,
    is_face_connected_star,
    natural_orientation,
    orient,
    orientation_signs,
    permutation_parity,
    star,
    subsimplices,
    triangulation_boundary,
    validate_regularity,
)

from .conftest import A, B, C, D, E


def sets(tri):
    return {frozenset(int(v) for v in r) for r in tri.cells}


class TestSubsimplices:
    def test_edges_of_triangle(self):
        assert subsimplices(Simplex((A, B, C)), 1) == [Simplex((A, B)), Simplex((A, C)), Simplex((B, C))]

    def test_facets_of_tetrahedron(self):
        faces = subsimplices((A, B, C, D), 2)
        assert len(faces) == 4
        assert all(f.dim == 2 for f in faces)

    def test_vertex(self):
        assert subsimplices((A,), 0) == [Simplex((A,))]

    @pytest.mark.parametrize("d", [-1, 3])
    def test_out_of_range(self, d):
        with pytest.raises(ValueError):
            subsimplices((A, B, C), d)

    def test_canonical_form(self):
        assert Simplex((C, A, B)).vertices == (A, B, C)
        with pytest.raises(ValueError):
            Simplex((A, A))


class TestOrient:
    def test_even_permutation_equal(self):
        assert orient([A, B, C, D]) == orient([C, A, B, D])

    def test_odd_permutation_opposite(self):
        assert orient([A, B, C, D]) == -orient([A, C, B, D])
        assert orient([A, B]) == -orient([B, A])

    def test_repeated_vertex(self):
        with pytest.raises(ValueError):
            orient([A, B, A])

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exhaustive_parity(self, n):
        base = tuple(range(n + 1))
        for perm in itertools.permutations(base):
            inversions = sum(perm[i] > perm[j] for i in range(n + 1) for j in range(i + 1, n + 1))
            assert permutation_parity(perm) == (-1) ** inversions
            assert (orient(perm) == orient(base)) == (inversions % 2 == 0)


class TestInducedOrientation:
    def test_tetrahedron_omit_second(self):
        assert induced_facet_orientation([A, B, C, D], 1) == -orient([A, C, D])

    def test_edge_vertices(self):
        first = induced_facet_orientation([A, B], 1)
        assert first.vertices == (A,) and first.sign == -1
        second = induced_facet_orientation([A, B], 0)
        assert second.vertices == (B,) and second.sign == 1

    def test_triangle_omit_first(self):
        assert induced_facet_orientation([A, B, C], 0) == orient([B, C])

    def test_bad_position(self):
        with pytest.raises(ValueError):
            induced_facet_orientation([A, B, C], 3)

    @pytest.mark.parametrize("n", [2, 3])
    def test_facets_of_one_simplex_consistent(self, n):
        # two distinct facets of an oriented simplex are consistently oriented
        for perm in itertools.permutations(range(n + 1)):
            facets = [induced_facet_orientation(perm, i) for i in range(n + 1)]
            for f1, f2 in itertools.combinations(facets, 2):
                assert consistently_oriented(f1, f2)


class TestConsistentOrientation:
    def test_figure_pair(self):
        assert consistently_oriented([A, B, C], [B, D, C])

    def test_inconsistent_pair(self):
        assert not consistently_oriented([A, B, C], [B, C, D])

    def test_needs_shared_facet(self):
        with pytest.raises(ValueError):
            consistently_oriented([A, B, C], [A, D, E])


class TestNaturalOrientation:
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

    def test_ascending_is_positive(self):
        assert natural_orientation([0, 1, 2], self.tri) == orient([0, 1, 2])

    def test_swapped_is_negative(self):
        coords = self.tri[[0, 2, 1]]
        assert natural_orientation([0, 1, 2], coords) == -orient([0, 1, 2])

    def test_degenerate(self):
        with pytest.raises(DegenerateSimplexError):
            natural_orientation([0, 1, 2], np.array([[0.0, 0], [1, 1], [2, 2]]))

    def test_neighbours_consistent(self):
        m = square_mesh(3, 3)
        facets, counts = m.triangulation.facet_counts()
        for f in facets[counts == 2]:
            k1, k2 = np.flatnonzero(np.isin(m.cells, f).sum(axis=1) == 2)
            o1 = natural_orientation(m.cells[k1], m.points)
            o2 = natural_orientation(m.cells[k2], m.points)
            assert consistently_oriented(o1, o2)

    def test_vectorized_agrees(self):
        m = cube_mesh(2)
        signs = orientation_signs(m.cells, m.points)
        expect = [natural_orientation(r, m.points).sign * orient(r).sign for r in m.cells]
        assert signs.tolist() == expect


class TestBoundary:
    M = Triangulation([[A, B, C], [A, B, D], [A, C, D], [B, C, D], [C, D, E]])

    def test_example_chain(self):
        bd = triangulation_boundary(self.M)
        assert sets(bd) == {frozenset({C, E}), frozenset({D, E})}
        assert sets(triangulation_boundary(bd)) == {frozenset({C}), frozenset({D})}

    def test_tetrahedron(self):
        assert len(triangulation_boundary([[0, 1, 2, 3]])) == 4

    def test_dimension_zero_is_empty(self):
        assert len(triangulation_boundary(Triangulation([[0], [1]]))) == 0

    def test_boundary_of_boundary_empty(self):
        for m in (square_mesh(4, 3), cube_mesh(2)):
            assert len(triangulation_boundary(triangulation_boundary(m))) == 0


class TestStar:
    def test_vertex_fan(self):
        m = square_mesh(2, 2)
        centre = 4
        st = star([centre], m)
        assert len(st) == int(np.any(m.cells == centre, axis=1).sum()) > 0
        assert np.all(np.any(st.cells == centre, axis=1))

    def test_element_and_missing(self):
        tri = Triangulation([[0, 1, 2], [1, 2, 3]])
        assert sets(star([0, 1, 2], tri)) == {frozenset({0, 1, 2})}
        assert len(star([0, 3], tri)) == 0


class TestBranching:
    def test_boundary_can_branch(self):
        M = Triangulation([[A, B, C], [C, D, E]])
        assert not is_branching(M)
        bd = triangulation_boundary(M)
        assert is_branching(bd)
        # four boundary edges meet at C
        facets, counts = bd.facet_counts()
        assert facets[counts > 2].ravel().tolist() == [C]
        assert counts.max() == 4

    def test_three_sheets(self):
        assert is_branching(Triangulation([[0, 1, 2], [0, 1, 3], [0, 1, 4]]))

    def test_single_simplex(self):
        assert not is_branching(Triangulation([[0, 1, 2]]))

    def test_face_connected_star(self):
        bowtie = Triangulation([[0, 1, 2], [0, 3, 4]])
        assert not is_face_connected_star([0], bowtie)
        assert is_face_connected_star([1], bowtie)


class TestRegularity:
    def test_square(self):
        m = square_mesh(3, 3)
        rep = validate_regularity(m, check_mesh_condition=True)
        assert rep.ok and rep.mesh_condition_ok

    def test_three_sheets_fail_facets(self):
        rep = validate_regularity(Triangulation([[0, 1, 2], [0, 1, 3], [0, 1, 4]]))
        assert not rep.facets_ok and not rep.ok

    def test_point_contact_fails_stars(self):
        rep = validate_regularity(Triangulation([[0, 1, 2], [0, 3, 4]]))
        assert rep.facets_ok and not rep.stars_ok

    def test_overlap_fails_mesh_condition(self):
        pts = np.array([[0.0, 0], [2, 0], [0, 2], [0.5, 0.5], [3, 3]])
        m = GeometricMesh(Triangulation([[0, 1, 2], [3, 1, 4]]), pts)
        rep = validate_regularity(m, check_mesh_condition=True)
        assert rep.mesh_condition_ok is False

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateSimplexError):
            GeometricMesh(Triangulation([[0, 1, 2]]), np.array([[0.0, 0], [1, 0], [2, 0]]))
