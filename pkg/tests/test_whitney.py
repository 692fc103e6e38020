import itertools
import math

import numpy as np
import pytest
import scipy.sparse.linalg

from genmesh import corpora
from genmesh.boundary import generalized_boundary
from genmesh.fracture import (
    FractureSpec,
    extrinsic_inflation,
    fractured_mesh,
    intrinsic_inflation,
)
from genmesh.generalized import component_count, from_triangulation
from genmesh.meshgen import cube_mesh, square_mesh
from genmesh.simplicial import GeometricMesh, Triangulation
from genmesh.whitney import (
    DiscreteForm,
    assemble,
    barycentric_coordinates,
    barycentric_gradients,
    basis_patch_residual,
    check_patch_condition,
    check_trace_surjectivity,
    edge_component_counts,
    excess_edge_components,
    has_point_contact,
    local_mass,
    local_stiffness,
    trace_matrix,
    trace_pullback_residual,
    whitney_eval,
)

from .conftest import random_rotation

REF = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
FRACTURES = ("decagon_slit", "cross", "interior_triangle", "t_junction", "closed_sphere",
             "point_contact", "bowtie_point_contacts")


def reference_triangle():
    return from_triangulation(Triangulation([[0, 1, 2]]), REF)


def corpus_meshes():
    for name in FRACTURES:
        spec = getattr(corpora, name)()
        yield f"{name}-fractured", fractured_mesh(spec)
        yield f"{name}-extrinsic", extrinsic_inflation(spec)
        yield f"{name}-intrinsic", intrinsic_inflation(spec.fracture_mesh)


CORPUS = dict(corpus_meshes())


def perturbed(spec, seed, amount=0.1):
    rng = np.random.default_rng(seed)
    pts = spec.volume.points + amount * rng.standard_normal(spec.volume.points.shape)
    if pts.shape[1] == 3:
        pts = pts @ random_rotation(rng).T
    return FractureSpec(GeometricMesh(spec.volume.triangulation, pts), spec.facets)


class TestBarycentric:
    def test_vertices(self):
        lam = barycentric_coordinates(REF, REF)
        np.testing.assert_allclose(lam, np.eye(3), atol=1e-15)

    def test_centroid(self):
        lam = barycentric_coordinates(REF, REF.mean(0, keepdims=True))
        np.testing.assert_allclose(lam, [[1 / 3] * 3], atol=1e-15)

    def test_gradients_reference(self):
        np.testing.assert_allclose(barycentric_gradients(REF), [[-1, -1], [1, 0], [0, 1]], atol=1e-15)

    def test_embedded_gradients_are_tangent(self):
        rng = np.random.default_rng(1)
        pts = rng.standard_normal((4, 3, 5))
        g = barycentric_gradients(pts)
        e = pts[:, 1:] - pts[:, :1]
        expected = np.eye(3)[:, 1:] - np.eye(3)[:, :1]
        np.testing.assert_allclose(np.einsum("kim,kjm->kij", g, e), np.broadcast_to(expected, (4, 3, 2)), atol=1e-12)
        np.testing.assert_allclose(g.sum(1), 0, atol=1e-12)

    def test_partition_of_unity(self):
        rng = np.random.default_rng(2)
        pts = rng.standard_normal((50, 4, 3))
        x = rng.standard_normal((50, 7, 3))
        np.testing.assert_allclose(barycentric_coordinates(pts, x).sum(-1), 1, atol=1e-13)


class TestWhitneyEval:
    def test_zero_forms_are_barycentric(self, m1):
        x = m1.points[m1.elt[3]].mean(0) + [0.01, -0.02]
        lam = barycentric_coordinates(m1.points[m1.elt[3]], x[None])[0]
        tab = m1.generalized_subfacets(0)
        for c, s in enumerate(tab.local_to_global[3]):
            assert whitney_eval(m1, 0, int(s), 3, x) == pytest.approx(lam[c], abs=1e-15)

    def test_off_component(self, m1):
        tab = m1.generalized_subfacets(0)
        s = int(tab.local_to_global[0, 0])
        other = next(k for k in range(10) if s not in tab.local_to_global[k])
        assert whitney_eval(m1, 0, s, other, [0.0, 0.0]) == 0.0

    def test_vector_count_checked(self, m1):
        with pytest.raises(ValueError):
            whitney_eval(m1, 1, 0, 0, [0.0, 0.0], [])
        with pytest.raises(ValueError):
            whitney_eval(m1, 0, 0, 0, [0.0, 0.0], [[1.0, 0.0]])

    def test_edge_integral(self):
        m = reference_triangle()
        tab = m.generalized_subfacets(1)
        s = next(i for i, f in enumerate(tab) if f.simplex.vertices == (1, 2))
        nodes = np.linspace(0, 1, 201)
        tangent = REF[2] - REF[1]
        vals = [whitney_eval(m, 1, s, 0, REF[1] + t * tangent, [tangent]) for t in nodes]
        assert np.trapezoid(vals, nodes) == pytest.approx(1.0, abs=1e-12)
        # other edges carry no flux along this one
        for r, f in enumerate(tab):
            if r != s:
                vals = [whitney_eval(m, 1, r, 0, REF[1] + t * tangent, [tangent]) for t in nodes]
                assert np.trapezoid(vals, nodes) == pytest.approx(0.0, abs=1e-12)

    def test_partition_of_unity_on_corpus(self, m3):
        rng = np.random.default_rng(0)
        tab = m3.generalized_subfacets(0)
        for k in range(m3.n_elements):
            w = rng.dirichlet(np.ones(3))
            x = w @ m3.points[m3.elt[k]]
            total = sum(whitney_eval(m3, 0, s, k, x) for s in range(len(tab)))
            assert total == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("d", [1, 2])
    def test_permutation_sign(self, d):
        from genmesh.whitney import _eval_forms

        rng = np.random.default_rng(d)
        pts = rng.standard_normal((1, 4, 3))
        grads = barycentric_gradients(pts)
        lam = rng.dirichlet(np.ones(4), size=(1, 3))
        vec = rng.standard_normal((1, 2, d, 3))
        base = tuple(range(d + 1))
        ref = _eval_forms(lam, grads, np.array([[base]]), vec)
        for perm in itertools.permutations(base):
            sign = np.linalg.det(np.eye(d + 1)[list(perm)])
            got = _eval_forms(lam, grads, np.array([[perm]]), vec)
            np.testing.assert_allclose(got, sign * ref, atol=1e-13)


class TestLocalMatrices:
    def test_reference_mass(self):
        M = local_mass(reference_triangle(), 0)[0]
        np.testing.assert_allclose(M, (np.ones((3, 3)) + np.eye(3)) / 24, atol=1e-16)

    def test_reference_stiffness(self):
        A = local_stiffness(reference_triangle())[0]
        np.testing.assert_allclose(A, [[1, -0.5, -0.5], [-0.5, 0.5, 0], [-0.5, 0, 0.5]], atol=1e-15)

    def test_stiffness_row_sums(self):
        m = fractured_mesh(perturbed(corpora.t_junction(), 0))
        np.testing.assert_allclose(local_stiffness(m).sum(-1), 0, atol=1e-12)

    def test_mass_total_is_volume(self, m1):
        B = assemble(m1, 0, local_mass(m1, 0))
        area = corpora.decagon().measures().sum()
        assert B.sum() == pytest.approx(area, rel=1e-13)

    @pytest.mark.parametrize("d", [0, 1, 2, 3])
    def test_mass_against_quadrature(self, d):
        from genmesh.generalized import local_combos
        from genmesh.quadrature import simplex_rule
        from genmesh.whitney import _eval_forms, global_local_orders

        m = fractured_mesh(perturbed(corpora.interior_triangle(), 3))
        ks = np.arange(5)
        pts = m.points[m.elt[ks]]
        nodes, w = simplex_rule(3, 2)
        x = np.einsum("qi,kim->kqm", nodes, pts)
        vec = np.broadcast_to(np.eye(3), (5, 3, 3))
        sets = list(itertools.combinations(range(3), d))
        frames = np.stack([vec[:, list(s)] for s in sets], 1) if d else np.zeros((5, 1, 0, 3))
        vals = _eval_forms(barycentric_coordinates(pts, x), barycentric_gradients(pts),
                           global_local_orders(m.elt[ks], local_combos(3, d)), frames)
        vol = m.points[m.elt[ks]]
        vol = np.abs(np.linalg.det(vol[:, 1:] - vol[:, :1])) / 6
        quad = np.einsum("q,k,kqcv,kqdv->kcd", w, vol, vals, vals)
        np.testing.assert_allclose(local_mass(m, d)[ks], quad, atol=1e-12)

    @pytest.mark.parametrize("d", [0, 1, 2])
    def test_mass_spd(self, d):
        m = fractured_mesh(corpora.t_junction())
        B = assemble(m, d, local_mass(m, d)).toarray()
        np.testing.assert_allclose(B, B.T, atol=1e-14)
        assert np.linalg.eigvalsh(B).min() > 0

    def test_assembly_order_independent(self, m3):
        A = assemble(m3, 1, local_mass(m3, 1))
        perm = np.random.default_rng(0).permutation(m3.n_elements)
        local = local_mass(m3, 1)
        from genmesh.generalized import GeneralizedMesh

        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        nei = np.where(m3.nei_elt[perm] >= 0, inv[m3.nei_elt[perm]], -1)
        pm = GeneralizedMesh(m3.points, m3.elt[perm], nei, m3.nei_fct[perm])
        B = assemble(pm, 1, local[perm])
        # the same subfacets up to renumbering: compare via simplex and member sets
        key = lambda tab, rename: [(f.simplex.vertices, frozenset(rename(f.component))) for f in tab]
        ka = key(m3.generalized_subfacets(1), lambda c: c)
        kb = key(pm.generalized_subfacets(1), lambda c: perm[list(c)])
        order = [kb.index(x) for x in ka]
        np.testing.assert_allclose(A.toarray(), B.toarray()[np.ix_(order, order)], atol=1e-15)

    def test_provider_shape_checked(self, m1):
        with pytest.raises(ValueError):
            assemble(m1, 0, np.zeros((10, 2, 2)))
        A = assemble(m1, 0, lambda k: np.eye(3))
        assert A.diagonal().sum() == 30

    @pytest.mark.parametrize("name", ["decagon_slit-fractured", "cross-fractured", "closed_sphere-fractured",
                                      "closed_sphere-intrinsic", "t_junction-extrinsic"])
    def test_stiffness_nullspace(self, name):
        m = CORPUS[name]
        A = assemble(m, 0, local_stiffness(m)).toarray()
        w = np.linalg.eigvalsh(A)
        assert int(np.sum(np.abs(w) < 1e-10 * np.abs(w).max())) == component_count(m)


class TestPatch:
    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_every_basis_form(self, name):
        m = CORPUS[name]
        for d in range(m.n):
            assert basis_patch_residual(m, d) <= 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_perturbed_geometry(self, seed):
        m = fractured_mesh(perturbed(corpora.t_junction(), seed))
        for d in range(3):
            assert basis_patch_residual(m, d) <= 1e-12

    def test_agrees_with_single_form_check(self, m1):
        for d in range(2):
            n = len(m1.generalized_subfacets(d))
            single = max(check_patch_condition(m1, DiscreteForm(m1, d, np.eye(n)[s])) for s in range(n))
            assert single <= 1e-12
            assert basis_patch_residual(m1, d) <= 1e-12

    def test_general_form(self, m3):
        rng = np.random.default_rng(0)
        for d in range(2):
            n = len(m3.generalized_subfacets(d))
            assert check_patch_condition(m3, DiscreteForm(m3, d, rng.standard_normal(n))) <= 1e-12

    def test_negative_control(self, m1):
        form = DiscreteForm(m1, 0, np.ones(len(m1.generalized_subfacets(0))))
        local = form.local_coefficients().copy()
        local[2, 0] = 5.0
        assert check_patch_condition(m1, local, 0) > 0.1

    def test_regular_mesh_continuity(self):
        m = square_mesh(4, 4)
        g = from_triangulation(m.triangulation, m.points)
        u = np.sin(m.points[:, 0]) + m.points[:, 1] ** 2
        # on a regular mesh generalized vertices are the mesh vertices
        tab = g.generalized_subfacets(0)
        coeffs = np.array([u[f.simplex.vertices[0]] for f in tab])
        assert check_patch_condition(g, DiscreteForm(g, 0, coeffs)) <= 1e-12

    def test_wrong_length(self, m1):
        with pytest.raises(ValueError):
            DiscreteForm(m1, 0, np.ones(3))


class TestTrace:
    @pytest.mark.parametrize("name", FRACTURES)
    def test_one_signed_entry_per_row(self, name):
        m = CORPUS[f"{name}-fractured"]
        for d in range(m.n):
            T = trace_matrix(m, d)
            assert np.all(np.diff(T.indptr) == 1)
            assert set(np.abs(T.data).tolist()) <= {1.0}

    @pytest.mark.parametrize("name", FRACTURES)
    def test_pullback(self, name):
        m = fractured_mesh(perturbed(getattr(corpora, name)(), 7, 0.05))
        bnd = generalized_boundary(m)
        for d in range(m.n):
            assert trace_pullback_residual(m, d, bnd) <= 1e-12

    def test_facet_degree_rows_are_boundary_elements(self, m1):
        bnd = generalized_boundary(m1)
        T = trace_matrix(m1, 1, bnd)
        assert T.shape[0] == bnd.n_elements == len(bnd.generalized_subfacets(1))
        vt, bt = m1.generalized_subfacets(1), bnd.generalized_subfacets(1)
        for t, f in enumerate(bt):
            k, a = bnd.origin[f.component[0]]
            s = vt[T.indices[t]]
            assert set(s.simplex.vertices) == set(np.delete(m1.elt[k], a).tolist())
            assert k in s.component

    def test_slit_vertices_split(self):
        mesh = square_mesh(4, 4)
        # slit from (0.25, 0.5) to (0.75, 0.5) through the interior vertex (0.5, 0.5)
        mid = int(np.flatnonzero(np.all(np.isclose(mesh.points, [0.5, 0.5]), axis=1))[0])
        facets, _ = mesh.triangulation.facet_counts()
        on_line = [f for f in facets if np.allclose(mesh.points[f, 1], 0.5) and mid in f
                   and np.all(np.abs(mesh.points[f, 0] - 0.5) <= 0.25 + 1e-12)]
        assert len(on_line) == 2
        m = fractured_mesh(FractureSpec(mesh, on_line))
        bnd = generalized_boundary(m)
        T = trace_matrix(m, 0, bnd).tocoo()
        bt, vt = bnd.generalized_subfacets(0), m.generalized_subfacets(0)
        for vertex in (mid,):
            rows = [i for i, f in enumerate(bt) if f.simplex.vertices == (vertex,)]
            assert len(rows) == 2
            cols = {int(T.col[T.row == r][0]) for r in rows}
            assert len(cols) == 2
            assert all(vt[c].simplex.vertices == (vertex,) for c in cols)

    def test_degree_range(self, m1):
        with pytest.raises(ValueError):
            trace_matrix(m1, 2)

    def test_pullback_negative_control(self, m1):
        bnd = generalized_boundary(m1)
        from genmesh import whitney

        good = whitney.trace_matrix
        try:
            def flipped(mesh, d, boundary=None):
                T = good(mesh, d, boundary).tolil()
                T[0, T.rows[0][0]] *= -1
                return T.tocsr()

            whitney.trace_matrix = flipped
            assert trace_pullback_residual(m1, 1, bnd) > 0.1
        finally:
            whitney.trace_matrix = good


class TestSurjectivity:
    @pytest.mark.parametrize("name", ["interior_triangle", "t_junction", "closed_sphere",
                                      "point_contact", "bowtie_point_contacts"])
    @pytest.mark.parametrize("d", [1, 2])
    def test_three_dimensional(self, name, d):
        assert check_trace_surjectivity(CORPUS[f"{name}-fractured"], d).surjective

    @pytest.mark.parametrize("name", ["interior_triangle", "t_junction", "closed_sphere"])
    def test_vertices_without_point_contact(self, name):
        spec = getattr(corpora, name)()
        assert has_point_contact(spec.facets) == []
        assert check_trace_surjectivity(CORPUS[f"{name}-fractured"], 0).surjective

    @pytest.mark.parametrize("name", ["point_contact", "bowtie_point_contacts"])
    def test_point_contact_deficiency(self, name):
        spec = getattr(corpora, name)()
        rep = check_trace_surjectivity(CORPUS[f"{name}-fractured"], 0)
        assert not rep.surjective
        assert rep.deficiency == excess_edge_components(spec.facets) > 0
        assert has_point_contact(spec.facets) == [corpora._vid((2, 2, 2))]

    @pytest.mark.parametrize("name", ["decagon_slit", "cross"])
    def test_two_dimensional(self, name):
        for d in range(2):
            assert check_trace_surjectivity(CORPUS[f"{name}-fractured"], d).surjective

    def test_random_two_dimensional(self):
        mesh = square_mesh(8, 8)
        facets, counts = mesh.triangulation.facet_counts()
        rng = np.random.default_rng(0)
        bverts = set(np.unique(facets[counts == 1]).tolist())
        inner = [f for f in facets[counts == 2] if not set(f.tolist()) & bverts]
        for _ in range(5):
            pick = rng.choice(len(inner), 25, replace=False)
            m = fractured_mesh(FractureSpec(mesh, [inner[i] for i in pick]))
            assert check_trace_surjectivity(m, 0).surjective

    def test_random_point_contacts(self):
        mesh = cube_mesh(4)
        facets, counts = mesh.triangulation.facet_counts()
        bverts = set(np.unique(facets[counts == 1]).tolist())
        inner = [f for f in facets[counts == 2] if not set(f.tolist()) & bverts]
        rng = np.random.default_rng(5)
        seen_deficient = False
        for _ in range(8):
            pick = [inner[i] for i in rng.choice(len(inner), 6, replace=False)]
            m = fractured_mesh(FractureSpec(mesh, pick))
            rep = check_trace_surjectivity(m, 0)
            assert rep.deficiency == excess_edge_components(pick)
            seen_deficient |= rep.deficiency > 0
            for d in (1, 2):
                assert check_trace_surjectivity(m, d).surjective
        assert seen_deficient

    def test_rank_certificate(self):
        m = CORPUS["point_contact-fractured"]
        rep = check_trace_surjectivity(m, 0)
        T = rep.matrix.toarray()
        assert np.linalg.matrix_rank(T) == rep.rank == rep.n_rows - rep.deficiency
        assert rep.n_cols == len(m.generalized_subfacets(0))


class TestPointContact:
    def test_two_triangles_at_a_vertex(self):
        assert has_point_contact([[0, 1, 2], [0, 3, 4]]) == [0]

    def test_edge_connected_screen(self):
        assert has_point_contact([[0, 1, 2], [0, 2, 3], [0, 3, 1]]) == []

    def test_two_fans(self):
        fans = [[0, 1, 2], [0, 2, 3], [0, 4, 5], [0, 5, 6]]
        assert has_point_contact(fans) == [0]
        assert edge_component_counts(fans)[0] == 2
        assert excess_edge_components(fans) == 1

    def test_bowtie_count(self):
        assert excess_edge_components([[0, 1, 2], [0, 3, 4], [0, 5, 6]]) == 2


def test_whitney_nullspace_sparse_matches_dense(m3):
    A = assemble(m3, 0, local_stiffness(m3))
    B = assemble(m3, 0, local_mass(m3, 0))
    w = scipy.sparse.linalg.eigsh(A.tocsc(), k=3, M=B.tocsc(), sigma=-0.01, which="LM")[0]
    assert min(abs(w)) < 1e-10
    assert math.isfinite(float(np.sum(w)))
