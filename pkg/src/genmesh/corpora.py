"""Small named meshes used by the tests, the acceptance suite and the CLI docs."""

from __future__ import annotations

import math

import numpy as np

from .fracture import FractureSpec
from .meshgen import cube_mesh
from .simplicial import GeometricMesh, Triangulation

#: vertex labels of the decagon, vertex ``i`` is ``DECAGON_LABELS[i]``
DECAGON_LABELS = "ABCDEFGHIJ"

DECAGON_ELT = np.array([
    [1, 2, 3], [2, 3, 4], [2, 4, 5], [2, 5, 6], [2, 6, 7],
    [2, 7, 1], [1, 7, 8], [1, 8, 9], [1, 9, 10], [1, 10, 3],
]) - 1


def decagon() -> GeometricMesh:
    """Ten triangles around the interior segment AB.

    B is shared by CD, DE, EF, FG and A by GH, HI, IJ, JC; C and G sit on
    either side of AB.
    """
    ang = np.deg2rad([90, 45, 0, -45, -90, -135, 180, 135])
    outer = 1.5 * np.column_stack([np.cos(ang), np.sin(ang)])
    pts = np.vstack([[-0.5, 0.0], [0.5, 0.0], outer])
    return GeometricMesh(Triangulation(DECAGON_ELT), pts)


def decagon_slit() -> FractureSpec:
    """Decagon cut along AB."""
    return FractureSpec(decagon(), [[0, 1]])


def _grid_vertex(i, j, n=4):
    return (j + n // 2) * (n + 1) + (i + n // 2)


def cross() -> FractureSpec:
    """Square [-2, 2]^2 cut by a cross of four unit arms meeting at O = (0, 0).

    Elements are numbered so that the star of O is elements 11, 12 (between
    arms east and north), 14 (south-east), 19 (north-west) and 21, 22
    (south-west), counting from 1; A = (1, 0) is the east arm tip.
    """
    xs = np.arange(-2, 3, dtype=float)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    v = _grid_vertex
    cells = []
    for j in range(-2, 2):
        for i in range(-2, 2):
            a, b, c, d = v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)
            # the four cells at O are cut along their rising diagonal
            if (i >= 0) == (j >= 0) or (i, j) in ((0, -1), (-1, 0)):
                cells.append((a, b, c))
                cells.append((a, c, d))
            else:
                cells.append((a, b, d))
                cells.append((b, c, d))
    O = v(0, 0)
    star = {
        11: (O, v(1, 0), v(1, 1)),
        12: (O, v(1, 1), v(0, 1)),
        14: (O, v(0, -1), v(1, 0)),
        19: (O, v(0, 1), v(-1, 0)),
        21: (O, v(-1, 0), v(-1, -1)),
        22: (O, v(-1, -1), v(0, -1)),
    }
    star_sets = {frozenset(t): k for k, t in star.items()}
    rest = [c for c in cells if frozenset(c) not in star_sets]
    assert len(rest) == 26
    ordered = []
    it = iter(rest)
    for k in range(1, 33):
        ordered.append(star[k] if k in star else next(it))
    pts_mesh = GeometricMesh(Triangulation(ordered), pts)
    arms = [(O, v(1, 0)), (O, v(0, 1)), (O, v(-1, 0)), (O, v(0, -1))]
    return FractureSpec(pts_mesh, arms)


CROSS_O = _grid_vertex(0, 0)
CROSS_A = _grid_vertex(1, 0)


# ---------------------------------------------------------------------------
# three dimensional corpora, all inside a Freudenthal cube of 4**3 cells


def _cube():
    return cube_mesh(4, lower=(0.0, 0.0, 0.0), upper=(4.0, 4.0, 4.0))


def _vid(p, n=4):
    i, j, k = p
    return (i * (n + 1) + j) * (n + 1) + k


def _facets_with(mesh: GeometricMesh, vertices) -> list[tuple[int, ...]]:
    facets, _ = mesh.triangulation.facet_counts()
    vs = set(vertices)
    return [tuple(int(x) for x in f) for f in facets if vs <= set(f.tolist())]


def interior_triangle() -> FractureSpec:
    """One triangle with all three vertices interior to the cube mesh."""
    m = _cube()
    tri = _facets_with(m, [_vid((2, 2, 2)), _vid((3, 3, 3))])[0]
    return FractureSpec(m, [tri])


def t_junction() -> FractureSpec:
    """Three triangles hinged on one interior edge (a non-manifold screen)."""
    m = _cube()
    fans = _facets_with(m, [_vid((2, 2, 2)), _vid((3, 3, 3))])
    return FractureSpec(m, fans[:3])


def closed_sphere() -> FractureSpec:
    """Link of the central vertex: a closed triangulated sphere of mesh facets."""
    m = _cube()
    c = _vid((2, 2, 2))
    link = [tuple(int(v) for v in row if v != c) for row in m.cells if c in row]
    return FractureSpec(m, link)


def point_contact() -> FractureSpec:
    """Two triangles meeting at a single interior vertex."""
    m = _cube()
    c = _vid((2, 2, 2))
    around = _facets_with(m, [c])
    first = around[0]
    second = next(t for t in around if set(t) & set(first) == {c})
    return FractureSpec(m, [first, second])


def bowtie_point_contacts() -> FractureSpec:
    """Three triangles of the central star pairwise meeting only at the centre."""
    m = _cube()
    c = _vid((2, 2, 2))
    chosen = []
    for t in _facets_with(m, [c]):
        if all(set(t) & set(s) == {c} for s in chosen):
            chosen.append(t)
        if len(chosen) == 3:
            break
    return FractureSpec(m, chosen)


def two_tets() -> GeometricMesh:
    """Tetrahedra ABCD and BCDE glued along BCD."""
    pts = np.array([[0, 0, 1.0], [1, 0, 0], [0, 1, 0], [-1, -1, 0], [0, 0, -1.0]])
    return GeometricMesh(Triangulation([[0, 1, 2, 3], [1, 2, 3, 4]]), pts)


def mobius() -> GeometricMesh:
    """Five-triangle Moebius strip, embedded in R^3."""
    t = np.linspace(0, 2 * math.pi, 5, endpoint=False)
    pts = np.column_stack([np.cos(t), np.sin(t), 0.3 * np.cos(2.5 * t)])
    cells = [[0, 1, 2], [1, 2, 3], [2, 3, 4], [3, 4, 0], [4, 0, 1]]
    return GeometricMesh(Triangulation(cells), pts, check=False)
