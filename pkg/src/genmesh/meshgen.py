"""Structured test meshes: squares, cubes, annuli and the slit disk."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .fracture import FractureSpec
from .simplicial import GeometricMesh, Triangulation


def square_mesh(nx: int, ny: int | None = None, lower=(0.0, 0.0), upper=(1.0, 1.0)) -> GeometricMesh:
    """``nx`` by ``ny`` grid of squares, each cut along its rising diagonal."""
    ny = nx if ny is None else ny
    xs = np.linspace(lower[0], upper[0], nx + 1)
    ys = np.linspace(lower[1], upper[1], ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    v00 = (j * (nx + 1) + i).ravel()
    v10, v01, v11 = v00 + 1, v00 + nx + 1, v00 + nx + 2
    cells = np.empty((2 * v00.size, 3), dtype=np.int64)
    cells[0::2] = np.column_stack([v00, v10, v11])
    cells[1::2] = np.column_stack([v00, v11, v01])
    return GeometricMesh(Triangulation(cells), pts, check=False)


def cube_mesh(n: int, lower=(0.0, 0.0, 0.0), upper=(1.0, 1.0, 1.0)) -> GeometricMesh:
    """Freudenthal triangulation of an ``n**3`` grid: six tetrahedra per cube."""
    g = np.linspace(0.0, 1.0, n + 1)
    X, Y, Z = np.meshgrid(g, g, g, indexing="ij")
    lo, hi = np.asarray(lower, float), np.asarray(upper, float)
    pts = lo + np.column_stack([X.ravel(), Y.ravel(), Z.ravel()]) * (hi - lo)

    def vid(i, j, k):
        return (i * (n + 1) + j) * (n + 1) + k

    ii, jj, kk = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    base = np.stack([ii.ravel(), jj.ravel(), kk.ravel()], axis=1)
    cells = []
    for perm in itertools.permutations(range(3)):
        cur = base.copy()
        verts = [vid(*cur.T)]
        for ax in perm:
            cur = cur.copy()
            cur[:, ax] += 1
            verts.append(vid(*cur.T))
        cells.append(np.stack(verts, axis=1))
    cells = np.stack(cells, axis=1).reshape(-1, 4)
    return GeometricMesh(Triangulation(cells), pts, check=False)


def annulus_mesh(n_radial: int, n_angular: int, r_in: float = 0.5, r_out: float = 1.0) -> GeometricMesh:
    """Annulus split into ``n_radial`` rings of ``n_angular`` quads, two triangles each."""
    r = np.linspace(r_in, r_out, n_radial + 1)
    t = np.linspace(0.0, 2 * math.pi, n_angular, endpoint=False)
    R, T = np.meshgrid(r, t, indexing="ij")
    pts = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    i, j = np.meshgrid(np.arange(n_radial), np.arange(n_angular), indexing="ij")
    a = (i * n_angular + j).ravel()
    b = (i * n_angular + (j + 1) % n_angular).ravel()
    c, d = a + n_angular, b + n_angular
    cells = np.vstack([np.column_stack([a, b, d]), np.column_stack([a, d, c])])
    return GeometricMesh(Triangulation(cells), pts, check=False)


def _ring_counts(n_rings: int) -> list[int]:
    # about one radial step between neighbours along a ring; even so that pi is a node
    return [1] + [2 * math.ceil(math.pi * i) for i in range(1, n_rings + 1)]


def _half_disk(n_rings: int):
    """Upper half (closed) of the ring mesh: points keyed by (ring, index)."""
    counts = _ring_counts(n_rings)
    dr = 1.0 / n_rings
    pts, key = [(0.0, 0.0)], {(0, 0): 0}
    for i in range(1, n_rings + 1):
        m = counts[i]
        for j in range(m // 2 + 1):
            th = 2 * math.pi * j / m
            key[(i, j)] = len(pts)
            pts.append((i * dr * math.cos(th), i * dr * math.sin(th)))
    tris = []
    for i in range(n_rings):
        if i == 0:
            p = counts[1] // 2
            tris += [(0, key[(1, j)], key[(1, j + 1)]) for j in range(p)]
            continue
        a_n, b_n = counts[i] // 2, counts[i + 1] // 2
        s = t = 0
        while s < a_n or t < b_n:
            adv_b = s == a_n or (t < b_n and (t + 1) / counts[i + 1] <= (s + 1) / counts[i])
            if adv_b:
                tris.append((key[(i, s)], key[(i + 1, t)], key[(i + 1, t + 1)]))
                t += 1
            else:
                tris.append((key[(i, s)], key[(i + 1, t)], key[(i, s + 1)]))
                s += 1
    return np.array(pts), tris, key, counts


def disk_ring_mesh(n_rings: int) -> tuple[GeometricMesh, np.ndarray]:
    """Unit disk meshed by concentric rings, mirror symmetric about the x-axis.

    Returns the mesh and the vertex ids on the segment ``[0, 1] x {0}`` in
    order of increasing x.
    """
    half, tris, key, _ = _half_disk(n_rings)
    on_axis = np.isclose(half[:, 1], 0.0)
    mirror = np.arange(len(half))
    low = np.flatnonzero(~on_axis)
    mirror[low] = len(half) + np.arange(low.size)
    pts = np.vstack([half, half[low] * np.array([1.0, -1.0])])
    cells = [list(t) for t in tris] + [[mirror[t[0]], mirror[t[2]], mirror[t[1]]] for t in tris]
    cells = np.array(cells, dtype=np.int64)
    # positive orientation everywhere
    e1 = pts[cells[:, 1]] - pts[cells[:, 0]]
    e2 = pts[cells[:, 2]] - pts[cells[:, 0]]
    neg = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] < 0
    cells[neg] = cells[neg][:, [0, 2, 1]]
    slit = [key[(i, 0)] for i in range(n_rings + 1)]
    return GeometricMesh(Triangulation(cells), pts), np.array(slit, dtype=np.int64)


def disk_cut_radius_mesh(h_target: float, max_rings: int = 400) -> FractureSpec:
    """Slit disk: unit disk cut along ``[0, 1) x {0}``.

    The number of rings is chosen so the largest element diameter is as close
    as possible to ``h_target``.
    """
    if not 0 < h_target < 1:
        raise ValueError(f"h_target must lie in (0, 1), got {h_target}")
    best = None
    guess = max(1, round(1.0 / h_target))
    for nr in range(max(1, guess - 3), min(max_rings, guess + 4) + 1):
        mesh, slit = disk_ring_mesh(nr)
        h = float(mesh.diameters().max())
        if best is None or abs(h - h_target) < abs(best[0] - h_target):
            best = (h, mesh, slit)
    h, mesh, slit = best
    facets = np.column_stack([slit[:-1], slit[1:]])
    return FractureSpec(mesh, facets)
