"""Fractured meshes and the two inflations of a fracture.

A fracture is a set of facets of a volume mesh. Cutting the volume mesh
along it gives the *fractured mesh*. The part of the fractured mesh's
boundary that lies on the fracture is the *extrinsic inflation*. The
*intrinsic inflation* comes from the fracture geometry alone: every fracture
facet appears with both orientations, and an oriented facet continues across
a ridge into the first fracture facet met when rotating around that ridge in
the direction fixed by its orientation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._rows import delete_columns, group_rows, match_rows, position_of, row_parity
from .boundary import generalized_boundary
from .errors import DegenerateSimplexError, FractureBoundaryError, IntegrityError
from .generalized import (
    NONE,
    GeneralizedMesh,
    _others,
    check_relabeling,
    disconnect,
    from_triangulation,
)
from .simplicial import (
    GeometricMesh,
    Triangulation,
    orientation_signs,
    triangulation_boundary,
)

TWO_PI = 2.0 * math.pi
#: angles closer than this are treated as a tie
ANGLE_TIE_TOL = 1e-9


@dataclass
class FractureSpec:
    """Volume mesh and fracture facets (rows of vertex ids of the volume mesh)."""

    volume: GeometricMesh
    facets: np.ndarray

    def __post_init__(self):
        if not isinstance(self.volume, GeometricMesh):
            raise TypeError("volume must be a GeometricMesh")
        n = self.volume.dim
        self.facets = np.asarray(self.facets, dtype=np.int64).reshape(-1, n)
        Triangulation(self.facets, dim=n - 1)

    @property
    def fracture_mesh(self) -> GeometricMesh:
        return GeometricMesh(Triangulation(self.facets, dim=self.volume.dim - 1), self.volume.points, check=False)


def _check_fracture_facets(spec: FractureSpec) -> None:
    tri = spec.volume.triangulation
    facets, _ = tri.facet_counts()
    where = match_rows(facets, np.sort(spec.facets, axis=1))
    if np.any(where < 0):
        i = int(np.flatnonzero(where < 0)[0])
        raise ValueError(f"fracture facet {spec.facets[i].tolist()} is not a facet of the volume mesh")


def fractured_mesh(spec: FractureSpec) -> GeneralizedMesh:
    """Volume mesh with adjacencies across fracture facets removed.

    Element rows and their order are those of the volume mesh.
    """
    _check_fracture_facets(spec)
    return disconnect(from_triangulation(spec.volume), spec.facets)


def touches_boundary(spec: FractureSpec) -> bool:
    """Whether some fracture facet is a boundary facet of the volume mesh."""
    bnd = triangulation_boundary(spec.volume.triangulation)
    return bool(len(bnd) and np.any(match_rows(bnd.cells, np.sort(spec.facets, axis=1)) >= 0))


def extrinsic_inflation(spec: FractureSpec) -> GeneralizedMesh:
    """Boundary elements ``(F, K)`` of the fractured mesh with ``F`` in the fracture.

    Elements keep the ``(K, position)`` order of the boundary and carry it as
    ``origin``.

    Raises
    ------
    FractureBoundaryError
        If a fracture facet is a boundary facet of the volume, or if a walk
        around a fracture ridge ends on the volume boundary.
    """
    if touches_boundary(spec):
        raise FractureBoundaryError("the fracture contains a boundary facet of the volume mesh")
    frac = fractured_mesh(spec)
    bnd = generalized_boundary(frac)
    n = frac.n
    facet_rows = np.sort(bnd.elt, axis=1)
    on_frac = match_rows(np.sort(spec.facets, axis=1), facet_rows) >= 0
    keep = np.flatnonzero(on_frac)
    if keep.size != 2 * len(spec.facets):
        raise IntegrityError(f"expected {2 * len(spec.facets)} inflated elements, found {keep.size}")
    new = np.full(bnd.n_elements, NONE, dtype=np.int64)
    new[keep] = np.arange(keep.size)
    ne = bnd.nei_elt[keep]
    if n >= 2 and np.any(~on_frac[ne]):
        raise FractureBoundaryError("the fracture touches the volume boundary along a ridge")
    ne = np.where(ne >= 0, new[np.maximum(ne, 0)], NONE)
    return GeneralizedMesh(bnd.points, bnd.elt[keep], ne, bnd.nei_fct[keep], origin=bnd.origin[keep])


# ---------------------------------------------------------------------------
# angles


def geometric_angle(t1, t2, coords) -> float:
    """Unsigned dihedral angle in ``[0, pi]`` between two triangles sharing an edge."""
    (_, va, vd), _, _ = _hinge(t1, t2, coords)
    return _unsigned(va, vd)


def _unsigned(va, vd) -> float:
    # atan2 keeps full precision near 0 and pi, unlike arccos
    return float(np.arctan2(np.linalg.norm(np.cross(va, vd)), va @ vd))


def _hinge(t1, t2, coords):
    t1, t2 = tuple(int(v) for v in t1), tuple(int(v) for v in t2)
    common = [v for v in t1 if v in t2]
    if len(common) != 2:
        raise ValueError(f"{t1} and {t2} do not share exactly one edge")
    x = np.asarray(coords, dtype=float)
    b, c = x[common[0]], x[common[1]]
    a = x[next(v for v in t1 if v not in common)]
    d = x[next(v for v in t2 if v not in common)]
    u = c - b
    nu = np.linalg.norm(u)
    if nu == 0:
        raise DegenerateSimplexError("shared edge has zero length")
    u = u / nu
    va = (a - b) - ((a - b) @ u) * u
    vd = (d - b) - ((d - b) @ u) * u
    scale = max(np.linalg.norm(a - b), np.linalg.norm(d - b), nu)
    if np.linalg.norm(va) <= 1e-12 * scale or np.linalg.norm(vd) <= 1e-12 * scale:
        raise DegenerateSimplexError("apex projects onto the shared edge")
    return (u, va, vd), a, d


def oriented_angle(t1, t2, coords) -> float:
    """Angle in ``(0, 2*pi]`` from the oriented facet ``t1`` to the facet ``t2``.

    ``t1`` is an ordering (its orientation), ``t2`` any ordering of a facet
    sharing a ridge with it. A facet seen from itself gives ``2*pi``.

    3-D triangles: the unsigned dihedral angle ``theta`` if ``t2`` lies on
    the side opposite the normal ``(V2 - V1) x (V3 - V1)`` of ``t1``,
    otherwise ``2*pi - theta``. With this side convention the other faces of
    a naturally oriented tetrahedron are reached first from the induced
    (outward) orientation of a face. 2-D edges sharing a vertex ``S``: the turn
    from ``t1`` to ``t2`` around ``S``, counterclockwise when ``S`` is the
    first vertex of ``t1`` and clockwise otherwise.
    """
    t1, t2 = tuple(int(v) for v in t1), tuple(int(v) for v in t2)
    x = np.asarray(coords, dtype=float)
    if set(t1) == set(t2):
        return TWO_PI
    if len(t1) == 3:
        (_, va, vd), a, d = _hinge(t1, t2, x)
        theta = _unsigned(va, vd)
        p1, p2, p3 = x[list(t1)]
        normal = np.cross(p2 - p1, p3 - p1)
        return theta if (d - a) @ normal < 0 else TWO_PI - theta
    if len(t1) == 2:
        common = [v for v in t1 if v in t2]
        if len(common) != 1:
            raise ValueError(f"{t1} and {t2} do not share exactly one vertex")
        s = common[0]
        p = x[next(v for v in t1 if v != s)] - x[s]
        q = x[next(v for v in t2 if v != s)] - x[s]
        if np.linalg.norm(p) == 0 or np.linalg.norm(q) == 0:
            raise DegenerateSimplexError("edge of zero length")
        ccw = math.atan2(p[0] * q[1] - p[1] * q[0], p @ q) % TWO_PI
        ang = ccw if t1[0] == s else (TWO_PI - ccw) % TWO_PI
        return ang if ang > 0 else TWO_PI
    raise ValueError("oriented angles are defined for edges in R^2 and triangles in R^3")


def _ridge_induced(rows: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Orientation (relative to ascending order) of the ridge omitting ``p``, for positively
    oriented ``rows``."""
    w = rows.shape[1]
    r = np.take_along_axis(rows, _others(p, w - 1), axis=1)
    return np.where(p % 2 == 0, 1, -1) * row_parity(r)


def intrinsic_neighbor(fracture: GeometricMesh, oriented_facet, ridge) -> tuple[int, ...]:
    """Oriented fracture facet following ``oriented_facet`` across ``ridge``.

    Straightforward search over all fracture facets containing ``ridge``;
    :func:`intrinsic_inflation` computes the same map by sorting.
    """
    of = tuple(int(v) for v in oriented_facet)
    rs = {int(v) for v in ridge}
    x = fracture.points
    best, best_ang, best_idx = None, math.inf, -1
    for idx, row in enumerate(fracture.cells):
        if not rs <= set(row.tolist()):
            continue
        ang = oriented_angle(of, row, x)
        if ang < best_ang - ANGLE_TIE_TOL:
            best, best_ang, best_idx = row, ang, idx
        elif abs(ang - best_ang) <= ANGLE_TIE_TOL:
            warnings.warn(f"tied oriented angles around {sorted(rs)}; keeping facet {min(best_idx, idx)}")
            if idx < best_idx:
                best, best_idx = row, idx
    if best is None:
        raise ValueError(f"{sorted(rs)} is not a ridge of the fracture")
    row = tuple(int(v) for v in best)
    p_own = next(i for i, v in enumerate(of) if v not in rs)
    p_new = next(i for i, v in enumerate(row) if v not in rs)
    c_own = _ridge_induced(np.array([of]), np.array([p_own]))[0]
    c_new = _ridge_induced(np.array([row]), np.array([p_new]))[0]
    if c_new == -c_own:
        return row
    return (row[1], row[0]) + row[2:]


def _flip(rows: np.ndarray) -> np.ndarray:
    out = rows.copy()
    out[:, [0, 1]] = out[:, [1, 0]]
    return out


def intrinsic_inflation(fracture: GeometricMesh) -> GeneralizedMesh:
    """Intrinsic inflation of an (n-1)-mesh in R^n, n = 2 or 3.

    Element ``2*i`` is fracture facet ``i`` with the orientation of its row,
    element ``2*i + 1`` the opposite orientation (first two entries swapped).
    Around each ridge the fracture facets are sorted by angle, so the whole
    table costs one sort. Ridges with tied angles fall back to
    :func:`intrinsic_neighbor`.
    """
    cells = fracture.cells
    x = fracture.points
    nf, w = cells.shape
    if (w, x.shape[1]) not in ((2, 2), (3, 3)):
        raise ValueError("intrinsic inflation needs edges in R^2 or triangles in R^3")
    rows = np.empty((2 * nf, w), dtype=np.int64)
    rows[0::2] = cells
    rows[1::2] = _flip(cells)

    # angular position of every (facet, position) record around its ridge
    fi = np.repeat(np.arange(nf), w)
    pi = np.tile(np.arange(w), nf)
    ridge = np.sort(delete_columns(cells), axis=2).reshape(nf * w, w - 1)
    apex = cells[fi, pi]
    rid, n_r = group_rows(ridge)
    if w == 2:
        vec = x[apex] - x[ridge[:, 0]]
        theta = np.arctan2(vec[:, 1], vec[:, 0]) % TWO_PI
    else:
        pp, qq = x[ridge[:, 0]], x[ridge[:, 1]]
        u = qq - pp
        u = u / np.linalg.norm(u, axis=1)[:, None]
        va = x[apex] - pp
        va -= (va * u).sum(1)[:, None] * u
        nrm = np.linalg.norm(va, axis=1)
        if np.any(nrm <= 1e-12 * np.linalg.norm(qq - pp, axis=1)):
            raise DegenerateSimplexError("fracture facet degenerates around a ridge")
        va /= nrm[:, None]
        first = np.empty(n_r, dtype=np.int64)
        first[rid[::-1]] = np.arange(rid.size)[::-1]
        e1 = va[first[rid]]
        e2 = np.cross(u, e1)
        theta = np.arctan2((va * e2).sum(1), (va * e1).sum(1)) % TWO_PI
    order = np.lexsort((fi, theta, rid))
    rs = rid[order]
    start = np.searchsorted(rs, np.arange(n_r))
    size = np.bincount(rid, minlength=n_r)
    rank = np.empty(rid.size, dtype=np.int64)
    rank[order] = np.arange(rid.size) - start[rs]
    sorted_fac = fi[order]
    th = theta[order]
    tied = np.zeros(n_r, dtype=bool)
    close = (rs[1:] == rs[:-1]) & (np.diff(th) <= ANGLE_TIE_TOL)
    tied[rs[1:][close]] = True
    multi = np.flatnonzero(size > 1)
    last = start[multi] + size[multi] - 1
    tied[multi[TWO_PI - (th[last] - th[start[multi]]) <= ANGLE_TIE_TOL]] = True

    # one record per (copy, position); the flipped copy swaps positions 0 and 1
    e = np.repeat(np.arange(2 * nf), w)
    q = np.tile(np.arange(w), 2 * nf)
    q_given = np.where((e % 2 == 1) & (q < 2), 1 - q, q)
    rec = (e // 2) * w + q_given
    r_id = rid[rec]
    own = rows[e]
    if w == 2:
        direction = np.where(q == 1, 1, -1)
    else:
        normal = np.cross(x[own[:, 1]] - x[own[:, 0]], x[own[:, 2]] - x[own[:, 0]])
        pp = x[ridge[rec, 0]]
        u = x[ridge[rec, 1]] - pp
        direction = np.where((normal * np.cross(u, x[apex[rec]] - pp)).sum(1) < 0, 1, -1)
    sz = size[r_id]
    nxt = np.where(direction > 0, (rank[rec] + 1) % sz, (rank[rec] - 1) % sz)
    target_fac = sorted_fac[start[r_id] + nxt]
    for i in np.flatnonzero(tied[r_id]):
        res = intrinsic_neighbor(fracture, own[i], ridge[rec[i]])
        target_fac[i] = _facet_index(cells, res)

    # choose the copy of the target facet that induces the opposite ridge orientation
    rdg = ridge[rec]
    c_own = _ridge_induced(own, q)
    t_even = 2 * target_fac
    c_even = _ridge_induced(rows[t_even], position_of(rows[t_even], _other_vertex(rows[t_even], rdg)))
    target = np.where(c_even == -c_own, t_even, t_even + 1)
    p_t = position_of(rows[target], _other_vertex(rows[target], rdg))
    return GeneralizedMesh(x, rows, target.reshape(2 * nf, w), p_t.reshape(2 * nf, w))


def _facet_index(cells: np.ndarray, row) -> int:
    hit = np.flatnonzero(np.all(np.sort(cells, axis=1) == np.sort(np.asarray(row)), axis=1))
    return int(hit[0])


def _other_vertex(rows: np.ndarray, ridge: np.ndarray) -> np.ndarray:
    """Vertex of each row not in the matching ridge row."""
    inside = np.zeros(rows.shape, dtype=bool)
    for j in range(ridge.shape[1]):
        inside |= rows == ridge[:, j:j + 1]
    return rows[np.arange(rows.shape[0]), np.argmin(inside, axis=1)]


# ---------------------------------------------------------------------------
# inflation theorem


@dataclass
class InflationCheck:
    """Outcome of :func:`verify_inflation_theorem`."""

    ok: bool
    phi: np.ndarray
    message: str | None
    extrinsic: GeneralizedMesh = field(repr=False)
    intrinsic: GeneralizedMesh = field(repr=False)


def inflation_map(spec: FractureSpec, extrinsic: GeneralizedMesh) -> np.ndarray:
    """Send ``(F, K)`` to the copy of ``F`` oriented as induced by the natural
    orientation of ``K``."""
    k, a = extrinsic.origin[:, 0], extrinsic.origin[:, 1]
    s_k = orientation_signs(spec.volume.cells[k], spec.volume.points)
    induced = s_k * np.where(a % 2 == 0, 1, -1) * row_parity(extrinsic.elt)
    idx = match_rows(np.sort(spec.facets, axis=1), np.sort(extrinsic.elt, axis=1))
    own = row_parity(spec.facets[idx])
    return 2 * idx + np.where(induced == own, 0, 1)


def verify_inflation_theorem(spec: FractureSpec) -> InflationCheck:
    """Compare extrinsic and intrinsic inflations through :func:`inflation_map`."""
    ext = extrinsic_inflation(spec)
    intr = intrinsic_inflation(spec.fracture_mesh)
    phi = inflation_map(spec, ext)
    msg = check_relabeling(ext, intr, phi)
    return InflationCheck(msg is None, phi, msg, ext, intr)
