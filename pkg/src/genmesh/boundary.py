"""Boundary of a generalized mesh.

Boundary elements are the split facets ``(k, a)`` without a neighbour,
numbered in row-major ``(k, a)`` order. Two boundary elements are adjacent
through a ridge ``S`` when a walk around ``S`` inside the volume mesh leads
from one to the other: leave element ``k`` through the other facet of ``k``
containing ``S``, enter the neighbour, and repeat until no neighbour exists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rows import match_rows, position_of
from .errors import IntegrityError
from .generalized import (
    NONE,
    GeneralizedMesh,
    _others,
    check_relabeling,
    from_triangulation,
)
from .simplicial import Simplex, _as_triangulation, is_branching, triangulation_boundary


@dataclass(frozen=True)
class SplitFacet:
    """Facet ``position`` of element ``element``; ``facet`` is the ordered row."""

    element: int
    position: int
    facet: tuple[int, ...]


@dataclass
class BoundaryChain:
    """Elements visited by a walk around ``pivot`` and the facets crossed."""

    pivot: Simplex
    elements: list[int]
    facets: list[tuple[int, ...]]
    start: tuple[int, int]
    end: tuple[int, int]


def boundary_split_facets(mesh: GeneralizedMesh) -> list[SplitFacet]:
    """Split facets without a neighbour, sorted by ``(element, position)``."""
    if mesh.n < 1:
        return []
    k, a = np.nonzero(mesh.nei_elt == NONE)
    return [SplitFacet(int(i), int(j), mesh.facet(int(i), int(j))) for i, j in zip(k, a)]


def chain_around(mesh: GeneralizedMesh, start: SplitFacet | tuple[int, int], pivot) -> BoundaryChain:
    """Walk around ``pivot`` (a ridge of the start facet) until reaching the boundary."""
    k, a = (start.element, start.position) if isinstance(start, SplitFacet) else map(int, start)
    if mesh.nei_elt[k, a] != NONE:
        raise ValueError(f"facet {a} of element {k} is not a boundary split facet")
    piv = {int(v) for v in (pivot.vertices if isinstance(pivot, Simplex) else pivot)}
    row = [int(v) for v in mesh.elt[k]]
    if len(piv) != mesh.n - 1 or not piv <= set(row) or row[a] in piv:
        raise ValueError(f"{sorted(piv)} is not a ridge of facet {a} of element {k}")
    enter = a
    exit_ = next(i for i, v in enumerate(row) if i != a and v not in piv)
    elements, facets = [k], [mesh.facet(k, a)]
    seen = {(k, enter)}
    while True:
        facets.append(mesh.facet(k, exit_))
        nk = int(mesh.nei_elt[k, exit_])
        if nk == NONE:
            break
        nb = int(mesh.nei_fct[k, exit_])
        v = int(mesh.elt[k, enter])
        pos = np.flatnonzero(mesh.elt[nk] == v)
        if pos.size != 1:
            raise IntegrityError(f"walk around {sorted(piv)} lost vertex {v} in element {nk}")
        k, enter, exit_ = nk, nb, int(pos[0])
        if (k, enter) in seen:
            raise IntegrityError(f"walk around {sorted(piv)} revisits element {k}")
        seen.add((k, enter))
        elements.append(k)
    return BoundaryChain(Simplex(tuple(piv)), elements, facets, (elements[0], a), (k, exit_))


def _walk_all(mesh: GeneralizedMesh, k0: np.ndarray, enter0: np.ndarray, exit0: np.ndarray):
    """Vectorized walks; returns terminal ``(element, exit, enter)`` arrays."""
    k, enter, exit_ = k0.copy(), enter0.copy(), exit0.copy()
    active = np.ones(k.size, dtype=bool)
    for _ in range(mesh.n_elements + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return k, exit_, enter
        ck, cx = k[idx], exit_[idx]
        nk = mesh.nei_elt[ck, cx]
        stop = nk == NONE
        active[idx[stop]] = False
        go = idx[~stop]
        if go.size == 0:
            continue
        ck, cx, ce, nk = k[go], exit_[go], enter[go], nk[~stop]
        nb = mesh.nei_fct[ck, cx]
        pos = position_of(mesh.elt[nk], mesh.elt[ck, ce])
        if np.any(pos < 0):
            raise IntegrityError("boundary walk lost its pivot")
        k[go], enter[go], exit_[go] = nk, nb, pos
    raise IntegrityError("boundary walk did not terminate")


def generalized_boundary(mesh: GeneralizedMesh) -> GeneralizedMesh:
    """Boundary generalized mesh, with ``origin`` set to the parent split facets.

    The adjacency of boundary elements is an involution without fixed
    points; this is checked on every call.
    """
    n = mesh.n
    vtx = mesh.points if mesh.points is not None else mesh.labels
    if n < 1:
        return GeneralizedMesh(vtx, np.zeros((0, 0), dtype=np.int64), origin=np.zeros((0, 2)))
    kb, ab = np.nonzero(mesh.nei_elt == NONE)
    nb = kb.size
    elt_b = np.take_along_axis(mesh.elt[kb], _others(ab, n), axis=1)
    origin = np.column_stack([kb, ab])
    if n == 1:
        return GeneralizedMesh(vtx, elt_b, origin=origin)
    bindex = np.full(mesh.elt.shape, NONE, dtype=np.int64)
    bindex[kb, ab] = np.arange(nb)
    ne = np.empty((nb, n), dtype=np.int64)
    nf = np.empty((nb, n), dtype=np.int64)
    for j in range(n):
        # ridge = boundary row minus entry j; the omitted vertex sits at b in the element row
        b = np.where(j < ab, j, j + 1)
        tk, tx, te = _walk_all(mesh, kb, ab, b)
        ne[:, j] = bindex[tk, tx]
        nf[:, j] = np.where(te < tx, te, te - 1)
    if np.any(ne < 0):
        raise IntegrityError("boundary walk ended on a facet with a neighbour")
    rows = np.arange(nb)[:, None].repeat(n, axis=1)
    if np.any(ne == rows):
        raise IntegrityError("boundary adjacency has a fixed point")
    if np.any(ne[ne, nf] != rows) or np.any(nf[ne, nf] != np.arange(n)[None, :]):
        raise IntegrityError("boundary adjacency is not an involution")
    return GeneralizedMesh(vtx, elt_b, ne, nf, origin=origin)


def induced_boundary_orientation(mesh: GeneralizedMesh, signs) -> np.ndarray:
    """Orientation of each boundary element, relative to its row, induced by ``signs``."""
    signs = np.asarray(signs)
    if mesh.n < 1:
        return np.zeros(0, dtype=np.int64)
    kb, ab = np.nonzero(mesh.nei_elt == NONE)
    return signs[kb] * np.where(ab % 2 == 0, 1, -1)


def boundary_matches_regular(tri) -> bool:
    """For a regular triangulation, the boundary of its generalized mesh is the
    generalized mesh of its (ordinary) boundary, under ``F -> (F, K)``."""
    return boundary_regular_mismatch(tri) is None


def boundary_regular_mismatch(tri) -> str | None:
    """Description of the first disagreement behind :func:`boundary_matches_regular`."""
    tri = _as_triangulation(tri)
    gb = generalized_boundary(from_triangulation(tri))
    bt = triangulation_boundary(tri)
    if is_branching(bt):
        return "boundary triangulation is branching"
    if len(bt) != gb.n_elements:
        return f"{len(bt)} boundary facets but {gb.n_elements} boundary elements"
    if gb.n_elements == 0:
        return None
    reg = from_triangulation(bt)
    phi = match_rows(np.sort(gb.elt, axis=1), np.sort(reg.elt, axis=1))
    if np.any(phi < 0):
        return "a boundary facet has no boundary element"
    return check_relabeling(reg, gb, phi)
