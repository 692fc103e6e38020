"""Generalized simplicial meshes.

A generalized mesh is a list of element simplices (repetition allowed) plus an
adjacency table. Internally every table is 0-based and a missing neighbour is
``-1``; :meth:`GeneralizedMesh.to_tables` and :meth:`GeneralizedMesh.from_tables`
convert to the 1-based convention with ``0`` for a missing neighbour.

Facet ``a`` of element ``k`` is the element row with entry ``a`` removed, and
``nei_fct[k, a]`` is the position of the same facet inside the neighbour row.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ._rows import delete_columns, group_rows, match_rows, position_of, row_parity
from .errors import BranchingError
from .simplicial import GeometricMesh, Simplex, Triangulation, degenerate_mask

NONE = -1


class GeneralizedMesh:
    """Generalized n-mesh with ``elt``, ``nei_elt`` and ``nei_fct`` tables.

    Parameters
    ----------
    vtx : array_like
        Vertex coordinates, shape (Nv, m), or a 1-D sequence of abstract labels.
    elt : array_like of int, shape (N, n+1)
        Element rows (0-based vertex ids).
    nei_elt, nei_fct : array_like of int, shape (N, n+1), optional
        Neighbour element and neighbour facet position, ``-1`` for none.
        Omitted means no adjacency at all.
    origin : array_like of int, shape (N, 2), optional
        For boundary meshes, the ``(element, position)`` split facet each
        element comes from.
    """

    def __init__(self, vtx, elt, nei_elt=None, nei_fct=None, *, origin=None):
        elt = np.asarray(elt, dtype=np.int64)
        if elt.ndim != 2:
            raise ValueError(f"elt must be a 2-D table, got shape {elt.shape}")
        if isinstance(vtx, np.ndarray) and vtx.dtype.kind in "fiu" and vtx.ndim == 2:
            self.points = np.asarray(vtx, dtype=float)
            self.labels = None
            nv = self.points.shape[0]
        elif isinstance(vtx, (int, np.integer)):
            self.points = None
            self.labels = tuple(range(int(vtx)))
            nv = int(vtx)
        else:
            arr = np.asarray(vtx)
            if arr.ndim == 2 and arr.dtype.kind in "fiu":
                self.points = arr.astype(float)
                self.labels = None
                nv = self.points.shape[0]
            else:
                self.points = None
                self.labels = tuple(vtx)
                nv = len(self.labels)
        self.n_vertices = nv
        shape = elt.shape
        nei_elt = np.full(shape, NONE, dtype=np.int64) if nei_elt is None else np.asarray(nei_elt, dtype=np.int64)
        nei_fct = np.full(shape, NONE, dtype=np.int64) if nei_fct is None else np.asarray(nei_fct, dtype=np.int64)
        if nei_elt.shape != shape or nei_fct.shape != shape:
            raise ValueError(f"neighbour tables must have shape {shape}, got {nei_elt.shape} and {nei_fct.shape}")
        self.elt, self.nei_elt, self.nei_fct = elt, nei_elt, nei_fct
        self.origin = None if origin is None else np.asarray(origin, dtype=np.int64).reshape(-1, 2)
        for a in (self.elt, self.nei_elt, self.nei_fct) + ((self.origin,) if self.origin is not None else ()):
            a.setflags(write=False)
        self._subfacets: dict[int, SubfacetTable] = {}

    # basic accessors -----------------------------------------------------
    @property
    def n(self) -> int:
        """Dimension of the elements."""
        return self.elt.shape[1] - 1

    @property
    def n_elements(self) -> int:
        return self.elt.shape[0]

    def __len__(self) -> int:
        return self.n_elements

    @property
    def is_geometric(self) -> bool:
        return self.points is not None

    def realization(self, k: int) -> Simplex:
        return Simplex(tuple(int(v) for v in self.elt[k]))

    def facet(self, k: int, a: int) -> tuple[int, ...]:
        """Facet ``a`` of element ``k`` as an ordered tuple."""
        row = self.elt[k]
        return tuple(int(v) for i, v in enumerate(row) if i != a)

    def facet_position(self, k: int, facet: Iterable[int]) -> int:
        """Position ``a`` such that facet ``a`` of ``k`` spans the given vertex set."""
        fs = {int(v) for v in facet}
        row = [int(v) for v in self.elt[k]]
        missing = [i for i, v in enumerate(row) if v not in fs]
        if len(fs) != self.n or len(missing) != 1 or not fs <= set(row):
            raise ValueError(f"{sorted(fs)} is not a facet of element {k} {row}")
        return missing[0]

    def neighbor(self, k: int, facet: Iterable[int]) -> int | None:
        """Element adjacent to ``k`` through ``facet``, ``None`` when there is none."""
        j = int(self.nei_elt[k, self.facet_position(k, facet)])
        return None if j == NONE else j

    def facet_rows(self) -> np.ndarray:
        """Ordered facet rows, shape (N, n+1, n)."""
        return delete_columns(self.elt)

    def split_facets(self) -> np.ndarray:
        """All ``(k, a)`` pairs, row-major."""
        k, a = np.indices(self.elt.shape)
        return np.column_stack([k.ravel(), a.ravel()])

    def subsimplices(self, d: int) -> np.ndarray:
        """Distinct ``d``-subsimplices of the elements as sorted rows."""
        if not 0 <= d <= self.n:
            raise ValueError(f"subsimplex dimension {d} out of range 0..{self.n}")
        combos = list(itertools.combinations(range(self.n + 1), d + 1))
        allf = np.sort(self.elt, axis=1)[:, combos].reshape(-1, d + 1)
        return np.unique(allf, axis=0) if len(allf) else allf

    def generalized_subfacets(self, d: int) -> SubfacetTable:
        """Generalized ``d``-subfacets (cached)."""
        if d not in self._subfacets:
            self._subfacets[d] = _subfacet_table(self, d)
        return self._subfacets[d]

    # conversions ---------------------------------------------------------
    def to_tables(self, one_based: bool = True) -> dict[str, np.ndarray]:
        shift = 1 if one_based else 0
        return {
            "elt": self.elt + shift,
            "nei_elt": self.nei_elt + shift if one_based else self.nei_elt.copy(),
            "nei_fct": self.nei_fct + shift if one_based else self.nei_fct.copy(),
        }

    @classmethod
    def from_tables(cls, vtx, elt, nei_elt, nei_fct, one_based: bool = True, **kw) -> GeneralizedMesh:
        """Build from tables in the 1-based convention (0 for a missing neighbour)."""
        shift = 1 if one_based else 0
        return cls(vtx, np.asarray(elt) - shift, np.asarray(nei_elt) - shift, np.asarray(nei_fct) - shift, **kw)

    def permuted(self, perm: Sequence[int]) -> GeneralizedMesh:
        """Relabel elements: new element ``i`` is old element ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        ne = self.nei_elt[perm]
        ne = np.where(ne >= 0, inv[np.maximum(ne, 0)], NONE)
        vtx = self.points if self.points is not None else self.labels
        origin = None if self.origin is None else self.origin[perm]
        return GeneralizedMesh(vtx, self.elt[perm], ne, self.nei_fct[perm], origin=origin)

    def __repr__(self) -> str:
        return f"GeneralizedMesh(n={self.n}, n_elements={self.n_elements}, n_vertices={self.n_vertices})"


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    """Result of :func:`validate`; ``message`` describes the first violation."""

    ok: bool
    kind: str | None = None
    message: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate(mesh: GeneralizedMesh) -> ValidationReport:
    """Check the defining conditions of a generalized mesh.

    Index ranges, symmetry of the adjacency, facet agreement between
    adjacent elements, no self adjacency, distinct vertices per element and
    non-degenerate geometry. Element and facet numbers in messages are
    1-based.
    """
    elt, ne, nf = mesh.elt, mesh.nei_elt, mesh.nei_fct
    n, N = mesh.n, mesh.n_elements

    def fail(kind, msg):
        return ValidationReport(False, kind, msg)

    if N == 0:
        return ValidationReport(True)
    if elt.min() < 0 or elt.max() >= mesh.n_vertices:
        k = int(np.flatnonzero(np.any((elt < 0) | (elt >= mesh.n_vertices), axis=1))[0])
        return fail("range", f"element {k + 1} refers to a vertex outside 1..{mesh.n_vertices}")
    srt = np.sort(elt, axis=1)
    if n >= 1 and np.any(srt[:, 1:] == srt[:, :-1]):
        k = int(np.flatnonzero(np.any(srt[:, 1:] == srt[:, :-1], axis=1))[0])
        return fail("repeated-vertex", f"element {k + 1} repeats a vertex")
    bad = (ne < NONE) | (ne >= N) | (nf < NONE) | (nf > n) | ((ne == NONE) != (nf == NONE))
    if bad.any():
        k, a = np.argwhere(bad)[0]
        return fail("range", f"neighbour entry of element {k + 1}, facet {a + 1} is out of range")
    kk, aa = np.nonzero(ne >= 0)
    jj, bb = ne[kk, aa], nf[kk, aa]
    selfadj = jj == kk
    if selfadj.any():
        i = int(np.flatnonzero(selfadj)[0])
        return fail("self-adjacent", f"element {kk[i] + 1} is its own neighbour through facet {aa[i] + 1}")
    sym = (ne[jj, bb] == kk) & (nf[jj, bb] == aa)
    if not sym.all():
        i = int(np.flatnonzero(~sym)[0])
        return fail("symmetry", f"element {kk[i] + 1}, facet {aa[i] + 1} points to element {jj[i] + 1}, "
                                f"facet {bb[i] + 1}, which does not point back")
    if n >= 1 and len(kk):
        fk = np.sort(np.take_along_axis(elt[kk], _others(aa, n), axis=1), axis=1)
        fj = np.sort(np.take_along_axis(elt[jj], _others(bb, n), axis=1), axis=1)
        match = np.all(fk == fj, axis=1)
        if not match.all():
            i = int(np.flatnonzero(~match)[0])
            return fail("facet-match", f"facet {aa[i] + 1} of element {kk[i] + 1} differs from facet "
                                       f"{bb[i] + 1} of element {jj[i] + 1}")
    if mesh.points is not None and n >= 1:
        if mesh.points.shape[1] < n:
            return fail("geometry", f"{n}-simplices cannot be embedded in R^{mesh.points.shape[1]}")
        dm = degenerate_mask(mesh.points[elt])
        if dm.any():
            return fail("degenerate", f"element {int(np.flatnonzero(dm)[0]) + 1} is degenerate")
    return ValidationReport(True)


def _others(a: np.ndarray, n: int) -> np.ndarray:
    """Column indices 0..n with ``a[i]`` removed, shape (len(a), n)."""
    cols = np.arange(n + 1)[None, :].repeat(len(a), axis=0)
    keep = cols != np.asarray(a)[:, None]
    return cols[keep].reshape(len(a), n)


# ---------------------------------------------------------------------------
# construction


def from_triangulation(tri, points=None) -> GeneralizedMesh:
    """Generalized mesh of a non-branching triangulation.

    Two elements are adjacent exactly when they share a facet. ``tri`` may be
    a :class:`Triangulation`, a :class:`GeometricMesh` or a table of rows.

    Raises
    ------
    BranchingError
        If a facet belongs to three elements or more.
    """
    if isinstance(tri, GeometricMesh):
        points = tri.points if points is None else points
        cells = tri.cells
    elif isinstance(tri, Triangulation):
        cells = tri.cells
    else:
        cells = Triangulation(tri).cells
    N, w = cells.shape
    n = w - 1
    ne = np.full((N, w), NONE, dtype=np.int64)
    nf = np.full((N, w), NONE, dtype=np.int64)
    if n >= 1 and N:
        facets = np.sort(delete_columns(cells), axis=2).reshape(-1, n)
        labels, ng = group_rows(facets)
        counts = np.bincount(labels, minlength=ng)
        if np.any(counts > 2):
            g = int(np.flatnonzero(counts > 2)[0])
            f = facets[np.flatnonzero(labels == g)[0]]
            raise BranchingError(f"facet {f.tolist()} belongs to {counts[g]} elements")
        order = np.argsort(labels, kind="stable")
        lab_sorted = labels[order]
        pair = np.flatnonzero(lab_sorted[1:] == lab_sorted[:-1])
        p, q = order[pair], order[pair + 1]
        pk, pa = np.divmod(p, w)
        qk, qa = np.divmod(q, w)
        ne[pk, pa], nf[pk, pa] = qk, qa
        ne[qk, qa], nf[qk, qa] = pk, pa
    vtx = points if points is not None else (int(cells.max()) + 1 if cells.size else 0)
    return GeneralizedMesh(vtx, cells, ne, nf)


def disconnect(mesh: GeneralizedMesh, facets) -> GeneralizedMesh:
    """Remove the adjacencies through the listed facets (vertex rows, any order)."""
    facets = np.sort(np.asarray(facets, dtype=np.int64).reshape(-1, mesh.n), axis=1)
    rows = np.sort(mesh.facet_rows(), axis=2).reshape(-1, mesh.n)
    hit = match_rows(facets, rows) >= 0 if len(facets) else np.zeros(len(rows), dtype=bool)
    hit = hit.reshape(mesh.elt.shape) & (mesh.nei_elt >= 0)
    ne = np.where(hit, NONE, mesh.nei_elt)
    nf = np.where(hit, NONE, mesh.nei_fct)
    vtx = mesh.points if mesh.points is not None else mesh.labels
    return GeneralizedMesh(vtx, mesh.elt, ne, nf)


# ---------------------------------------------------------------------------
# generalized subfacets


@dataclass(frozen=True)
class GeneralizedSubfacet:
    """A subsimplex together with one connected component of its star graph."""

    simplex: Simplex
    component: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.simplex.dim

    def __repr__(self) -> str:
        return f"GeneralizedSubfacet({self.simplex.vertices!r}, {set(self.component)!r})"


class SubfacetTable:
    """Generalized ``d``-subfacets of a mesh in canonical order.

    Subfacets are sorted by simplex, then by smallest element of the
    component. ``local_to_global[k, c]`` is the subfacet of element ``k``
    attached to its local subsimplex ``combos[c]`` (positions in the row).
    """

    def __init__(self, d, combos, simplices, local_to_global, indptr, members):
        self.d = d
        self.combos = combos
        self.simplices = simplices
        self.local_to_global = local_to_global
        self._indptr = indptr
        self._members = members
        for a in (combos, simplices, local_to_global, indptr, members):
            a.setflags(write=False)

    def __len__(self) -> int:
        return self.simplices.shape[0]

    def component(self, i: int) -> np.ndarray:
        return self._members[self._indptr[i]:self._indptr[i + 1]]

    def __getitem__(self, i: int) -> GeneralizedSubfacet:
        if not -len(self) <= i < len(self):
            raise IndexError(i)
        i %= len(self)
        return GeneralizedSubfacet(Simplex(tuple(int(v) for v in self.simplices[i])),
                                   tuple(int(k) for k in self.component(i)))

    def __iter__(self) -> Iterator[GeneralizedSubfacet]:
        return (self[i] for i in range(len(self)))

    def component_sizes(self) -> np.ndarray:
        return np.diff(self._indptr)

    def index(self, simplex: Iterable[int], element: int) -> int:
        """Subfacet attached to ``simplex`` inside ``element``."""
        vs = sorted(int(v) for v in simplex)
        mask = np.all(self.simplices == np.asarray(vs), axis=1)
        for i in np.flatnonzero(mask):
            if element in set(self.component(i).tolist()):
                return int(i)
        raise KeyError(f"{vs} is not attached to element {element}")

    def at(self, simplex: Iterable[int]) -> list[GeneralizedSubfacet]:
        vs = np.asarray(sorted(int(v) for v in simplex))
        return [self[int(i)] for i in np.flatnonzero(np.all(self.simplices == vs, axis=1))]


def local_combos(n: int, d: int) -> np.ndarray:
    """Local ``d``-subsimplices of an n-simplex as position tuples, lexicographic."""
    return np.array(list(itertools.combinations(range(n + 1), d + 1)), dtype=np.int64).reshape(-1, d + 1)


def _subfacet_table(mesh: GeneralizedMesh, d: int) -> SubfacetTable:
    n, N = mesh.n, mesh.n_elements
    if not 0 <= d <= n:
        raise ValueError(f"subfacet dimension {d} out of range 0..{n}")
    elt = mesh.elt
    combos = local_combos(n, d)
    C = len(combos)
    lut = np.full(1 << (n + 1), -1, dtype=np.int64)
    lut[(1 << combos).sum(axis=1)] = np.arange(C)

    # one node per (element, local subsimplex); edges through shared facets
    kk, aa = np.nonzero(mesh.nei_elt >= 0)
    jj, bb = mesh.nei_elt[kk, aa], mesh.nei_fct[kk, aa]
    keep = kk < jj
    kk, aa, jj, bb = kk[keep], aa[keep], jj[keep], bb[keep]
    posmap = (elt[kk][:, :, None] == elt[jj][:, None, :]).argmax(axis=2)
    src, dst = [], []
    for c in range(C):
        inside = ~np.any(combos[c][None, :] == aa[:, None], axis=1)
        if not inside.any():
            continue
        bits = (1 << posmap[inside][:, combos[c]]).sum(axis=1)
        src.append(kk[inside] * C + c)
        dst.append(jj[inside] * C + lut[bits])
    nn = N * C
    if src:
        src_a, dst_a = np.concatenate(src), np.concatenate(dst)
    else:
        src_a = dst_a = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(src_a.size, dtype=np.int8), (src_a, dst_a)), shape=(nn, nn))
    ncomp, labels = connected_components(graph, directed=False)

    node_simplex = np.sort(elt[:, combos], axis=2).reshape(nn, d + 1)
    node_elem = np.repeat(np.arange(N), C)
    first = np.full(ncomp, nn, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(nn))
    comp_simplex = node_simplex[first] if nn else node_simplex
    comp_minelem = node_elem[first] if nn else node_elem
    order = np.lexsort(tuple([comp_minelem] + [comp_simplex[:, i] for i in range(d, -1, -1)]))
    rank = np.empty(ncomp, dtype=np.int64)
    rank[order] = np.arange(ncomp)
    gid = rank[labels]
    J = gid.reshape(N, C)
    node_order = np.lexsort((node_elem, gid))
    members = node_elem[node_order]
    indptr = np.concatenate([[0], np.cumsum(np.bincount(gid, minlength=ncomp))])
    return SubfacetTable(d, combos, comp_simplex[order], J, indptr, members)


def generalized_subfacets(mesh: GeneralizedMesh, d: int) -> SubfacetTable:
    """Generalized ``d``-subfacets of ``mesh`` in canonical order."""
    return mesh.generalized_subfacets(d)


def contains(s: GeneralizedSubfacet, s2: GeneralizedSubfacet) -> bool:
    """``s`` is a face of ``s2``: smaller simplex with a larger component."""
    a, b = set(s.simplex.vertices), set(s2.simplex.vertices)
    return a < b and set(s.component) >= set(s2.component)


def incident(s: GeneralizedSubfacet, s2: GeneralizedSubfacet) -> bool:
    """Containment with a dimension gap of one."""
    return s2.dim == s.dim + 1 and contains(s, s2)


def adjacent(mesh: GeneralizedMesh, s: GeneralizedSubfacet, s2: GeneralizedSubfacet) -> bool:
    """Two distinct d-subfacets sharing an incident (d-1)-subfacet."""
    if s.dim != s2.dim or s == s2 or s.dim < 1:
        return False
    return any(incident(t, s) and incident(t, s2) for t in mesh.generalized_subfacets(s.dim - 1))


def shared_generalized_vertices(mesh: GeneralizedMesh, k: int, k2: int) -> list[GeneralizedSubfacet]:
    """Generalized vertices whose component holds both elements."""
    tab = mesh.generalized_subfacets(0)
    common = set(tab.local_to_global[k].tolist()) & set(tab.local_to_global[k2].tolist())
    return [tab[i] for i in sorted(common)]


# ---------------------------------------------------------------------------
# relabelings


def _realization_rows(mesh: GeneralizedMesh) -> np.ndarray:
    return np.sort(mesh.elt, axis=1)


def check_relabeling(m1: GeneralizedMesh, m2: GeneralizedMesh, phi) -> str | None:
    """Verify that ``phi`` (element map of ``m1`` into ``m2``) is a relabeling.

    Returns ``None`` on success, otherwise a description of the first
    mismatch in realization or adjacency.
    """
    phi = np.asarray(phi, dtype=np.int64)
    if m1.n != m2.n or m1.n_elements != m2.n_elements:
        return f"sizes differ: ({m1.n}, {m1.n_elements}) vs ({m2.n}, {m2.n_elements})"
    N = m1.n_elements
    if phi.shape != (N,) or (N and (phi.min() < 0 or phi.max() >= N)):
        return "map has the wrong shape or range"
    if np.unique(phi).size != N:
        return "map is not a bijection"
    r1, r2 = _realization_rows(m1), _realization_rows(m2)[phi]
    bad = np.any(r1 != r2, axis=1)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        return f"element {k} realizes {r1[k].tolist()} but its image {phi[k]} realizes {r2[k].tolist()}"
    if m1.n < 1:
        return None
    k, a = np.indices(m1.elt.shape)
    k, a = k.ravel(), a.ravel()
    img = phi[k]
    b = position_of(m2.elt[img], m1.elt[k, a])
    n1 = m1.nei_elt[k, a]
    n2 = m2.nei_elt[img, b]
    expect = np.where(n1 >= 0, phi[np.maximum(n1, 0)], NONE)
    bad = expect != n2
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        f = m1.facet(int(k[i]), int(a[i]))
        return (f"through facet {list(f)}: element {k[i]} has neighbour {n1[i] if n1[i] >= 0 else None}, "
                f"image {img[i]} has neighbour {n2[i] if n2[i] >= 0 else None}")
    return None


def relabeling_equivalent(m1: GeneralizedMesh, m2: GeneralizedMesh) -> np.ndarray | None:
    """Find an element relabeling of ``m1`` onto ``m2``, or ``None``.

    Choosing the image of one element of a connected component fixes the
    image of the whole component, so the search tries each candidate root
    of matching realization per component.
    """
    if m1.n != m2.n or m1.n_elements != m2.n_elements:
        return None
    N = m1.n_elements
    if N == 0:
        return np.zeros(0, dtype=np.int64)
    r1, r2 = _realization_rows(m1), _realization_rows(m2)
    labels, ng = group_rows(np.vstack([r1, r2]))
    l1, l2 = labels[:N], labels[N:]
    if not np.array_equal(np.bincount(l1, minlength=ng), np.bincount(l2, minlength=ng)):
        return None
    by_group: dict[int, list[int]] = {}
    for j, g in enumerate(l2.tolist()):
        by_group.setdefault(g, []).append(j)

    phi = np.full(N, NONE, dtype=np.int64)
    used = np.zeros(N, dtype=bool)
    n = m1.n
    elt1, elt2 = m1.elt, m2.elt
    ne1, ne2 = m1.nei_elt, m2.nei_elt

    def propagate(root: int, cand: int) -> dict[int, int] | None:
        trial = {root: cand}
        taken = {cand}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            v = trial[u]
            for a in range(n + 1):
                b = int(np.flatnonzero(elt2[v] == elt1[u, a])[0])
                nu, nv = int(ne1[u, a]), int(ne2[v, b])
                if (nu < 0) != (nv < 0):
                    return None
                if nu < 0:
                    continue
                if nu in trial:
                    if trial[nu] != nv:
                        return None
                    continue
                if phi[nu] >= 0 or used[nv] or nv in taken or l1[nu] != l2[nv]:
                    return None
                trial[nu] = nv
                taken.add(nv)
                queue.append(nu)
        return trial

    for root in range(N):
        if phi[root] >= 0:
            continue
        for cand in by_group[int(l1[root])]:
            if used[cand]:
                continue
            trial = propagate(root, cand)
            if trial is not None:
                for u, v in trial.items():
                    phi[u] = v
                    used[v] = True
                break
        else:
            return None
    return phi


# ---------------------------------------------------------------------------
# orientations


def induced_signs(mesh: GeneralizedMesh, signs: np.ndarray, k: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Orientation (relative to ascending order) induced on facet ``a`` of ``k``.

    ``signs[k]`` is the orientation of element ``k`` relative to its row.
    """
    n = mesh.n
    s = np.asarray(signs)[k]
    rows = np.take_along_axis(mesh.elt[k], _others(a, n), axis=1)
    return s * np.where(a % 2 == 0, 1, -1) * row_parity(rows)


def check_orientation_compatibility(mesh: GeneralizedMesh, signs) -> bool:
    """Adjacent elements induce opposite orientations on their shared facet."""
    signs = np.asarray(signs)
    if mesh.n < 1:
        return True
    k, a = np.nonzero(mesh.nei_elt >= 0)
    j, b = mesh.nei_elt[k, a], mesh.nei_fct[k, a]
    return bool(np.all(induced_signs(mesh, signs, k, a) == -induced_signs(mesh, signs, j, b)))


def find_compatible_orientation(mesh: GeneralizedMesh) -> np.ndarray | None:
    """Element signs making the mesh compatibly oriented, ``None`` if impossible.

    The first element of each connected component gets ``+1``.
    """
    N = mesh.n_elements
    signs = np.zeros(N, dtype=np.int64)
    if mesh.n < 1:
        return np.ones(N, dtype=np.int64)
    ones = np.ones(N, dtype=np.int64)
    k, a = np.nonzero(mesh.nei_elt >= 0)
    j, b = mesh.nei_elt[k, a], mesh.nei_fct[k, a]
    # relation: signs[j] = rel * signs[k]
    rel = -(induced_signs(mesh, ones, k, a) * induced_signs(mesh, ones, j, b))
    adj: list[list[tuple[int, int]]] = [[] for _ in range(N)]
    for u, v, r in zip(k.tolist(), j.tolist(), rel.tolist()):
        adj[u].append((v, r))
    for root in range(N):
        if signs[root]:
            continue
        signs[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, r in adj[u]:
                want = r * signs[u]
                if signs[v] == 0:
                    signs[v] = want
                    queue.append(v)
                elif signs[v] != want:
                    return None
    return signs


def component_count(mesh: GeneralizedMesh) -> int:
    """Number of connected components of the element adjacency graph."""
    N = mesh.n_elements
    k, a = np.nonzero(mesh.nei_elt >= 0)
    g = coo_matrix((np.ones(k.size), (k, mesh.nei_elt[k, a])), shape=(N, N))
    return int(connected_components(g, directed=False)[0])


def component_labels(mesh: GeneralizedMesh) -> np.ndarray:
    """Connected component of each element in the adjacency graph."""
    N = mesh.n_elements
    k, a = np.nonzero(mesh.nei_elt >= 0)
    g = coo_matrix((np.ones(k.size), (k, mesh.nei_elt[k, a])), shape=(N, N))
    return connected_components(g, directed=False)[1]


def submesh(mesh: GeneralizedMesh, keep) -> GeneralizedMesh:
    """Elements ``keep`` (closed under adjacency) as a gen-mesh on the same vertices."""
    keep = np.asarray(keep, dtype=np.int64)
    new = np.full(mesh.n_elements, NONE, dtype=np.int64)
    new[keep] = np.arange(keep.size)
    ne = mesh.nei_elt[keep]
    linked = ne[ne >= 0]
    if np.any(new[linked] < 0):
        raise ValueError("selection is not closed under adjacency")
    vtx = mesh.points if mesh.points is not None else mesh.labels
    origin = None if mesh.origin is None else mesh.origin[keep]
    return GeneralizedMesh(vtx, mesh.elt[keep], np.where(ne >= 0, new[ne], NONE), mesh.nei_fct[keep], origin=origin)
