"""Abstract simplices, orientations, triangulations and geometric meshes.

A simplex is a finite set of vertex ids, stored as a sorted tuple. An
oriented simplex adds a sign: the orientation of an ordering is the parity of
the permutation bringing it to ascending order. Triangulations keep element
rows in the order given by the caller, since downstream tables (neighbor and
facet positions) are expressed in terms of those rows.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from ._rows import delete_columns, group_rows
from .errors import DegenerateSimplexError

#: relative volume threshold under which a simplex counts as degenerate
DEGENERACY_RTOL = 1e-12


def permutation_parity(seq: Sequence) -> int:
    """Parity of the permutation that sorts ``seq``: +1 if even, -1 if odd."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        raise ValueError(f"repeated vertex in {seq!r}")
    order = sorted(range(len(seq)), key=lambda i: seq[i])
    seen = [False] * len(seq)
    sign = 1
    for i in range(len(seq)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True, order=True)
class Simplex:
    """Unordered simplex; ``vertices`` is always sorted and repetition free."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(sorted(self.vertices))
        if len(set(vs)) != len(vs):
            raise ValueError(f"repeated vertex in {self.vertices!r}")
        object.__setattr__(self, "vertices", vs)

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator:
        return iter(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.vertices

    def faces(self, d: int) -> list[Simplex]:
        return subsimplices(self, d)

    def __repr__(self) -> str:
        return f"Simplex({self.vertices!r})"


@dataclass(frozen=True)
class OrientedSimplex:
    """Simplex together with an orientation sign relative to ascending order.

    For a vertex the sign is the orientation itself (``[V, +]`` or ``[V, -]``).
    """

    simplex: Simplex
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"orientation sign must be +1 or -1, got {self.sign!r}")

    @property
    def dim(self) -> int:
        return self.simplex.dim

    @property
    def vertices(self) -> tuple:
        return self.simplex.vertices

    @property
    def ordering(self) -> tuple:
        """A representative ordering (its sign is implicit for dimension 0)."""
        vs = self.simplex.vertices
        if self.sign == -1 and len(vs) >= 2:
            return (vs[1], vs[0]) + vs[2:]
        return vs

    def __neg__(self) -> OrientedSimplex:
        return OrientedSimplex(self.simplex, -self.sign)

    def __repr__(self) -> str:
        s = "+" if self.sign > 0 else "-"
        if self.dim == 0:
            return f"[{self.vertices[0]!r}, {s}]"
        return f"[{', '.join(map(repr, self.ordering))}]"


def subsimplices(s: Simplex | Iterable, d: int) -> list[Simplex]:
    """All ``d``-dimensional faces of ``s`` in lexicographic order."""
    vs = s.vertices if isinstance(s, Simplex) else tuple(sorted(s))
    if d < 0 or d >= len(vs):
        raise ValueError(f"face dimension {d} out of range for a {len(vs) - 1}-simplex")
    return [Simplex(c) for c in itertools.combinations(vs, d + 1)]


def orient(ordering: Sequence, sign: int = 1) -> OrientedSimplex:
    """Oriented simplex of an ordering (``sign`` is only used for a single vertex)."""
    ordering = tuple(ordering)
    if len(ordering) == 1:
        return OrientedSimplex(Simplex(ordering), sign)
    return OrientedSimplex(Simplex(ordering), permutation_parity(ordering) * sign)


def induced_facet_orientation(s: OrientedSimplex | Sequence, position: int) -> OrientedSimplex:
    """Orientation induced on the facet omitting entry ``position`` (0-based).

    For an edge ``[V1, V2]`` the induced vertex orientations are ``[V1, -]``
    and ``[V2, +]``; in higher dimension the omitted position ``i`` gives the
    sign ``(-1)**i`` in front of the remaining ordering.
    """
    if isinstance(s, OrientedSimplex):
        ordering, base = s.ordering, (s.sign if s.dim == 0 else 1)
    else:
        ordering, base = tuple(s), 1
    n = len(ordering) - 1
    if n < 1:
        raise ValueError("a vertex has no facets to orient")
    if not 0 <= position <= n:
        raise ValueError(f"position {position} out of range 0..{n}")
    rest = ordering[:position] + ordering[position + 1:]
    if n == 1:
        return OrientedSimplex(Simplex(rest), base * (1 if position == 0 else -1))
    sign = 1 if position % 2 == 0 else -1
    return orient(rest, base * sign)


def consistently_oriented(s1: OrientedSimplex | Sequence, s2: OrientedSimplex | Sequence) -> bool:
    """True when two n-simplices sharing a facet induce opposite orientations on it."""
    o1 = s1.ordering if isinstance(s1, OrientedSimplex) else tuple(s1)
    o2 = s2.ordering if isinstance(s2, OrientedSimplex) else tuple(s2)
    if len(o1) != len(o2):
        raise ValueError("simplices of different dimension")
    common = set(o1) & set(o2)
    if len(common) != len(o1) - 1:
        raise ValueError(f"{o1!r} and {o2!r} do not share exactly one facet")
    i1 = next(i for i, v in enumerate(o1) if v not in common)
    i2 = next(i for i, v in enumerate(o2) if v not in common)
    f1 = induced_facet_orientation(s1 if isinstance(s1, OrientedSimplex) else o1, i1)
    f2 = induced_facet_orientation(s2 if isinstance(s2, OrientedSimplex) else o2, i2)
    return f1 == -f2


def _edge_matrix(points: np.ndarray) -> np.ndarray:
    """Columns ``P_i - P_0``; shape (..., m, n)."""
    return np.swapaxes(points[..., 1:, :] - points[..., :1, :], -1, -2)


def simplex_measures(points: np.ndarray) -> np.ndarray:
    """n-dimensional volume of simplices with vertex coordinates ``points`` (..., n+1, m)."""
    points = np.asarray(points, dtype=float)
    n = points.shape[-2] - 1
    if n == 0:
        return np.ones(points.shape[:-2])
    e = _edge_matrix(points)
    gram = np.swapaxes(e, -1, -2) @ e
    det = np.clip(np.linalg.det(gram), 0.0, None)
    return np.sqrt(det) / float(np.prod(np.arange(1, n + 1)))


def degenerate_mask(points: np.ndarray, rtol: float = DEGENERACY_RTOL) -> np.ndarray:
    """Flag simplices whose volume scale is below ``rtol * (max edge)**n``."""
    points = np.asarray(points, dtype=float)
    n = points.shape[-2] - 1
    if n == 0:
        return np.zeros(points.shape[:-2], dtype=bool)
    e = _edge_matrix(points)
    gram = np.swapaxes(e, -1, -2) @ e
    vol_scale = np.sqrt(np.clip(np.linalg.det(gram), 0.0, None))
    diffs = points[..., :, None, :] - points[..., None, :, :]
    hmax = np.sqrt((diffs ** 2).sum(-1)).max(axis=(-1, -2))
    return vol_scale <= rtol * hmax ** n


def natural_orientation(ordering: Sequence[int], coords: np.ndarray) -> OrientedSimplex:
    """Orientation of an n-simplex embedded in R^n for which the determinant is positive.

    Raises
    ------
    DegenerateSimplexError
        If the determinant is below ``1e-12 * (max edge)**n`` in magnitude.
    """
    ordering = tuple(ordering)
    pts = np.asarray(coords, dtype=float)[list(ordering)]
    n = len(ordering) - 1
    if pts.shape[1] != n:
        raise ValueError(f"natural orientation needs an {n}-simplex in R^{n}, got R^{pts.shape[1]}")
    if degenerate_mask(pts):
        raise DegenerateSimplexError(f"degenerate simplex {ordering!r}")
    det = np.linalg.det(_edge_matrix(pts))
    return orient(ordering, 1) if det > 0 else -orient(ordering, 1)


def orientation_signs(cells: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Vectorized natural orientation: +1 where the row order is positively oriented."""
    cells = np.asarray(cells)
    pts = np.asarray(coords, dtype=float)[cells]
    n = cells.shape[1] - 1
    if pts.shape[-1] != n:
        raise ValueError(f"natural orientation needs {n}-simplices in R^{n}")
    bad = degenerate_mask(pts)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise DegenerateSimplexError(f"degenerate element {k} with vertices {cells[k].tolist()}")
    det = np.linalg.det(_edge_matrix(pts))
    return np.where(det > 0, 1, -1)


class Triangulation:
    """Finite set of n-simplices given as integer rows.

    Parameters
    ----------
    cells : array_like of int, shape (N, n+1)
        Element rows. The row order inside each element is preserved; two
        rows spanning the same vertex set are rejected.
    dim : int, optional
        Needed only for an empty triangulation.
    """

    def __init__(self, cells, dim: int | None = None):
        if isinstance(cells, Triangulation):
            cells = cells.cells
        cells = [tuple(c.vertices) if isinstance(c, Simplex) else c for c in cells] \
            if not isinstance(cells, np.ndarray) else cells
        arr = np.asarray(cells, dtype=np.int64)
        if arr.size == 0:
            if dim is None:
                raise ValueError("dimension required for an empty triangulation")
            arr = arr.reshape(0, dim + 1)
        if arr.ndim != 2:
            raise ValueError(f"cells must be a 2-D table, got shape {arr.shape}")
        if dim is not None and arr.shape[1] != dim + 1:
            raise ValueError(f"cells have {arr.shape[1]} columns, expected {dim + 1}")
        srt = np.sort(arr, axis=1)
        if arr.shape[1] > 1 and np.any(srt[:, 1:] == srt[:, :-1]):
            k = int(np.flatnonzero(np.any(srt[:, 1:] == srt[:, :-1], axis=1))[0])
            raise ValueError(f"element {k} has a repeated vertex: {arr[k].tolist()}")
        _, ng = group_rows(srt)
        if ng != arr.shape[0]:
            raise ValueError("triangulation contains the same simplex twice")
        if arr.size and arr.min() < 0:
            raise ValueError("vertex ids must be non-negative")
        self.cells = arr
        self.cells.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.cells.shape[1] - 1

    def __len__(self) -> int:
        return self.cells.shape[0]

    def __iter__(self) -> Iterator[Simplex]:
        return (Simplex(tuple(int(v) for v in r)) for r in self.cells)

    def simplices(self) -> set[Simplex]:
        return set(self)

    def faces(self, d: int) -> np.ndarray:
        """Sorted, unique ``d``-faces as rows (lexicographic order)."""
        n = self.dim
        if not 0 <= d <= n:
            raise ValueError(f"face dimension {d} out of range 0..{n}")
        srt = np.sort(self.cells, axis=1)
        combos = list(itertools.combinations(range(n + 1), d + 1))
        allf = srt[:, combos].reshape(-1, d + 1)
        if allf.shape[0] == 0:
            return allf
        return np.unique(allf, axis=0)

    def facet_counts(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique facets (sorted rows) and the number of elements containing each."""
        n = self.dim
        if n < 1:
            raise ValueError("0-dimensional triangulations have no facets")
        facets = np.sort(delete_columns(self.cells), axis=2).reshape(-1, n)
        labels, ng = group_rows(facets)
        counts = np.bincount(labels, minlength=ng)
        first = np.zeros(ng, dtype=np.int64)
        first[labels[::-1]] = np.arange(labels.size)[::-1]
        return facets[first], counts

    def __repr__(self) -> str:
        return f"Triangulation(dim={self.dim}, n_elements={len(self)})"


def _as_triangulation(m) -> Triangulation:
    if isinstance(m, Triangulation):
        return m
    if isinstance(m, GeometricMesh):
        return m.triangulation
    return Triangulation(m)


def triangulation_boundary(m) -> Triangulation:
    """Facets contained in exactly one element, in lexicographic order."""
    tri = _as_triangulation(m)
    if tri.dim == 0:
        return _empty(-1)
    facets, counts = tri.facet_counts()
    return Triangulation(facets[counts == 1], dim=tri.dim - 1)


def _empty(dim: int) -> Triangulation:
    obj = Triangulation.__new__(Triangulation)
    obj.cells = np.zeros((0, dim + 1), dtype=np.int64)
    return obj


def star(s: Simplex | Iterable[int], m) -> Triangulation:
    """Elements of ``m`` containing ``s`` (row order preserved)."""
    tri = _as_triangulation(m)
    vs = list(s.vertices if isinstance(s, Simplex) else s)
    mask = np.ones(len(tri), dtype=bool)
    for v in vs:
        mask &= np.any(tri.cells == v, axis=1)
    return Triangulation(tri.cells[mask], dim=tri.dim)


def is_branching(m) -> bool:
    """True when some facet belongs to three or more elements."""
    tri = _as_triangulation(m)
    if tri.dim < 1 or len(tri) == 0:
        return False
    _, counts = tri.facet_counts()
    return bool(np.any(counts > 2))


def is_face_connected_star(s: Simplex | Iterable[int], m) -> bool:
    """Whether the elements around ``s`` form one chain of facet-sharing neighbours."""
    st = star(s, m)
    rows = [frozenset(int(v) for v in r) for r in st.cells]
    if not rows:
        return True
    n = st.dim
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(len(rows)):
            if j not in seen and len(rows[i] & rows[j]) == n:
                seen.add(j)
                queue.append(j)
    return len(seen) == len(rows)


@dataclass
class GeometricMesh:
    """Triangulation with vertex coordinates (an n-mesh in R^m, m >= n)."""

    triangulation: Triangulation
    points: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if not isinstance(self.triangulation, Triangulation):
            self.triangulation = Triangulation(self.triangulation)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be a 2-D array")
        cells = self.triangulation.cells
        if cells.size and cells.max() >= self.points.shape[0]:
            raise ValueError("element refers to a vertex without coordinates")
        if self.points.shape[1] < self.dim:
            raise ValueError(f"cannot embed {self.dim}-simplices in R^{self.points.shape[1]}")
        if self.check and len(cells):
            bad = degenerate_mask(self.points[cells])
            if bad.any():
                k = int(np.flatnonzero(bad)[0])
                raise DegenerateSimplexError(f"degenerate element {k} with vertices {cells[k].tolist()}")

    @property
    def cells(self) -> np.ndarray:
        return self.triangulation.cells

    @property
    def dim(self) -> int:
        return self.triangulation.dim

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.triangulation)

    def diameters(self) -> np.ndarray:
        pts = self.points[self.cells]
        diffs = pts[:, :, None, :] - pts[:, None, :, :]
        return np.sqrt((diffs ** 2).sum(-1)).max(axis=(1, 2))

    def measures(self) -> np.ndarray:
        return simplex_measures(self.points[self.cells])


@dataclass
class RegularityReport:
    """Outcome of :func:`validate_regularity`."""

    facets_ok: bool
    stars_ok: bool
    mesh_condition_ok: bool | None
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.facets_ok and self.stars_ok and self.mesh_condition_ok is not False


def _pair_overlaps_badly(p: np.ndarray, q: np.ndarray, shared_p: np.ndarray, shared_q: np.ndarray) -> bool:
    """LP test: do two simplices meet outside the hull of their shared vertices?"""
    from scipy.optimize import linprog

    a = p.shape[0]
    b = q.shape[0]
    m = p.shape[1]
    c = -np.concatenate([~shared_p, ~shared_q]).astype(float)
    a_eq = np.zeros((m + 2, a + b))
    a_eq[:m, :a] = p.T
    a_eq[:m, a:] = -q.T
    a_eq[m, :a] = 1.0
    a_eq[m + 1, a:] = 1.0
    b_eq = np.zeros(m + 2)
    b_eq[m:] = 1.0
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 2:
        return False
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    return -res.fun > 1e-9


def mesh_condition_violations(mesh: GeometricMesh, limit: int = 1) -> list[tuple[int, int]]:
    """Pairs of elements whose geometric intersection is not the hull of their common face.

    Quadratic in the number of elements (bounding boxes prune most pairs);
    intended for small meshes.
    """
    pts = mesh.points[mesh.cells]
    lo, hi = pts.min(axis=1), pts.max(axis=1)
    scale = float(np.ptp(mesh.points, axis=0).max()) if len(mesh.points) else 1.0
    tol = 1e-12 * max(scale, 1.0)
    bad: list[tuple[int, int]] = []
    cells = mesh.cells
    for i in range(len(cells)):
        cand = np.flatnonzero(np.all(lo[i + 1:] <= hi[i] + tol, axis=1) & np.all(hi[i + 1:] >= lo[i] - tol, axis=1)) + i + 1
        for j in cand:
            ci, cj = cells[i], cells[j]
            common = np.intersect1d(ci, cj)
            if _pair_overlaps_badly(pts[i], pts[j], np.isin(ci, common), np.isin(cj, common)):
                bad.append((i, int(j)))
                if len(bad) >= limit:
                    return bad
    return bad


def validate_regularity(mesh: GeometricMesh | Triangulation, check_mesh_condition: bool = False) -> RegularityReport:
    """Check the three regularity conditions of a simplicial mesh.

    (a) no facet lies in more than two elements; (b) the star of every
    subsimplex is face connected; (c) optionally, the mesh condition
    ``|K| cap |K'| = |K cap K'|``, checked by linear programming.
    """
    from .generalized import from_triangulation

    tri = _as_triangulation(mesh)
    msgs: list[str] = []
    facets_ok = not is_branching(tri)
    stars_ok = facets_ok
    if not facets_ok:
        msgs.append("a facet is shared by more than two elements")
    else:
        gm = from_triangulation(tri)
        for d in range(tri.dim):
            nsub = len(gm.generalized_subfacets(d))
            nsimp = len(tri.faces(d)) if len(tri) else 0
            if nsub != nsimp:
                msgs.append(f"{nsub - nsimp} excess star component(s) at dimension {d}")
                stars_ok = False
    cond = None
    if check_mesh_condition:
        if not isinstance(mesh, GeometricMesh):
            raise ValueError("the mesh condition needs coordinates")
        viol = mesh_condition_violations(mesh)
        cond = not viol
        if viol:
            msgs.append(f"elements {viol[0][0]} and {viol[0][1]} overlap improperly")
    return RegularityReport(facets_ok, stars_ok, cond, msgs)
