"""Lowest-order Whitney forms on generalized meshes.

The basis form of a generalized subfacet ``(S, gamma)`` is the Whitney form
of ``S`` on elements of ``gamma`` and zero elsewhere. On an element the form
of ``S = [V_0, ..., V_d]`` is::

    sum_j (-1)**j * lambda_{V_j} * d lambda_{V_0} ^ ... (omit j) ... ^ d lambda_{V_d}

where ``S`` is ordered by increasing global vertex id. Boundary meshes use the
same vertex ids and therefore the same convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .boundary import generalized_boundary
from .generalized import NONE, GeneralizedMesh, local_combos
from .quadrature import simplex_rule
from .simplicial import simplex_measures

# ---------------------------------------------------------------------------
# element geometry


def barycentric_gradients(points: np.ndarray) -> np.ndarray:
    """Gradients of barycentric coordinates, shape (..., n+1, m), tangent to the simplex."""
    points = np.asarray(points, dtype=float)
    e = points[..., 1:, :] - points[..., :1, :]  # (..., n, m)
    gram = e @ np.swapaxes(e, -1, -2)
    g = np.linalg.solve(gram, e)  # rows: gradients of lambda_1..lambda_n
    g0 = -g.sum(axis=-2, keepdims=True)
    return np.concatenate([g0, g], axis=-2)


def barycentric_coordinates(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of ``x`` (..., Q, m) in simplices ``points`` (..., n+1, m)."""
    grads = barycentric_gradients(points)
    rel = np.asarray(x, dtype=float) - points[..., :1, :]
    lam = rel @ np.swapaxes(grads, -1, -2)
    lam[..., 0] += 1.0
    return lam


def global_local_orders(elt: np.ndarray, combos: np.ndarray) -> np.ndarray:
    """Local positions of each subsimplex sorted by global vertex id, shape (N, C, d+1)."""
    loc = np.broadcast_to(combos, (elt.shape[0],) + combos.shape)
    glob = np.take_along_axis(elt[:, None, :].repeat(combos.shape[0], 1), loc, axis=2)
    return np.take_along_axis(loc, np.argsort(glob, axis=2), axis=2)


def _eval_forms(lam: np.ndarray, grads: np.ndarray, orders: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Evaluate local Whitney forms.

    lam (N, Q, n+1), grads (N, n+1, m), orders (N, C, d+1), vectors (N, V, d, m).
    Returns (N, Q, C, V).
    """
    N, C, dp1 = orders.shape
    d = dp1 - 1
    nv = vectors.shape[1]
    # dl[k, i, v, l] = grad lambda_i . vector_l of set v
    dl = np.einsum("kim,kvlm->kivl", grads, vectors)
    out = np.zeros((N, lam.shape[1], C, nv))
    ar = np.arange(N)[:, None, None]
    Q = lam.shape[1]
    for j in range(dp1):
        rest = [t for t in range(dp1) if t != j]
        lj = np.take_along_axis(lam, np.repeat(orders[:, None, :, j], Q, axis=1), axis=2)  # (N, Q, C)
        if d == 0:
            det = np.ones((N, C, nv))
        else:
            sub = dl[ar, orders[:, :, rest]]  # (N, C, d, V, d)
            det = np.linalg.det(sub.transpose(0, 1, 3, 2, 4))
        out += (-1) ** j * lj[:, :, :, None] * det[:, None, :, :]
    return out


def _element_points(mesh: GeneralizedMesh, ks=None) -> np.ndarray:
    if mesh.points is None:
        raise ValueError("Whitney forms need vertex coordinates")
    elt = mesh.elt if ks is None else mesh.elt[ks]
    return mesh.points[elt]


def whitney_eval(mesh: GeneralizedMesh, d: int, s: int, k: int, x, vectors=()) -> float:
    """Value of basis form ``s`` of degree ``d`` on element ``k`` at point ``x``
    applied to the ``d`` tangent vectors ``vectors``; zero off its component."""
    tab = mesh.generalized_subfacets(d)
    hits = np.flatnonzero(tab.local_to_global[k] == s)
    if hits.size == 0:
        return 0.0
    c = int(hits[0])
    pts = _element_points(mesh, [k])
    grads = barycentric_gradients(pts)
    lam = barycentric_coordinates(pts, np.asarray(x, float)[None, None, :])
    orders = global_local_orders(mesh.elt[[k]], tab.combos[[c]])
    vec = np.asarray(vectors, dtype=float)
    if vec.size != d * pts.shape[-1]:
        raise ValueError(f"a {d}-form takes {d} tangent vectors in R^{pts.shape[-1]}")
    vec = vec.reshape(1, 1, d, pts.shape[-1])
    return float(_eval_forms(lam, grads, orders, vec)[0, 0, 0, 0])


@dataclass
class DiscreteForm:
    """Coefficient vector over the generalized ``degree``-subfacets of ``mesh``."""

    mesh: GeneralizedMesh
    degree: int
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        n = len(self.mesh.generalized_subfacets(self.degree))
        if self.coefficients.shape != (n,):
            raise ValueError(f"expected {n} coefficients, got shape {self.coefficients.shape}")

    def local_coefficients(self) -> np.ndarray:
        """Per element coefficients, shape (N, C)."""
        return self.coefficients[self.mesh.generalized_subfacets(self.degree).local_to_global]


def evaluate_local(mesh: GeneralizedMesh, d: int, local: np.ndarray, ks, lam, vectors) -> np.ndarray:
    """Evaluate ``sum_c local[k, c] * w_c`` on elements ``ks``; returns (len(ks), Q, V)."""
    ks = np.asarray(ks)
    combos = local_combos(mesh.n, d)
    pts = _element_points(mesh, ks)
    grads = barycentric_gradients(pts)
    orders = global_local_orders(mesh.elt[ks], combos)
    vals = _eval_forms(lam, grads, orders, vectors)
    return np.einsum("kqcv,kc->kqv", vals, local[ks])


# ---------------------------------------------------------------------------
# local matrices and assembly


def lambda_products(measures: np.ndarray, n: int) -> np.ndarray:
    """Exact integrals of ``lambda_a * lambda_b``: ``|K| (1 + delta_ab) / ((n+1)(n+2))``."""
    base = (np.ones((n + 1, n + 1)) + np.eye(n + 1)) / ((n + 1) * (n + 2))
    return measures[:, None, None] * base[None]


def local_mass(mesh: GeneralizedMesh, d: int) -> np.ndarray:
    """Exact Whitney mass matrices, shape (N, C, C)."""
    n = mesh.n
    pts = _element_points(mesh)
    vol = simplex_measures(pts)
    grads = barycentric_gradients(pts)
    G = grads @ np.swapaxes(grads, -1, -2)
    I = lambda_products(vol, n)
    combos = local_combos(n, d)
    orders = global_local_orders(mesh.elt, combos)
    N, C = mesh.n_elements, combos.shape[0]
    ar = np.arange(N)
    M = np.zeros((N, C, C))
    for c1, c2 in itertools.product(range(C), repeat=2):
        o1, o2 = orders[:, c1], orders[:, c2]
        acc = np.zeros(N)
        for j1, j2 in itertools.product(range(d + 1), repeat=2):
            r1 = np.delete(o1, j1, axis=1)
            r2 = np.delete(o2, j2, axis=1)
            if d == 0:
                det = np.ones(N)
            else:
                sub = G[ar[:, None, None], r1[:, :, None], r2[:, None, :]]
                det = np.linalg.det(sub)
            acc += (-1) ** (j1 + j2) * I[ar, o1[:, j1], o2[:, j2]] * det
        M[:, c1, c2] = acc
    return M


def local_stiffness(mesh: GeneralizedMesh) -> np.ndarray:
    """P1 stiffness matrices ``|K| grad(lambda_a) . grad(lambda_b)``, shape (N, n+1, n+1)."""
    pts = _element_points(mesh)
    grads = barycentric_gradients(pts)
    return simplex_measures(pts)[:, None, None] * (grads @ np.swapaxes(grads, -1, -2))


def assemble(mesh: GeneralizedMesh, d: int, local) -> sp.csr_matrix:
    """Sum local matrices into the global matrix indexed by generalized d-subfacets.

    ``local`` is an array (N, C, C) ordered like the local combinations, or a
    callable returning the (C, C) matrix of element ``k``.
    """
    tab = mesh.generalized_subfacets(d)
    N, C = tab.local_to_global.shape
    if callable(local):
        local = np.stack([np.asarray(local(k), dtype=float) for k in range(N)]) if N else np.zeros((0, C, C))
    local = np.asarray(local, dtype=float)
    if local.shape != (N, C, C):
        raise ValueError(f"local matrices must have shape {(N, C, C)}, got {local.shape}")
    J = tab.local_to_global
    rows = np.repeat(J, C, axis=1).ravel()
    cols = np.tile(J, (1, C)).ravel()
    n_s = len(tab)
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n_s, n_s)).tocsr()


# ---------------------------------------------------------------------------
# trace


def _boundary_setup(mesh: GeneralizedMesh, boundary: GeneralizedMesh | None):
    if boundary is None:
        boundary = generalized_boundary(mesh)
    if boundary.origin is None:
        raise ValueError("boundary mesh must carry its parent split facets")
    return boundary


def _subsimplex_sign(rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """+1 where two vertex orderings of the same simplex have the same parity."""
    from ._rows import row_parity

    return row_parity(rows_a) * row_parity(rows_b)


def trace_matrix(mesh: GeneralizedMesh, d: int, boundary: GeneralizedMesh | None = None) -> sp.csr_matrix:
    """Matrix of the trace from volume to boundary Whitney d-forms.

    Row ``t`` (boundary subfacet) has one entry, in the column of the volume
    subfacet at the same simplex whose component holds the parent element of
    any member of ``t``. The entry is the relative orientation of the two
    canonical orderings.
    """
    bnd = _boundary_setup(mesh, boundary)
    n = mesh.n
    if not 0 <= d <= n - 1:
        raise ValueError(f"trace degree {d} out of range 0..{n - 1}")
    vt = mesh.generalized_subfacets(d)
    n_s = len(vt)
    if bnd.n_elements == 0:
        return sp.csr_matrix((0, n_s))
    bt = bnd.generalized_subfacets(d)
    k, a = bnd.origin[:, 0], bnd.origin[:, 1]
    bc = bt.combos  # positions in boundary rows
    # boundary position p is volume position p (p < a) or p + 1
    vpos = bc[None, :, :] + (bc[None, :, :] >= a[:, None, None])
    lut = {tuple(c): i for i, c in enumerate(vt.combos.tolist())}
    srt = np.sort(vpos, axis=2)
    vloc = np.array([[lut[tuple(r)] for r in row] for row in srt.tolist()], dtype=np.int64).reshape(srt.shape[:2])
    t_idx = bt.local_to_global.ravel()
    s_idx = vt.local_to_global[k[:, None], vloc].ravel()
    cb = bc.shape[0]
    verts_b = np.sort(bnd.elt[:, bc], axis=2)
    verts_v = np.sort(np.take_along_axis(mesh.elt[k][:, None, :].repeat(cb, 1), vpos, axis=2), axis=2)
    if np.any(verts_b != verts_v):
        raise RuntimeError("boundary subsimplex differs from its volume subsimplex")
    sign = _subsimplex_sign(verts_b.reshape(-1, d + 1), verts_v.reshape(-1, d + 1))
    # one column per row, consistent across the members of each boundary subfacet
    col = np.full(len(bt), NONE, dtype=np.int64)
    sgn = np.zeros(len(bt), dtype=np.int64)
    col[t_idx] = s_idx
    sgn[t_idx] = sign
    if np.any(col[t_idx] != s_idx):
        raise RuntimeError("members of a boundary subfacet map to different volume subfacets")
    return sp.csr_matrix((sgn.astype(float), (np.arange(len(bt)), col)), shape=(len(bt), n_s))


@dataclass
class SurjectivityReport:
    surjective: bool
    rank: int
    n_rows: int
    n_cols: int
    deficiency: int
    matrix: sp.csr_matrix


def check_trace_surjectivity(mesh: GeneralizedMesh, d: int, boundary=None) -> SurjectivityReport:
    """Rank of the trace matrix; every row has a single +-1 so the rank is the
    number of distinct columns used."""
    T = trace_matrix(mesh, d, boundary)
    if T.shape[0]:
        per_row = np.diff(T.indptr)
        if np.any(per_row != 1) or np.any(np.abs(T.data) != 1):
            raise RuntimeError("trace matrix must have exactly one +-1 per row")
    rank = int(np.unique(T.indices).size)
    return SurjectivityReport(rank == T.shape[0], rank, T.shape[0], T.shape[1], T.shape[0] - rank, T)


# ---------------------------------------------------------------------------
# pullback checks


def _facet_frames(pts_f: np.ndarray, d: int) -> np.ndarray:
    """All d-tuples of edge vectors ``P_i - P_0`` of facets (N, n, m): (N, V, d, m)."""
    e = pts_f[:, 1:, :] - pts_f[:, :1, :]
    sets = list(itertools.combinations(range(e.shape[1]), d))
    if d == 0:
        return np.zeros((pts_f.shape[0], 1, 0, pts_f.shape[2]))
    return np.stack([e[:, list(s), :] for s in sets], axis=1)


def pullback_on_facets(mesh: GeneralizedMesh, d: int, local: np.ndarray, ks, positions, degree: int = 4):
    """Values of the form of element ``ks[i]`` on its facet ``positions[i]`` at quadrature
    nodes, on all d-tuples of facet edges; returns (len(ks), Q, V)."""
    ks, positions = np.asarray(ks), np.asarray(positions)
    n = mesh.n
    from .generalized import _others

    frows = np.take_along_axis(mesh.elt[ks], _others(positions, n), axis=1)
    pts_f = mesh.points[frows]
    nodes, _ = simplex_rule(n - 1, degree)
    x = np.einsum("qi,kim->kqm", nodes, pts_f)
    lam = barycentric_coordinates(mesh.points[mesh.elt[ks]], x)
    vec = _facet_frames(pts_f, d)
    return evaluate_local(mesh, d, local, ks, lam, vec), x, vec, frows


def check_patch_condition(mesh: GeneralizedMesh, form: DiscreteForm | np.ndarray, d: int | None = None) -> float:
    """Largest relative mismatch of pullbacks to shared facets between neighbours.

    ``form`` is a :class:`DiscreteForm` or per element coefficients (N, C),
    which may break continuity on purpose.
    """
    if isinstance(form, DiscreteForm):
        d, local = form.degree, form.local_coefficients()
    else:
        local = np.asarray(form, dtype=float)
        if d is None:
            raise ValueError("degree needed for raw local coefficients")
    k, a = np.nonzero(mesh.nei_elt >= 0)
    if k.size == 0 or d >= mesh.n:
        return 0.0
    j = mesh.nei_elt[k, a]
    v1, x1, vec1, _ = pullback_on_facets(mesh, d, local, k, a)
    # evaluate the neighbour at the same physical points and the same vectors
    lam2 = barycentric_coordinates(mesh.points[mesh.elt[j]], x1)
    v2 = evaluate_local(mesh, d, local, j, lam2, vec1)
    scale = max(1.0, float(np.abs(v1).max(initial=0.0)), float(np.abs(v2).max(initial=0.0)))
    return float(np.abs(v1 - v2).max(initial=0.0)) / scale


def basis_patch_residual(mesh: GeneralizedMesh, d: int) -> float:
    """Patch condition residual taken over every basis form of degree ``d`` at once.

    On each adjacency ``k <-F-> j`` every local form of ``k`` is pulled back to
    ``F`` and compared with the local forms of ``j`` carrying the same global
    subfacet (zero if ``j`` has none), and symmetrically for ``j``.
    """
    if d >= mesh.n:
        return 0.0
    tab = mesh.generalized_subfacets(d)
    J = tab.local_to_global
    k, a = np.nonzero(mesh.nei_elt >= 0)
    if k.size == 0:
        return 0.0
    j = mesh.nei_elt[k, a]
    C = J.shape[1]
    combos = local_combos(mesh.n, d)
    pk = _element_points(mesh, k)
    pj = _element_points(mesh, j)
    _, x, vec, _ = pullback_on_facets(mesh, d, np.zeros((mesh.n_elements, C)), k, a)
    vk = _eval_forms(barycentric_coordinates(pk, x), barycentric_gradients(pk),
                     global_local_orders(mesh.elt[k], combos), vec)
    vj = _eval_forms(barycentric_coordinates(pj, x), barycentric_gradients(pj),
                     global_local_orders(mesh.elt[j], combos), vec)
    # same[i, c, c'] = slot c of k and slot c' of j carry the same global subfacet
    same = (J[k][:, :, None] == J[j][:, None, :]).astype(float)
    from_k = vk - np.einsum("iqcv,idc->iqdv", vj, same)
    from_j = vj - np.einsum("iqcv,icd->iqdv", vk, same)
    scale = max(1.0, float(np.abs(vk).max()), float(np.abs(vj).max()))
    return max(float(np.abs(from_k).max()), float(np.abs(from_j).max())) / scale


def trace_pullback_residual(mesh: GeneralizedMesh, d: int, boundary=None, degree: int = 4) -> float:
    """Compare the trace matrix with a direct pullback of every volume basis form.

    For each volume basis form, evaluates its pullback on every boundary
    element at quadrature nodes and subtracts the boundary form given by the
    trace matrix. Returns the largest relative difference.
    """
    bnd = _boundary_setup(mesh, boundary)
    T = trace_matrix(mesh, d, bnd).tocsc()
    vt = mesh.generalized_subfacets(d)
    bt = bnd.generalized_subfacets(d)
    if bnd.n_elements == 0:
        return 0.0
    k, a = bnd.origin[:, 0], bnd.origin[:, 1]
    worst = 0.0
    for s in range(len(vt)):
        e = np.zeros(len(vt))
        e[s] = 1.0
        local_v = e[vt.local_to_global]
        touched = np.flatnonzero(np.any(vt.local_to_global[k] == s, axis=1))
        col = T.getcol(s).toarray().ravel()
        local_b = col[bt.local_to_global]
        touched = np.union1d(touched, np.flatnonzero(np.any(local_b != 0, axis=1)))
        if touched.size == 0:
            continue
        vals_v, x, vec, _ = pullback_on_facets(mesh, d, local_v, k[touched], a[touched], degree)
        lam_b = barycentric_coordinates(bnd.points[bnd.elt[touched]], x) if bnd.n >= 1 else np.ones(x.shape[:2] + (1,))
        vals_b = _evaluate_any(bnd, d, local_b, touched, lam_b, vec)
        scale = max(1.0, float(np.abs(vals_v).max()))
        worst = max(worst, float(np.abs(vals_v - vals_b).max()) / scale)
    return worst


def _evaluate_any(mesh: GeneralizedMesh, d: int, local, ks, lam, vec):
    if mesh.n == 0:
        return local[ks][:, None, :].repeat(lam.shape[1], 1)
    return evaluate_local(mesh, d, local, ks, lam, vec)


# ---------------------------------------------------------------------------
# point contacts


def edge_component_counts(triangles) -> dict[int, int]:
    """Per vertex, the number of edge-connected components of its star of triangles."""
    tris = np.asarray(triangles, dtype=np.int64)
    out: dict[int, int] = {}
    for v in np.unique(tris):
        st = [frozenset(t) for t in tris[np.any(tris == v, axis=1)].tolist()]
        pairs = [(i, j) for i, j in itertools.combinations(range(len(st)), 2) if len(st[i] & st[j]) == 2]
        i, j = (np.array(x, dtype=np.int64) for x in zip(*pairs)) if pairs else (np.zeros(0, np.int64),) * 2
        graph = sp.coo_matrix((np.ones(i.size), (i, j)), shape=(len(st), len(st)))
        out[int(v)] = int(connected_components(graph, directed=False)[0])
    return out


def has_point_contact(triangles) -> list[int]:
    """Vertices whose star of fracture triangles is not edge connected."""
    return sorted(v for v, c in edge_component_counts(triangles).items() if c > 1)


def excess_edge_components(triangles) -> int:
    """Sum over vertices of (edge-connected star components - 1)."""
    return sum(c - 1 for c in edge_component_counts(triangles).values())
