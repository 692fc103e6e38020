"""Vectorized helpers for integer row tables (grouping, matching, parity)."""

from __future__ import annotations

import itertools

import numpy as np


def group_rows(rows: np.ndarray) -> tuple[np.ndarray, int]:
    """Label identical rows of an integer table.

    Returns
    -------
    labels : ndarray of int, shape (N,)
        Group id of each row. Ids are assigned in lexicographic order of the
        rows, so equal rows share an id and ``labels`` is deterministic.
    n_groups : int
    """
    rows = np.asarray(rows)
    n = rows.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0
    if rows.ndim == 1 or rows.shape[1] == 0:
        rows = rows.reshape(n, -1)
    if rows.shape[1] == 0:
        return np.zeros(n, dtype=np.int64), 1
    order = np.lexsort(rows.T[::-1])
    srt = rows[order]
    new = np.empty(n, dtype=bool)
    new[0] = True
    new[1:] = np.any(srt[1:] != srt[:-1], axis=1)
    ids = np.cumsum(new) - 1
    labels = np.empty(n, dtype=np.int64)
    labels[order] = ids
    return labels, int(ids[-1]) + 1


def match_rows(table: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Index of each query row inside ``table`` (``-1`` when absent).

    Rows of ``table`` are assumed distinct.
    """
    table = np.asarray(table)
    queries = np.asarray(queries)
    nt = table.shape[0]
    if queries.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if nt == 0:
        return np.full(queries.shape[0], -1, dtype=np.int64)
    labels, ng = group_rows(np.vstack([table, queries]))
    where = np.full(ng, -1, dtype=np.int64)
    where[labels[:nt]] = np.arange(nt)
    return where[labels[nt:]]


def row_parity(rows: np.ndarray) -> np.ndarray:
    """Parity (+1 even, -1 odd) of the permutation sorting each row."""
    rows = np.asarray(rows)
    w = rows.shape[1] if rows.ndim == 2 else 0
    inv = np.zeros(rows.shape[0], dtype=np.int64)
    for i, j in itertools.combinations(range(w), 2):
        inv += rows[:, i] > rows[:, j]
    return np.where(inv % 2 == 0, 1, -1).astype(np.int64)


def delete_columns(rows: np.ndarray) -> np.ndarray:
    """All ways of deleting one column: shape (N, w, w-1), slot ``a`` omits column ``a``."""
    rows = np.asarray(rows)
    n, w = rows.shape
    out = np.empty((n, w, max(w - 1, 0)), dtype=rows.dtype)
    for a in range(w):
        out[:, a, :] = np.delete(rows, a, axis=1)
    return out


def position_of(rows: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Column index of ``values[i]`` in ``rows[i]`` (``-1`` when absent)."""
    eq = rows == np.asarray(values)[:, None]
    pos = eq.argmax(axis=1)
    return np.where(eq.any(axis=1), pos, -1)
