"""Grundmann-Moeller quadrature on simplices of any dimension."""

from __future__ import annotations

import itertools
import math
from functools import cache

import numpy as np


def _compositions(total: int, parts: int):
    """Non-negative integer vectors of length ``parts`` summing to ``total``."""
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield out


@cache
def _gm_rule(n: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    d = 2 * s + 1
    pts, wts = [], []
    for i in range(s + 1):
        w = (-1) ** i * 2.0 ** (-2 * s) * (d + n - 2 * i) ** d / (math.factorial(i) * math.factorial(d + n - i))
        for beta in _compositions(s - i, n + 1):
            pts.append([(2 * b + 1) / (d + n - 2 * i) for b in beta])
            wts.append(w)
    return np.array(pts), np.array(wts) * math.factorial(n)


def simplex_rule(n: int, degree: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric nodes (Q, n+1) and weights (Q,) summing to 1, exact up to ``degree``.

    Integrate over a simplex ``K`` as ``|K| * sum(w * f(nodes))``.
    """
    if n == 0:
        return np.ones((1, 1)), np.ones(1)
    s = max(0, math.ceil((degree - 1) / 2))
    return _gm_rule(n, s)
