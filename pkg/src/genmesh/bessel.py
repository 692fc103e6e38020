"""Reference Neumann eigenvalues of the unit disk cut along a radius.

Separation of variables on the slit disk gives eigenfunctions
``J_{n/2}(rho r) cos(n theta / 2)`` with ``J'_{n/2}(rho) = 0``, so the
eigenvalues are ``rho**2`` over the positive zeros of ``J'_{n/2}`` for
``n = 0, 1, 2, ...`` plus the constant mode ``0``. Bessel functions are summed
from their ascending series in extended precision and zeros are refined by
bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

#: target bracket width of the bisection
BISECTION_TOL = 1e-12


def bessel_j(nu: float, x: float, dps: int = 40) -> float:
    """``J_nu(x)`` from its ascending series."""
    return float(_series(nu, x, dps, derivative=False))


def bessel_jp(nu: float, x: float, dps: int = 40) -> float:
    """``J'_nu(x)`` from the termwise derivative of the ascending series."""
    return float(_series(nu, x, dps, derivative=True))


def _series(nu, x, dps, derivative):
    with mpmath.workdps(dps + int(abs(x)) // 2):
        x = mpmath.mpf(x)
        nu = mpmath.mpf(nu)
        h = x / 2
        total = mpmath.mpf(0)
        term = h ** nu / mpmath.gamma(nu + 1)  # m = 0 term of J without derivative factor
        m = 0
        tiny = mpmath.mpf(10) ** (-(dps + 5))
        while True:
            if derivative:
                contrib = term * (2 * m + nu) / x
            else:
                contrib = term
            total += contrib
            m += 1
            term = -term * h * h / (m * (m + nu))
            if m > 5 and abs(term) * (1 + abs(2 * m + nu) / max(abs(x), 1)) < tiny * max(abs(total), 1):
                break
        return total


@dataclass(frozen=True)
class BesselZero:
    """Zero ``rho`` of ``J'_{n/2}`` and its eigenvalue ``rho**2``."""

    n: int
    p: int
    rho: float
    bracket: float
    derivative_residual: float

    @property
    def eigenvalue(self) -> float:
        return self.rho ** 2


def _bisect(f, a, b, fa, tol):
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0:
            return m, m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return a, b


def derivative_zeros(nu: float, x_max: float, step: float = 0.05, tol: float = BISECTION_TOL) -> list[tuple[float, float]]:
    """Positive zeros of ``J'_nu`` in ``(0, x_max]`` as ``(zero, bracket width)``."""
    f = lambda x: bessel_jp(nu, x)
    zeros = []
    a = step * 1e-3
    fa = f(a)
    if nu > 1 or nu == 0:
        # J'_nu vanishes at 0 for these orders; start past the origin
        a = step
        fa = f(a)
    x = a
    while x < x_max:
        b = min(x + step, x_max)
        fb = f(b)
        if fb == 0:
            zeros.append((b, 0.0))
        elif (fa > 0) != (fb > 0):
            lo, hi = _bisect(f, x, b, fa, tol)
            zeros.append((0.5 * (lo + hi), hi - lo))
        x, fa = b, fb
    return zeros


def bessel_reference_eigenvalues(count: int, tol: float = BISECTION_TOL) -> list[BesselZero]:
    """The ``count`` smallest positive reference eigenvalues, ascending."""
    if count < 1:
        raise ValueError("count must be at least 1")
    return list(_reference(int(count), float(tol)))


@lru_cache(maxsize=32)
def _reference(count: int, tol: float) -> tuple[BesselZero, ...]:
    x_max = 2.0 * math.sqrt(count) + 4.0
    while True:
        found: list[BesselZero] = []
        n = 0
        # the first zero of J'_nu exceeds nu, so orders above x_max contribute nothing
        while n / 2 < x_max:
            nu = n / 2
            for p, (rho, width) in enumerate(derivative_zeros(nu, x_max, tol=tol), start=1):
                found.append(BesselZero(n, p, rho, width, abs(bessel_jp(nu, rho))))
            n += 1
        found.sort(key=lambda z: z.rho)
        if len(found) >= count and found[count - 1].rho < x_max * 0.999:
            return tuple(found[:count])
        x_max *= 1.5
