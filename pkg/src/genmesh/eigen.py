"""Neumann Laplace eigenvalues on a fractured mesh with P1 Whitney forms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from .bessel import BesselZero, bessel_reference_eigenvalues
from .errors import IntegrityError
from .fracture import FractureSpec, fractured_mesh
from .generalized import GeneralizedMesh
from .meshgen import disk_cut_radius_mesh
from .whitney import assemble, local_mass, local_stiffness

#: above this many unknowns the sparse shift-invert solver is used
DENSE_LIMIT = 3000


def neumann_matrices(mesh: GeneralizedMesh) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Stiffness and mass matrices over the generalized vertices."""
    return assemble(mesh, 0, local_stiffness(mesh)), assemble(mesh, 0, local_mass(mesh, 0))


#: accepted relative residual ``|A x - lambda B x| / |B x|``
RESIDUAL_TOL = 1e-8


def smallest_eigenvalues(A: sp.spmatrix, B: sp.spmatrix, k: int, backend: str = "auto") -> np.ndarray:
    """``k`` smallest generalized eigenvalues of the pencil ``(A, B)``.

    Raises
    ------
    IntegrityError
        If ``B`` is not positive definite or an eigenpair misses the residual
        tolerance.
    """
    n = A.shape[0]
    k = min(k, n)
    if backend == "auto":
        backend = "dense" if n < DENSE_LIMIT else "sparse"
    if np.any(B.diagonal() <= 0):
        raise IntegrityError("mass matrix is not positive definite")
    if backend == "dense":
        try:
            w, v = scipy.linalg.eigh(A.toarray(), B.toarray(), subset_by_index=[0, k - 1])
        except np.linalg.LinAlgError as exc:
            raise IntegrityError(f"mass matrix is not positive definite: {exc}") from None
    elif backend == "sparse":
        # shift below zero so the singular Neumann operator is invertible
        scale = abs(A.diagonal()).max() / max(abs(B.diagonal()).max(), 1e-300)
        sigma = -1e-3 * min(1.0, scale)
        w, v = scipy.sparse.linalg.eigsh(A.tocsc(), k=k, M=B.tocsc(), sigma=sigma, which="LM", tol=1e-12)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    order = np.argsort(w)
    w, v = np.real(w[order]), np.real(v[:, order])
    Bv = B @ v
    res = np.linalg.norm(A @ v - Bv * w, axis=0) / np.linalg.norm(Bv, axis=0)
    if np.any(res > RESIDUAL_TOL):
        raise IntegrityError(f"eigenpair residual {res.max():.2e} above {RESIDUAL_TOL:g}")
    return w


@dataclass
class EigenResult:
    """Discrete versus reference eigenvalues, the zero mode excluded."""

    h: float
    n_dofs: int
    computed: np.ndarray
    reference: np.ndarray
    reference_zeros: list[BesselZero] = field(repr=False)
    zero_mode: float = 0.0

    @property
    def relative_errors(self) -> np.ndarray:
        return np.abs(self.computed - self.reference) / self.reference

    def rows(self) -> list[dict]:
        return [
            {"i": i + 1, "h": self.h, "lambda_h": float(lh), "lambda_ref": float(lr), "rel_err": float(e)}
            for i, (lh, lr, e) in enumerate(zip(self.computed, self.reference, self.relative_errors))
        ]


def solve_neumann_eigenproblem(spec: FractureSpec | float, k_eigs: int = 6, backend: str = "auto") -> EigenResult:
    """The ``k_eigs`` smallest Neumann eigenvalues on the fractured slit disk.

    ``spec`` is a fracture description or a target mesh size for the slit disk.
    The count includes the constant mode, which is reported separately, so the
    result compares ``lambda_1 .. lambda_{k_eigs - 1}`` with the reference.
    """
    if k_eigs < 2:
        raise ValueError("k_eigs must be at least 2")
    if not isinstance(spec, FractureSpec):
        spec = disk_cut_radius_mesh(float(spec))
    mesh = fractured_mesh(spec)
    A, B = neumann_matrices(mesh)
    w = smallest_eigenvalues(A, B, k_eigs, backend)
    ref = bessel_reference_eigenvalues(len(w) - 1)
    h = float(spec.volume.diameters().max())
    return EigenResult(h, A.shape[0], w[1:], np.array([z.eigenvalue for z in ref]), ref, float(w[0]))


def convergence_order(hs, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    hs, errors = np.log(np.asarray(hs, float)), np.log(np.asarray(errors, float))
    return float(np.polyfit(hs, errors, 1)[0])
