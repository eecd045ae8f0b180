"""Laplacian spectra and algebraic connectivity (dense symmetric path)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .laplacian import check_laplacian


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def fiedler(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1])

    def check(self) -> None:
        tol = 1e-9 * self.n
        if abs(self.eigenvalues[0]) > tol:
            raise ValueError(f"smallest eigenvalue {self.eigenvalues[0]:g} is not zero")
        if self.eigenvalues.min() < -tol:
            raise ValueError("spectrum is not positive semidefinite")


def spectrum(L) -> Spectrum:
    """All eigenvalues of a Laplacian, ascending."""
    L = check_laplacian(L)
    return Spectrum(linalg.eigvalsh(L))


def _complement_basis(n: int) -> np.ndarray:
    # Householder reflector sending e_0 to 1/sqrt(n); its other columns are an
    # orthonormal basis of the complement of the all-ones vector.
    v = np.full(n, 1.0 / np.sqrt(n))
    v[0] -= 1.0
    H = np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)
    return H[:, 1:]


def fiedler_value(L) -> float:
    """Second-smallest Laplacian eigenvalue.

    The all-ones null direction is deflated exactly by projecting onto an
    orthonormal basis of its complement; the smallest eigenvalue of the
    projected ``(n-1) x (n-1)`` matrix is the algebraic connectivity.
    """
    L = check_laplacian(L)
    n = L.shape[0]
    if n < 2:
        raise ValueError("algebraic connectivity needs at least two vertices")
    Q = _complement_basis(n)
    M = Q.T @ L @ Q
    M = 0.5 * (M + M.T)
    return float(linalg.eigvalsh(M, subset_by_index=[0, 0])[0])
