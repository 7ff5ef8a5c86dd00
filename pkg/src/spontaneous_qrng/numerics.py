"""Small dense Hermitian linear algebra and entropy primitives.

Matrices are plain ``numpy`` complex arrays; the eigensolver is a cyclic
Jacobi sweep written out here so that spectra are deterministic and do not
depend on the LAPACK build.  All entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    InvalidDensity,
    InvalidDistribution,
    NoConvergence,
    NotHermitian,
)

ComplexMatrix = np.ndarray

HERMITIAN_TOL = 1e-12
DENSITY_TOL = 1e-10
MAX_SWEEPS = 100
MAX_DIM = 64


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a Hermitian matrix.

    ``eigenvalues`` are sorted descending; ``eigenvectors`` holds the matching
    unit eigenvectors as columns, each phase-fixed so that its first
    non-negligible component is real and positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _fix_phases(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        cutoff = 1e-12 * np.max(np.abs(col))
        k = int(np.argmax(np.abs(col) > cutoff))
        if col[k] != 0:
            v[:, j] = col * (abs(col[k]) / col[k])
    return v


def eig_hermitian(a, tol: float = 1e-12) -> Spectrum:
    """Diagonalize a Hermitian matrix by cyclic-by-rows complex Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops to ``tol`` times the
    Frobenius norm of the input.

    Raises:
        NotHermitian: if ``max |A - A^H| > 1e-12``.
        NoConvergence: if more than 100 sweeps are needed.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    if not is_hermitian(a):
        asym = float(np.max(np.abs(a - a.conj().T)))
        raise NotHermitian(f"max |A - A^H| = {asym:.3e} exceeds {HERMITIAN_TOL:g}")

    a = (a + a.conj().T) / 2
    v = np.eye(n, dtype=complex)
    threshold = tol * float(np.sqrt(np.sum(np.abs(a) ** 2)))

    sweeps = 0
    while _off_norm(a) > threshold:
        if sweeps >= MAX_SWEEPS:
            raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b == 0.0:
                    continue
                phase = apq / b
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * b)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array(
                    [[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex
                )
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g

    w = np.real(np.diag(a)).copy()
    order = np.argsort(-w, kind="stable")
    return Spectrum(eigenvalues=w[order], eigenvectors=_fix_phases(v[:, order]))


def _xlog2x(x: float) -> float:
    return 0.0 if x <= 0.0 else x * math.log2(x)


def check_density(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    """Validate Hermiticity and unit trace; returns the matrix as an array."""
    rho = as_matrix(rho)
    if not is_hermitian(rho):
        raise InvalidDensity("density matrix is not Hermitian")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol:
        raise InvalidDensity(f"trace {tr!r} differs from 1 by more than {tol:g}")
    return rho


def density_eigenvalues(rho) -> np.ndarray:
    """Spectrum of a density matrix with noise-level negatives clamped to 0."""
    rho = check_density(rho)
    w = eig_hermitian(rho).eigenvalues
    if w[-1] < -DENSITY_TOL:
        raise InvalidDensity(f"negative eigenvalue {w[-1]:.3e}")
    return np.where(w < 0.0, 0.0, w)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -tr(rho log2 rho) in bits."""
    w = density_eigenvalues(rho)
    return float(-sum(_xlog2x(x) for x in w)) + 0.0


def binary_entropy(p: float) -> float:
    if p < -1e-12 or p > 1.0 + 1e-12 or math.isnan(p):
        raise DomainError(f"binary entropy needs p in [0, 1], got {p!r}")
    p = min(max(p, 0.0), 1.0)
    return -_xlog2x(p) - _xlog2x(1.0 - p) + 0.0


def shannon_entropy(probs: Sequence[float]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistribution("expected a non-empty 1-d probability vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidDistribution("probabilities must be finite and non-negative")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
    return -sum(_xlog2x(float(x)) for x in p) + 0.0


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    if x < 0:
        return 0.5 * math.erfc(-x / math.sqrt(2.0))
    return 1.0 - 0.5 * math.erfc(x / math.sqrt(2.0))


def central_interval_prob(x: float) -> float:
    """2*Phi(x) - 1 without the cancellation of forming Phi first."""
    return math.erf(x / math.sqrt(2.0))
