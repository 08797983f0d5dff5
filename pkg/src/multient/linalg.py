"""Dense Hermitian kernel.

All matrices are plain complex ``numpy`` arrays. Hermiticity is checked with an
explicit absolute tolerance before any spectral routine runs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

HERMITIAN_TOL = 1e-10
MACHINE_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(x) -> np.ndarray:
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermiticity_defect(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(h)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValidationError(f"matrix is not Hermitian (max |H - H^dag| = {defect:.3e} > {tol:.1e})")
    return (m + m.conj().T) / 2


def allclose(a, b, atol: float) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair (p, q) exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(h: np.ndarray, rel_tol: float = 1e-13, max_sweeps: int = 60):
    """Cyclic complex Jacobi with a parallel (round-robin) pair ordering.

    Each round applies n/2 commuting plane rotations at once. Stops when the
    off-diagonal Frobenius norm drops below ``rel_tol * ||H||_F``.
    Returns unsorted ``(eigenvalues, eigenvectors)``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n < 2:
        return np.real(np.diag(a)).copy(), v
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    target = rel_tol * scale
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p, q in rounds:
            hpq = a[p, q]
            mag = np.abs(hpq)
            active = mag > 1e-300
            if not np.any(active):
                continue
            u = np.where(active, hpq / np.where(active, mag, 1.0), 1.0)
            app = a[p, p].real
            aqq = a[q, q].real
            safe = np.where(active, mag, 1.0)
            tau = (aqq - app) / (2.0 * safe)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # G = diag(.., conj(u) at q, ..) . R(c, s); H <- G^dag H G, V <- V G
            col_p = a[:, p].copy()
            col_q = a[:, q].copy()
            a[:, p] = col_p * c - col_q * (s * np.conj(u))
            a[:, q] = col_p * s + col_q * (c * np.conj(u))
            row_p = a[p, :].copy()
            row_q = a[q, :].copy()
            a[p, :] = c[:, None] * row_p - (s * u)[:, None] * row_q
            a[q, :] = s[:, None] * row_p + (c * u)[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = vp * c - vq * (s * np.conj(u))
            v[:, q] = vp * s + vq * (c * np.conj(u))
    return np.real(np.diag(a)).copy(), v


def hermitian_eig(h, tol: float = HERMITIAN_TOL, method: str = "lapack") -> Spectrum:
    """Full spectrum of a Hermitian matrix, eigenvalues sorted descending.

    ``method="jacobi"`` runs the in-house cyclic Jacobi solver; the default
    ``"lapack"`` delegates to ``numpy.linalg.eigh``.
    """
    m = check_hermitian(h, tol)
    if method == "lapack":
        w, v = np.linalg.eigh(m)
    elif method == "jacobi":
        w, v = jacobi_eigh(m)
    else:
        raise ValidationError(f"unknown eigensolver {method!r}")
    order = np.argsort(w, kind="stable")[::-1]
    return Spectrum(np.asarray(w)[order], np.asarray(v)[:, order])


def eigvalsh(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending eigenvalues (cheap path, no eigenvectors)."""
    return np.linalg.eigvalsh(check_hermitian(h, tol))


def trace_norm(x, tol: float = HERMITIAN_TOL) -> float:
    """Half the sum of absolute eigenvalues."""
    return 0.5 * float(np.sum(np.abs(eigvalsh(x, tol))))


def psd_project(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Nearest positive semidefinite matrix in Frobenius norm."""
    m = check_hermitian(h, tol)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.conj().T
    return (out + out.conj().T) / 2


def tensor_product(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return np.linalg.eigh(random_hermitian(dim, rng))[1]
