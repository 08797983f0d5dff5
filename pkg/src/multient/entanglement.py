"""Negativity, PPT tests, closed forms for reduced W states and separability certificates."""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import ValidationError
from .linalg import eigvalsh, trace_norm
from .qsys import (
    Bipartition,
    DensityMatrix,
    dephase_matrix,
    partial_trace,
    partial_transpose,
    permute_sites,
)

CERT_TOL = 1e-10


@dataclass(frozen=True)
class NegativityResult:
    negativity: float
    negative_eigenvalues: tuple[float, ...]
    cut: Bipartition
    trace_norm_form: float  # (||rho^T_B||_1 - 1) / 2


@dataclass(frozen=True)
class SeparabilityCertificate:
    kind: str  # "block-diagonal" | "ppt-two-qubit" | "product"
    cut: Bipartition
    residual: float


def negativity(rho: DensityMatrix, cut: Bipartition) -> NegativityResult:
    lam = eigvalsh(partial_transpose(rho, cut))
    neg = lam[lam < 0]
    one_norm = float(np.sum(np.abs(lam)))
    return NegativityResult(
        negativity=float(-np.sum(neg)),
        negative_eigenvalues=tuple(float(x) for x in neg),
        cut=cut,
        trace_norm_form=(one_norm - 1.0) / 2.0,
    )


def min_pt_eigenvalue(rho: DensityMatrix, cut: Bipartition) -> float:
    return float(eigvalsh(partial_transpose(rho, cut))[0])


def is_ppt(rho: DensityMatrix, cut: Bipartition, tol: float = CERT_TOL) -> bool:
    return min_pt_eigenvalue(rho, cut) >= -tol


def _check_nkj(n: int, k: int, j: int) -> None:
    if not (1 <= j < k <= n):
        raise ValidationError(f"need 1 <= j < k <= n, got n={n}, k={k}, j={j}")


def w_pt_spectrum(n: int, k: int, j: int) -> tuple[float, float, float, float]:
    """Eigenvalues of the partially transposed k-qubit W marginal across a j|k-j cut."""
    _check_nkj(n, k, j)
    half = (n - k) / (2 * n)
    root = sqrt(half * half + j * (k - j) / n**2)
    return (j / n, (k - j) / n, half + root, half - root)


def w_negativity(n: int, k: int, j: int) -> float:
    """Exact negativity of the k-qubit W marginal across a j|k-j cut."""
    _check_nkj(n, k, j)
    half = (n - k) / (2 * n)
    return sqrt(half * half + j * (k - j) / n**2) - half


def w_negativity_as_printed(n: int, k: int, j: int) -> float:
    """Variant closed form with 4j(k-j)/n under the root instead of j(k-j)/n^2.

    Kept only for the regression that shows it disagrees with the spectrum.
    """
    _check_nkj(n, k, j)
    return 0.5 * (k / n + sqrt(4 * j * (k - j) / n + (n - k) ** 2 / n**2) - 1)


def w_negativity_min_cut(n: int, k: int) -> tuple[float, int]:
    """Smallest negativity over j|k-j cuts and the j attaining it."""
    if not 2 <= k <= n:
        raise ValidationError(f"need 2 <= k <= n, got n={n}, k={k}")
    values = [(w_negativity(n, k, j), j) for j in range(1, k // 2 + 1)]
    return min(values)


def neg_distance_lb(neg: float, dim_a: int, dim_b: int) -> float:
    """Trace-distance lower bound neg / min(dim_a, dim_b) to the separable set."""
    if neg < 0:
        raise ValidationError("negativity must be nonnegative")
    return neg / min(dim_a, dim_b)


def _site_blocks(rho: DensityMatrix, site: int) -> np.ndarray:
    """Operators <alpha| rho |beta> on ``site``, one per pair of basis states of the rest."""
    t = np.moveaxis(rho.tensor(), (site, site + rho.n_sites), (0, 1))
    d = rho.dims[site]
    return t.reshape(d, d, -1)


def local_dephasing_basis(rho: DensityMatrix, site: int, seed: int = 7) -> np.ndarray:
    """Candidate basis of ``site`` in which rho may be block-diagonal.

    The blocks must commute for such a basis to exist; a seeded random Hermitian
    combination of them then has the common eigenbasis.
    """
    blocks = _site_blocks(rho, site)
    rng = np.random.default_rng(seed)
    coeff = rng.normal(size=blocks.shape[2]) + 1j * rng.normal(size=blocks.shape[2])
    mix = np.tensordot(blocks, coeff, axes=([2], [0]))
    return np.linalg.eigh(mix + mix.conj().T)[1]


def dephasing_separability_certificate(
    rho: DensityMatrix, site: int, tol: float = CERT_TOL, basis: str = "any"
) -> SeparabilityCertificate | None:
    """Certificate when rho is block-diagonal in a local basis of ``site``.

    ``basis="computational"`` restricts to the computational basis; the default
    also tries the common eigenbasis of the site's operator blocks. Block
    diagonal means rho = sum_i |e_i><e_i| (x) rho_i, separable across {site}|rest.
    """
    if not 0 <= site < rho.n_sites:
        raise ValidationError(f"site {site} out of range")
    if rho.n_sites < 2:
        return None
    residual = float(np.max(np.abs(dephase_matrix(rho.matrix, rho.dims, site) - rho.matrix)))
    if residual > tol and basis == "any":
        u = local_dephasing_basis(rho, site)
        rotated = rotate_site(rho.matrix, rho.dims, site, u)
        residual = float(np.max(np.abs(dephase_matrix(rotated, rho.dims, site) - rotated)))
    if residual > tol:
        return None
    return SeparabilityCertificate("block-diagonal", Bipartition.split([site], rho.n_sites), residual)


def rotate_site(m: np.ndarray, dims: tuple[int, ...], site: int, u: np.ndarray) -> np.ndarray:
    """(U^dag on ``site``) m (U on ``site``)."""
    n = len(dims)
    t = np.asarray(m).reshape(dims + dims)
    t = np.moveaxis(np.tensordot(u.conj().T, t, axes=([1], [site])), 0, site)
    t = np.moveaxis(np.tensordot(t, u, axes=([site + n], [0])), -1, site + n)
    return t.reshape(m.shape)


def product_certificate(
    rho: DensityMatrix, cut: Bipartition, tol: float = CERT_TOL
) -> SeparabilityCertificate | None:
    """Certificate when rho equals the product of its two marginals across ``cut``."""
    cut.check(rho.layout)
    a = sorted(cut.a_sites)
    b = sorted(cut.b_sites)
    rho_a = partial_trace(rho, a).matrix
    rho_b = partial_trace(rho, b).matrix
    ordered = permute_sites(rho, a + b).matrix
    residual = float(np.max(np.abs(np.kron(rho_a, rho_b) - ordered)))
    if residual > tol:
        return None
    return SeparabilityCertificate("product", cut, residual)


def ppt_two_qubit_certificate(
    rho: DensityMatrix, cut: Bipartition, tol: float = CERT_TOL
) -> SeparabilityCertificate | None:
    """PPT implies separable when the cut is 2x2 or 2x3."""
    da, db = cut.dims(rho.layout)
    if sorted((da, db)) not in ([2, 2], [2, 3]):
        return None
    lam = min_pt_eigenvalue(rho, cut)
    if lam < -tol:
        return None
    return SeparabilityCertificate("ppt-two-qubit", cut, max(0.0, -lam))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    return trace_norm(rho.matrix - sigma.matrix)
