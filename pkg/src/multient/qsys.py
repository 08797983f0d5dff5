"""Multipartite states: layouts, partial operations and state constructors."""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ValidationError
from .gridcount import Graph, grid_graph
from .linalg import check_hermitian, eigvalsh, tensor_product

STATE_TOL = 1e-10
MAX_DENSE_QUBITS = 8


@dataclass(frozen=True)
class SystemLayout:
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims:
            raise ValidationError("layout needs at least one site")
        if any(d < 2 for d in self.dims):
            raise ValidationError(f"site dimensions must be >= 2, got {self.dims}")

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return prod(self.dims)

    def sub(self, sites: Iterable[int]) -> "SystemLayout":
        return SystemLayout(tuple(self.dims[s] for s in sorted(sites)))

    def sub_dim(self, sites: Iterable[int]) -> int:
        return prod(self.dims[s] for s in sites)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    layout: SystemLayout

    def __post_init__(self):
        m = check_hermitian(self.matrix, STATE_TOL)
        if m.shape[0] != self.layout.dim:
            raise ValidationError(
                f"matrix dimension {m.shape[0]} does not match layout {self.layout.dims}"
            )
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise ValidationError(f"trace {tr!r} differs from 1")
        lam = eigvalsh(m)[0]
        if lam < -STATE_TOL:
            raise ValidationError(f"not positive semidefinite (min eigenvalue {lam:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vector(cls, psi, dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), SystemLayout(tuple(dims)))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    @property
    def n_sites(self) -> int:
        return self.layout.n_sites

    def tensor(self) -> np.ndarray:
        return self.matrix.reshape(self.dims + self.dims)


@dataclass(frozen=True)
class Bipartition:
    a_sites: frozenset[int]
    b_sites: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "a_sites", frozenset(self.a_sites))
        object.__setattr__(self, "b_sites", frozenset(self.b_sites))
        if not self.a_sites or not self.b_sites:
            raise ValidationError("both sides of a bipartition must be nonempty")
        if self.a_sites & self.b_sites:
            raise ValidationError("bipartition sides overlap")

    @classmethod
    def split(cls, a_sites: Iterable[int], n_sites: int) -> "Bipartition":
        a = frozenset(a_sites)
        return cls(a, frozenset(range(n_sites)) - a)

    def swapped(self) -> "Bipartition":
        return Bipartition(self.b_sites, self.a_sites)

    def check(self, layout: SystemLayout) -> None:
        if self.a_sites | self.b_sites != frozenset(range(layout.n_sites)):
            raise ValidationError(
                f"cut {sorted(self.a_sites)}|{sorted(self.b_sites)} does not cover "
                f"the {layout.n_sites} sites"
            )

    def dims(self, layout: SystemLayout) -> tuple[int, int]:
        return layout.sub_dim(self.a_sites), layout.sub_dim(self.b_sites)

    def label(self) -> str:
        return "".join(map(str, sorted(self.a_sites))) + "|" + "".join(map(str, sorted(self.b_sites)))


def bipartitions(n_sites: int) -> list[Bipartition]:
    """All 2^(n-1) - 1 unordered cuts, site 0 always on the A side."""
    out = []
    for rest in range(1 << (n_sites - 1)):
        a = {0} | {i + 1 for i in range(n_sites - 1) if rest >> i & 1}
        if len(a) < n_sites:
            out.append(Bipartition.split(a, n_sites))
    return out


def _trace_out(t: np.ndarray, dims: tuple[int, ...], keep: list[int]) -> np.ndarray:
    n = len(dims)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out = [i for i in keep] + [i + n for i in keep]
    return np.einsum(t, row + col, out)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    keep = sorted(set(keep))
    if not keep:
        raise ValidationError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= rho.n_sites:
        raise ValidationError(f"site indices {keep} out of range for {rho.n_sites} sites")
    if len(keep) == rho.n_sites:
        return rho
    sub = rho.layout.sub(keep)
    m = _trace_out(rho.tensor(), rho.dims, keep).reshape(sub.dim, sub.dim)
    return DensityMatrix(m, sub)


def partial_transpose(rho: DensityMatrix, cut: Bipartition) -> np.ndarray:
    """Transpose the B-side tensor factor."""
    cut.check(rho.layout)
    return transpose_sites(rho.matrix, rho.dims, cut.b_sites)


def transpose_sites(m: np.ndarray, dims: tuple[int, ...], sites: Iterable[int]) -> np.ndarray:
    n = len(dims)
    axes = list(range(2 * n))
    for s in sites:
        axes[s], axes[s + n] = axes[s + n], axes[s]
    d = prod(dims)
    return np.transpose(np.asarray(m).reshape(dims + dims), axes).reshape(d, d)


def dephase_site(rho: DensityMatrix, site: int) -> DensityMatrix:
    if not 0 <= site < rho.n_sites:
        raise ValidationError(f"site {site} out of range")
    return DensityMatrix(dephase_matrix(rho.matrix, rho.dims, site), rho.layout)


def dephase_matrix(m: np.ndarray, dims: tuple[int, ...], site: int) -> np.ndarray:
    d = dims[site]
    shape = [1] * (2 * len(dims))
    shape[site] = d
    shape[site + len(dims)] = d
    mask = np.eye(d).reshape(shape)
    return (np.asarray(m).reshape(dims + dims) * mask).reshape(m.shape)


def permute_sites(rho: DensityMatrix, order: Sequence[int]) -> DensityMatrix:
    n = rho.n_sites
    if sorted(order) != list(range(n)):
        raise ValidationError(f"{order} is not a permutation of {n} sites")
    axes = list(order) + [o + n for o in order]
    dims = tuple(rho.dims[o] for o in order)
    d = rho.layout.dim
    m = np.transpose(rho.tensor(), axes).reshape(d, d)
    return DensityMatrix(m, SystemLayout(dims))


def regroup(rho: DensityMatrix, groups: Sequence[Sequence[int]]) -> DensityMatrix:
    """Merge each group of sites into one site; groups are laid out in the given order."""
    order = [s for g in groups for s in g]
    if any(len(g) == 0 for g in groups) or sorted(order) != list(range(rho.n_sites)):
        raise ValidationError(f"groups {groups} do not partition {rho.n_sites} sites")
    permuted = permute_sites(rho, order)
    dims = tuple(prod(rho.dims[s] for s in g) for g in groups)
    return DensityMatrix(permuted.matrix, SystemLayout(dims))


def product_state(*states: DensityMatrix) -> DensityMatrix:
    m = np.ones((1, 1), dtype=complex)
    dims: tuple[int, ...] = ()
    for s in states:
        m = tensor_product(m, s.matrix)
        dims += s.dims
    return DensityMatrix(m, SystemLayout(dims))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = prod(dims)
    return DensityMatrix(np.eye(d, dtype=complex) / d, SystemLayout(tuple(dims)))


def basis_state(bits: str) -> DensityMatrix:
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1.0
    return DensityMatrix.from_vector(psi, (2,) * len(bits))


def bell_vector() -> np.ndarray:
    return np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def werner(p: float) -> DensityMatrix:
    """p * |Phi+><Phi+| + (1 - p) * I/4."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"Werner weight p={p} outside [0, 1]")
    phi = bell_vector()
    m = p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4
    return DensityMatrix(m, SystemLayout((2, 2)))


def bell_pair() -> DensityMatrix:
    return werner(1.0)


def w_vector(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    for k in range(n):
        psi[1 << (n - 1 - k)] = 1.0
    return psi / np.sqrt(n)


def w_state(n: int) -> DensityMatrix:
    if n < 1:
        raise ValidationError("W state needs n >= 1")
    return DensityMatrix.from_vector(w_vector(n), (2,) * n)


def w_reduced(n: int, k: int) -> DensityMatrix:
    """(n-k)/n |0^k><0^k| + k/n |W_k><W_k|."""
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got n={n}, k={k}")
    zero = np.zeros(2**k, dtype=complex)
    zero[0] = 1.0
    wk = w_vector(k)
    m = (n - k) / n * np.outer(zero, zero) + k / n * np.outer(wk, wk.conj())
    return DensityMatrix(m, SystemLayout((2,) * k))


def w_reduced_compact(n: int, k: int, j: int) -> DensityMatrix:
    """Reduced W state written on span{|0^j>,|W_j>} x span{|0^(k-j)>,|W_(k-j)>}.

    The two middle diagonal entries are in the commonly quoted order, which is
    exchanged relative to a direct expansion; every spectrum used downstream
    is unchanged by the swap.
    """
    if not (1 <= j < k <= n):
        raise ValidationError(f"need 1 <= j < k <= n, got n={n}, k={k}, j={j}")
    off = np.sqrt(j * (k - j)) / n
    m = np.diag([1 - k / n, j / n, (k - j) / n, 0.0]).astype(complex)
    m[1, 2] = m[2, 1] = off
    return DensityMatrix(m, SystemLayout((2, 2)))


def graph_state_vector(graph: Graph) -> np.ndarray:
    n = graph.vertex_count
    idx = np.arange(2**n)
    bits = [(idx >> (n - 1 - v)) & 1 for v in range(n)]
    sign = np.zeros(2**n, dtype=int)
    for u, v in graph.edges:
        sign ^= bits[u] & bits[v]
    return np.where(sign, -1.0, 1.0).astype(complex) / np.sqrt(2**n)


def cluster_state(graph: Graph) -> DensityMatrix:
    """|+>^n followed by controlled-Z on every edge."""
    if graph.vertex_count > 2 * MAX_DENSE_QUBITS:
        raise CapacityError(f"cluster state limited to {2 * MAX_DENSE_QUBITS} qubits")
    return DensityMatrix.from_vector(graph_state_vector(graph), (2,) * graph.vertex_count)


def phase_cat(n: int, phi: float) -> DensityMatrix:
    """(|0...0> + e^{i phi} |1...1>) / sqrt 2."""
    if n < 1:
        raise ValidationError("cat state needs n >= 1")
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    psi[-1] += np.exp(1j * phi)
    return DensityMatrix.from_vector(psi, (2,) * n)


def bell_pairs(pairs: int) -> DensityMatrix:
    """Independent Bell pairs on qubits (0,1), (2,3), ..., one site per qubit."""
    return product_state(*[bell_pair()] * pairs)


def grid_qubit_groups(graph: Graph) -> list[list[int]]:
    """Qubit indices held by each vertex; edge e owns qubits 2e (lower vertex) and 2e+1."""
    groups: list[list[int]] = [[] for _ in range(graph.vertex_count)]
    for e, (u, v) in enumerate(graph.edges):
        groups[u].append(2 * e)
        groups[v].append(2 * e + 1)
    return groups


def grid_pair_state(rows: int, cols: int, p: float) -> DensityMatrix:
    """Werner pair on every grid edge, each vertex's qubits merged into one qudit."""
    g = grid_graph(rows, cols)
    n_qubits = 2 * len(g.edges)
    if n_qubits == 0:
        raise ValidationError("grid has no edges")
    if n_qubits > MAX_DENSE_QUBITS:
        raise CapacityError(
            f"{rows}x{cols} grid needs {n_qubits} qubits; dense construction is limited to "
            f"{MAX_DENSE_QUBITS} (use the certified grid bound for larger grids)"
        )
    pairs = product_state(*[werner(p)] * len(g.edges))
    return regroup(pairs, grid_qubit_groups(g))
