"""Trace-norm distance to PPT states across a cut, with certified bounds.

The upper bound is always witnessed by an explicit PSD, PPT, unit-trace
matrix. Lower bounds come from three certificates:

* ``negativity``: negativity / min(dim_a, dim_b);
* ``witness``: on a 2x2 cut, tr[P rho] - max_product <ab|P|ab> for the
  Helstrom projector P of rho - sigma;
* ``ppt-dual``: tr[Y rho] - lambda_max(Y + B^Gamma) for any ||Y|| <= 1/2 and
  B >= 0, with (Y, B) found by accelerated gradient on a log-sum-exp
  smoothing; the value is re-evaluated exactly, so it is valid regardless of
  how well the optimisation went;
* ``reduction``: for qubit-refinable layouts, the best 2x2 bound over pairs
  of qubits on opposite sides (trace distance contracts under local partial
  traces, and those map separable/PPT states to separable/PPT states).

Two-qubit PPT states are separable, so on 2x2 cuts the interval also brackets
the separability distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import log2, prod, sqrt

import numpy as np

from .entanglement import neg_distance_lb, negativity
from .errors import CapacityError, UnsupportedError
from .qsys import (
    Bipartition,
    DensityMatrix,
    SystemLayout,
    partial_trace,
    transpose_sites,
)

MAX_DIM = 256
WITNESS_MARGIN = 1e-6
FEAS_TOL = 1e-9
CERTIFY_ALL = ("negativity", "witness", "ppt-dual", "reduction")


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 5000
    target_gap: float = 1e-3
    step_size: float = 0.5
    dykstra_rounds: int = 50
    seed: int = 7
    certify: tuple[str, ...] = CERTIFY_ALL
    witness_every: int = 25
    dual_iterations: int = 3000
    dual_max_dim: int = 16

    def __post_init__(self):
        if self.target_gap <= 0:
            raise ValueError("target_gap must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        unknown = set(self.certify) - set(CERTIFY_ALL)
        if unknown:
            raise ValueError(f"unknown certificates {sorted(unknown)}")


@dataclass
class BoundInterval:
    lower: float
    upper: float
    converged: bool
    certificate: dict[str, str] = field(default_factory=dict)
    witness: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "converged": self.converged,
            "certificate": dict(self.certificate),
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoundInterval":
        return cls(d["lower"], d["upper"], d["converged"], dict(d["certificate"]), None, d["iterations"])

    @classmethod
    def zero(cls, kind: str) -> "BoundInterval":
        return cls(0.0, 0.0, True, {"lower": kind, "upper": kind})


def _herm(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def _simplex(w: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, w.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.clip(w - css[rho] / (rho + 1), 0.0, None)


def _project_density(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(_herm(h))
    return _herm((v * _simplex(w)) @ v.conj().T)


class _Problem:
    """Cached geometry for one (rho, cut) pair."""

    def __init__(self, rho: DensityMatrix, cut: Bipartition):
        self.rho = rho.matrix
        self.dims = rho.dims
        self.b_sites = tuple(sorted(cut.b_sites))
        self.d = rho.layout.dim

    def gamma(self, m: np.ndarray) -> np.ndarray:
        return transpose_sites(m, self.dims, self.b_sites)

    def project_ppt(self, h: np.ndarray) -> np.ndarray:
        return self.gamma(_project_density(self.gamma(h)))

    def dykstra(self, y: np.ndarray, rounds: int) -> np.ndarray:
        x = y
        p = np.zeros_like(y)
        q = np.zeros_like(y)
        for _ in range(rounds):
            a = _project_density(x + p)
            p = x + p - a
            x_new = self.project_ppt(a + q)
            q = a + q - x_new
            done = np.max(np.abs(x_new - x)) < 1e-13
            x = x_new
            if done:
                break
        return x

    def repair(self, s: np.ndarray) -> np.ndarray:
        """Exactly feasible point: renormalise, then mix toward I/D just enough."""
        s = _herm(s)
        s = s / np.trace(s).real
        lam = min(np.linalg.eigvalsh(s)[0], np.linalg.eigvalsh(self.gamma(s))[0])
        if lam < 0:
            t = -lam / (1.0 / self.d - lam)
            s = (1 - t) * s + t * np.eye(self.d) / self.d
        return s

    def distance(self, s: np.ndarray) -> float:
        return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(_herm(self.rho - s)))))

    def infeasibility(self, s: np.ndarray) -> float:
        return max(
            -np.linalg.eigvalsh(s)[0],
            -np.linalg.eigvalsh(self.gamma(s))[0],
            abs(np.trace(s).real - 1.0),
            0.0,
        )


def marginal_product(rho: DensityMatrix, cut: Bipartition) -> np.ndarray:
    """rho_A (x) rho_B, returned in rho's own site order."""
    a = sorted(cut.a_sites)
    b = sorted(cut.b_sites)
    m = np.kron(partial_trace(rho, a).matrix, partial_trace(rho, b).matrix)
    order = a + b
    n = rho.n_sites
    dims = tuple(rho.dims[o] for o in order)
    inverse = [order.index(i) for i in range(n)]
    axes = inverse + [i + n for i in inverse]
    return np.transpose(m.reshape(dims + dims), axes).reshape(m.shape)


def _initial_points(prob: _Problem, rho: DensityMatrix, cut: Bipartition) -> list[tuple[str, np.ndarray]]:
    pt = prob.gamma(prob.rho)
    lam = np.linalg.eigvalsh(pt)[0]
    d = prob.d
    if lam >= 0:
        return [("state-is-ppt", prob.rho.copy())]
    t = -lam / (1.0 / d - lam)
    points = [("depolarised", (1 - t) * prob.rho + t * np.eye(d) / d)]
    prod_m = marginal_product(rho, cut)
    prod_pt = prob.gamma(prod_m)
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if np.linalg.eigvalsh((1 - mid) * pt + mid * prod_pt)[0] >= 0:
            hi = mid
        else:
            lo = mid
    points.append(("marginal-mix", (1 - hi) * prob.rho + hi * prod_m))
    return points


def _fibonacci_sphere(k: int) -> np.ndarray:
    i = np.arange(k) + 0.5
    theta = np.arccos(1 - 2 * i / k)
    phi = np.pi * (1 + sqrt(5)) * i
    return np.stack([theta, phi], axis=1)


def separable_overlap_max(p_op: np.ndarray, cut: Bipartition | None = None, cfg: SolverConfig | None = None) -> float:
    """Best product-state overlap max <ab|P|ab> on two qubits.

    Alternating top-eigenvector ascent from a deterministic sphere grid plus
    seeded random starts. The value is the best found, i.e. a lower estimate
    of the true maximum; callers add ``WITNESS_MARGIN``.
    """
    cfg = cfg or SolverConfig()
    p_op = np.asarray(p_op, dtype=complex)
    if p_op.shape != (4, 4):
        raise UnsupportedError("product-overlap search is implemented for 2x2 cuts only")
    if cut is not None and (len(cut.a_sites) != 1 or len(cut.b_sites) != 1):
        raise UnsupportedError("product-overlap search needs single-qubit sides")
    t4 = _herm(p_op).reshape(2, 2, 2, 2)  # [i, k, j, l] = <ik|P|jl>
    rng = np.random.default_rng(cfg.seed)
    angles = np.concatenate([
        _fibonacci_sphere(64),
        np.stack([np.arccos(rng.uniform(-1, 1, 64)), rng.uniform(0, 2 * np.pi, 64)], axis=1),
    ])
    a = np.stack([np.cos(angles[:, 0] / 2), np.exp(1j * angles[:, 1]) * np.sin(angles[:, 0] / 2)], axis=1)
    best = -np.inf
    prev = None
    for _ in range(200):
        mb = np.einsum("ni,ikjl,nj->nkl", a.conj(), t4, a)
        w, v = np.linalg.eigh(_herm_batch(mb))
        b = v[:, :, -1]
        ma = np.einsum("nk,ikjl,nl->nij", b.conj(), t4, b)
        w, v = np.linalg.eigh(_herm_batch(ma))
        a = v[:, :, -1]
        vals = w[:, -1]
        best = max(best, float(vals.max()))
        if prev is not None and np.max(np.abs(vals - prev)) < 1e-15:
            break
        prev = vals
    return best


def _herm_batch(m: np.ndarray) -> np.ndarray:
    return (m + np.conj(np.swapaxes(m, -1, -2))) / 2


def _is_two_qubit_cut(rho: DensityMatrix, cut: Bipartition) -> bool:
    return rho.dims == (2, 2)


def _witness_bound(prob: _Problem, sigma: np.ndarray, cfg: SolverConfig) -> float:
    w, v = np.linalg.eigh(_herm(prob.rho - sigma))
    pos = v[:, w > 1e-14]
    if pos.shape[1] == 0:
        return 0.0
    p_op = pos @ pos.conj().T
    score = float(np.trace(p_op @ prob.rho).real)
    return score - separable_overlap_max(p_op, None, cfg) - WITNESS_MARGIN


def _qubit_counts(dims: tuple[int, ...]) -> list[int] | None:
    counts = []
    for d in dims:
        q = round(log2(d))
        if 2**q != d:
            return None
        counts.append(q)
    return counts


def reduction_lower_bound(rho: DensityMatrix, cut: Bipartition, cfg: SolverConfig) -> tuple[float, str]:
    """Best two-qubit bound over qubit pairs straddling the cut."""
    counts = _qubit_counts(rho.dims)
    if counts is None:
        return 0.0, "reduction-unavailable"
    owner = [s for s, q in enumerate(counts) for _ in range(q)]
    qubits = DensityMatrix(rho.matrix, SystemLayout((2,) * len(owner)))
    a_q = [i for i, s in enumerate(owner) if s in cut.a_sites]
    b_q = [i for i, s in enumerate(owner) if s in cut.b_sites]
    sub_cfg = replace(cfg, certify=tuple(c for c in cfg.certify if c != "reduction"))
    best, where = 0.0, "reduction"
    for qa in a_q:
        for qb in b_q:
            pair = partial_trace(qubits, [qa, qb])
            pair_cut = Bipartition.split([0], 2)
            pt_min = np.linalg.eigvalsh(transpose_sites(pair.matrix, (2, 2), [1]))[0]
            if pt_min >= -1e-12:
                continue
            value = ppt_distance(pair, pair_cut, sub_cfg).lower
            if value > best:
                best, where = value, f"reduction(qubits {qa},{qb})"
    return best, where


def _clip_spectrum(h: np.ndarray, lo: float, hi: float | None) -> np.ndarray:
    w, v = np.linalg.eigh(_herm(h))
    return _herm((v * np.clip(w, lo, hi)) @ v.conj().T)


def ppt_dual_value(prob: _Problem, y: np.ndarray, b: np.ndarray) -> float:
    """Exact dual objective; a valid lower bound for any ||y|| <= 1/2, b >= 0."""
    return float(np.trace(y @ prob.rho).real - np.linalg.eigvalsh(_herm(y + prob.gamma(b)))[-1])


def ppt_dual_bound(prob: _Problem, cfg: SolverConfig, stop_at: float = np.inf) -> float:
    """Maximise the PPT dual with FISTA on a smoothed lambda_max, restarting as mu shrinks."""
    r = prob.rho
    y = np.zeros_like(r)
    b = np.zeros_like(r)
    zy, zb = y, b
    mu, t, best = 0.05, 1.0, 0.0
    for it in range(1, cfg.dual_iterations + 1):
        w, v = np.linalg.eigh(_herm(zy + prob.gamma(zb)))
        e = np.exp((w - w.max()) / mu)
        omega = (v * (e / e.sum())) @ v.conj().T
        step = mu / 2
        y_new = _clip_spectrum(zy - step * (omega - r), -0.5, 0.5)
        b_new = _clip_spectrum(zb - step * prob.gamma(omega), 0.0, None)
        t_new = (1 + sqrt(1 + 4 * t * t)) / 2
        zy = y_new + (t - 1) / t_new * (y_new - y)
        zb = b_new + (t - 1) / t_new * (b_new - b)
        y, b, t = y_new, b_new, t_new
        if it % 10 == 0:
            best = max(best, ppt_dual_value(prob, y, b))
            if best >= stop_at:
                break
        if it % 300 == 0:
            mu, t, zy, zb = max(mu / 3, 1e-5), 1.0, y, b
    return max(best, ppt_dual_value(prob, y, b))


def certified_lower(
    rho: DensityMatrix,
    cut: Bipartition,
    cfg: SolverConfig,
    sigma: np.ndarray | None = None,
    upper: float | None = None,
) -> tuple[float, str]:
    """Largest available certified lower bound on the separable (and PPT) distance."""
    cut.check(rho.layout)
    best, kind = 0.0, "trivial"
    if "negativity" in cfg.certify:
        da, db = cut.dims(rho.layout)
        value = neg_distance_lb(negativity(rho, cut).negativity, da, db)
        if value > best:
            best, kind = value, "negativity"
    if "witness" in cfg.certify and sigma is not None and _is_two_qubit_cut(rho, cut):
        value = _witness_bound(_Problem(rho, cut), sigma, cfg)
        if value > best:
            best, kind = value, "witness"
    if "reduction" in cfg.certify and not _is_two_qubit_cut(rho, cut):
        value, where = reduction_lower_bound(rho, cut, cfg)
        if value > best:
            best, kind = value, where
    if (
        "ppt-dual" in cfg.certify
        and rho.layout.dim <= cfg.dual_max_dim
        and upper is not None
        and upper - best > cfg.target_gap
    ):
        value = ppt_dual_bound(_Problem(rho, cut), cfg, stop_at=upper - cfg.target_gap / 2)
        if value > best:
            best, kind = value, "ppt-dual"
    return best, kind


def ppt_distance(rho: DensityMatrix, cut: Bipartition, cfg: SolverConfig | None = None) -> BoundInterval:
    """Bracket min ||rho - sigma||_tr over unit-trace sigma >= 0 with sigma^Gamma >= 0."""
    cfg = cfg or SolverConfig()
    cut.check(rho.layout)
    if rho.layout.dim > MAX_DIM:
        raise CapacityError(f"dimension {rho.layout.dim} exceeds the dense solver budget {MAX_DIM}")
    key = (rho.matrix.tobytes(), rho.dims, tuple(sorted(cut.a_sites)), tuple(sorted(cut.b_sites)), cfg)
    cached = _solve_cached(key)
    return BoundInterval(
        cached.lower, cached.upper, cached.converged, dict(cached.certificate),
        cached.witness.copy(), cached.iterations,
    )


@lru_cache(maxsize=4096)
def _solve_cached(key) -> BoundInterval:
    raw, dims, a_sites, b_sites, cfg = key
    d = prod(dims)
    matrix = np.frombuffer(raw, dtype=complex).reshape(d, d).copy()
    rho = DensityMatrix(matrix, SystemLayout(dims))
    return _solve(rho, Bipartition(frozenset(a_sites), frozenset(b_sites)), cfg)


def _solve(rho: DensityMatrix, cut: Bipartition, cfg: SolverConfig) -> BoundInterval:
    prob = _Problem(rho, cut)
    best_val, best_sigma, upper_kind = np.inf, None, ""
    for kind, point in _initial_points(prob, rho, cut):
        s = prob.repair(point)
        val = prob.distance(s)
        if val < best_val:
            best_val, best_sigma, upper_kind = val, s, kind
    lower, lower_kind = certified_lower(rho, cut, cfg, best_sigma, best_val)
    iterations = 0
    sigma = best_sigma
    while best_val - lower > cfg.target_gap and iterations < cfg.max_iterations:
        iterations += 1
        w, v = np.linalg.eigh(_herm(prob.rho - sigma))
        direction = (v * np.sign(w)) @ v.conj().T  # -2 x subgradient of the objective
        step = cfg.step_size * max(best_val, 1e-3) / sqrt(iterations) / sqrt(prob.d)
        sigma = prob.dykstra(sigma + step * direction, cfg.dykstra_rounds)
        feasible = prob.repair(sigma)
        val = prob.distance(feasible)
        if val < best_val:
            best_val, best_sigma, upper_kind = val, feasible, "subgradient"
        if iterations % cfg.witness_every == 0 and "witness" in cfg.certify and _is_two_qubit_cut(rho, cut):
            lb, kind = certified_lower(rho, cut, cfg, best_sigma)
            if lb > lower:
                lower, lower_kind = lb, kind
    if best_val - lower > cfg.target_gap and "witness" in cfg.certify and _is_two_qubit_cut(rho, cut):
        lb, kind = certified_lower(rho, cut, cfg, best_sigma)
        if lb > lower:
            lower, lower_kind = lb, kind
    lower = max(0.0, min(lower, best_val))
    assert prob.infeasibility(best_sigma) <= FEAS_TOL
    return BoundInterval(
        lower=float(lower),
        upper=float(best_val),
        converged=bool(best_val - lower <= cfg.target_gap),
        certificate={"lower": lower_kind, "upper": upper_kind},
        witness=best_sigma,
        iterations=iterations,
    )


def gurvits_barnum_radius(d_total: int) -> float:
    """Frobenius radius around I/D inside which every bipartite state is separable."""
    return 1.0 / sqrt(d_total * (d_total - 1))


def separable_upper(rho: DensityMatrix, cut: Bipartition) -> tuple[float, str, np.ndarray]:
    """Distance to an explicitly separable state across ``cut``.

    Candidates: the product of marginals, and rho mixed toward I/D until it
    enters the separable ball around the maximally mixed state.
    """
    d = rho.layout.dim
    prod_m = marginal_product(rho, cut)
    dist = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(_herm(rho.matrix - prod_m)))))
    best = (dist, "marginal-product", prod_m)
    centered = rho.matrix - np.eye(d) / d
    frob = np.linalg.norm(centered)
    radius = gurvits_barnum_radius(d)
    if frob > radius:
        t = 1.0 - radius / frob
        ball = (1 - t) * rho.matrix + t * np.eye(d) / d
        dist_ball = t * 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(_herm(centered)))))
        if dist_ball < best[0]:
            best = (dist_ball, "separable-ball", ball)
    else:
        best = (0.0, "separable-ball", rho.matrix.copy())
    return best
