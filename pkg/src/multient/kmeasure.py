"""Distance-to-biseparable per subset, and its sum over subsets.

``delta_bounds`` brackets the minimum over bipartitions of the trace distance
to states separable across that bipartition. ``k_measure`` sums it over all
subsets of at least two sites. Large instances go through the structured
evaluators instead: ``k_w_lower`` for W states and ``k_grid_lower`` for grids
of entangled pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .entanglement import (
    dephasing_separability_certificate,
    neg_distance_lb,
    ppt_two_qubit_certificate,
    product_certificate,
    w_negativity,
)
from .errors import CapacityError, ValidationError
from .gridcount import (
    MAX_ENUM_VERTICES,
    comb_lower_bound,
    count_connected_subsets,
    grid_graph,
    is_connected_subset,
)
from .qsys import (
    Bipartition,
    DensityMatrix,
    bipartitions,
    grid_pair_state,
    partial_trace,
    werner,
)
from .sepdist import (
    BoundInterval,
    SolverConfig,
    certified_lower,
    ppt_distance,
    separable_upper,
)

MAX_EXHAUSTIVE_SITES = 8


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_sites(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _zero_certificate(rho: DensityMatrix, cut: Bipartition):
    for side in (cut.a_sites, cut.b_sites):
        if len(side) == 1:
            (site,) = side
            cert = dephasing_separability_certificate(rho, site)
            if cert is not None:
                return cert
    cert = ppt_two_qubit_certificate(rho, cut)
    if cert is not None:
        return cert
    return product_certificate(rho, cut)


def _pt_exact_cut(rho: DensityMatrix, cut: Bipartition) -> bool:
    return sorted(cut.dims(rho.layout)) in ([2, 2], [2, 3])


def cut_bounds(rho: DensityMatrix, cut: Bipartition, cfg: SolverConfig) -> BoundInterval:
    """Bracket the trace distance to states separable across one cut."""
    cert = _zero_certificate(rho, cut)
    if cert is not None:
        return BoundInterval.zero(cert.kind)
    if _pt_exact_cut(rho, cut):
        return ppt_distance(rho, cut, cfg)
    upper, upper_kind, sigma = separable_upper(rho, cut)
    lower, lower_kind = certified_lower(rho, cut, cfg, None, upper)
    lower = min(lower, upper)
    return BoundInterval(lower, upper, True, {"lower": lower_kind, "upper": upper_kind}, sigma)


def delta_bounds(rho_s: DensityMatrix, cfg: SolverConfig | None = None) -> BoundInterval:
    """Bounds on min over bipartitions of the distance to the separable set."""
    cfg = cfg or SolverConfig()
    if rho_s.n_sites < 2:
        raise ValidationError("distance to biseparable states needs at least two sites")
    cuts = bipartitions(rho_s.n_sites)
    for cut in cuts:
        cert = _zero_certificate(rho_s, cut)
        if cert is not None:
            out = BoundInterval.zero(cert.kind)
            out.certificate["cut"] = cut.label()
            return out
    results = [(cut, cut_bounds(rho_s, cut, cfg)) for cut in cuts]
    lo_cut, lo = min(results, key=lambda cr: cr[1].lower)
    up_cut, up = min(results, key=lambda cr: cr[1].upper)
    return BoundInterval(
        lower=lo.lower,
        upper=up.upper,
        converged=all(r.converged for _, r in results),
        certificate={
            "lower": f"{lo.certificate['lower']}@{lo_cut.label()}",
            "upper": f"{up.certificate['upper']}@{up_cut.label()}",
        },
        witness=up.witness,
        iterations=sum(r.iterations for _, r in results),
    )


@dataclass
class SubsetEntry:
    mask: int
    bounds: BoundInterval
    method: str

    def to_dict(self) -> dict:
        return {"mask": self.mask, "sites": mask_sites(self.mask), "method": self.method, **self.bounds.to_dict()}


@dataclass
class KReport:
    n_sites: int
    per_subset: list[SubsetEntry] = field(default_factory=list)
    zero_subsets: list[SubsetEntry] = field(default_factory=list)
    k_lower: float = 0.0
    k_upper: float = 0.0
    converged: bool = True
    include_full: bool = True

    @property
    def skipped_zero(self) -> int:
        return len(self.zero_subsets)

    @property
    def tight(self) -> bool:
        return all(e.bounds.gap <= 1e-3 for e in self.per_subset)

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "k_lower": self.k_lower,
            "k_upper": self.k_upper,
            "converged": self.converged,
            "include_full": self.include_full,
            "skipped_zero": self.skipped_zero,
            "per_subset": [e.to_dict() for e in self.per_subset],
            "zero_subsets": [e.to_dict() for e in self.zero_subsets],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KReport":
        def entry(e):
            return SubsetEntry(e["mask"], BoundInterval.from_dict(e), e["method"])

        return cls(
            n_sites=d["n_sites"],
            per_subset=[entry(e) for e in d["per_subset"]],
            zero_subsets=[entry(e) for e in d["zero_subsets"]],
            k_lower=d["k_lower"],
            k_upper=d["k_upper"],
            converged=d["converged"],
            include_full=d["include_full"],
        )


def k_measure(rho: DensityMatrix, cfg: SolverConfig | None = None, include_full: bool = True) -> KReport:
    """Sum of subset distances over every subset with at least two sites."""
    cfg = cfg or SolverConfig()
    n = rho.n_sites
    if n > MAX_EXHAUSTIVE_SITES:
        raise CapacityError(
            f"{n} sites exceeds the exhaustive limit of {MAX_EXHAUSTIVE_SITES}; "
            "use k_w_lower or k_grid_lower for structured states"
        )
    report = KReport(n_sites=n, include_full=include_full)
    full = (1 << n) - 1
    for mask in range(1, full + 1):
        if popcount(mask) < 2 or (mask == full and not include_full):
            continue
        rho_s = partial_trace(rho, mask_sites(mask))
        bounds = delta_bounds(rho_s, cfg)
        if bounds.upper == 0.0 and bounds.lower == 0.0 and bounds.iterations == 0 and "cut" in bounds.certificate:
            report.zero_subsets.append(SubsetEntry(mask, bounds, "certified-zero"))
        else:
            report.per_subset.append(SubsetEntry(mask, bounds, "bounded"))
    for e in sorted(report.per_subset, key=lambda e: e.mask):
        report.k_lower += e.bounds.lower
        report.k_upper += e.bounds.upper
        report.converged &= e.bounds.converged
    return report


def w_delta_lower(n: int, k: int) -> tuple[float, int]:
    """Negativity bound for a k-qubit W marginal, minimised over cut sizes j <= k/2."""
    values = [(neg_distance_lb(w_negativity(n, k, j), 2**j, 2 ** (k - j)), j) for j in range(1, k // 2 + 1)]
    return min(values)


@dataclass
class WKRow:
    k: int
    subsets: int
    delta_lower: float
    argmin_j: int

    def to_dict(self) -> dict:
        return {"k": self.k, "subsets": self.subsets, "delta_lower": self.delta_lower, "argmin_j": self.argmin_j}


def k_w_table(n: int) -> list[WKRow]:
    if n < 2:
        raise ValidationError("W-state sum needs n >= 2")
    rows = []
    for k in range(2, n + 1):
        value, j = w_delta_lower(n, k)
        rows.append(WKRow(k, comb(n, k), value, j))
    return rows


def k_w_lower(n: int) -> float:
    """Certified lower bound on the subset sum for the n-qubit W state."""
    return float(sum(row.subsets * row.delta_lower for row in k_w_table(n)))


def k_paper_w_formula(n: int) -> tuple[Fraction, Fraction]:
    """Both sides of sum_k C(n,k) k/(8n) = (2^n - 2)/16, in exact rationals."""
    if n < 2:
        raise ValidationError("need n >= 2")
    lhs = sum(Fraction(comb(n, k) * k, 8 * n) for k in range(2, n + 1))
    rhs = Fraction(2**n - 2, 16)
    return lhs, rhs


@dataclass
class GridBound:
    rows: int
    cols: int
    p: float
    n_connected: int
    n_exact: bool
    delta: BoundInterval

    @property
    def k_lower(self) -> float:
        return self.n_connected * self.delta.lower

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "p": self.p,
            "N": self.n_connected,
            "N_method": "exact" if self.n_exact else "comb-lower-bound",
            "delta": self.delta.lower,
            "delta_upper": self.delta.upper,
            "delta_certificate": self.delta.certificate.get("lower", ""),
            "delta_upper_certificate": self.delta.certificate.get("upper", ""),
            "k_lower": self.k_lower,
            "converged": self.delta.converged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridBound":
        delta = BoundInterval(
            d["delta"],
            d["delta_upper"],
            d["converged"],
            {"lower": d["delta_certificate"], "upper": d["delta_upper_certificate"]},
        )
        return cls(d["rows"], d["cols"], d["p"], d["N"], d["N_method"] == "exact", delta)


def k_grid_lower(rows: int, cols: int, p: float, cfg: SolverConfig | None = None) -> GridBound:
    """N * delta, with N the connected subsets of size >= 2 and delta the edge-pair distance."""
    cfg = cfg or SolverConfig()
    g = grid_graph(rows, cols)
    if not g.edges:
        raise ValidationError("grid needs at least one edge")
    edge = werner(p)
    delta = ppt_distance(edge, Bipartition.split([0], 2), cfg)
    if g.vertex_count <= MAX_ENUM_VERTICES:
        n_conn, exact = count_connected_subsets(g, 2), True
    else:
        n_conn, exact = comb_lower_bound(rows, cols), False
    return GridBound(rows, cols, p, n_conn, exact, delta)


@dataclass
class GridCheck:
    mask: int
    connected: bool
    bounds: BoundInterval
    passed: bool


def k_grid_verify_small(rows: int, cols: int, p: float, cfg: SolverConfig | None = None) -> dict:
    """Evaluate every subset of a dense grid pair state against the edge distance."""
    cfg = cfg or SolverConfig()
    g = grid_graph(rows, cols)
    rho = grid_pair_state(rows, cols, p)
    delta = ppt_distance(werner(p), Bipartition.split([0], 2), cfg)
    checks = []
    for mask in range(1, 1 << g.vertex_count):
        if popcount(mask) < 2:
            continue
        bounds = delta_bounds(partial_trace(rho, mask_sites(mask)), cfg)
        connected = is_connected_subset(g, mask)
        if connected:
            ok = bounds.lower >= delta.lower - 1e-3
        else:
            ok = bounds.lower == 0.0 and bounds.upper == 0.0
        checks.append(GridCheck(mask, connected, bounds, ok))
    return {
        "rows": rows,
        "cols": cols,
        "p": p,
        "delta": delta,
        "checks": checks,
        "all_passed": all(c.passed for c in checks),
    }
