"""Grid graphs, exact connected-subset counting and the comb lower bound."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .errors import CapacityError, ValidationError

MAX_ENUM_VERTICES = 30
_CHUNK = 1 << 20


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValidationError("graph needs at least one vertex")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"self-loop at {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValidationError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        nb = [0] * self.vertex_count
        for u, v in self.edges:
            nb[u] |= 1 << v
            nb[v] |= 1 << u
        return tuple(nb)

    def degree(self, v: int) -> int:
        return bin(self.neighbor_masks[v]).count("1")

    def incident_edges(self, v: int) -> list[int]:
        return [i for i, e in enumerate(self.edges) if v in e]


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def grid_graph(rows: int, cols: int) -> Graph:
    """4-neighbour grid, vertex ``r * cols + c``, edges in lexicographic order."""
    if rows < 1 or cols < 1:
        raise ValidationError("grid needs rows, cols >= 1")
    edges = []
    for r, c in product(range(rows), range(cols)):
        v = r * cols + c
        if c + 1 < cols:
            edges.append((v, v + 1))
        if r + 1 < rows:
            edges.append((v, v + cols))
    return Graph(rows * cols, tuple(sorted(edges)))


def is_connected_subset(g: Graph, s: int) -> bool:
    if s <= 0:
        raise ValidationError("subset must be nonempty")
    if s >> g.vertex_count:
        raise ValidationError("subset mask has bits beyond the vertex count")
    nb = g.neighbor_masks
    reach = s & -s
    frontier = reach
    while frontier:
        grow = 0
        f = frontier
        while f:
            low = f & -f
            grow |= nb[low.bit_length() - 1]
            f ^= low
        grow &= s & ~reach
        reach |= grow
        frontier = grow
    return reach == s


def _count_chunk(nb: np.ndarray, lo: int, hi: int, min_size: int) -> int:
    masks = np.arange(lo, hi, dtype=np.uint64)
    masks = masks[np.bitwise_count(masks) >= min_size]
    if masks.size == 0:
        return 0
    reach = masks & (~masks + np.uint64(1))
    bits = [np.uint64(1) << np.uint64(v) for v in range(nb.size)]
    while True:
        grow = np.zeros_like(reach)
        for v, bit in enumerate(bits):
            grow |= np.where(reach & bit, nb[v], np.uint64(0))
        new = (reach | grow) & masks
        if np.array_equal(new, reach):
            break
        reach = new
    return int(np.count_nonzero(reach == masks))


def count_connected_subsets(g: Graph, min_size: int = 2) -> int:
    """Exact number of vertex subsets of size >= min_size inducing a connected subgraph."""
    n = g.vertex_count
    if n > MAX_ENUM_VERTICES:
        raise CapacityError(
            f"{n} vertices exceeds the enumeration budget of {MAX_ENUM_VERTICES}; "
            "use comb_lower_bound for a certified lower bound"
        )
    nb = np.array(g.neighbor_masks, dtype=np.uint64)
    total = 0
    top = 1 << n
    for lo in range(1, top, _CHUNK):
        total += _count_chunk(nb, lo, min(lo + _CHUNK, top), max(min_size, 1))
    return total


def chain_run_count(m: int, min_size: int = 2) -> int:
    """Contiguous runs of length >= min_size in a path of m vertices."""
    return sum(m - L + 1 for L in range(max(min_size, 1), m + 1))


@dataclass(frozen=True)
class CombSpec:
    rows: int
    cols: int
    blue: frozenset[int]
    free: frozenset[int]

    def graph(self) -> Graph:
        return grid_graph(self.rows, self.cols)

    def validate(self) -> None:
        g = self.graph()
        everything = frozenset(range(self.rows * self.cols))
        if self.blue & self.free or self.blue | self.free != everything:
            raise ValidationError("blue and free must partition the vertices")
        if not self.blue or not is_connected_subset(g, _mask(self.blue)):
            raise ValidationError("blue vertices are not connected")
        nb = g.neighbor_masks
        blue = _mask(self.blue)
        lonely = [v for v in sorted(self.free) if not nb[v] & blue]
        if lonely:
            raise ValidationError(f"free vertices {lonely} have no blue neighbour")


def _mask(vs) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _tooth_columns(cols: int, offset: int) -> list[int]:
    teeth = list(range(offset, cols, 3))
    if not teeth or teeth[-1] < cols - 2:
        teeth.append(cols - 1)
    return teeth


def _comb_cells(rows: int, cols: int, offset: int, spine: int) -> set[tuple[int, int]]:
    cells = {(spine, c) for c in range(cols)}
    cells |= {(r, t) for t in _tooth_columns(cols, offset) for r in range(spine, rows)}
    return cells


def _dominating_connected(cells: set[tuple[int, int]], rows: int, cols: int) -> bool:
    g = grid_graph(rows, cols)
    m = _mask(r * cols + c for r, c in cells)
    if m == 0 or not is_connected_subset(g, m):
        return False
    nb = g.neighbor_masks
    return all(m >> v & 1 or nb[v] & m for v in range(rows * cols))


def _prune(cells: set[tuple[int, int]], rows: int, cols: int) -> set[tuple[int, int]]:
    for cell in sorted(cells, key=lambda rc: (-rc[0], rc[1])):
        trial = cells - {cell}
        if len(trial) >= 2 and _dominating_connected(trial, rows, cols):
            cells = trial
    return cells


def comb_spec(rows: int, cols: int, optimize: bool = True) -> CombSpec:
    """Connected "comb" of blue vertices such that blue plus any free subset is connected.

    The plain comb is the top row plus every third column (offset 1 when the
    column count is a multiple of three, so the last column is covered).
    With ``optimize`` the better orientation, tooth offset and spine row are
    searched and redundant blue vertices are pruned greedily.
    """
    if rows < 2 or cols < 3:
        raise ValidationError(f"comb needs rows >= 2 and cols >= 3, got {rows}x{cols}")
    plain_offset = 1 if cols % 3 == 0 else 0
    best = _comb_cells(rows, cols, plain_offset, 0)
    if optimize:
        candidates = []
        for transpose in (False, True):
            r, c = (cols, rows) if transpose else (rows, cols)
            for offset, spine in product((0, 1), (0, 1)):
                if spine >= r:
                    continue
                cells = _comb_cells(r, c, offset, spine)
                if not _dominating_connected(cells, r, c):
                    continue
                cells = _prune(cells, r, c)
                if transpose:
                    cells = {(b, a) for a, b in cells}
                candidates.append(cells)
        for cells in candidates:
            if len(cells) < len(best):
                best = cells
    blue = frozenset(r * cols + c for r, c in best)
    spec = CombSpec(rows, cols, blue, frozenset(range(rows * cols)) - blue)
    spec.validate()
    return spec


def comb_lower_bound(rows: int, cols: int, optimize: bool = True) -> int:
    """2^|free|: each blue-plus-subset set is connected with size >= 2."""
    spec = comb_spec(rows, cols, optimize)
    if len(spec.blue) < 2:
        raise ValidationError("comb must have at least two blue vertices")
    return 1 << len(spec.free)
