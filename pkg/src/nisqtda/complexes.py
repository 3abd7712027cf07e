"""Point clouds, resolution-scale graphs and their clique complexes.

Vertex ``i`` is row ``i`` of the input; a simplex is an int mask with bit
``i`` set iff vertex ``i`` belongs to it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ScaleCapError

ORACLE_MAX_VERTICES = 30

# Extension point: register further metrics here (name -> pairwise distance fn).
METRICS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "euclidean": lambda x: cdist(x, x, "euclidean"),
    "manhattan": lambda x: cdist(x, x, "cityblock"),
    "chebyshev-inf": lambda x: cdist(x, x, "chebyshev"),
}


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # shape (n, d)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise ValueError("points must be a 2-d array with d >= 1")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class AdjacencyGraph:
    """Undirected simple graph stored as per-vertex neighbour bitmasks."""

    n: int
    neighbors: tuple[int, ...]

    def __post_init__(self):
        if len(self.neighbors) != self.n:
            raise ValueError("need one neighbour mask per vertex")
        for i, m in enumerate(self.neighbors):
            if m >> self.n:
                raise ValueError(f"neighbour mask of vertex {i} has bits >= n")
            if (m >> i) & 1:
                raise ValueError(f"self-loop at vertex {i}")
            for j in range(self.n):
                if (m >> j) & 1 and not (self.neighbors[j] >> i) & 1:
                    raise ValueError(f"edge ({i}, {j}) is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "AdjacencyGraph":
        nbr = [0] * n
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            nbr[i] |= 1 << j
            nbr[j] |= 1 << i
        return cls(n, tuple(nbr))

    @classmethod
    def complete(cls, n: int) -> "AdjacencyGraph":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << i) for i in range(n)))

    @classmethod
    def empty(cls, n: int) -> "AdjacencyGraph":
        return cls(n, (0,) * n)

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.neighbors[i] >> j) & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.has_edge(i, j)]

    @property
    def n_edges(self) -> int:
        return sum(bin(m).count("1") for m in self.neighbors) // 2


@dataclass(frozen=True)
class FiltrationPlan:
    scales: tuple[float, ...]

    def __post_init__(self):
        if not self.scales:
            raise ValueError("filtration needs at least one scale")
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("filtration scales must be strictly increasing")


class Simplices(NamedTuple):
    masks: list[int]
    count: int
    zeta: float


def load_points(path: str | Path, max_points: int = ORACLE_MAX_VERTICES) -> PointCloud:
    """Read a header-less CSV with one point per row."""
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for r, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            vals = []
            for c, field in enumerate(row):
                try:
                    vals.append(float(field))
                except ValueError:
                    raise ValueError(f"row {r}, column {c}: cannot parse {field!r}") from None
            if rows and len(vals) != len(rows[0]):
                raise ValueError(
                    f"row {r}: inconsistent dimension {len(vals)} (expected {len(rows[0])})"
                )
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: empty point cloud")
    if len(rows) > max_points:
        raise ScaleCapError(f"{len(rows)} points exceed the cap of {max_points}")
    return PointCloud(np.array(rows))


def pairwise_distances(pc: PointCloud, metric: str = "euclidean") -> np.ndarray:
    try:
        fn = METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}") from None
    return fn(pc.points)


def build_adjacency(pc: PointCloud, metric: str = "euclidean", eps_scale: float = 0.0) -> AdjacencyGraph:
    """Connect every pair at distance <= ``eps_scale`` (ties included)."""
    if eps_scale < 0:
        raise ValueError("eps_scale must be nonnegative")
    dist = pairwise_distances(pc, metric)
    close = dist <= eps_scale
    np.fill_diagonal(close, False)
    nbr = tuple(int(sum(1 << j for j in np.flatnonzero(close[i]))) for i in range(pc.n))
    return AdjacencyGraph(pc.n, nbr)


def load_edges(path: str | Path, n: int) -> AdjacencyGraph:
    """Read an ``i j`` edge list; ``#`` starts a comment."""
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'i j', got {line!r}")
            i, j = (int(p) for p in parts)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"line {lineno}: vertex out of range for n={n}")
            if i == j:
                raise ValueError(f"line {lineno}: self-loop at vertex {i}")
            edges.append((i, j))
    return AdjacencyGraph.from_edges(n, edges)


def is_clique(g: AdjacencyGraph, s: int) -> bool:
    if s == 0:
        return False
    rest = s
    while rest:
        i = (rest & -rest).bit_length() - 1
        rest &= rest - 1
        if rest & ~g.neighbors[i]:
            return False
    return True


@lru_cache(maxsize=8)
def clique_indicator(g: AdjacencyGraph) -> np.ndarray:
    """Boolean vector over all ``2**n`` masks; entry 0 (empty simplex) is False."""
    ind = np.ones(1, dtype=bool)
    for i in range(g.n):
        lower = np.arange(1 << i, dtype=np.int64)
        ok = ind & ((lower & ~g.neighbors[i]) == 0)
        ind = np.concatenate([ind, ok])
    ind[0] = False
    ind.setflags(write=False)
    return ind


def enumerate_simplices(g: AdjacencyGraph, k: int, max_vertices: int = ORACLE_MAX_VERTICES) -> Simplices:
    """All order-``k`` simplices (``k+1``-cliques) in ascending mask order."""
    if g.n > max_vertices:
        raise ScaleCapError(f"n={g.n} exceeds the oracle cap of {max_vertices}")
    if not 0 <= k <= g.n - 1:
        raise ValueError(f"order k={k} outside [0, {g.n - 1}]")
    # (clique mask, common neighbours above its largest vertex)
    level = [(1 << v, g.neighbors[v] >> (v + 1) << (v + 1)) for v in range(g.n)]
    for _ in range(k):
        nxt = []
        for mask, cand in level:
            while cand:
                low = cand & -cand
                v = low.bit_length() - 1
                cand ^= low
                nxt.append((mask | low, cand & g.neighbors[v]))
        level = nxt
    masks = sorted(m for m, _ in level)
    return Simplices(masks, len(masks), len(masks) / math.comb(g.n, k + 1))


def _cycle(vertices: Sequence[int]) -> list[tuple[int, int]]:
    return [(vertices[i], vertices[(i + 1) % len(vertices)]) for i in range(len(vertices))]


def _ladder(rungs: int) -> list[tuple[int, int]]:
    # vertices 0..rungs-1 on the bottom rail, rungs..2*rungs-1 on the top
    edges = [(i, i + 1) for i in range(rungs - 1)]
    edges += [(rungs + i, rungs + i + 1) for i in range(rungs - 1)]
    edges += [(i, rungs + i) for i in range(rungs)]
    return edges


_CUBE = [(a, b) for a in range(8) for b in range(a + 1, 8) if bin(a ^ b).count("1") == 1]

PRESETS: dict[str, tuple[int, list[tuple[int, int]]]] = {
    "edge": (2, [(0, 1)]),
    "triangle": (3, [(0, 1), (1, 2), (0, 2)]),
    "square": (4, _cycle([0, 1, 2, 3])),
    "k4": (4, [(i, j) for i in range(4) for j in range(i + 1, 4)]),
    "two-squares": (8, _cycle([0, 1, 2, 3]) + _cycle([4, 5, 6, 7])),
    "cube": (8, _CUBE),
    # cube minus one edge: four square faces survive
    "four-squares": (8, [e for e in _CUBE if e != (0, 1)]),
    "two-squares-diagonals": (
        8,
        _cycle([0, 1, 2, 3]) + [(0, 2), (1, 3)] + _cycle([4, 5, 6, 7]) + [(4, 6), (5, 7)],
    ),
    "square-dangling": (8, _cycle([0, 1, 2, 3]) + [(0, 4), (1, 5), (2, 6), (3, 7)]),
    "two-squares-bridged": (8, _cycle([0, 1, 2, 3]) + _cycle([4, 5, 6, 7]) + [(1, 4), (2, 7)]),
    "three-squares": (8, _ladder(4)),
    "five-squares": (12, _ladder(6)),
}


def preset_complex(name: str) -> AdjacencyGraph:
    try:
        n, edges = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return AdjacencyGraph.from_edges(n, edges)


def filtration_scales(pc: PointCloud, metric: str = "euclidean", strategy: str = "all-pairwise",
                      count: int | None = None) -> FiltrationPlan:
    """Resolution scales for a persistence sweep.

    ``all-pairwise`` returns the sorted distinct pairwise distances;
    ``uniform`` returns ``count`` evenly spaced values on ``(0, max]``.
    """
    if pc.n < 2:
        raise ValueError("need at least two points")
    dist = pairwise_distances(pc, metric)
    upper = dist[np.triu_indices(pc.n, 1)]
    if strategy == "all-pairwise":
        scales = np.unique(upper)
        scales = scales[scales > 0] if scales[0] == 0 and len(scales) > 1 else scales
    elif strategy == "uniform":
        if not count or count < 1:
            raise ValueError("uniform strategy needs count >= 1")
        top = float(upper.max())
        scales = top * np.arange(1, count + 1) / count
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return FiltrationPlan(tuple(float(s) for s in scales))
