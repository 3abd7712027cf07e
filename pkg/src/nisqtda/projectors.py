"""Diagonal data projectors and the data-defined Laplacian.

``P_Gamma`` keeps basis states that are cliques of the graph, ``P_k`` keeps
states of popcount ``k + 1``.  Both are 0/1 diagonals, so they commute and
are idempotent.  By default the empty simplex is rejected by ``P_Gamma``;
with it the pipeline would compute reduced homology.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._bits import popcounts
from .boundary import _apply_B
from .complexes import AdjacencyGraph, clique_indicator
from .qstate import NORM_TOL, StateVector, _as_generator


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    state: StateVector
    success_prob: float


@lru_cache(maxsize=8)
def complex_mask(g: AdjacencyGraph, include_null: bool = False) -> np.ndarray:
    keep = clique_indicator(g).astype(np.float64)
    keep[0] = 1.0 if include_null else 0.0
    keep.setflags(write=False)
    return keep


@lru_cache(maxsize=64)
def order_mask(n: int, k: int) -> np.ndarray:
    keep = (popcounts(n) == k + 1).astype(np.float64)
    keep.setflags(write=False)
    return keep


def _diag(amps: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return amps * mask.reshape(mask.shape + (1,) * (amps.ndim - 1))


def _project(v: StateVector, mask: np.ndarray) -> ProjectionResult:
    before = v.norm2
    out = StateVector(v.n, _diag(v.amps, mask))
    prob = out.norm2 / before if before > 0 else 0.0
    return ProjectionResult(out, prob)


def project_complex(v: StateVector, g: AdjacencyGraph, include_null: bool = False) -> ProjectionResult:
    if v.n != g.n:
        raise ValueError(f"state on n={v.n} but graph on n={g.n}")
    return _project(v, complex_mask(g, include_null))


def project_order(v: StateVector, k: int) -> ProjectionResult:
    if not 0 <= k <= v.n - 1:
        raise ValueError(f"order k={k} outside [0, {v.n - 1}]")
    return _project(v, order_mask(v.n, k))


def _laplacian(amps: np.ndarray, n: int, keep: np.ndarray, order: np.ndarray) -> np.ndarray:
    inner = keep * order
    x = _diag(amps, inner)
    x = _diag(_apply_B(x, n), keep)
    return _diag(_apply_B(x, n), inner)


def laplacian_apply(v: StateVector, g: AdjacencyGraph, k: int, include_null: bool = False) -> StateVector:
    """``P_k P_Gamma B P_Gamma B P_Gamma P_k v`` (the unscaled order-k Laplacian)."""
    if v.n != g.n:
        raise ValueError(f"state on n={v.n} but graph on n={g.n}")
    keep = complex_mask(g, include_null)
    return StateVector(v.n, _laplacian(v.amps, v.n, keep, order_mask(v.n, k)))


@dataclass(frozen=True)
class RoundRobinSchedule:
    n: int
    rounds: tuple[tuple[tuple[int, int], ...], ...]

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "rounds": [[list(p) for p in r] for r in self.rounds]})

    @classmethod
    def from_json(cls, text: str) -> "RoundRobinSchedule":
        data = json.loads(text)
        return cls(data["n"], tuple(tuple(tuple(p) for p in r) for r in data["rounds"]))


def round_robin_schedule(n: int) -> RoundRobinSchedule:
    """Circle-method pairing: every vertex pair exactly once, disjoint within a round.

    Odd ``n`` gets a phantom vertex whose pairs are dropped.
    """
    if n < 2:
        raise ValueError("need at least two vertices")
    m = n + (n % 2)
    fixed, ring = m - 1, list(range(m - 1))
    rounds = []
    for _ in range(m - 1):
        pairs = [(ring[0], fixed)] + [(ring[i], ring[m - 1 - i]) for i in range(1, m // 2)]
        rounds.append(tuple(tuple(sorted(p)) for p in pairs if max(p) < n))
        ring = ring[1:] + ring[:1]
    return RoundRobinSchedule(n, tuple(rounds))


def project_complex_montecarlo(v: StateVector, g: AdjacencyGraph, shots: int, rng,
                               include_null: bool = False) -> tuple[int, int]:
    """Repeat measure-and-check ``shots`` times; return ``(accepted, attempts)``."""
    if abs(v.norm2 - 1.0) > NORM_TOL:
        raise ValueError("Monte Carlo projection expects a unit-norm state")
    probs = np.abs(v.amps) ** 2
    outcomes = _as_generator(rng).choice(probs.size, size=shots, p=probs / probs.sum())
    keep = complex_mask(g, include_null)
    return int(keep[outcomes].sum()), shots
