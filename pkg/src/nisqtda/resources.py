"""Unit-cost circuit resource model for the moment circuits.

Counts use one unit per gate (a Toffoli is one gate).  Nothing is compiled;
the model only reproduces scaling shapes.
"""

from __future__ import annotations

import io
import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .complexes import AdjacencyGraph, enumerate_simplices
from .projectors import round_robin_schedule


@dataclass(frozen=True)
class BlockCost:
    block: str
    qubits: int
    gates: int
    two_qubit_gates: int
    depth: int
    # P_Gamma only: two-qubit gates per round-robin round
    round_gates: tuple[int, ...] = ()


@dataclass
class ResourceReport:
    n: int
    m: int
    k: int
    qubits_total: int
    qubits_nominal: float
    zeta_k: float | None
    zeta_bar_k: float | None
    blocks: list[BlockCost] = field(default_factory=list)
    total_gates: int = 0
    total_depth: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def count_register_qubits(n: int) -> int:
    return math.ceil(math.log2(n + 1))


def zeta(g: AdjacencyGraph, k: int) -> float:
    return enumerate_simplices(g, k).zeta


def _checked_pairs(g: AdjacencyGraph | None, k: int) -> set[tuple[int, int]] | None:
    # dense complexes check the missing edges, sparse ones the present edges
    if g is None:
        return None
    present = set(g.edges())
    if zeta(g, k) < 0.5:
        return present
    return {(i, j) for i in range(g.n) for j in range(i + 1, g.n)} - present


def block_costs(n: int, g: AdjacencyGraph | None = None, k: int = 0) -> dict[str, BlockCost]:
    """Per-block costs.  Without a graph every vertex pair is checked (worst case)."""
    if g is not None and g.n != n:
        raise ValueError(f"graph has n={g.n}, expected {n}")
    schedule = round_robin_schedule(n) if n >= 2 else None
    checked = _checked_pairs(g, k)
    round_gates = []
    for rnd in (schedule.rounds if schedule else ()):
        hits = len(rnd) if checked is None else sum(1 for p in rnd if p in checked)
        round_gates.append(2 * hits)
    c = count_register_qubits(n)
    return {
        "prep": BlockCost("prep", n, n, 0, 1),
        "B": BlockCost("B", n, n * n, n * (n - 1), n),
        "P_Gamma": BlockCost("P_Gamma", math.ceil(n / 2), sum(round_gates), sum(round_gates),
                             len(round_gates), tuple(round_gates)),
        "P_k": BlockCost("P_k", c, n * c * c, n * c * c, c * c),
    }


def phi_block_sequence(i: int) -> list[str]:
    """Blocks in application order for the degree-``i`` moment circuit.

    ``P_k`` then ``P_Gamma`` act first; power ``j`` adds ``B``, then
    ``P_k`` only for odd ``j``, then ``P_Gamma``.
    """
    if i < 0:
        raise ValueError("power must be >= 0")
    seq = ["P_k", "P_Gamma"]
    for j in range(i):
        seq.append("B")
        if j % 2 == 1:
            seq.append("P_k")
        seq.append("P_Gamma")
    return seq


def moment_circuit_depth(n: int, i: int, g: AdjacencyGraph | None = None, k: int = 0) -> int:
    costs = block_costs(n, g, k)
    return sum(costs[b].depth for b in phi_block_sequence(i))


def moment_circuit_gates(n: int, i: int, g: AdjacencyGraph | None = None, k: int = 0) -> int:
    costs = block_costs(n, g, k)
    return sum(costs[b].gates for b in phi_block_sequence(i))


def repetition_budget(zeta_k: float, i: int) -> float:
    """Expected repetitions ``zeta_k**(-2 i)``; ``inf`` when nothing survives projection."""
    if not 0 <= zeta_k <= 1:
        raise ValueError("zeta_k must lie in [0, 1]")
    if i < 0:
        raise ValueError("power must be >= 0")
    if zeta_k == 0:
        return math.inf
    return zeta_k ** (-2 * i)


def resource_report(n: int, m: int, g: AdjacencyGraph | None = None, k: int = 0) -> ResourceReport:
    costs = block_costs(n, g, k)
    seq = phi_block_sequence(m)
    z = zeta(g, k) if g is not None else None
    return ResourceReport(
        n=n, m=m, k=k,
        qubits_total=n + costs["P_Gamma"].qubits + costs["P_k"].qubits,
        qubits_nominal=1.5 * n,
        zeta_k=z,
        zeta_bar_k=None if z is None else min(z, 1 - z),
        blocks=list(costs.values()),
        total_gates=sum(costs[b].gates for b in seq),
        total_depth=sum(costs[b].depth for b in seq),
    )


def depth_curve_csv(ns, ms) -> str:
    """``n,m,depth`` rows for depth-versus-vertices plots."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "m", "depth"])
    for m in ms:
        for n in ns:
            w.writerow([n, m, moment_circuit_depth(n, m)])
    return buf.getvalue()


def affine_r2(xs, ys) -> float:
    """Coefficient of determination of a least-squares line through ``(xs, ys)``."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    total = ((ys - ys.mean()) ** 2).sum()
    return 1.0 - (resid ** 2).sum() / total if total > 0 else 1.0
