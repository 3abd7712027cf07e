"""Exact homology of clique complexes at desk scale.

Ranks of boundary matrices are computed over the rationals with Bareiss
fraction-free elimination; dense Laplacian spectra are kept as a float
cross-check and for spectral gaps.  Homology is unreduced.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .complexes import ORACLE_MAX_VERTICES, AdjacencyGraph, enumerate_simplices
from .errors import ScaleCapError
from .projectors import _laplacian, complex_mask, order_mask

KERNEL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SparseBoundaryMatrix:
    """Restricted boundary map from order-``k`` to order-``k-1`` simplices."""

    k: int
    row_masks: tuple[int, ...]
    col_masks: tuple[int, ...]
    entries: tuple[tuple[int, int, int], ...]  # (row, col, +-1)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_masks), len(self.col_masks)

    def to_dense(self) -> np.ndarray:
        mat = np.zeros(self.shape, dtype=np.int64)
        for r, c, s in self.entries:
            mat[r, c] = s
        return mat


@dataclass(frozen=True)
class SpectralSummary:
    k: int
    n: int
    s_k: int
    eigenvalues: tuple[float, ...]
    rank: int
    beta_k: int
    beta_k_float: int
    delta_k: float | None
    delta: float | None

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _check_cap(g: AdjacencyGraph, max_vertices: int) -> None:
    if g.n > max_vertices:
        raise ScaleCapError(f"n={g.n} exceeds the oracle cap of {max_vertices}")


def boundary_matrix(g: AdjacencyGraph, k: int, max_vertices: int = ORACLE_MAX_VERTICES) -> SparseBoundaryMatrix:
    _check_cap(g, max_vertices)
    cols = enumerate_simplices(g, k, max_vertices).masks
    rows = enumerate_simplices(g, k - 1, max_vertices).masks if k >= 1 else []
    row_index = {m: r for r, m in enumerate(rows)}
    entries = []
    if k >= 1:
        for c, s in enumerate(cols):
            rest, pos = s, 0
            while rest:
                low = rest & -rest
                rest ^= low
                entries.append((row_index[s ^ low], c, -1 if pos % 2 else 1))
                pos += 1
    return SparseBoundaryMatrix(k, tuple(rows), tuple(cols), tuple(entries))


def rational_rank(mat) -> int:
    """Rank over Q of an integer matrix (Bareiss fraction-free elimination)."""
    a = [[int(x) for x in row] for row in np.asarray(mat, dtype=np.int64).tolist()]
    if not a or not a[0]:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank, prev = 0, 1
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, n_rows):
            f = a[r][col]
            row_r, row_p = a[r], a[rank]
            for c in range(col, n_cols):
                row_r[c] = (p * row_r[c] - f * row_p[c]) // prev
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def hodge_laplacian(g: AdjacencyGraph, k: int, max_vertices: int = ORACLE_MAX_VERTICES) -> np.ndarray:
    """Dense ``del_k^T del_k + del_{k+1} del_{k+1}^T`` on the order-``k`` simplices."""
    down = boundary_matrix(g, k, max_vertices).to_dense().astype(float)
    lap = down.T @ down
    if k + 1 <= g.n - 1:
        up = boundary_matrix(g, k + 1, max_vertices).to_dense().astype(float)
        if up.size:
            lap = lap + up @ up.T
    return lap


def laplacian_spectrum(g: AdjacencyGraph, k: int, max_vertices: int = ORACLE_MAX_VERTICES,
                       tol: float = KERNEL_TOL) -> SpectralSummary:
    lap = hodge_laplacian(g, k, max_vertices)
    eig = np.linalg.eigvalsh(lap) if lap.size else np.zeros(0)
    nonzero = eig[eig > tol]
    beta = int((eig <= tol).sum())
    delta_k = float(nonzero.min()) if nonzero.size else None
    return SpectralSummary(
        k=k, n=g.n, s_k=lap.shape[0], eigenvalues=tuple(float(x) for x in eig),
        rank=lap.shape[0] - beta, beta_k=beta, beta_k_float=beta,
        delta_k=delta_k, delta=None if delta_k is None else delta_k / g.n,
    )


def exact_betti(g: AdjacencyGraph, k: int, max_vertices: int = ORACLE_MAX_VERTICES,
                tol: float = KERNEL_TOL) -> SpectralSummary:
    """Betti number from rational boundary ranks, with the float spectrum attached."""
    spec = laplacian_spectrum(g, k, max_vertices, tol)
    rank_down = rational_rank(boundary_matrix(g, k, max_vertices).to_dense()) if k >= 1 else 0
    rank_up = rational_rank(boundary_matrix(g, k + 1, max_vertices).to_dense()) if k + 1 <= g.n - 1 else 0
    beta = spec.s_k - rank_down - rank_up
    return SpectralSummary(
        k=k, n=g.n, s_k=spec.s_k, eigenvalues=spec.eigenvalues, rank=spec.s_k - beta,
        beta_k=beta, beta_k_float=spec.beta_k_float, delta_k=spec.delta_k, delta=spec.delta,
    )


def pipeline_equivalence_check(g: AdjacencyGraph, k: int, max_vertices: int = 8) -> float:
    """Max deviation between the projector pipeline and the Hodge Laplacian.

    Also counts any amplitude the pipeline leaks outside the order-``k``
    simplices of the complex.
    """
    _check_cap(g, max_vertices)
    cols = enumerate_simplices(g, k).masks
    if not cols:
        return 0.0
    basis = np.zeros((1 << g.n, len(cols)))
    basis[cols, np.arange(len(cols))] = 1.0
    out = _laplacian(basis, g.n, complex_mask(g, False), order_mask(g.n, k))
    restricted = out[cols, :]
    out[cols, :] = 0.0
    dev = np.abs(restricted - hodge_laplacian(g, k)).max()
    return float(max(dev, np.abs(out).max()))


def euler_characteristics(g: AdjacencyGraph, max_vertices: int = ORACLE_MAX_VERTICES) -> tuple[int, int]:
    """``(sum (-1)^k |S_k|, sum (-1)^k beta_k)``; equal for every complex."""
    by_count = by_betti = 0
    for k in range(g.n):
        s = enumerate_simplices(g, k, max_vertices).count
        if s == 0:
            break
        by_count += (-1) ** k * s
        by_betti += (-1) ** k * exact_betti(g, k, max_vertices).beta_k
    return by_count, by_betti


def betti_numbers(g: AdjacencyGraph, max_vertices: int = ORACLE_MAX_VERTICES) -> list[int]:
    """``beta_k`` for every order with at least one simplex."""
    out = []
    for k in range(g.n):
        if enumerate_simplices(g, k, max_vertices).count == 0:
            break
        out.append(exact_betti(g, k, max_vertices).beta_k)
    return out
