import json

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from nisqtda.complexes import PRESETS, AdjacencyGraph, PointCloud, build_adjacency, enumerate_simplices, preset_complex
from nisqtda.errors import ScaleCapError
from nisqtda.oracle import (
    betti_numbers, boundary_matrix, euler_characteristics, exact_betti, hodge_laplacian,
    laplacian_spectrum, pipeline_equivalence_check, rational_rank,
)

from .test_complexes import random_graph


def test_boundary_matrix_square():
    d = boundary_matrix(preset_complex("square"), 1)
    assert d.shape == (4, 4)
    dense = d.to_dense()
    for c, s in enumerate(d.col_masks):
        col = dense[:, c]
        assert sorted(col[col != 0]) == [-1, 1]
        low = s & -s
        # lower vertex gets -1: del|{i,j}> = |{j}> - |{i}>
        assert col[d.row_masks.index(low)] == -1


def test_boundary_matrix_empty_and_nilpotent():
    d = boundary_matrix(preset_complex("square"), 2)
    assert d.shape == (4, 0)
    k4 = AdjacencyGraph.complete(4)
    prod = boundary_matrix(k4, 1).to_dense() @ boundary_matrix(k4, 2).to_dense()
    assert not prod.any()
    assert boundary_matrix(k4, 0).shape == (0, 4)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_consecutive_boundaries_vanish(name):
    g = preset_complex(name)
    for k in range(1, g.n - 1):
        lo, hi = boundary_matrix(g, k), boundary_matrix(g, k + 1)
        if hi.shape[1] == 0:
            break
        assert not (lo.to_dense() @ hi.to_dense()).any()
        assert all(np.count_nonzero(hi.to_dense()[:, c]) == k + 2 for c in range(hi.shape[1]))


def test_exact_betti_examples():
    sq = preset_complex("square")
    assert exact_betti(sq, 0).beta_k == 1 and exact_betti(sq, 1).beta_k == 1
    assert exact_betti(preset_complex("two-squares"), 0).beta_k == 2
    assert exact_betti(preset_complex("cube"), 1).beta_k == 5


def test_spectrum_two_squares():
    s = laplacian_spectrum(preset_complex("two-squares"), 0)
    np.testing.assert_allclose(s.eigenvalues, [0, 0, 2, 2, 2, 2, 4, 4], atol=1e-12)
    assert s.delta_k == pytest.approx(2.0) and s.delta == pytest.approx(0.25)


@pytest.mark.parametrize("n", range(2, 7))
def test_complete_graph_laplacian_is_n_identity(n):
    g = AdjacencyGraph.complete(n)
    for k in range(1, n):
        lap = hodge_laplacian(g, k)
        np.testing.assert_allclose(lap, n * np.eye(lap.shape[0]), atol=1e-12)
        assert exact_betti(g, k).beta_k == 0


def test_empty_graph():
    s = exact_betti(AdjacencyGraph.empty(5), 0)
    assert s.beta_k == 5 and s.rank == 0 and s.delta_k is None
    assert all(e == 0 for e in s.eigenvalues)


def test_spectral_summary_invariants_and_json():
    for name in PRESETS:
        g = preset_complex(name)
        for k in range(min(g.n, 4)):
            s = exact_betti(g, k)
            assert s.beta_k == s.s_k - s.rank
            assert s.beta_k == s.beta_k_float
            assert all(e >= -1e-10 for e in s.eigenvalues)
            if s.rank > 0:
                assert s.delta_k > 0
    back = json.loads(exact_betti(preset_complex("square"), 1).to_json())
    assert back["beta_k"] == 1 and back["s_k"] == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 10_000))
def test_rational_rank_matches_sympy(rows, cols, seed):
    mat = np.random.default_rng(seed).integers(-2, 3, size=(rows, cols))
    assert rational_rank(mat) == sympy.Matrix(mat.tolist()).rank()


def test_rational_rank_degenerate():
    assert rational_rank(np.zeros((0, 3), dtype=int)) == 0
    assert rational_rank(np.zeros((3, 0), dtype=int)) == 0
    assert rational_rank(np.zeros((3, 3), dtype=int)) == 0


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_euler_identity_presets(name):
    by_count, by_betti = euler_characteristics(preset_complex(name))
    assert by_count == by_betti


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.floats(0.2, 0.9), st.integers(0, 10_000))
def test_euler_identity_random(n, p, seed):
    by_count, by_betti = euler_characteristics(random_graph(n, p, seed))
    assert by_count == by_betti


@pytest.mark.parametrize("name", [n for n in sorted(PRESETS) if PRESETS[n][0] <= 8])
def test_pipeline_equivalence_presets(name):
    g = preset_complex(name)
    for k in range(g.n):
        if enumerate_simplices(g, k).count == 0:
            break
        assert pipeline_equivalence_check(g, k) <= 1e-10


def test_pipeline_equivalence_examples_and_cap():
    assert pipeline_equivalence_check(preset_complex("square"), 0) <= 1e-10
    assert pipeline_equivalence_check(AdjacencyGraph.complete(4), 1) <= 1e-10
    with pytest.raises(ScaleCapError):
        pipeline_equivalence_check(preset_complex("five-squares"), 0)
    with pytest.raises(ScaleCapError):
        exact_betti(AdjacencyGraph.empty(12), 0, max_vertices=10)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 10), st.integers(0, 10_000))
def test_beta0_nonincreasing_along_filtration(n, seed):
    pc = PointCloud(np.random.default_rng(seed).random((n, 2)))
    scales = np.linspace(0.0, 1.5, 8)
    betas = [exact_betti(build_adjacency(pc, "euclidean", s), 0).beta_k for s in scales]
    assert all(b2 <= b1 for b1, b2 in zip(betas, betas[1:]))
    assert betas[0] == n


def test_betti_numbers_lists():
    assert betti_numbers(AdjacencyGraph.complete(4)) == [1, 0, 0, 0]
    assert betti_numbers(preset_complex("cube")) == [1, 5]
