"""Classical post-processing of power moments into Betti number estimates.

Two polynomial families are supported:

* ``step``: truncated Chebyshev series of the indicator of ``[a, b]``; its
  trace counts the nonzero eigenvalues (the rank).
* ``minimizing``: ``p(1 - x)`` with ``p(y) = T_m(y / alpha) / T_m(1 / alpha)``
  and ``alpha = 1 - delta``; equal to 1 at ``x = 0`` and uniformly small on
  ``[delta, 1]``, so its trace counts the kernel directly.

Chebyshev moments are stitched from power moments with the explicit
power-sum form of ``T_j``, the ``x**0`` term standing for the projector onto
the order-``k`` subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import EmptyComplexError
from .moments import MomentTable

MAX_MINIMIZING_DEGREE = 60


@dataclass(frozen=True, eq=False)
class ChebSeries:
    """Polynomial used by the estimator.

    ``coeffs`` are Chebyshev-basis coefficients for ``kind="step"`` and
    power-basis coefficients for ``kind="minimizing"``.
    """

    kind: str
    coeffs: np.ndarray
    a: float | None = None
    b: float | None = None
    delta: float | None = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "step":
            return np.polynomial.chebyshev.chebval(x, self.coeffs)
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def kernel_indicator(self, x):
        """Approximation of ``1[x == 0]`` implied by this series."""
        y = self(x)
        return 1.0 - y if self.kind == "step" else y


@dataclass(frozen=True)
class EstimatorParams:
    epsilon: float
    eta: float
    delta: float
    n_v: int
    m: int

    def __post_init__(self):
        for name in ("epsilon", "eta", "delta"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise ValueError(f"{name}={val} must lie in (0, 1)")
        if self.n_v < 1 or self.m < 1:
            raise ValueError("n_v and m must be >= 1")


@dataclass(frozen=True)
class ErrorBudget:
    poly_error: float
    trace_error: float
    shot_error: float
    shot_bound_valid: bool = True

    @property
    def total(self) -> float:
        return self.poly_error + self.trace_error + self.shot_error


@dataclass(frozen=True)
class BettiEstimate:
    chi_k: float
    chi_raw: float
    rank_estimate: float
    s_k_estimate: float
    budget: ErrorBudget

    @property
    def beta_estimate(self) -> float:
        return self.chi_k * self.s_k_estimate


class ShotBound(NamedTuple):
    value: float
    valid: bool


def step_coeffs(m: int, a: float, b: float, delta: float | None = None) -> ChebSeries:
    """Degree-``m`` Chebyshev coefficients of the indicator of ``[a, b]``."""
    if not -1.0 <= a < b <= 1.0:
        raise ValueError(f"need -1 <= a < b <= 1, got a={a}, b={b}")
    if m < 0:
        raise ValueError("degree must be >= 0")
    ta, tb = math.acos(a), math.acos(b)
    c = [(ta - tb) / math.pi]
    c += [2.0 / math.pi * (math.sin(j * ta) - math.sin(j * tb)) / j for j in range(1, m + 1)]
    return ChebSeries("step", np.array(c), a, b, delta)


@lru_cache(maxsize=None)
def _cheb_terms(j: int) -> tuple[tuple[int, int], ...]:
    """``(power, integer coefficient)`` pairs of ``T_j`` in the monomial basis."""
    if j == 0:
        return ((0, 1),)
    terms = []
    for i in range(j // 2 + 1):
        coeff = Fraction(j, 2) * (-1) ** i * 2 ** (j - 2 * i) * Fraction(
            math.factorial(j - i - 1), math.factorial(j - 2 * i) * math.factorial(i))
        assert coeff.denominator == 1
        terms.append((j - 2 * i, int(coeff)))
    return tuple(terms)


def cheb_from_powers(power_moments, j: int) -> float:
    """Chebyshev moment ``theta_j`` from power moments ``p_0..p_j``."""
    p = power_moments
    if len(p) < j + 1:
        raise ValueError(f"need {j + 1} power moments, got {len(p)}")
    return float(sum(c * p[power] for power, c in _cheb_terms(j)))


def cheb_to_power_matrix(m: int) -> np.ndarray:
    """``M`` with ``theta = M @ mu`` for degrees ``0..m``."""
    mat = np.zeros((m + 1, m + 1))
    for j in range(m + 1):
        for power, c in _cheb_terms(j):
            mat[j, power] = c
    return mat


def minimizing_poly_powers(m: int, delta: float) -> ChebSeries:
    """Power coefficients of ``p(1 - x)`` for the Chebyshev minimizing polynomial.

    Uses ``T_m(y) = m * sum_j (-2)**j (m+j-1)! / ((m-j)! (2j)!) (1 - y)**j``
    with ``1 - y = (x - delta) / alpha`` expanded exactly by the binomial
    theorem.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if m < 1:
        raise ValueError("degree must be >= 1")
    if m > MAX_MINIMIZING_DEGREE:
        raise ValueError(f"degree {m} exceeds {MAX_MINIMIZING_DEGREE}; power basis is unusable")
    alpha = 1.0 - delta
    gamma = delta / alpha
    coeffs = np.zeros(m + 1)
    for j in range(m + 1):
        r = Fraction(m * math.factorial(m + j - 1), math.factorial(m - j) * math.factorial(2 * j))
        scale = float((-2) ** j * r) / alpha**j
        for t in range(j + 1):
            coeffs[t] += scale * math.comb(j, t) * (-delta) ** (j - t)
    # (1 + gamma) * alpha == 1
    coeffs /= math.cosh(m * math.acosh(1.0 + gamma))
    return ChebSeries("minimizing", coeffs, delta=delta)


def minimizing_bound(m: int, delta: float) -> float:
    """``alpha / 2**(m sqrt(gamma) - 1)``: sup of ``|p(1 - x)|`` on ``[delta, 1]``."""
    alpha = 1.0 - delta
    gamma = delta / alpha
    return alpha / 2.0 ** (m * math.sqrt(gamma) - 1.0)


def choose_params(epsilon: float, eta: float, delta: float) -> EstimatorParams:
    """Number of random vectors and polynomial degree for an ``epsilon`` guarantee."""
    for name, val in (("epsilon", epsilon), ("eta", eta), ("delta", delta)):
        if not 0 < val < 1:
            raise ValueError(f"{name}={val} must lie in (0, 1)")
    gamma = delta / (1.0 - delta)
    n_v = max(1, math.ceil(math.log(2.0 / eta) / epsilon**2))
    m = max(1, math.ceil((math.log2(1.0 / epsilon) + 1.0) / math.sqrt(gamma)))
    return EstimatorParams(epsilon, eta, delta, n_v, m)


def shot_noise_bound(m: int, s_k: float, epsilon_T: float, n: int | None = None) -> ShotBound:
    """``4 m epsilon_T / |S_k|``; only derived for ``n >= 2 m``."""
    if s_k <= 0:
        raise ValueError("|S_k| must be positive")
    valid = n is None or n >= 2 * m
    return ShotBound(4.0 * m * epsilon_T / s_k, valid)


def _poly_error(series: ChebSeries, delta: float | None) -> float:
    if delta is None:
        return math.nan
    grid = np.concatenate([[0.0], np.linspace(delta, 1.0, 2001)])
    target = (grid == 0).astype(float)
    return float(np.abs(series.kernel_indicator(grid) - target).max())


def estimate_betti(table: MomentTable, series: ChebSeries, eta: float = 0.1,
                   delta: float | None = None) -> BettiEstimate:
    """Normalized Betti number ``chi_k`` from a moment table.

    ``chi_k = 1 - mean_l sum_j c_j theta_l^(j) / mean_l mu_l^(0)`` for the step
    series, and ``mean_l p(mu_l) / mean_l mu_l^(0)`` for the minimizing one.
    """
    if series.degree > table.m:
        raise ValueError(f"series degree {series.degree} exceeds table degree {table.m}")
    mu = table.mu[:, : series.degree + 1]
    mean_dim = float(mu[:, 0].mean())
    if mean_dim <= 0:
        raise EmptyComplexError(f"empty complex at order k={table.k}")
    if series.kind == "step":
        theta = mu @ cheb_to_power_matrix(series.degree).T
        rank_frac = float((theta @ series.coeffs).mean()) / mean_dim
        chi_raw = 1.0 - rank_frac
    else:
        chi_raw = float((mu @ series.coeffs).mean()) / mean_dim
    chi = min(1.0, max(0.0, chi_raw))
    s_k = mean_dim * 2**table.n

    delta = delta if delta is not None else series.delta
    trace_err = math.sqrt(math.log(2.0 / eta) / table.n_v)
    if table.mode.kind == "exact":
        eps_t = 0.0
    else:
        # shot error per moment, on the scale of +-1 Hadamard vectors (norm^2 = 2**n)
        eps_t = 2**table.n / (2.0 * math.sqrt(table.mode.shots))
    shot = shot_noise_bound(series.degree, s_k, eps_t, table.n)
    valid = shot.valid or eps_t == 0.0
    budget = ErrorBudget(_poly_error(series, delta), trace_err, shot.value, valid)
    return BettiEstimate(chi, chi_raw, (1.0 - chi) * s_k, s_k, budget)


def make_series(kind: str, m: int, delta: float, a: float | None = None, b: float = 1.0) -> ChebSeries:
    """Series used by the CLI: step support defaults to ``(delta / 2, 1)``."""
    if kind == "step":
        return step_coeffs(m, delta / 2.0 if a is None else a, b, delta)
    if kind == "minimizing":
        return minimizing_poly_powers(m, delta)
    raise ValueError(f"unknown series {kind!r}")
