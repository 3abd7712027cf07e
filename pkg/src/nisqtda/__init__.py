"""Classical simulator and estimator for short-depth quantum Betti number estimation."""

from .boundary import BoundaryOp, PauliString, apply_B, apply_del, apply_del_dagger, pauli_strings_for_B
from .chebyshev import BettiEstimate, ChebSeries, choose_params, estimate_betti, make_series
from .complexes import AdjacencyGraph, PointCloud, build_adjacency, enumerate_simplices, preset_complex
from .errors import ConfigError, EmptyComplexError, NisqTdaError, ScaleCapError
from .moments import MomentMode, MomentTable, build_moment_table
from .oracle import SpectralSummary, exact_betti, laplacian_spectrum, pipeline_equivalence_check
from .qstate import Histogram, NoiseModel, RngStream, StateVector

__version__ = "0.1.0"
