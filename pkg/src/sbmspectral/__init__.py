"""Spectral clustering for the two-community stochastic block model."""

from .approximations import (
    ApproxKind,
    ApproxReport,
    ApproxSpectra,
    approx_report,
    approx_vector,
    fiedler_pair,
    leave_one_out_diagnostic,
    leave_one_out_matrix,
)
from .bounds import (
    BoundReport,
    LaplacianSpectra,
    RegimeConstants,
    binomial_diff_tail_exponent,
    concentration_stats,
    condition_A1,
    condition_A2,
    dk_bound_check,
    eigenvalue_sandwich_check,
    f_exponent,
    laplacian_concentration_ratio,
    measure_spectra,
)
from .clustering import ClusterResult, Method, agreement, cluster, cluster_normalized, cluster_unnormalized, exactly_recovered
from .config import DEFAULT, Tolerances
from .eigensolver import Spectrum, generalized_smallest_k, smallest_k
from .errors import (
    DegenerateGapError,
    IsolatedVertexError,
    NearSingularResolventError,
    NumericError,
    ParameterError,
)
from .experiments import (
    CellResult,
    GridSpec,
    agreement_map,
    approx_boxplot_study,
    bound_pass_rate_study,
    phase_diagram,
)
from .graph_matrices import DegreeProfile, degree_profile, normalized_laplacian, spectral_norm, unnormalized_laplacian
from .heatmap import render_heatmap
from .labels import Labeling
from .matrix import SymMatrix
from .rng import derive_seed
from .sbm import SampledGraph, SbmParams, expectation_graph, expectation_matrices, sample, u2star

__version__ = "0.1.0"
