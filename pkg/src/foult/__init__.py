"""Fractional Ornstein-Uhlenbeck simulation and regularized local-time experiments."""

__version__ = "0.1.0"

from .errors import (
    CholeskyError,
    CirculantEmbeddingError,
    DegenerateSweepError,
    EigensolverError,
    FoultError,
    LatticeCoverageError,
    QuadratureError,
)
from .fbm import HurstParam, fbm_cov, fbm_cov_matrix, sample_fbm, sample_fbm_ensemble
from .fou import (
    FouParams,
    fou_from_fbm,
    k_h_constant,
    ou_cov_classical,
    sample_fou_ensemble,
    sample_fou_volterra,
    sample_fou_volterra_ensemble,
    volterra_kernel_F,
)
from .gaussian_analysis import (
    CovMatrix,
    build_Q,
    det_bound_ratio,
    eigen_bound_ratio,
    fou_cov,
    lnd_ratio,
    min_eigenvalue,
    probe_grids,
)
from .grid import SamplePath, TimeGrid
from .localtime import (
    LocalTimeQuery,
    MCEstimate,
    cauchy_gap,
    cauchy_gap_sweep,
    existence_condition,
    existence_condition_value,
    holder_condition,
    holder_condition_value,
    intersection_local_time_reg,
    local_time_profile,
    local_time_reg,
    mc_second_moment,
)
from .mollifier import Bandwidth, MultiIndex, hermite_poly, mollifier, mollifier_deriv
from .regularity import (
    ScalingResult,
    fit_power_law,
    holder_lattice,
    pathwise_holder_estimate,
    spatial_increment_moment,
    spatial_increment_sweep,
    temporal_increment_moment,
    temporal_increment_moments,
    temporal_scaling_exponent,
)
