"""Random density matrices: sampling, exact spectral laws, and asymptotics."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    DegenerateError,
    DimensionError,
    DomainError,
    NonHermitianError,
    NumericalError,
    RangeError,
    RdmLabError,
)
from .streams import RngStream, substream_key
from .sampling import (
    DensityMatrix,
    WishartSample,
    induced_density,
    sample_density_matrix,
    sample_dirichlet,
    sample_ginibre,
    sample_wishart,
    validate_density,
    validate_wishart,
    wishart_from_factor,
)
from .spectra import (
    EmpiricalMeasure,
    Rescale,
    Spectrum,
    SpectrumKind,
    density_spectrum,
    eigenvalues_hermitian,
    empirical_measure,
    hermitian_eigensystem,
    largest_eigenvalue,
    top_wishart_eigenvalue,
    von_neumann_entropy,
    wishart_spectrum,
)
from .exact import (
    EnsembleParams,
    MomentMethod,
    MomentTable,
    dirichlet_mean_sq_distance,
    log_density_eigs,
    log_density_wishart_eigs,
    log_norm_constant,
    moment_bridge_inverted,
    moment_explicit,
    moment_recurrence,
    moment_table,
    page_entropy,
    wishart_moment,
)
from .asymptotics import (
    GoFReport,
    MarchenkoPastur,
    TracyWidomTable,
    chi_square_gof,
    edge_rescale_density,
    edge_rescale_wishart,
    histogram,
    ks_distance,
    mp_cdf,
    mp_moment,
    mp_pdf,
    trace_clt_statistic,
)

__all__ = [
    "__version__",
    "RdmLabError", "DimensionError", "DomainError", "DegenerateError",
    "NonHermitianError", "NumericalError", "RangeError",
    "RngStream", "substream_key",
    "DensityMatrix", "WishartSample", "sample_ginibre", "sample_wishart",
    "wishart_from_factor", "induced_density", "sample_density_matrix", "sample_dirichlet",
    "validate_wishart", "validate_density",
    "Spectrum", "SpectrumKind", "Rescale", "EmpiricalMeasure",
    "eigenvalues_hermitian", "hermitian_eigensystem", "density_spectrum", "wishart_spectrum",
    "empirical_measure", "largest_eigenvalue", "top_wishart_eigenvalue", "von_neumann_entropy",
    "EnsembleParams", "MomentMethod", "MomentTable",
    "log_norm_constant", "log_density_eigs", "log_density_wishart_eigs",
    "moment_explicit", "moment_recurrence", "moment_bridge_inverted", "wishart_moment",
    "moment_table", "page_entropy", "dirichlet_mean_sq_distance",
    "MarchenkoPastur", "TracyWidomTable", "GoFReport",
    "mp_pdf", "mp_cdf", "mp_moment",
    "edge_rescale_density", "edge_rescale_wishart", "trace_clt_statistic",
    "ks_distance", "histogram", "chi_square_gof",
]
