"""Needlet-thresholded density deconvolution on the sphere."""

__version__ = "0.1.0"

from .cubature import CubatureSet, equal_area_points, gauss_product_grid
from .estimator import (
    EstimatorConfig,
    ThresholdedExpansion,
    needlet_coeff_estimates,
    reconstruct,
    select_J,
    sigma,
    svd_coeffs,
    svd_density_estimate,
    survival_counts,
    threshold,
)
from .geometry import EulerRotation, SphereDirection, geodesic_distance
from .harmonics import (
    SphericalSpectrum,
    assoc_legendre,
    legendre_kernel,
    sph_harm,
    spherical_transform,
    spectrum_synthesis,
    wigner_D,
    wigner_D_matrix,
)
from .needlet import (
    NeedletFrame,
    WindowFunction,
    besov_seminorm,
    frame_analysis,
    frame_synthesis,
    window_eval,
)
from .noise import (
    EmpiricalNoise,
    IllConditionedDegreeError,
    Rosenthal,
    RotationalLaplace,
    RotationalSpectrum,
    ZAxisUniform,
    dip_estimate,
    inverse_block,
    inverse_blocks,
    op_norm,
    sample_rotation,
    spectrum,
)
from .simulate import (
    GaussianBump,
    Uniform,
    apply_noise,
    density_eval,
    lp_error,
    peak_locate,
    sample_density,
)

__all__ = [
    "CubatureSet",
    "EmpiricalNoise",
    "EstimatorConfig",
    "EulerRotation",
    "GaussianBump",
    "IllConditionedDegreeError",
    "NeedletFrame",
    "Rosenthal",
    "RotationalLaplace",
    "RotationalSpectrum",
    "SphereDirection",
    "SphericalSpectrum",
    "ThresholdedExpansion",
    "Uniform",
    "WindowFunction",
    "ZAxisUniform",
    "apply_noise",
    "assoc_legendre",
    "besov_seminorm",
    "density_eval",
    "dip_estimate",
    "equal_area_points",
    "frame_analysis",
    "frame_synthesis",
    "gauss_product_grid",
    "geodesic_distance",
    "inverse_block",
    "inverse_blocks",
    "legendre_kernel",
    "lp_error",
    "needlet_coeff_estimates",
    "op_norm",
    "peak_locate",
    "reconstruct",
    "sample_density",
    "sample_rotation",
    "select_J",
    "sigma",
    "sph_harm",
    "spectrum",
    "spectrum_synthesis",
    "spherical_transform",
    "survival_counts",
    "svd_coeffs",
    "svd_density_estimate",
    "threshold",
    "wigner_D",
    "wigner_D_matrix",
    "window_eval",
    "__version__",
]
