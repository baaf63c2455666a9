"""Entropy powers, escort Fisher information, and information scans on grids."""

from .grid import (
    Axis,
    GriddedDensity,
    GridSpec,
    VectorField,
    WaveFunction,
    convolve_densities,
    convolve_gaussian,
    convolve_uniform,
    covariance_matrix,
    fourier_conjugate,
    gradient,
    grid_1d,
    integrate,
    load_grid,
    normalize,
    save_grid,
)
from .states import (
    CatStateParams,
    cat_quadrature_density,
    cat_wavefunction,
    gaussian_density,
    uniform_density,
)
from .entropy import (
    EntropyPowerCurve,
    EntropyValue,
    entropy_power_curve,
    renyi_entropy,
    renyi_entropy_power,
    shannon_entropy,
    tsallis_entropy,
    tsallis_entropy_power,
)
from .estimation import (
    FisherMatrix,
    InequalityReport,
    cramer_rao_check,
    de_bruijn_check,
    de_bruijn_matrix_check,
    epi_check,
    escort,
    fisher_matrix,
    isoperimetric_check,
    repur_check,
    score_vector,
    stam_check,
)
from .infodist import (
    InfoDistribution,
    histogram_l1,
    info_cdf,
    info_pdf_histogram,
    information_values,
    moment_identity_check,
    varentropy,
)
from .cumulants import (
    CumulantVector,
    cumulants_direct,
    cumulants_from_powers,
    gaussian_reference_cumulants,
)
from .reconstruct import (
    GammaReference,
    ScanResult,
    SeriesReconstruction,
    edgeworth,
    gamma_cumulants,
    gamma_reference_for,
    gram_charlier_a,
    laguerre,
    scan,
)

__version__ = "0.1.0"
