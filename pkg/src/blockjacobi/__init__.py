"""Certified spectral bands and measure bounds for periodic block Jacobi operators."""

from blockjacobi.hermitian import (
    ConvergenceError,
    DimensionError,
    EigenSystem,
    HermitianError,
    NotPSDError,
    SymmetryError,
    hermitian_eigensystem,
    hermitian_eigenvalues,
    nuclear_norm,
    psd_sqrt,
    singular_values,
)
from blockjacobi.operator import (
    PeriodicJacobiOperator,
    SymbolSplit,
    floquet_symbol,
    normalize,
    rotate_to_minimal_corner,
    split_symbol,
    truncated_matrix,
    unroll,
    validate,
)
from blockjacobi.spectrum import (
    BandSamples,
    BoundsReport,
    EnclosureBounds,
    IntervalUnion,
    SpectralBand,
    VerifyConfig,
    band_intervals,
    enclosure_bounds,
    enclosure_width_sum,
    interval_union_measure,
    make_discrete_schrodinger,
    make_sharpness_example,
    random_operator,
    sample_bands,
    scalar_geometric_bound,
    theorem_bound,
    verify_operator,
)

__version__ = "0.1.0"
