"""Hierarchical Correlation Reconstruction (HCR) independence tests and MI estimates, with an HSIC baseline."""

__version__ = "0.1.0"

from .basis import BasisIndexSet, build_basis, legendre_eval, product_eval
from .coeffs import CoefficientTable, estimate, normalize_scores
from .errors import (
    ConfigError,
    DegenerateColumn,
    DegenerateFeature,
    DegenerateSample,
    DimError,
    DomainError,
    EmptyFeatures,
    HcrError,
    PairingError,
    ParseError,
    SampleTooSmall,
)
from .infotheory import MiEstimate, entropy_deficit, mi_corrected, mi_raw
from .ingest import PairedSample, SampleMatrix, load_joint, load_paired
from .normalize import CdfSpec, NormalizedSample, cdf_normalize, edf_normalize, fit_gaussian_params
