"""
Structural causal model package: schema, simulation core and the weight-example model.
"""

from .schema import Dataset, NodeKind, NodeSpec, ScmSpec
from .scm_core import (
    covariance_matrix,
    dataset_from_csv,
    dataset_to_csv,
    load_scm,
    save_scm,
    simulate,
    simulate_intervention,
    standardizing_noise_sds,
    to_natural_units,
    validate_scm,
)
from .lords_dgp import (
    PAPER_COEFFICIENTS,
    GroundTruth,
    PaperCoefficients,
    build_paper_scm,
    build_randomized_scm,
    derive_noise_sds,
    ground_truth,
    ground_truth_report,
)

__all__ = [
    'Dataset', 'NodeKind', 'NodeSpec', 'ScmSpec',
    'covariance_matrix', 'dataset_from_csv', 'dataset_to_csv', 'load_scm', 'save_scm',
    'simulate', 'simulate_intervention', 'standardizing_noise_sds', 'to_natural_units',
    'validate_scm',
    'PAPER_COEFFICIENTS', 'GroundTruth', 'PaperCoefficients', 'build_paper_scm',
    'build_randomized_scm', 'derive_noise_sds', 'ground_truth', 'ground_truth_report',
]
