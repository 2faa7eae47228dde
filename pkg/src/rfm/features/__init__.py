"""Random feature functions, hyperplane statistics and shape calibration."""

from .activation import ActivationKind, activation, activation_stack
from .feature_space import (
    FeatureFunction,
    SubdomainFeatures,
    FeatureSet,
    FeatureLike,
    as_block,
    init_uniform_features,
    hyperplane_distance,
    hyperplane_distances,
    hyperplane_density,
)
from .grf import GrfConfig, squared_exponential_covariance, grf_factor, simulate_grf
from .calibration import (
    CalibrationSettings,
    CalibrationResult,
    calibrate_gamma,
    calibration_curve,
    calibrate_feature_set,
    gamma_losses,
    fit_points,
)

__all__ = [
    'ActivationKind',
    'activation',
    'activation_stack',
    'FeatureFunction',
    'SubdomainFeatures',
    'FeatureSet',
    'FeatureLike',
    'as_block',
    'init_uniform_features',
    'hyperplane_distance',
    'hyperplane_distances',
    'hyperplane_density',
    'GrfConfig',
    'squared_exponential_covariance',
    'grf_factor',
    'simulate_grf',
    'CalibrationSettings',
    'CalibrationResult',
    'calibrate_gamma',
    'calibration_curve',
    'calibrate_feature_set',
    'gamma_losses',
    'fit_points',
]
