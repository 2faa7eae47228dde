"""Gradient monitor, weighted sampling, regeneration and the adaptive loop."""

from .monitor import MonitorSet, build_monitor, gradient_magnitude, monitor_from_gradients, monitor_mass_center
from .sampling import weighted_sample
from .regeneration import (
    RegenerationReport,
    group_by_subdomain,
    regenerate_block,
    regenerate_features,
    regenerate_collocation,
    split_samples,
)
from .afcm import (
    AdaptConfig,
    DiscretizationConfig,
    SolveConfig,
    AdaptiveState,
    SolveOutcome,
    IterationRecord,
    SolutionHistory,
    SolveStrategy,
    LinearSolve,
    initial_state,
    afcm_iterate,
)

__all__ = [
    'MonitorSet',
    'build_monitor',
    'gradient_magnitude',
    'monitor_from_gradients',
    'monitor_mass_center',
    'weighted_sample',
    'RegenerationReport',
    'group_by_subdomain',
    'regenerate_block',
    'regenerate_features',
    'regenerate_collocation',
    'split_samples',
    'AdaptConfig',
    'DiscretizationConfig',
    'SolveConfig',
    'AdaptiveState',
    'SolveOutcome',
    'IterationRecord',
    'SolutionHistory',
    'SolveStrategy',
    'LinearSolve',
    'initial_state',
    'afcm_iterate',
]
