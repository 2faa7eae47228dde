"""Default parameters shared by the solver and the experiment runner."""

import numpy as np

# Partition and collocation
DEFAULT_NX = 3
DEFAULT_NY = 3
DEFAULT_QX = 79
DEFAULT_QY = 79
DEFAULT_FEATURES_PER_SUBDOMAIN = 1500

# Least squares
RESCALE_CONSTANT = 1.0
RANK_TOL = 1e-13

# Gaussian random field calibration
GRF_ETA = 0.5
GRF_REALIZATIONS = 10
GRF_JITTER = 1e-10
GRF_JITTER_MAX = 1e-6
GRF_MAX_POINTS = 900
GAMMA_GRID = tuple(float(g) for g in np.round(np.arange(1, 41) * 0.2, 10))

# Adaptive loop
MONITOR_SMOOTHING = 0.01      # c1
SHAPE_SMOOTHING = 50.0        # c2
DENSITY_BANDWIDTH = 0.2       # tau
ADAPT_ITERATIONS = 4          # K
MIN_INTERIOR_POINTS = 4
EARLY_STOP_RTOL = 1e-3

# Nonlinear and time-dependent drivers
PICARD_ITERATIONS = 40
PICARD_STAGNATION_STEPS = 3
PICARD_CHANGE_FLOOR = 1e-10

# Reporting
EVAL_RESOLUTION = 257
DENSITY_RESOLUTION = 101
FIELD_RESOLUTION = 201
FLOAT_FORMAT = "%.12e"

# Chunk size for point-wise evaluation of large point sets
EVAL_CHUNK = 8192
