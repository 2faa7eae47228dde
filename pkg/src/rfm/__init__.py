"""
Random feature method for linear and nonlinear PDEs on partitioned rectangles,
with adaptive redistribution of features and collocation points.
"""

from .exceptions import RfmError
from .random_streams import RandomStreams

__version__ = "0.1.0"

__all__ = ['RfmError', 'RandomStreams', '__version__']
