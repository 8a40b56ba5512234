"""Nested sampling with power posterior repartitioning.

Tempering an unrepresentative prior by an exponent inferred jointly with
the parameters keeps posterior and evidence estimates unchanged while
making the nested-sampling exploration robust and efficient.
"""

from .models import Dataset, GaussianMeasurementModel
from .priors import PriorSpec
from .repartition import BetaBounds, InferenceProblem
from .sampler import RunResult, SamplerConfig, run

__all__ = [
    "Dataset",
    "GaussianMeasurementModel",
    "PriorSpec",
    "BetaBounds",
    "InferenceProblem",
    "RunResult",
    "SamplerConfig",
    "run",
]

__version__ = "0.1.0"
