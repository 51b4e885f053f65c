"""Exponentiated generalized linear exponential distribution (EGLED) and its
Marshall-Olkin bivariate extension (BEGLED).

The likelihood kernels come from a compiled extension when it is available
and from a NumPy fallback otherwise; see :mod:`moglib._backend`.
"""

from . import begled, egled, estimation, numerics, reliability
from ._backend import NAME as BACKEND
from .begled import BegledParams, Region, joint_cdf, joint_pdf, sample_begled
from .datasets import Dataset, load, load_csv, load_uefa
from .egled import EgledParams, cdf, pdf, quantile, sample_egled
from .estimation import (
    FitConfig,
    FitResult,
    fit_egled,
    fit_mle,
    information_criteria,
    likelihood_ratio_test,
    partition_sample,
)
from .numerics import RandomStream

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BegledParams",
    "Dataset",
    "EgledParams",
    "FitConfig",
    "FitResult",
    "RandomStream",
    "Region",
    "begled",
    "cdf",
    "egled",
    "estimation",
    "fit_egled",
    "fit_mle",
    "information_criteria",
    "joint_cdf",
    "joint_pdf",
    "likelihood_ratio_test",
    "load",
    "load_csv",
    "load_uefa",
    "numerics",
    "partition_sample",
    "pdf",
    "quantile",
    "reliability",
    "sample_begled",
    "sample_egled",
]
