"""Relative wave-trace distributions for the wave operator with a potential.

The library evaluates the distributional trace of the smeared difference of
wave groups for -Laplace + V versus -Laplace, through explicit multilinear
trace coefficients a_{k,V}, the linear term nu_d, the assembled density
alpha_V, an independent spatial-side representation in d <= 3, and a dense
spectral torus oracle in d = 1 used to pin sign and scale conventions.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateInputError,
    DomainError,
    PrecisionError,
    QuadratureError,
    SamplingError,
    SmoothnessError,
    UnsupportedError,
    UsageError,
    WavetraceError,
)
from .integrate import MCEstimate, adaptive_quad, mc_integrate, mc_stream, substream
from .potential import NormReport, parse_potential
from .testfn import PolyCutoff, parse_testfn

__all__ = [
    "__version__",
    "MCEstimate",
    "NormReport",
    "PolyCutoff",
    "adaptive_quad",
    "mc_integrate",
    "mc_stream",
    "parse_potential",
    "parse_testfn",
    "substream",
    "WavetraceError",
    "DomainError",
    "SmoothnessError",
    "PrecisionError",
    "DegenerateInputError",
    "SamplingError",
    "QuadratureError",
    "UnsupportedError",
    "UsageError",
]
