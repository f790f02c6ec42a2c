"""Complementarity widths of set functions, batched greedy maximization,
pointwise CH approximation and simple combinatorial auctions."""

from .errors import InternalError, InvalidArgument, ResourceLimit, SolverFailure, WidthlabError
from .setfn import (CHFunction, ExplicitFunction, GroundSet, HypergraphFunction, MaxFunction,
                    SetFunction, SymmetricFunction)
from .widths import (superadditive_width, supermodular_degree, supermodular_width,
                     width_report)

__version__ = "0.1.0"

__all__ = [
    "WidthlabError", "InvalidArgument", "ResourceLimit", "SolverFailure", "InternalError",
    "GroundSet", "SetFunction", "ExplicitFunction", "HypergraphFunction", "SymmetricFunction",
    "CHFunction", "MaxFunction", "supermodular_degree", "supermodular_width",
    "superadditive_width", "width_report",
]
