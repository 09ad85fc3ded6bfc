"""Optimal metrics on Lie algebras via geodesic descent on SL(n)/SO(n).

The norm of the bracket, as a function of the inner product on the
algebra, is geodesically convex on the space of metrics. Its descent flow
either converges (and the minimizer yields a Cartan decomposition) or
runs off to infinity along a direction whose flag contains a proper ideal.
"""
from .algebra import (
    BilinearForm,
    LieAlgebra,
    LinearSubspace,
    center,
    derivations,
    is_ideal,
    is_simple,
    killing_form,
    validate,
)
from .cartan import CartanSplit, check_inclusions, classify, split
from .corpus import CORPUS_NAMES, corpus
from .errors import CartanFlowError
from .hspace import MetricPoint, TangentDirection, distance, geodesic
from .kempfness import FlowOptions, destabilize, functional_F, gradient, minimize
from .realify import ComplexLieAlgebra, realify

__version__ = "0.1.0"

__all__ = [
    "BilinearForm", "LieAlgebra", "LinearSubspace", "center", "derivations", "is_ideal",
    "is_simple", "killing_form", "validate", "CartanSplit", "check_inclusions", "classify",
    "split", "CORPUS_NAMES", "corpus", "CartanFlowError", "MetricPoint", "TangentDirection",
    "distance", "geodesic", "FlowOptions", "destabilize", "functional_F", "gradient",
    "minimize", "ComplexLieAlgebra", "realify", "__version__",
]
