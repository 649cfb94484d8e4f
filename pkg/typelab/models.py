"""
typelab - Domain Object Re-export

The domain types live in their own modules; this module gathers them so that
commands and tests can use ``from typelab.models import <Type>``.
"""
from typelab.certificate import Certificate, Direction, Verdict  # noqa: F401
from typelab.execution import Execution  # noqa: F401
from typelab.functions import Envelope, TrialFunction  # noqa: F401
from typelab.measures import SampledDensity, SpectralMeasure  # noqa: F401
from typelab.nazarov import GammaDiffeo, SchwartzWindow  # noqa: F401
from typelab.nodes import NodeSystem  # noqa: F401
from typelab.products import CanonicalProduct, DerivativeEnvelope, TailPolicy  # noqa: F401
from typelab.sharpness import EpsilonRate, EvenWeight  # noqa: F401
from typelab.sturm_liouville import PhiFunction, SLProblem  # noqa: F401
from typelab.weights import Weight  # noqa: F401

__all__ = [
    "Certificate",
    "Direction",
    "Verdict",
    "Execution",
    "Envelope",
    "TrialFunction",
    "SampledDensity",
    "SpectralMeasure",
    "GammaDiffeo",
    "SchwartzWindow",
    "NodeSystem",
    "CanonicalProduct",
    "DerivativeEnvelope",
    "TailPolicy",
    "EpsilonRate",
    "EvenWeight",
    "PhiFunction",
    "SLProblem",
    "Weight",
]
