"""Exception hierarchy shared by the library modules and the command layer.

Library code raises these; commands translate them into exit status 2.
Inconclusive numerical evidence is not an error and never raises.
"""


class TypelabError(Exception):
    """Base class for every error the library raises on purpose."""


class ValidationError(TypelabError):
    """Input has the wrong shape or violates a precondition."""


class GridError(TypelabError):
    """A grid is too coarse for the windows it must resolve, or does not cover them."""


class ZeroOfProductError(TypelabError):
    """A canonical product was evaluated exactly at one of its zeros."""

    def __init__(self, zero):
        super().__init__(f"z = {zero!r} is a zero of the product")
        self.zero = zero


class ConditioningError(TypelabError):
    """A derivative at a zero is too small to divide by."""


class ToleranceError(TypelabError):
    """An internal error estimate exceeded its declared tolerance."""


class ConstructionError(TypelabError):
    """An inductive construction found no feasible step inside its search cap."""
