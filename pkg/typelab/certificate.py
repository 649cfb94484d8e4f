"""Certificate records binding one mathematical statement to its numerical evidence."""
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from typelab.exceptions import ValidationError
from typelab.trends import Trend

logger = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


class Direction(str, enum.Enum):
    LOWER_BOUND = "lower_bound"
    UPPER_BOUND = "upper_bound"
    EXACT = "exact"
    ZERO = "zero"
    INFINITE = "infinite"


def verdict_from_trend(trend, *, holds_when=Trend.CONVERGED):
    """Map a trend to a verdict: the expected trend holds, its opposite fails."""
    trend = Trend(trend)
    if trend is Trend.INCONCLUSIVE:
        return Verdict.INCONCLUSIVE
    return Verdict.HOLDS if trend is holds_when else Verdict.FAILS


def to_jsonable(value):
    """Convert numpy scalars/arrays, enums, tuples and non-finite floats for strict JSON."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, complex):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    return value


def from_jsonable_float(value):
    if isinstance(value, str):
        return float(value)
    return value


@dataclass(frozen=True)
class Certificate:
    """One verdict. ``holds`` requires every evidence rule to have passed."""

    statement: str
    anchor: str
    verdict: Verdict
    value: float = math.nan
    direction: Direction | None = None
    params: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    radius: float = math.inf
    flags: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "verdict", Verdict(self.verdict))
        if self.direction is not None:
            object.__setattr__(self, "direction", Direction(self.direction))
        log = logger.warning if self.verdict is Verdict.INCONCLUSIVE or self.flags else logger.info
        log("certificate %s: %s (value=%s, radius=%s)", self.statement, self.verdict.value,
            self.value, self.radius)

    @property
    def holds(self):
        return self.verdict is Verdict.HOLDS

    def serialize(self):
        return to_jsonable({
            "statement": self.statement,
            "anchor": self.anchor,
            "direction": self.direction,
            "value": self.value,
            "params": self.params,
            "evidence": self.evidence,
            "verdict": self.verdict,
            "radius": self.radius,
            "flags": list(self.flags),
        })

    @classmethod
    def deserialize(cls, data):
        missing = {"statement", "anchor", "verdict"} - set(data)
        if missing:
            raise ValidationError(f"certificate is missing {sorted(missing)}")
        return cls(
            statement=data["statement"],
            anchor=data["anchor"],
            verdict=data["verdict"],
            value=from_jsonable_float(data.get("value", math.nan)),
            direction=data.get("direction"),
            params=data.get("params", {}),
            evidence=data.get("evidence", {}),
            radius=from_jsonable_float(data.get("radius", math.inf)),
            flags=tuple(data.get("flags", ())),
        )
