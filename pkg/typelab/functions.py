"""Trial functions with declared decay envelopes and nominal exponential type.

Annihilation sums and Weyl transforms take these objects rather than bare
callables because they need an envelope ``|f(x)| <= C |x|^(-p)`` for
``|x| >= x0`` to bound the part of a sum that was never evaluated.
"""
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from typelab.exceptions import ValidationError


@dataclass(frozen=True)
class Envelope:
    """``|f(x)| <= C |x|^(-p)`` for ``|x| >= x0``."""

    C: float
    p: float
    x0: float

    def __post_init__(self):
        if self.C < 0 or self.x0 < 0:
            raise ValidationError("envelope constants must be nonnegative")

    def bound(self, x):
        return self.C * np.abs(x) ** (-self.p)


@dataclass(frozen=True)
class TrialFunction:
    name: str
    evaluator: Callable
    nominal_type: float = math.nan
    envelope: Envelope | None = None
    support: tuple | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    def combine(self, other, alpha=1.0, beta=1.0):
        """The function ``alpha*self + beta*other`` with a merged envelope."""
        envelope = None
        if self.envelope is not None and other.envelope is not None:
            envelope = Envelope(
                abs(alpha) * self.envelope.C + abs(beta) * other.envelope.C,
                min(self.envelope.p, other.envelope.p),
                max(self.envelope.x0, other.envelope.x0, 1.0),
            )
        support = None
        if self.support is not None and other.support is not None:
            support = (min(self.support[0], other.support[0]), max(self.support[1], other.support[1]))
        f, g = self.evaluator, other.evaluator
        return TrialFunction(
            name=f"{alpha:g}*{self.name}+{beta:g}*{other.name}",
            evaluator=lambda x: alpha * f(x) + beta * g(x),
            nominal_type=max(self.nominal_type, other.nominal_type),
            envelope=envelope,
            support=support,
            params={"alpha": alpha, "beta": beta, "left": self.serialize(), "right": other.serialize()},
        )

    def serialize(self):
        return {"kind": self.name, **self.params}


def zero():
    return TrialFunction("zero", np.zeros_like, 0.0, Envelope(0.0, 2.0, 0.0), None, {})


def constant(value):
    value = float(value)
    return TrialFunction("constant", lambda x: np.full_like(x, value), 0.0, None, None, {"value": value})


def power(exponent):
    """``(1 + |x|)^exponent``; decaying powers carry an envelope."""
    exponent = float(exponent)
    envelope = Envelope(1.0, -exponent, 1.0) if exponent < 0 else None
    return TrialFunction("power", lambda x: (1.0 + np.abs(x)) ** exponent, math.inf, envelope, None,
                         {"exponent": exponent})


def exp_abs(rate):
    rate = float(rate)
    return TrialFunction("exp_abs", lambda x: np.exp(rate * np.abs(x)), math.inf, None, None, {"rate": rate})


def gaussian(rate):
    """``exp(-rate x^2)``, bounded by ``x^(-2)/(e*rate)``."""
    rate = float(rate)
    if rate <= 0:
        raise ValidationError("gaussian rate must be positive")
    return TrialFunction("gaussian", lambda x: np.exp(-rate * x * x), math.inf,
                         Envelope(1.0 / (math.e * rate), 2.0, 0.0), None, {"rate": rate})


def sinc_power(b, power=2, shift=0.0):
    """``(sin(b(x-s)) / (b(x-s)))^power``, of exponential type ``power*b``."""
    b, shift = float(b), float(shift)
    if b <= 0 or int(power) < 1:
        raise ValidationError("sinc_power needs b > 0 and power >= 1")
    power = int(power)
    x0 = 1.0 + 2.0 * abs(shift)
    envelope = Envelope(b ** (-power) * (x0 / (x0 - abs(shift))) ** power, float(power), x0)

    def evaluate(x):
        return np.sinc(b * (x - shift) / math.pi) ** power

    return TrialFunction("sinc_power", evaluate, power * b, envelope, None,
                         {"b": b, "power": power, "shift": shift})


def bump(lo, hi):
    """Smooth bump ``exp(1 - 1/(1-u^2))`` on (lo, hi), where u maps (lo, hi) onto (-1, 1)."""
    lo, hi = float(lo), float(hi)
    if not hi > lo:
        raise ValidationError("bump needs lo < hi")
    centre, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def evaluate(x):
        u = (x - centre) / half
        inside = np.abs(u) < 1.0
        out = np.zeros_like(x, dtype=float)
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
        return out

    reach = max(abs(lo), abs(hi))
    return TrialFunction("bump", evaluate, math.inf, Envelope(0.0, 2.0, reach), (lo, hi), {"lo": lo, "hi": hi})


def sampled(grid, values, even=False):
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.size < 2 or grid.size != values.size or np.any(np.diff(grid) <= 0):
        raise ValidationError("sampled function needs an increasing grid with one value per point")

    def evaluate(x):
        x = np.abs(x) if even else x
        return np.interp(x, grid, values, left=0.0, right=0.0)

    lo, hi = (-grid[-1], grid[-1]) if even else (grid[0], grid[-1])
    return TrialFunction("sampled", evaluate, math.inf, Envelope(0.0, 2.0, max(abs(lo), abs(hi))), (lo, hi),
                         {"grid": grid.tolist(), "values": values.tolist(), "even": even})


_FACTORIES = {
    "zero": lambda d: zero(),
    "constant": lambda d: constant(d.get("value", 1.0)),
    "power": lambda d: power(d["exponent"]),
    "exp_abs": lambda d: exp_abs(d["rate"]),
    "gaussian": lambda d: gaussian(d["rate"]),
    "sinc_power": lambda d: sinc_power(d["b"], d.get("power", 2), d.get("shift", 0.0)),
    "bump": lambda d: bump(d["lo"], d["hi"]),
    "sampled": lambda d: sampled(d["grid"], d["values"], d.get("even", False)),
}


def trial_function_from_dict(data):
    """Build a trial function from its (already schema-validated) JSON form."""
    kind = data["kind"]
    if kind not in _FACTORIES:
        raise ValidationError(f"{kind!r} is not a trial function kind")
    try:
        return _FACTORIES[kind](data)
    except KeyError as exc:
        raise ValidationError(f"{kind} function is missing {exc.args[0]!r}") from exc
