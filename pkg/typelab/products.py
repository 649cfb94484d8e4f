"""Symmetric canonical products ``F(z) = C z^e prod_k (1 - z^2/x_k^2)``.

Products are evaluated in the log domain with exactly rounded summation and
the phase (or sign) tracked separately. Zero sets that continue as
arithmetic progressions past the stored range declare ``tail_period`` so
that the omitted factors can be bounded or restored in closed form.
"""
import enum
import logging
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, loggamma, polygamma

from typelab.certificate import Certificate, Direction, verdict_from_trend
from typelab.constants import DEFAULTS
from typelab.exceptions import ConditioningError, ValidationError, ZeroOfProductError
from typelab.execution import STRICT
from typelab.trends import Trend, classify, geometric_ladder, trend_record

logger = logging.getLogger(__name__)

_PRODUCTS = DEFAULTS["products"]
_SERIES_TERMS = 60


class TailPolicy(str, enum.Enum):
    NONE = "none"
    PAIR_LOG_BOUND = "pair_log_bound"
    ARITHMETIC_TAIL = "arithmetic_tail"


@dataclass(frozen=True)
class DerivativeEnvelope:
    """``|F'(lambda)| >= scale * |lambda|^exponent`` on the zeros."""

    scale: float
    exponent: float


@dataclass(frozen=True)
class ProductValue:
    log_abs: float
    phase: complex
    error_bar: float

    @property
    def value(self):
        if self.log_abs == -math.inf:
            return 0.0
        return self.phase * math.exp(self.log_abs)


class CanonicalProduct:
    """Real symmetric entire function with simple zeros ``+-x_k`` (and optionally 0).

    ``normalization`` is F(0), or F'(0) when the origin is a zero.
    """

    def __init__(self, positive_zeros, *, zero_at_origin=False, normalization=1.0, nominal_type=math.nan,
                 tail_period=None, tail_residues=1, derivative_oracle=None, envelope=None,
                 name="product", check_growth=True):
        zeros = np.array(positive_zeros, dtype=float).reshape(-1)
        if np.any(zeros <= 0) or not np.all(np.isfinite(zeros)):
            raise ValidationError("positive zeros must be finite and strictly positive")
        if np.any(np.diff(zeros) <= 0):
            raise ValidationError("zeros must be simple and strictly increasing")
        if normalization == 0 or not math.isfinite(normalization):
            raise ValidationError("normalization must be finite and nonzero")
        if tail_period is not None and (tail_period <= 0 or not 1 <= tail_residues <= max(zeros.size, 1)):
            raise ValidationError("tail continuation needs a positive period and 1 <= residues <= zero count")
        zeros.setflags(write=False)
        self._zeros = zeros
        self.zero_at_origin = bool(zero_at_origin)
        self.normalization = float(normalization)
        self.nominal_type = float(nominal_type)
        self.tail_period = None if tail_period is None else float(tail_period)
        self.tail_residues = int(tail_residues)
        self.derivative_oracle = derivative_oracle
        self.envelope = envelope
        self.name = name
        self._lock = threading.Lock()
        self._derivatives = np.zeros(0)
        if check_growth:
            _check_square_summable(zeros)

    def __repr__(self):
        return f"<CanonicalProduct {self.name} zeros={self.count} origin={self.zero_at_origin}>"

    @property
    def positive_zeros(self):
        return self._zeros

    @property
    def count(self):
        return int(self._zeros.size)

    @property
    def value_at_zero(self):
        return 0.0 if self.zero_at_origin else self.normalization

    def all_zeros(self, count=None):
        positive = self._zeros[:self._truncation(count)]
        middle = [0.0] if self.zero_at_origin else []
        return np.concatenate((-positive[::-1], middle, positive))

    def _truncation(self, count):
        if count is None:
            return self.count
        count = int(count)
        if not 0 <= count <= self.count:
            raise ValidationError(f"truncation {count} exceeds the {self.count} stored zeros")
        return count

    def replaced(self, positive_zeros, name=None, zero_at_origin=None, normalization=None):
        """Same continuation with a new zero set; oracles are dropped.

        The origin and normalisation are inherited unless given.
        """
        return CanonicalProduct(
            positive_zeros, zero_at_origin=self.zero_at_origin if zero_at_origin is None else zero_at_origin,
            normalization=self.normalization if normalization is None else normalization,
            nominal_type=self.nominal_type, tail_period=self.tail_period, tail_residues=self.tail_residues,
            envelope=self.envelope, name=name or self.name, check_growth=False,
        )

    # -- derivatives at the zeros ---------------------------------------------

    def derivatives(self, count=None, execution=STRICT):
        """F' at the first ``count`` positive zeros; computed once and cached."""
        count = self._truncation(count)
        with self._lock:
            if self._derivatives.size < count:
                start = self._derivatives.size
                indices = np.arange(start, count)
                if self.derivative_oracle is not None:
                    fresh = np.asarray(self.derivative_oracle(self._zeros[indices]), dtype=float)
                else:
                    fresh = _product_derivatives(self, indices, execution)
                self._derivatives = np.concatenate((self._derivatives, fresh))
            return self._derivatives[:count]

    def signed_arrays(self, count=None, execution=STRICT):
        """All zeros up to the truncation with F' at each, ordered by position."""
        count = self._truncation(count)
        positive = self._zeros[:count]
        dpos = self.derivatives(count, execution)
        parity = -1.0 if not self.zero_at_origin else 1.0
        zeros = [-positive[::-1]]
        values = [parity * dpos[::-1]]
        if self.zero_at_origin:
            zeros.append([0.0])
            values.append([self.normalization])
        zeros.append(positive)
        values.append(dpos)
        return np.concatenate(zeros), np.concatenate(values)

    # -- serialisation ---------------------------------------------------------

    def to_dict(self):
        zeros = self.all_zeros()
        return {
            "symmetric": True,
            "real_atoms": [[float(x), 1.0] for x in zeros],
            "imag_atoms": [],
            "truncation_radius": float(zeros[-1]) if zeros.size else None,
            "metadata": {
                "name": self.name,
                "nominal_type": self.nominal_type,
                "normalization": self.normalization,
                "zero_at_origin": self.zero_at_origin,
                "tail_period": self.tail_period,
                "tail_residues": self.tail_residues,
            },
        }

    @classmethod
    def from_dict(cls, data):
        positions = np.array([atom[0] for atom in data.get("real_atoms", [])], dtype=float)
        meta = data.get("metadata", {})
        return cls(
            positions[positions > 0],
            zero_at_origin=bool(np.any(positions == 0)),
            normalization=meta.get("normalization", 1.0),
            nominal_type=meta.get("nominal_type", math.nan),
            tail_period=meta.get("tail_period"),
            tail_residues=meta.get("tail_residues", 1),
            name=meta.get("name", "product"),
        )


def _check_square_summable(zeros):
    """Reject zero sets whose partial sums of 1/x^2 do not converge over index windows."""
    if zeros.size < _PRODUCTS["square_summable_min_zeros"]:
        return
    inverse_squares = 1.0 / zeros ** 2
    windows = [zeros.size // 64, zeros.size // 16, zeros.size // 4, zeros.size]
    partials = [math.fsum(inverse_squares[:w]) for w in windows]
    if classify(partials) is not Trend.CONVERGED:
        raise ValidationError(f"sum of 1/x_k^2 does not converge over the stored zeros: {partials}")


# -- factories ------------------------------------------------------------------


def _alternating(x):
    return np.where(np.rint(x).astype(np.int64) % 2 == 0, 1.0, -1.0)


def sine(count):
    """sin(pi z) with zeros at the integers."""
    zeros = np.arange(1, count + 1, dtype=float)
    return CanonicalProduct(zeros, zero_at_origin=True, normalization=math.pi, nominal_type=math.pi,
                            tail_period=1.0, tail_residues=1, name="sine",
                            derivative_oracle=lambda x: math.pi * _alternating(x),
                            envelope=DerivativeEnvelope(math.pi, 0.0))


def sinc(count):
    """sin(pi z)/(pi z)."""
    zeros = np.arange(1, count + 1, dtype=float)
    return CanonicalProduct(zeros, normalization=1.0, nominal_type=math.pi, tail_period=1.0, tail_residues=1,
                            name="sinc", derivative_oracle=lambda x: _alternating(x) / x,
                            envelope=DerivativeEnvelope(1.0, -1.0))


def cosine(count, origin=False):
    """cos(pi z), or z cos(pi z) when ``origin`` is set."""
    zeros = np.arange(1, count + 1, dtype=float) - 0.5
    if origin:
        def oracle(x):
            return math.pi * x * _alternating(x + 0.5)

        return CanonicalProduct(zeros, zero_at_origin=True, normalization=1.0, nominal_type=math.pi,
                                tail_period=1.0, tail_residues=1, name="z_cosine", derivative_oracle=oracle,
                                envelope=DerivativeEnvelope(math.pi, 1.0))

    def oracle(x):
        return math.pi * _alternating(x + 0.5)

    return CanonicalProduct(zeros, normalization=1.0, nominal_type=math.pi, tail_period=1.0, tail_residues=1,
                            name="cosine", derivative_oracle=oracle, envelope=DerivativeEnvelope(math.pi, 0.0))


FACTORIES = {"sine": sine, "sinc": sinc, "cosine": cosine,
             "z_cosine": lambda count: cosine(count, origin=True)}


# -- evaluation -----------------------------------------------------------------


def _real_log_factors(w):
    """log|1 - w| for real w >= 0 (w != 1) and the count of negative factors."""
    logs = np.empty_like(w)
    small = w < 1.0
    logs[small] = np.log1p(-w[small])
    logs[~small] = np.log(w[~small] - 1.0)
    return logs, int(np.count_nonzero(~small))


def _arithmetic_tail(x, h, z):
    """log of prod_{j>=1} (1 - z^2/(x+jh)^2) as (log|.|, sign or angle)."""
    a = 1.0 + x / h
    is_real = isinstance(z, float)
    if abs(z) / (x + h) < 0.5:
        ratio = (z / (x + h)) ** 2
        total = 0.0
        for m in range(1, _SERIES_TERMS + 1):
            derivative = float(polygamma(2 * m - 1, a))
            if derivative <= 0.0:
                break
            term = ratio ** m * math.exp(math.log(derivative) + 2 * m * math.log(a) - gammaln(2 * m)) / m
            total -= term
            if abs(term) <= 1e-18 * max(abs(total), 1e-300):
                break
        if is_real:
            return float(total), 1.0
        return float(total.real), float(total.imag)
    left, right = a - z / h, a + z / h
    for arg in (left, right):
        if complex(arg).imag == 0 and complex(arg).real <= 0 and float(complex(arg).real).is_integer():
            raise ZeroOfProductError(z)
    value = 2.0 * loggamma(complex(a)) - loggamma(complex(left)) - loggamma(complex(right))
    if is_real:
        crossings = max(0, math.ceil((abs(z) - x) / h) - 1)
        return float(value.real), -1.0 if crossings % 2 else 1.0
    return float(value.real), float(value.imag)


def _pair_log_bound(F, count, modulus):
    """Rigorous bound on the log-magnitude of the omitted factors."""
    rest = F.positive_zeros[count:]
    w = modulus ** 2 / rest ** 2
    if np.any(w >= 1.0):
        return math.inf
    bound = math.fsum(w / (1.0 - w))
    if F.tail_period is not None and F.count:
        h = F.tail_period
        for x in F.positive_zeros[-F.tail_residues:]:
            q = modulus ** 2 / (x + h) ** 2
            if q >= 1.0:
                return math.inf
            bound += modulus ** 2 * polygamma(1, 1.0 + x / h) / h ** 2 / (1.0 - q)
    return bound


def eval_product(F, z, N=None, tail_policy=TailPolicy.NONE, execution=STRICT):
    """log|F(z)| with sign (real z) or unit phase (complex z) and an error bar."""
    policy = TailPolicy(tail_policy)
    count = F._truncation(N)  # pylint: disable=protected-access
    zeros = F.positive_zeros[:count]
    z = complex(z)
    real = z.imag == 0.0
    if real:
        z = z.real
        if F.zero_at_origin and z == 0.0:
            raise ZeroOfProductError(0.0)
        w = (z / zeros) ** 2
        if np.any(w == 1.0):
            raise ZeroOfProductError(z)
        logs, negatives = _real_log_factors(w)
        log_abs = execution.total(logs) + math.log(abs(F.normalization))
        sign = (-1.0 if negatives % 2 else 1.0) * math.copysign(1.0, F.normalization)
        if F.zero_at_origin:
            log_abs += math.log(abs(z))
            sign *= math.copysign(1.0, z)
    else:
        w = (z / zeros) ** 2
        if np.any(w == 1.0):
            raise ZeroOfProductError(z)
        logs = np.log1p(-w)
        log_abs = execution.total(logs.real) + math.log(abs(F.normalization))
        angle = execution.total(logs.imag) + (math.pi if F.normalization < 0 else 0.0)
        if F.zero_at_origin:
            log_abs += math.log(abs(z))
            angle += math.atan2(z.imag, z.real)
    error_bar = math.nan
    if policy is TailPolicy.PAIR_LOG_BOUND:
        error_bar = _pair_log_bound(F, count, abs(z))
    elif policy is TailPolicy.ARITHMETIC_TAIL:
        if F.tail_period is None:
            raise ValidationError(f"{F.name} declares no arithmetic continuation")
        error_bar = 0.0
        for x in (zeros[-F.tail_residues:] if count else ()):
            tail_log, tail_phase = _arithmetic_tail(float(x), F.tail_period, z)
            log_abs += tail_log
            if real:
                sign *= tail_phase
            else:
                angle += tail_phase
    phase = sign if real else complex(math.cos(angle), math.sin(angle))
    return ProductValue(float(log_abs), phase, error_bar)


def _product_derivatives(F, indices, execution):
    """F'(x_j) = C x_j^e (-2/x_j) prod_{k != j}(1 - x_j^2/x_k^2), blockwise in the log domain."""
    zeros = F.positive_zeros
    out = np.empty(indices.size)
    block = _PRODUCTS["block_size"]
    exponent = 1 if F.zero_at_origin else 0
    for start in range(0, indices.size, block):
        idx = indices[start:start + block]
        xj = zeros[idx]
        ratio = (xj[:, None] / zeros[None, :]) ** 2
        ratio[np.arange(idx.size), idx] = 0.0
        logs = np.empty_like(ratio)
        small = ratio < 1.0
        logs[small] = np.log1p(-ratio[small])
        logs[~small] = np.log(ratio[~small] - 1.0)
        for row, j in enumerate(idx):
            log_abs = execution.total(logs[row]) + math.log(abs(F.normalization)) + math.log(2.0 / xj[row])
            log_abs += exponent * math.log(xj[row])
            sign = -math.copysign(1.0, F.normalization) * (-1.0 if j % 2 else 1.0)
            if F.tail_period is not None:
                for x in zeros[-F.tail_residues:]:
                    tail_log, tail_sign = _arithmetic_tail(float(x), F.tail_period, float(xj[row]))
                    log_abs += tail_log
                    sign *= tail_sign
            out[start + row] = sign * math.exp(log_abs)
    return out


def derivative_at_zeros(F, indices=None, execution=STRICT):
    """Map zero -> F'(zero) for the given positive-zero indices, their mirrors and the origin."""
    if indices is None:
        indices = range(F.count)
    indices = sorted(int(i) for i in indices)
    needed = indices[-1] + 1 if indices else 0
    values = F.derivatives(needed, execution)
    parity = 1.0 if F.zero_at_origin else -1.0
    result = {}
    if F.zero_at_origin:
        result[0.0] = F.normalization
    for i in indices:
        x = float(F.positive_zeros[i])
        result[x] = float(values[i])
        result[-x] = float(parity * values[i])
    return result


# -- Krein-class sums -------------------------------------------------------------


def krein_sum(F, W, execution=STRICT):
    """Certificate on the convergence of sum W(lambda)/|F'(lambda)| over the zeros."""
    if F.count == 0 and not F.zero_at_origin:
        return Certificate(
            statement="krein_sum", anchor="sum over zeros of W(lambda)/|F'(lambda)| is finite",
            verdict="holds", value=0.0, direction=Direction.UPPER_BOUND,
            evidence={"reason": "empty zero set"}, radius=0.0,
        )
    zeros, derivs = F.signed_arrays(execution=execution)
    small = np.abs(derivs) < _PRODUCTS["conditioning_floor"]
    if np.any(small):
        raise ConditioningError(f"|F'| below {_PRODUCTS['conditioning_floor']:g} at lambda = {zeros[small][0]}")
    modulus = np.abs(zeros)
    terms = np.asarray(W(zeros), dtype=float) / np.abs(derivs)
    radius = float(modulus.max())
    windows = geometric_ladder(radius) if radius > 0 else [0.0] * 4
    partials = [execution.total(terms[modulus <= R]) for R in windows]
    trend = classify(partials)
    nonzero = modulus > 0
    by_order = {}
    order = None
    for n in _PRODUCTS["partial_fraction_orders"]:
        weights = 1.0 / (np.abs(derivs[nonzero]) * modulus[nonzero] ** (n + 1))
        sums = [execution.total(weights[modulus[nonzero] <= R]) for R in windows]
        by_order[str(n)] = trend_record(windows, sums, classify(sums))
        if order is None and classify(sums) is Trend.CONVERGED:
            order = n
    return Certificate(
        statement="krein_sum",
        anchor="sum over zeros of W(lambda)/|F'(lambda)| is finite",
        verdict=verdict_from_trend(trend),
        value=execution.total(terms),
        direction=Direction.UPPER_BOUND,
        params={"product": F.name, "zeros": int(zeros.size)},
        evidence={**trend_record(windows, partials, trend), "partial_fraction_order": order,
                  "by_order": by_order},
        radius=radius,
    )


# -- annihilation -------------------------------------------------------------------


@dataclass(frozen=True)
class AnnihilationReport:
    function: dict
    signed_sum: float
    residual: float
    tail_bound: float
    tolerance: float
    zeros_used: int

    @property
    def annihilated(self):
        return self.residual + self.tail_bound <= self.tolerance

    def serialize(self):
        return {
            "function": self.function,
            "signed_sum": self.signed_sum,
            "residual": self.residual,
            "tail_bound": self.tail_bound,
            "tolerance": self.tolerance,
            "zeros_used": self.zeros_used,
            "verdict": "annihilated" if self.annihilated else "not annihilated",
        }


def annihilation_sum(B, f, N=None, execution=STRICT):
    """The signed sum of f(lambda)/B'(lambda) over the zeros up to the truncation."""
    zeros, derivs = B.signed_arrays(N, execution)
    if zeros.size == 0:
        return 0.0
    return execution.total(np.asarray(f(zeros), dtype=float) / derivs)


def _annihilation_tail(B, f, count):
    if count == 0:
        return math.inf
    # one progression of step h per residue class, each starting past the smallest of the last r zeros
    residues = min(B.tail_residues, count)
    x_n = float(B.positive_zeros[count - residues])
    envelope = f.envelope
    if envelope.C == 0.0 and x_n >= envelope.x0:
        return 0.0
    if B.envelope is None or B.tail_period is None or x_n < envelope.x0:
        return math.inf
    q = envelope.p + B.envelope.exponent
    if q <= 1.0:
        return math.inf
    return (2.0 * residues * envelope.C / (B.envelope.scale * B.tail_period)
            * x_n ** (1.0 - q) / (q - 1.0))


def annihilation_residual(B, f, N=None, tolerance=None, execution=STRICT):
    """|sum f(lambda)/B'(lambda)| over the first N zero pairs, with a bound on the rest."""
    if f.envelope is None:
        raise ValidationError(f"{f.name} declares no decay envelope")
    tolerance = _PRODUCTS["annihilation_tolerance"] if tolerance is None else tolerance
    count = B._truncation(N)  # pylint: disable=protected-access
    signed = annihilation_sum(B, f, count, execution)
    report = AnnihilationReport(f.serialize(), signed, abs(signed), _annihilation_tail(B, f, count),
                                float(tolerance), count)
    logger.info("annihilation of %s by %s: residual %.3g, tail %.3g", f.name, B.name, report.residual,
                report.tail_bound)
    return report
