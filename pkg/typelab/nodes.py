"""Four-node clusters in (2k+1, 2k+2) and the product G vanishing on them."""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from typelab.exceptions import ValidationError
from typelab.execution import STRICT
from typelab.products import CanonicalProduct

logger = logging.getLogger(__name__)

ETA_MAX = Fraction(1, 10)
MIN_PADDING = 8


@dataclass(frozen=True)
class NodeSystem:
    """Per-index quadruples (a_k, b_k, c_k, d_k) with gap eta_k, held as exact fractions."""

    a: tuple
    b: tuple
    c: tuple
    d: tuple
    eta: tuple
    A: frozenset
    B: frozenset

    def __len__(self):
        return len(self.eta)

    def verify(self, upto=None):
        """Assert the ordering, gap and sum identities exactly; raises on the first violation."""
        upto = len(self) if upto is None else upto
        for k in range(upto):
            a, b, c, d, eta = self.a[k], self.b[k], self.c[k], self.d[k], self.eta[k]
            checks = (
                2 * k + Fraction(6, 5) < a < b < 2 * k + Fraction(7, 5),
                2 * k + Fraction(8, 5) < c < d < 2 * k + Fraction(9, 5),
                d - c == eta and b - a == eta,
                a + b + c + d == 8 * k + 6,
            )
            if not all(checks):
                raise ValidationError(f"node constraints fail at k = {k}: {checks}")
        return True

    def quadruple(self, k):
        return tuple(float(v[k]) for v in (self.a, self.b, self.c, self.d))

    def positive_nodes(self):
        return np.array([float(v[k]) for k in range(len(self)) for v in (self.a, self.b, self.c, self.d)])

    def serialize(self, upto=None):
        upto = len(self) if upto is None else upto
        return [
            {"k": k, "a": float(self.a[k]), "b": float(self.b[k]), "c": float(self.c[k]), "d": float(self.d[k]),
             "eta": float(self.eta[k]), "class": "B" if k in self.B else "A"}
            for k in range(upto)
        ]


def place_nodes(eta_rule, count, B=()):
    """Symmetric placement about 2k+13/10 and 2k+17/10 for k < count."""
    a, b, c, d, etas = [], [], [], [], []
    for k in range(count):
        eta = Fraction(eta_rule(k))
        if not 0 < eta <= ETA_MAX:
            raise ValidationError(f"eta_{k} = {float(eta)} must lie in (0, 1/10]")
        first = 2 * k + Fraction(13, 10) - eta / 2
        second = 2 * k + Fraction(17, 10) - eta / 2
        a.append(first)
        b.append(first + eta)
        c.append(second)
        d.append(second + eta)
        etas.append(eta)
    B = frozenset(int(k) for k in B)
    return NodeSystem(tuple(a), tuple(b), tuple(c), tuple(d), tuple(etas), frozenset(range(count)) - B, B)


@dataclass(frozen=True)
class LQ7Result:
    nodes: NodeSystem
    product: CanonicalProduct
    K_max: int
    ratios: tuple
    min_ratio: float
    argmin: int

    def serialize(self):
        return {
            "K_max": self.K_max,
            "padded_periods": len(self.nodes),
            "min_ratio": self.min_ratio,
            "argmin_k": self.argmin,
            "ratios": [float(r) for r in self.ratios],
            "nodes": self.nodes.serialize(self.K_max + 1),
        }


def build_lq7(eta_rule, K_max, B=(), padding=None, execution=STRICT):
    """Place nodes for k <= K_max, build G(z) = z prod(1 - z^2/lambda^2) and report min |G'|/eta_k."""
    if K_max < 0:
        raise ValidationError("K_max must be nonnegative")
    periods = padding if padding is not None else max(2 * K_max, K_max + MIN_PADDING)
    nodes = place_nodes(eta_rule, periods, B)
    nodes.verify()
    product = CanonicalProduct(nodes.positive_nodes(), zero_at_origin=True, normalization=1.0,
                               nominal_type=2.0 * math.pi, tail_period=2.0, tail_residues=4, name="G")
    derivatives = np.abs(product.derivatives(4 * (K_max + 1), execution)).reshape(K_max + 1, 4)
    etas = np.array([float(e) for e in nodes.eta[:K_max + 1]])
    ratios = derivatives.min(axis=1) / etas
    argmin = int(np.argmin(ratios))
    logger.info("lq7 nodes to K=%d (%d periods): min |G'|/eta = %.6g at k=%d", K_max, periods,
                ratios[argmin], argmin)
    return LQ7Result(nodes, product, K_max, tuple(ratios), float(ratios[argmin]), argmin)
