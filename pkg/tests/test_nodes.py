"""Tests for four-node placement and the product G built on the nodes."""
from fractions import Fraction

import pytest

from typelab.exceptions import ValidationError
from typelab.nodes import NodeSystem, build_lq7, place_nodes


def tenth(k):
    del k
    return Fraction(1, 10)


class TestPlaceNodes:
    """place_nodes / NodeSystem.verify"""

    def test_first_quadruple(self):
        nodes = place_nodes(tenth, 1)
        assert nodes.quadruple(0) == (1.25, 1.35, 1.65, 1.75)
        assert nodes.a[0] + nodes.b[0] + nodes.c[0] + nodes.d[0] == 6

    def test_variable_gaps_verify(self):
        nodes = place_nodes(lambda k: Fraction(1, 10 * (k + 1)), 50)
        assert nodes.verify()
        assert nodes.d[49] - nodes.c[49] == Fraction(1, 500)

    def test_gap_above_a_tenth(self):
        with pytest.raises(ValidationError):
            place_nodes(lambda k: Fraction(1, 5), 3)

    def test_classes(self):
        nodes = place_nodes(tenth, 4, B=[1, 3])
        assert nodes.A == frozenset({0, 2})
        assert nodes.B == frozenset({1, 3})
        assert [row["class"] for row in nodes.serialize()] == ["A", "B", "A", "B"]

    def test_verify_rejects_broken_sum(self):
        nodes = place_nodes(tenth, 2)
        broken = NodeSystem(nodes.a, nodes.b, nodes.c, (nodes.d[0], nodes.d[1] + Fraction(1, 100)),
                            nodes.eta, nodes.A, nodes.B)
        with pytest.raises(ValidationError, match="k = 1"):
            broken.verify()


class TestBuildLQ7:
    """build_lq7"""

    def test_single_period(self):
        result = build_lq7(tenth, 0)
        assert result.nodes.quadruple(0) == (1.25, 1.35, 1.65, 1.75)
        assert result.min_ratio > 0
        assert result.product.zero_at_origin

    def test_ratio_is_stable_under_truncation(self):
        coarse = build_lq7(tenth, 100)
        fine = build_lq7(tenth, 200)
        assert fine.min_ratio > 0
        assert abs(fine.min_ratio - coarse.min_ratio) <= 0.1 * coarse.min_ratio

    def test_negative_k_max(self):
        with pytest.raises(ValidationError):
            build_lq7(tenth, -1)

    def test_serialize(self):
        data = build_lq7(tenth, 2).serialize()
        assert data["K_max"] == 2
        assert len(data["nodes"]) == 3
        assert data["padded_periods"] == 10
