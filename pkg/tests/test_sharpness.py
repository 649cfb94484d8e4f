"""Tests for the sharpness constructions: log integrals, the convex f, separated intervals and paired nodes."""
import math
from fractions import Fraction

import pytest

from typelab.exceptions import ConstructionError, ValidationError
from typelab.sharpness import (
    EvenWeight, build_lq1, build_thm15i, build_thm15ii, classify_indices, exponential_weight, inverse_log,
    log_integral_report, step_windows, unit_weight,
)
from typelab.trends import Trend


@pytest.fixture(scope="module")
def epsilon():
    """eps(r) = 1/log(e + r)."""
    return inverse_log()


class TestEpsilonRate:
    """EpsilonRate"""

    def test_log_evaluator_agrees(self, epsilon):
        assert epsilon.at_log(5.0) == pytest.approx(epsilon(math.exp(5.0)), rel=1e-14)

    def test_monotone(self, epsilon):
        assert epsilon.check_monotone([0.0, 1.0, 10.0, 100.0, 1e4])

    def test_far_out(self, epsilon):
        assert epsilon.at_log(1e6) == pytest.approx(1e-6)


class TestLogIntegral:
    """log_integral_report"""

    def test_unit_weight(self):
        report = log_integral_report(unit_weight(), windows=[10.0, 100.0, 1e3, 1e4])
        assert report.partials == (0.0, 0.0, 0.0, 0.0)
        assert report.converged

    def test_exponential_weight_diverges(self):
        report = log_integral_report(exponential_weight())
        assert report.trend is Trend.GROWING
        assert report.ladders["logarithmic"]["trend"] == "growing"

    def test_minimum_increment(self):
        report = log_integral_report(exponential_weight(), windows=[10.0, 100.0, 1e3, 1e4])
        assert report.trend is Trend.INCONCLUSIVE
        forced = log_integral_report(exponential_weight(), windows=[10.0, 100.0, 1e3, 1e4], min_increment=1.0)
        assert forced.trend is Trend.GROWING

    def test_from_callable(self):
        weight = EvenWeight.from_callable(lambda x: 1.0 / (1.0 + x * x), name="cauchy")
        report = log_integral_report(weight, windows=[1e2, 1e4, 1e6, 1e8])
        assert report.converged

    def test_windows_above_one(self):
        with pytest.raises(ValidationError):
            log_integral_report(unit_weight(), windows=[0.5, 10.0])


class TestThm15i:
    """build_thm15i"""

    def test_empty_construction(self, epsilon):
        result = build_thm15i(epsilon, 0)
        assert result.steps == ()
        assert result.phi.scaled(3.0) == 0.0
        assert result.all_checks_pass

    def test_first_step(self, epsilon):
        result = build_thm15i(epsilon, 1)
        step = result.steps[0]
        assert step.a >= 4
        assert step.gamma == epsilon.at_log(step.a)
        assert step.gamma < 0.25
        assert step.length * step.gamma < 0.5
        assert step.kappa * step.gamma >= 10.0
        assert all(step.checks().values())

    def test_middle_integral_by_quadrature(self, epsilon):
        step = build_thm15i(epsilon, 1).steps[0]
        _, middle, _ = step.quadrature()
        assert middle >= 1.0 - 1e-9

    def test_two_steps(self, epsilon):
        result = build_thm15i(epsilon, 2)
        first, second = result.steps
        assert second.a >= first.b
        assert result.all_checks_pass
        assert step_windows(result) == [first.b, second.b]
        assert result.ledger[-1]["divergence_partial"] >= 2.0 - 1.0 / 3.0

    def test_psi_log_integral_converges(self, epsilon):
        result = build_thm15i(epsilon, 1)
        assert log_integral_report(result.psi).converged
        b = result.steps[0].b
        across = log_integral_report(result.psi, log_windows=[b - 6.0, b, b + 10.0, b + 20.0])
        assert across.converged
        assert across.partials[1] - across.partials[0] > 0.1


class TestLQ1:
    """build_lq1"""

    def test_first_interval(self, epsilon):
        result = build_lq1(epsilon, 1, y1=10.0)
        check = result.checks[0]
        assert check["gamma"] == pytest.approx(1.0 / math.log(math.e + 10.0))
        assert check["integral"] == pytest.approx(math.e * check["gamma"], abs=1e-9)
        assert check["integral_ok"]

    def test_intervals_are_separated(self, epsilon):
        result = build_lq1(epsilon, 4, y1=10.0)
        assert all(check["disjoint"] for check in result.checks)
        assert all(check["ratio_ok"] for check in result.checks)
        for (lo, hi), (next_lo, _) in zip(result.intervals(), result.intervals()[1:]):
            assert hi < next_lo
        assert all(gamma <= 2.0 ** -k for k, gamma in enumerate(result.gammas[1:], start=2))


class TestThm15ii:
    """classify_indices / build_thm15ii"""

    def test_classify_indices(self, epsilon):
        A, B = classify_indices(build_lq1(epsilon, 1, y1=10.0), 12)
        assert B == frozenset(range(5, 10))
        assert A == frozenset(range(13)) - B

    def test_construction(self, epsilon):
        lq1 = build_lq1(epsilon, 2, y1=10.0)
        result = build_thm15ii(epsilon, 20, lq1)
        nodes = result.lq7.nodes
        assert all(nodes.eta[k] == Fraction(1, 10) for k in result.A)
        assert all(pair["passes"] and pair["rho_monotone"] for pair in result.pairs)
        assert len(result.pairs) == 2 * len(result.B)
        assert result.Lambda_star.size == result.Lambda.size - 4 * len(result.B)
        for entry in result.annihilation:
            assert entry["verdict"] == entry["expected"]
        assert result.annihilation[-1]["verdict"] == "not annihilated"

    def test_no_index_in_intervals(self, epsilon):
        with pytest.raises(ConstructionError):
            build_thm15ii(epsilon, 3, build_lq1(epsilon, 1, y1=10.0))
