"""Tests for canonical products: evaluation, derivatives at zeros, Krein sums and annihilation."""
import math

import numpy as np
import pytest

from typelab.certificate import Verdict
from typelab.exceptions import ValidationError, ZeroOfProductError
from typelab.functions import constant, sinc_power, zero
from typelab.products import (
    CanonicalProduct, TailPolicy, annihilation_residual, annihilation_sum, cosine, derivative_at_zeros,
    eval_product, krein_sum, sinc, sine,
)


class TestCanonicalProduct:
    """CanonicalProduct construction"""

    def test_zeros_must_be_positive(self):
        with pytest.raises(ValidationError):
            CanonicalProduct([0.0, 1.0])

    def test_zeros_must_be_simple(self):
        with pytest.raises(ValidationError):
            CanonicalProduct([1.0, 1.0, 2.0])

    def test_dense_zero_set_is_rejected(self):
        with pytest.raises(ValidationError):
            CanonicalProduct(np.sqrt(np.arange(1.0, 5001.0)))

    def test_all_zeros_are_symmetric(self):
        zeros = sine(3).all_zeros()
        assert zeros.tolist() == [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]

    def test_dict_round_trip(self):
        F = cosine(10)
        G = CanonicalProduct.from_dict(F.to_dict())
        assert np.array_equal(G.positive_zeros, F.positive_zeros)
        assert G.tail_period == 1.0
        assert not G.zero_at_origin

    def test_truncation_beyond_stored_zeros(self):
        with pytest.raises(ValidationError):
            eval_product(sinc(10), 0.5, N=11)


class TestEvalProduct:
    """eval_product"""

    def test_sinc_at_half(self):
        result = eval_product(sinc(100000), 0.5, tail_policy=TailPolicy.ARITHMETIC_TAIL)
        assert result.value == pytest.approx(2.0 / math.pi, abs=1e-9)

    def test_sinc_at_origin_is_exact(self):
        assert eval_product(sinc(1000), 0.0).value == 1.0

    def test_cosine_at_one(self):
        result = eval_product(cosine(100000), 1.0, tail_policy=TailPolicy.ARITHMETIC_TAIL)
        assert result.value == pytest.approx(-1.0, abs=1e-9)

    def test_pair_log_bound_covers_truncation(self):
        result = eval_product(sinc(100000), 0.5, N=1000, tail_policy=TailPolicy.PAIR_LOG_BOUND)
        assert result.error_bar > 0
        assert abs(result.log_abs - math.log(2.0 / math.pi)) <= result.error_bar

    def test_complex_argument(self):
        z = 0.3 + 0.4j
        result = eval_product(sine(100000), z, tail_policy=TailPolicy.ARITHMETIC_TAIL)
        assert abs(result.value - np.sin(np.pi * z)) < 1e-9

    def test_zero_raises(self):
        with pytest.raises(ZeroOfProductError):
            eval_product(sinc(10), 2.0)
        with pytest.raises(ZeroOfProductError):
            eval_product(sine(10), 0.0)

    def test_arithmetic_tail_needs_period(self):
        with pytest.raises(ValidationError):
            eval_product(CanonicalProduct([1.0, 2.0]), 0.5, tail_policy=TailPolicy.ARITHMETIC_TAIL)


class TestDerivativeAtZeros:
    """derivative_at_zeros"""

    def test_polynomial(self):
        values = derivative_at_zeros(CanonicalProduct([1.0]), [0])
        assert values[1.0] == pytest.approx(-2.0, abs=1e-15)
        assert values[-1.0] == pytest.approx(2.0, abs=1e-15)

    def test_sinc_without_oracle(self):
        F = CanonicalProduct(np.arange(1.0, 100001.0), tail_period=1.0)
        assert derivative_at_zeros(F, [0])[1.0] == pytest.approx(-1.0, abs=1e-9)

    def test_cosine_without_oracle(self):
        F = CanonicalProduct(np.arange(1.0, 100001.0) - 0.5, tail_period=1.0)
        assert derivative_at_zeros(F, [0])[0.5] == pytest.approx(-math.pi, abs=1e-9)

    def test_origin_carries_normalization(self):
        values = derivative_at_zeros(sine(5), [0, 1])
        assert values[0.0] == math.pi
        assert values[2.0] == pytest.approx(math.pi)
        assert values[-2.0] == pytest.approx(math.pi)


class TestKreinSum:
    """krein_sum"""

    def test_unit_weight_diverges(self):
        cert = krein_sum(sine(10000), np.ones_like)
        assert cert.verdict is Verdict.FAILS
        assert cert.value == pytest.approx(20001 / math.pi)

    def test_decaying_weight_converges(self):
        cert = krein_sum(sine(10000), lambda x: (1.0 + np.abs(x)) ** -2)
        assert cert.verdict is Verdict.HOLDS
        expected = (2.0 / math.pi) * (math.pi ** 2 / 6.0 - 1.0) + 1.0 / math.pi
        assert cert.value == pytest.approx(expected, abs=1e-3)

    def test_empty_zero_set(self):
        cert = krein_sum(CanonicalProduct([]), np.ones_like)
        assert cert.verdict is Verdict.HOLDS
        assert cert.value == 0.0


class TestAnnihilation:
    """annihilation_residual / annihilation_sum"""

    def test_type_below_pi_is_annihilated(self):
        report = annihilation_residual(cosine(2000000), sinc_power(1.0, 2), tolerance=1e-6)
        assert report.annihilated
        assert report.residual <= 1e-6

    def test_shifted_type_four_is_not_annihilated(self):
        report = annihilation_residual(cosine(1000), sinc_power(2.0, 2, shift=0.5))
        assert not report.annihilated
        assert report.residual > 1e-2

    def test_even_functions_cancel_pairwise(self):
        assert annihilation_sum(cosine(1000), sinc_power(2.0, 2)) == pytest.approx(0.0, abs=1e-15)

    def test_zero_function(self):
        report = annihilation_residual(cosine(100), zero())
        assert report.residual == 0.0
        assert report.tail_bound == 0.0
        assert report.serialize()["verdict"] == "annihilated"

    def test_function_needs_envelope(self):
        with pytest.raises(ValidationError):
            annihilation_residual(cosine(100), constant(1.0))
