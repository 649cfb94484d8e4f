"""Tests for spectral measures: construction, growth, majorization and tail predicates."""
import math

import numpy as np
import pytest

from typelab.certificate import Verdict
from typelab.exceptions import GridError, ValidationError
from typelab.measures import (
    MajorizationParams, SpectralMeasure, imag_tail_test, majorization_check, majorization_search,
    polynomial_growth_exponent, proximity_test, tail_difference, weak_equivalence_check,
)
from typelab.trends import Trend


def _integers(count=50, mass=1.0):
    return SpectralMeasure.lattice(1.0, count, mass=mass)


class TestSpectralMeasure:
    """SpectralMeasure construction and queries"""

    def test_positions_must_increase(self):
        with pytest.raises(ValidationError):
            SpectralMeasure.atomic([1.0, 0.0])

    def test_masses_must_be_positive(self):
        with pytest.raises(ValidationError):
            SpectralMeasure.atomic([0.0, 1.0], [1.0, 0.0])

    def test_symmetric_flag_is_checked(self):
        with pytest.raises(ValidationError):
            SpectralMeasure.atomic([-1.0, 2.0], symmetric=True)

    def test_lattice_is_symmetric(self):
        mu = _integers(10)
        assert mu.symmetric
        assert mu.lattice_tail
        assert mu.truncation_radius == 10.0
        assert mu.lattice_step() == 1.0

    def test_mass_counts_closed_intervals(self):
        mu = _integers(100)
        assert float(mu.mass(-2.5, 2.5)) == 5.0
        assert float(mu.mass(1.0, 2.0)) == 2.0

    def test_density_mass(self):
        mu = SpectralMeasure.lebesgue(0.5, 10.0)
        assert float(mu.mass(-1.0, 3.0)) == pytest.approx(2.0, abs=1e-14)

    def test_dict_round_trip(self):
        mu = SpectralMeasure(
            positions=[-1.0, 1.0], masses=[2.0, 2.0], imag_heights=[3.0], imag_masses=[0.5],
            symmetric=True, truncation_radius=4.0,
        )
        assert SpectralMeasure.from_dict(mu.to_dict()) == mu

    def test_scaled(self):
        mu = _integers(3).scaled(2.0)
        assert float(mu.mass(-3.0, 3.0)) == 14.0

    def test_integrate_respects_radius(self):
        mu = _integers(10)
        assert mu.integrate(np.ones_like, radius=2.0) == 5.0


class TestPolynomialGrowth:
    """polynomial_growth_exponent"""

    def test_single_atom(self):
        report = polynomial_growth_exponent(SpectralMeasure.atomic([0.0]), [0.0, 1.0], [1, 2, 3, 4])
        assert report.minimal_s == 0.0
        assert report.partials[1.0] == [1.0, 1.0, 1.0, 1.0]

    def test_lebesgue_threshold(self):
        mu = SpectralMeasure.lebesgue(1.0, 1e8)
        report = polynomial_growth_exponent(mu, [0.4, 0.6, 1.0], [1e2, 1e4, 1e6, 1e8])
        assert report.trends[0.4] is Trend.GROWING
        assert report.trends[0.6] is Trend.CONVERGED
        assert report.minimal_s == 0.6

    def test_integer_lattice_at_s_one(self):
        mu = _integers(10000)
        report = polynomial_growth_exponent(mu, [1.0], [10, 100, 1000, 10000])
        assert report.trends[1.0] is Trend.CONVERGED
        limit = math.pi / math.tanh(math.pi)
        assert report.partials[1.0][-1] == pytest.approx(limit, abs=3e-4)

    def test_windows_must_increase(self):
        with pytest.raises(ValidationError):
            polynomial_growth_exponent(_integers(), [1.0], [10, 5])

    def test_empty_measure(self):
        with pytest.raises(ValidationError):
            polynomial_growth_exponent(SpectralMeasure(), [1.0], [1, 2, 3, 4])

    def test_serialize(self):
        report = polynomial_growth_exponent(SpectralMeasure.atomic([0.0]), [1.0], [1, 2, 3, 4])
        data = report.serialize()
        assert data["minimal_s"] == 1.0
        assert data["per_s"][0]["trend"] == "converged"


class TestMajorization:
    """majorization_check / majorization_search / weak_equivalence_check"""

    grid = np.arange(-50.0, 51.0)

    def test_reflexive(self):
        mu = _integers()
        assert majorization_check(mu, mu, 1.0, 0, 1.0, self.grid).holds

    def test_small_shift_is_absorbed(self):
        n = np.arange(-50, 51)
        shifted = SpectralMeasure.atomic(n + np.exp(-2.0 * np.abs(n)))
        assert majorization_check(_integers(), shifted, 1.0, 0, 1.0, self.grid).holds

    def test_half_shift_fails_away_from_origin(self):
        shifted = SpectralMeasure.atomic(np.arange(-50, 51) + 0.5)
        witness = majorization_check(_integers(), shifted, 1.0, 0, 1.0, self.grid)
        assert not witness.holds
        expected = {float(k) for k in range(2, 51)} | {float(-k) for k in range(2, 51)}
        assert expected <= set(witness.violations)

    def test_half_shift_has_no_witness(self):
        shifted = SpectralMeasure.atomic(np.arange(-50, 51) + 0.5)
        found = majorization_search(_integers(), shifted, [1.0], range(5), [1.0, 1e3, 1e6], self.grid)
        assert found is None

    def test_search_returns_first_witness(self):
        found = majorization_search(_integers(mass=2.0), _integers(), [1.0], [0], [1.0, 2.0, 4.0], self.grid)
        assert found.C == 2.0

    def test_mass_scaling(self):
        report = weak_equivalence_check(
            _integers(), _integers(mass=2.0),
            MajorizationParams(1.0, 0, 1.0), MajorizationParams(1.0, 0, 2.0), self.grid,
        )
        assert report.equivalent
        assert report.serialize()["verdict"] == "weakly equivalent on tested grid"

    def test_mass_scaling_needs_constant(self):
        report = weak_equivalence_check(
            _integers(), _integers(mass=2.0),
            MajorizationParams(1.0, 0, 1.0), MajorizationParams(1.0, 0, 1.0), self.grid,
        )
        assert not report.equivalent

    def test_coarse_grid_over_density(self):
        mu = SpectralMeasure.lebesgue(1.0, 10.0)
        with pytest.raises(GridError):
            majorization_check(mu, mu, 1.0, 0, 1.0, np.linspace(-10.0, 10.0, 21))

    def test_invalid_parameters(self):
        with pytest.raises(ValidationError):
            MajorizationParams(0.0, 0, 1.0)


class TestTailDifference:
    """tail_difference"""

    def test_equal_measures(self):
        mu = _integers(10)
        _, samples = tail_difference(mu, mu, np.linspace(-12.0, 12.0, 49))
        assert np.all(samples == 0.0)

    def test_extra_atom(self):
        mu_0 = _integers(10)
        mu_r = SpectralMeasure.atomic(np.union1d(mu_0.positions, [5.5]), truncation_radius=10.0)
        psi, _ = tail_difference(mu_r, mu_0)
        assert float(psi(5.0)) == 1.0
        assert float(psi(5.5)) == 0.0
        assert float(psi(-3.0)) == 1.0

    def test_interleaved_atoms(self):
        n = np.arange(1, 51)
        mu_0 = SpectralMeasure.atomic(n, truncation_radius=60.0)
        mu_r = SpectralMeasure.atomic(n + np.exp(-n), truncation_radius=60.0)
        psi, _ = tail_difference(mu_r, mu_0)
        assert np.all(psi(n + 0.5 * np.exp(-n)) == 1.0)
        assert np.all(psi(n + 0.5) == 0.0)
        assert float(psi(0.5)) == 0.0

    def test_radii_must_agree(self):
        with pytest.raises(ValidationError):
            tail_difference(_integers(10), _integers(20))


class TestProximity:
    """proximity_test"""

    def test_single_atom(self):
        mu_r = SpectralMeasure.atomic([5.0], truncation_radius=10.0)
        mu_0 = SpectralMeasure(truncation_radius=10.0)
        psi, _ = tail_difference(mu_r, mu_0)
        cert = proximity_test(psi, 0.5)
        assert cert.verdict is Verdict.HOLDS
        assert cert.value == pytest.approx(2.0 * (math.exp(2.5) - 1.0), rel=1e-12)

    def test_zero_tail(self):
        mu = _integers(10)
        psi, _ = tail_difference(mu, mu)
        cert = proximity_test(psi, 1.0)
        assert cert.verdict is Verdict.HOLDS
        assert cert.value == 0.0

    def test_growing_tail(self):
        mu_r = SpectralMeasure.atomic(np.arange(1.0, 31.0), truncation_radius=30.5)
        mu_0 = SpectralMeasure(truncation_radius=30.5)
        psi, _ = tail_difference(mu_r, mu_0)
        cert = proximity_test(psi, 1.0)
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["trend"] == "growing"

    def test_delta_must_be_positive(self):
        mu = _integers(10)
        psi, _ = tail_difference(mu, mu)
        with pytest.raises(ValidationError):
            proximity_test(psi, 0.0)


class TestImagTail:
    """imag_tail_test"""

    def test_finite_atoms(self):
        mu = SpectralMeasure(imag_heights=[1.0, 2.0], imag_masses=[1.0, 0.5])
        cert = imag_tail_test(mu, 0.5)
        assert cert.verdict is Verdict.HOLDS
        assert cert.value == pytest.approx(math.exp(0.5) + 0.5 * math.exp(2.0))

    def test_superexponential_decay(self):
        k = np.arange(1.0, 9.0)
        mu = SpectralMeasure(imag_heights=k, imag_masses=np.exp(-k ** 3))
        assert imag_tail_test(mu, 0.5).verdict is Verdict.HOLDS

    def test_exponential_decay_is_not_enough(self):
        k = np.arange(1.0, 21.0)
        mu = SpectralMeasure(imag_heights=k, imag_masses=np.exp(-k))
        cert = imag_tail_test(mu, 0.5)
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["trend"] == "growing"

    def test_exponential_mode(self):
        k = np.arange(1.0, 21.0)
        mu = SpectralMeasure(imag_heights=k, imag_masses=np.exp(-k ** 2))
        assert imag_tail_test(mu, None, mode="exponential", x=3.0).verdict is Verdict.HOLDS

    def test_exponential_mode_needs_x(self):
        with pytest.raises(ValidationError):
            imag_tail_test(SpectralMeasure(), None, mode="exponential")

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            imag_tail_test(SpectralMeasure(), 1.0, mode="cubic")
