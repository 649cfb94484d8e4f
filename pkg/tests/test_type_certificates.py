"""Tests for the type certificates and their coherence with the reference models."""
import math

import numpy as np
import pytest

from typelab.certificate import Certificate, Direction, Verdict
from typelab.exceptions import GridError, ValidationError
from typelab.functions import sinc_power
from typelab.measures import SpectralMeasure
from typelab.products import cosine, sine
from typelab.type_certificates import (
    annihilator_lower_bound, coherence_check, duffin_schaeffer, koosis_lattice, reference_for, reference_type,
    szego_infinite_type, zero_type_certificate,
)
from typelab.weights import constant, exp_cap, power


def _exponential_atoms(radius, rate):
    n = np.arange(-radius, radius + 1, dtype=float)
    return SpectralMeasure.atomic(n, np.exp(-rate * np.abs(n)))


def _half_integers_and_origin(count):
    half = np.arange(count, dtype=float) + 0.5
    return SpectralMeasure.atomic(np.concatenate((-half[::-1], [0.0], half)))


class TestReferenceType:
    """reference_type / reference_for"""

    def test_arithmetic_progressions(self):
        assert reference_type("arithmetic_progression", ell=1).value == math.pi
        cert = reference_type("arithmetic_progression", ell=2)
        assert cert.value == math.pi / 2
        assert cert.direction is Direction.EXACT

    def test_other_models(self):
        assert reference_type("lebesgue").value == math.inf
        assert reference_type("point_mass").value == 0.0

    def test_unknown_model(self):
        with pytest.raises(ValidationError):
            reference_type("cantor")
        with pytest.raises(ValidationError):
            reference_type("arithmetic_progression", ell=0)

    def test_reference_for(self):
        assert reference_for(SpectralMeasure.lattice(2.0, 50)).value == math.pi / 2
        assert reference_for(SpectralMeasure.atomic([0.0, 1.0, 3.0])).value == 0.0
        assert reference_for(SpectralMeasure.lebesgue(1.0, 10.0)) is None


class TestZeroType:
    """zero_type_certificate"""

    def test_exponential_density(self):
        mu = SpectralMeasure.from_density(lambda x: np.exp(-np.abs(x)), 100.0, 2001)
        cert = zero_type_certificate(mu, exp_cap(0.5))
        assert cert.verdict is Verdict.HOLDS
        assert cert.direction is Direction.ZERO
        assert cert.evidence["integral_of_K"]["partials"][-1] == pytest.approx(4.0, rel=5e-3)
        assert cert.evidence["log_integral_of_K"]["trend"] == "growing"

    def test_lebesgue_fails(self):
        cert = zero_type_certificate(SpectralMeasure.lebesgue(1.0, 100.0), exp_cap(0.5))
        assert cert.verdict is Verdict.FAILS

    def test_exponential_atoms(self):
        cert = zero_type_certificate(_exponential_atoms(64, 2.0), exp_cap(1.0))
        assert cert.verdict is Verdict.HOLDS

    def test_finite_support(self):
        mu = SpectralMeasure.atomic([-1.0, 0.0, 1.0])
        cert = zero_type_certificate(mu, exp_cap(1.0), windows=[1.0, 2.0, 4.0, 8.0])
        assert cert.verdict is Verdict.HOLDS

    def test_polynomial_majorant_on_lattice(self):
        cert = zero_type_certificate(SpectralMeasure.lattice(1.0, 64), power(2.0))
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["integral_of_K"]["trend"] == "growing"

    def test_fast_modulus(self):
        cert = zero_type_certificate(_exponential_atoms(16, 2.0), exp_cap(20.0))
        assert cert.verdict is Verdict.INCONCLUSIVE
        assert cert.evidence["log_modulus_unit"] == pytest.approx(20.0)

    def test_majorant_below_one(self):
        with pytest.raises(ValidationError, match="K < 1"):
            zero_type_certificate(SpectralMeasure.lattice(1.0, 8), constant(0.5))

    def test_zero_radius(self):
        with pytest.raises(ValidationError):
            zero_type_certificate(SpectralMeasure.atomic([0.0]), exp_cap(1.0))


class TestSzegoInfiniteType:
    """szego_infinite_type"""

    def test_lebesgue(self):
        cert = szego_infinite_type(SpectralMeasure.lebesgue(1.0, 1e4))
        assert cert.verdict is Verdict.HOLDS
        assert cert.value == math.inf

    def test_gaussian_density(self):
        mu = SpectralMeasure.from_density(lambda x: np.exp(-x * x / 100.0), 200.0, 2001)
        assert szego_infinite_type(mu).verdict is Verdict.FAILS

    def test_vanishing_density(self):
        cert = szego_infinite_type(SpectralMeasure.from_density(np.abs, 100.0, 201))
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["reason"] == "density vanishes inside a window"

    def test_needs_density(self):
        with pytest.raises(ValidationError):
            szego_infinite_type(SpectralMeasure.lattice(1.0, 5))


class TestDuffinSchaeffer:
    """duffin_schaeffer"""

    def test_lattice_is_flagged(self):
        mu = SpectralMeasure.lattice(1.0, 100)
        cert = duffin_schaeffer(mu, 1.0, 1.0, np.arange(-50.0, 50.25, 0.25))
        assert cert.verdict is Verdict.HOLDS
        assert cert.value == 2.0 * math.pi
        assert cert.evidence["min_mass"] == 2.0
        assert len(cert.flags) == 1

    def test_gap_fails(self):
        mu = SpectralMeasure.lattice(1.0, 100)
        cert = duffin_schaeffer(mu, 0.4, 1.0, np.linspace(-10.0, 10.0, 401))
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["min_mass"] == 0.0

    def test_lebesgue_holds_without_flag(self):
        cert = duffin_schaeffer(SpectralMeasure.lebesgue(1.0, 100.0), 1.0, 1.99, np.linspace(-90.0, 90.0, 721))
        assert cert.verdict is Verdict.HOLDS
        assert cert.flags == ()

    def test_failure_reported_nearest_origin(self):
        mu = SpectralMeasure.atomic([-12.0, -11.0, 11.0, 12.0], [1.0, 1.0, 1.0, 1.0])
        cert = duffin_schaeffer(mu, 1.0, 0.5, np.arange(-5.0, 5.25, 0.25))
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["argmin"] == 0.0

    def test_coarse_scan(self):
        with pytest.raises(GridError):
            duffin_schaeffer(SpectralMeasure.lattice(1.0, 10), 1.0, 1.0, [0.0, 0.5, 1.0])

    def test_parameters(self):
        with pytest.raises(ValidationError):
            duffin_schaeffer(SpectralMeasure.lattice(1.0, 10), 0.0, 1.0, [0.0])


class TestKoosisLattice:
    """koosis_lattice"""

    def test_unit_weights(self):
        cert = koosis_lattice(np.zeros_like, N_max=4096)
        assert cert.verdict is Verdict.HOLDS
        assert cert.value == math.pi

    def test_scale_invariance(self):
        doubled = koosis_lattice(lambda n: np.full_like(n, math.log(2.0)), N_max=4096)
        assert doubled.verdict is Verdict.HOLDS

    def test_square_decay(self):
        assert koosis_lattice(lambda n: -np.log1p(n * n), N_max=4096).verdict is Verdict.HOLDS

    def test_exponential_decay_fails(self):
        cert = koosis_lattice(lambda n: -np.abs(n), N_max=4096)
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["log_sum_logarithmic"]["trend"] == "growing"

    def test_growth_fails(self):
        cert = koosis_lattice(lambda n: 2.0 * np.log1p(np.abs(n)), N_max=4096)
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["mass_sum"]["trend"] == "growing"

    def test_minimum_range(self):
        with pytest.raises(ValidationError):
            koosis_lattice(np.zeros_like, N_max=32)


class TestAnnihilatorLowerBound:
    """annihilator_lower_bound"""

    family = [sinc_power(0.5, 2), sinc_power(1.0, 2), sinc_power(1.5, 2)]

    def test_z_cosine_on_half_integers(self):
        cert = annihilator_lower_bound(_half_integers_and_origin(4000), cosine(4000, origin=True), self.family)
        assert cert.verdict is Verdict.HOLDS
        assert cert.value == math.pi
        assert cert.direction is Direction.LOWER_BOUND
        assert cert.evidence["inverse_derivative_l2"]["trend"] == "converged"
        assert all(r["verdict"] == "annihilated" for r in cert.evidence["residuals"])

    def test_sine_is_not_square_summable(self):
        cert = annihilator_lower_bound(SpectralMeasure.lattice(1.0, 1000), sine(1000), [sinc_power(1.0, 2)])
        assert cert.verdict is Verdict.INCONCLUSIVE
        assert "not converged" in cert.evidence["reason"]

    def test_caveat_becomes_flag(self):
        cert = annihilator_lower_bound(_half_integers_and_origin(4000), cosine(4000, origin=True),
                                       self.family[:1], caveat="partial zero set")
        assert cert.flags == ("partial zero set",)

    def test_zero_off_the_support(self):
        with pytest.raises(ValidationError, match="not an atom"):
            annihilator_lower_bound(SpectralMeasure.lattice(1.0, 100), cosine(100, origin=True), self.family)

    def test_family_type_too_large(self):
        with pytest.raises(ValidationError):
            annihilator_lower_bound(SpectralMeasure.lattice(1.0, 100), sine(100), [sinc_power(2.0, 2)])

    def test_unit_masses(self):
        with pytest.raises(ValidationError):
            annihilator_lower_bound(SpectralMeasure.lattice(1.0, 100, mass=2.0), sine(100), self.family)


class TestCoherence:
    """coherence_check"""

    def test_lattice_suite(self):
        mu = SpectralMeasure.lattice(1.0, 100)
        reference = reference_for(mu)
        suite = [
            duffin_schaeffer(mu, 1.0, 1.0, np.arange(-50.0, 50.25, 0.25)),
            koosis_lattice(np.zeros_like, N_max=4096),
            zero_type_certificate(mu, exp_cap(1.0)),
        ]
        report = coherence_check(suite, reference)
        assert report.coherent
        assert [entry["statement"] for entry in report.excused] == ["duffin_schaeffer"]

    def test_contradiction(self):
        bogus = Certificate("bogus", "none", Verdict.HOLDS, 4.0, Direction.LOWER_BOUND)
        report = coherence_check([bogus], reference_type("arithmetic_progression", ell=1))
        assert not report.coherent
        assert report.serialize()["conflicts"][0]["statement"] == "bogus"

    def test_only_duffin_schaeffer_is_excused(self):
        flagged = Certificate("annihilator_lower_bound", "none", Verdict.HOLDS, 4.0, Direction.LOWER_BOUND,
                              flags=("caller caveat",))
        report = coherence_check([flagged], reference_type("arithmetic_progression", ell=1))
        assert not report.coherent
        assert report.excused == ()
        assert report.conflicts[0]["statement"] == "annihilator_lower_bound"

    def test_lebesgue(self):
        cert = szego_infinite_type(SpectralMeasure.lebesgue(1.0, 1e4))
        assert coherence_check([cert], reference_type("lebesgue")).coherent
