"""Tests for distorted lattices: the class check, their measures and the smoothed Poisson test."""
import math

import numpy as np
import pytest

from typelab.certificate import Verdict
from typelab.exceptions import ValidationError
from typelab.nazarov import (
    GammaDiffeo, RescaledDiffeo, SchwartzWindow, build_measure, gamma_check, poisson_decay_test,
    stable_orthogonality_certificate,
)

T_GRID = np.linspace(-1000.0, 1000.0, 2001)


@pytest.fixture(scope="module")
def window():
    """The default window: phi_hat = 1 on (-2, 2) and 0 outside (-5, 5)."""
    return SchwartzWindow(2.0, 5.0)


class TestGammaDiffeo:
    """GammaDiffeo"""

    def test_unknown_family(self):
        with pytest.raises(ValidationError):
            GammaDiffeo("cubic")

    def test_arctan_slope_bound(self):
        with pytest.raises(ValidationError):
            GammaDiffeo("arctan_shift", 1.0)

    def test_default_beta(self):
        assert GammaDiffeo("arcsinh_shift").beta == 0.5
        assert GammaDiffeo("linear").beta == 1.0

    def test_inverse(self):
        X = GammaDiffeo("arcsinh_shift")
        t = np.array([-300.0, -1.5, 0.0, 2.0, 1e4])
        assert np.allclose(X.inverse(X(t)), t, rtol=1e-12, atol=1e-12)

    def test_derivatives_match_differences(self):
        X = GammaDiffeo("arctan_shift", 0.3)
        t = np.array([0.7, 3.0])
        step = 1e-5
        numeric = (X.derivative(t + step, 3) - X.derivative(t - step, 3)) / (2.0 * step)
        assert np.allclose(X.derivative(t, 4), numeric, rtol=1e-6, atol=1e-9)

    def test_rescaled(self):
        Y = RescaledDiffeo(GammaDiffeo("linear", 2.0), 0.5)
        assert float(Y(3.0)) == 6.0
        assert float(Y.inverse(6.0)[0]) == pytest.approx(3.0)


class TestGammaCheck:
    """gamma_check"""

    def test_identity(self):
        cert = gamma_check(GammaDiffeo("identity"), T_GRID)
        assert cert.verdict is Verdict.HOLDS
        assert cert.evidence["fitted_exponents"]["2"] == math.inf

    def test_arcsinh_shift(self):
        cert = gamma_check(GammaDiffeo("arcsinh_shift"), T_GRID)
        assert cert.verdict is Verdict.HOLDS
        for k in (2, 3, 4):
            assert cert.evidence["fitted_exponents"][str(k)] == pytest.approx(k, abs=0.2)

    def test_doubling_fails(self):
        cert = gamma_check(GammaDiffeo("linear", 2.0), T_GRID)
        assert cert.verdict is Verdict.FAILS
        assert cert.evidence["derivative_trend"] != "converged"


class TestBuildMeasure:
    """build_measure"""

    def test_identity_lattice(self):
        mu = build_measure(GammaDiffeo("identity"), 1.0, 3)
        assert mu.positions.tolist() == [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]
        assert mu.masses.tolist() == [1.0] * 7
        assert mu.symmetric

    def test_arcsinh_atoms(self):
        mu = build_measure(GammaDiffeo("arcsinh_shift"), 1.0, 3)
        assert mu.positions[4] == pytest.approx(1.0 + 0.5 * math.log(1.0 + math.sqrt(2.0)))
        assert mu.positions[4] == pytest.approx(1.4407, abs=1e-4)
        assert mu.masses[4] == pytest.approx(1.0 + 1.0 / (2.0 * math.sqrt(2.0)))
        assert mu.masses[2] == mu.masses[4]

    def test_negative_count(self):
        with pytest.raises(ValidationError):
            build_measure(GammaDiffeo("identity"), 1.0, -1)


class TestPoissonDecay:
    """poisson_decay_test"""

    t = np.geomspace(20.0, 500.0, 12)

    def test_window_transform(self, window):
        assert window.phi_hat([0.0, 1.9, 5.0, 6.0]).tolist() == [1.0, 1.0, 0.0, 0.0]

    def test_integer_lattice_is_exact(self, window):
        mu = build_measure(GammaDiffeo("identity"), 1.0, 1000)
        report = poisson_decay_test(mu, window, self.t, noise_floor=1e-8)
        assert report.certificate.verdict is Verdict.HOLDS
        assert report.certificate.evidence["reason"] == "below noise floor"
        assert np.max(np.abs(report.D)) < 1e-8

    def test_arcsinh_lattice_decays(self, window):
        mu = build_measure(GammaDiffeo("arcsinh_shift"), 1.0, 1000)
        report = poisson_decay_test(mu, window, self.t)
        assert report.certificate.verdict is Verdict.HOLDS
        assert len(report.rows()) == self.t.size

    def test_window_must_stay_below_two_pi(self):
        mu = build_measure(GammaDiffeo("identity"), 1.0, 1000)
        with pytest.raises(ValidationError):
            poisson_decay_test(mu, SchwartzWindow(2.0, 7.0), self.t)

    def test_lattice_must_cover_reach(self, window):
        mu = build_measure(GammaDiffeo("identity"), 1.0, 100)
        with pytest.raises(ValidationError, match="increase K"):
            poisson_decay_test(mu, window, self.t)


class TestStableOrthogonality:
    """stable_orthogonality_certificate"""

    def test_arcsinh_shift_holds(self):
        cert = stable_orthogonality_certificate(GammaDiffeo("arcsinh_shift"), 1.0, 1e4, [1.0, 10.0, 100.0])
        assert cert.verdict is Verdict.HOLDS
        assert cert.evidence["shift_unbounded"]

    def test_identity_fails(self):
        cert = stable_orthogonality_certificate(GammaDiffeo("identity"), 1.0, 1e4, [1.0])
        assert cert.verdict is Verdict.FAILS
        assert not cert.evidence["shift_unbounded"]

    def test_bounded_shift_fails(self):
        cert = stable_orthogonality_certificate(GammaDiffeo("arctan_shift", 0.5), 1.0, 1e4, [1.0])
        assert cert.verdict is Verdict.FAILS
        assert not cert.evidence["shift_unbounded"]

    def test_undecided_shift_is_inconclusive(self):
        cert = stable_orthogonality_certificate(_TripleLogShift(), 1.0, 500.0, [1.0])
        assert cert.verdict is Verdict.INCONCLUSIVE
        assert cert.evidence["shift_trend"] == "inconclusive"
        assert not cert.evidence["shift_unbounded"]

    def test_logarithmic_shift_counts_as_growth(self):
        cert = stable_orthogonality_certificate(GammaDiffeo("arcsinh_shift"), 1.0, 1e4, [1.0])
        assert cert.evidence["shift"]["trend"] == "inconclusive"
        assert cert.evidence["shift_trend"] == "growing"


class _TripleLogShift:
    """t + log(1 + log(1 + log(1 + |t|))), odd; rises too slowly for either ladder to call it."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return t + np.sign(t) * np.log1p(np.log1p(np.log1p(np.abs(t))))

    def inverse(self, y):
        return np.atleast_1d(np.asarray(y, dtype=float))

    def serialize(self):
        return {"family": "triple_log"}
