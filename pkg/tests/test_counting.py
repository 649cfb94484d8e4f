"""Tests for counting functions and the Krein-class exclusion test."""
import math

import numpy as np
import pytest

from typelab.certificate import Verdict
from typelab.counting import counting, krein_exclusion
from typelab.exceptions import ValidationError


def _symmetric(positive, origin=True):
    positive = np.asarray(positive, dtype=float)
    middle = [0.0] if origin else []
    return np.concatenate((-positive[::-1], middle, positive))


class TestCounting:
    """counting"""

    def test_empty_set(self):
        profile = counting([], [0.5, 2.0, 10.0])
        assert profile.n.tolist() == [0, 0, 0]
        assert profile.N.tolist() == [0.0, 0.0, 0.0]

    def test_integer_count(self):
        profile = counting(np.arange(-100, 101), [2.5])
        assert int(profile.n[0]) == 5

    def test_integrated_count_matches_step_sum(self):
        profile = counting(np.arange(-100, 101), [10.0])
        by_steps = math.fsum((2 * k + 1) * math.log((k + 1) / k) for k in range(1, 10))
        assert float(profile.N[0]) == pytest.approx(by_steps, abs=1e-12)

    def test_below_one(self):
        profile = counting(np.arange(-10, 11), [0.5])
        assert float(profile.N[0]) == 0.0

    def test_grid_must_not_decrease(self):
        with pytest.raises(ValidationError):
            counting([1.0], [2.0, 1.0])

    def test_rows(self):
        rows = counting([-1.0, 1.0], [1.0]).rows()
        assert rows == [{"t": 1.0, "n": 2, "N": 0.0}]


class TestKreinExclusion:
    """krein_exclusion"""

    def test_arcsinh_perturbed_lattice(self):
        t = np.arange(1.0, 10001.0)
        points = _symmetric(t + 0.5 * np.arcsinh(t))
        cert = krein_exclusion(points, 1.0, [1.0, 10.0, 100.0], 1e4)
        assert cert.verdict is Verdict.HOLDS
        assert all(entry["passes"] for entry in cert.evidence["per_A"])

    def test_integers_fail(self):
        cert = krein_exclusion(_symmetric(np.arange(1.0, 10001.0)), 1.0, [1.0], 1e4)
        assert cert.verdict is Verdict.FAILS

    def test_even_integers_hold(self):
        cert = krein_exclusion(_symmetric(2.0 * np.arange(1.0, 10001.0)), 1.0, [1.0, 10.0], 1e4)
        assert cert.verdict is Verdict.HOLDS
        assert cert.value < 0

    def test_short_radius_is_inconclusive(self):
        cert = krein_exclusion(_symmetric(np.arange(1.0, 11.0)), 1.0, [1.0], 999.0)
        assert cert.verdict is Verdict.INCONCLUSIVE

    def test_points_must_cover_radius(self):
        with pytest.raises(ValidationError):
            krein_exclusion(_symmetric(np.arange(1.0, 101.0)), 1.0, [1.0], 1e4)

    def test_rate_must_be_positive(self):
        with pytest.raises(ValidationError):
            krein_exclusion([1.0], 0.0, [1.0], 1e4)
