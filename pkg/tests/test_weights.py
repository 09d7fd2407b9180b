import numpy as np
import pytest

from girgbp import (InvalidArgument, WeightDist, sample_weight, sample_weights,
                    tail_probability, validate_tail)
from girgbp.errors import InsufficientData

DIST = WeightDist(2.5, 1.0)


def test_inverse_cdf_examples():
    assert sample_weight(DIST, 1.0) == 1.0
    assert sample_weight(DIST, 0.01) == pytest.approx(21.544, rel=1e-4)
    for bad in (0.0, -0.5, 1.5):
        with pytest.raises(InvalidArgument):
            sample_weight(DIST, bad)


def test_monotone_in_u():
    u = np.linspace(1e-6, 1.0, 1000)
    assert np.all(np.diff(sample_weight(DIST, u)) < 0)


def test_tail_probability_examples():
    assert tail_probability(DIST, 1.0) == 1.0
    assert tail_probability(DIST, 100.0) == pytest.approx(1e-3)
    assert tail_probability(DIST, 0.5) == 1.0


def test_invalid_distribution():
    for beta in (2.0, 3.0, 1.5):
        with pytest.raises(InvalidArgument):
            WeightDist(beta)
    with pytest.raises(InvalidArgument):
        WeightDist(2.5, 0.0)


@pytest.fixture(scope="module")
def million():
    return sample_weights(DIST, 1_000_000, np.random.default_rng(7))


def test_empirical_tail_matches(million):
    m = million.size
    for w in np.geomspace(1.0, 1000.0, 13):
        p = tail_probability(DIST, w)
        emp = np.count_nonzero(million >= w) / m
        assert abs(emp - p) <= 3 * np.sqrt(p * (1 - p) / m) + 1e-12
    p10 = 10 ** -1.5
    assert abs(np.mean(million >= 10) - p10) <= 3 * np.sqrt(p10 * (1 - p10) / m)


def test_mean(million):
    assert abs(million.mean() - DIST.mean) <= 0.05 * DIST.mean


def test_validate_tail_pass(million):
    rep = validate_tail(million, DIST, 0.1)
    assert rep.passed and not rep.degenerate
    assert rep.slope == pytest.approx(-1.5, abs=0.1)


def test_validate_tail_degenerate():
    rep = validate_tail(np.ones(20_000), DIST, 0.1)
    assert rep.degenerate and not rep.passed


def test_validate_tail_wrong_exponent():
    samples = sample_weights(WeightDist(2.2), 200_000, np.random.default_rng(1))
    assert not validate_tail(samples, WeightDist(2.8), 0.1).passed


def test_validate_tail_needs_data():
    with pytest.raises(InsufficientData):
        validate_tail(np.ones(10), DIST, 0.1)
