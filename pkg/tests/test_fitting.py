import math

import numpy as np
import pytest

from heisenberg.fitting import fit_isometry, lower_bound_dilation_minimax
from heisenberg.geodesics import cc_distance
from heisenberg.group import Isometry
from heisenberg.pansu import ball_sample


@pytest.fixture
def cloud():
    return ball_sample(1.0, 400, seed=9)


@pytest.mark.parametrize("iso", [
    Isometry((0.5, -1.5, 2.0), 0.0, 0),
    Isometry((0.0, 0.0, 0.0), 2.2, 0),
    Isometry((0.0, 0.0, 0.0), 0.0, 1),
], ids=["translation", "rotation", "reflection"])
def test_exact_recovery_of_generators(iso, cloud):
    fit = fit_isometry(cloud, iso(cloud))
    assert fit.residual <= 1e-12
    assert fit.m == iso.m
    np.testing.assert_allclose(fit.translation, iso.w, atol=1e-8)
    assert math.cos(fit.iso.theta - iso.theta) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(fit.A_matrix.T @ fit.A_matrix, np.eye(2), atol=1e-10)


def test_exact_recovery_of_random_compositions(cloud, rng):
    for _ in range(10):
        parts = [Isometry(tuple(rng.normal(size=3)), rng.uniform(0, 6), int(rng.integers(2))) for _ in range(3)]
        iso = parts[0].compose(parts[1]).compose(parts[2])
        fit = fit_isometry(cloud, iso(cloud))
        assert fit.residual <= 1e-12


def test_reflection_forbidden_costs_residual(cloud):
    target = Isometry((0, 0, 0), 0.9, 1)(cloud)
    free = fit_isometry(cloud, target, allow_reflection=True)
    forced = fit_isometry(cloud, target, allow_reflection=False)
    assert forced.m == 0
    assert forced.residual > free.residual + 1e-3


def test_fixed_origin_fit(cloud):
    iso = Isometry((0, 0, 0), 1.4, 1)
    fit = fit_isometry(cloud, iso(cloud), fix_origin=True)
    assert fit.residual <= 1e-12
    assert fit.translation.tolist() == [0.0, 0.0, 0.0]


def test_dilation_fit_is_near_identity(cloud):
    eps = 1e-3
    fit = fit_isometry(cloud, (1 + eps) * cloud * [1, 1, 1 + eps])
    assert fit.m == 0
    assert math.cos(fit.iso.theta) == pytest.approx(1.0, abs=1e-6)
    np.testing.assert_allclose(fit.translation, 0, atol=1e-2)
    # mean squared error is of the order of the vertical shift (2 eps + eps^2)/(2 pi) times pi/2
    assert fit.residual < 10 * math.pi * eps / 2


def test_degenerate_samples_rejected():
    line = np.stack([np.linspace(0, 1, 10), 2 * np.linspace(0, 1, 10), np.zeros(10)], axis=-1)
    with pytest.raises(ValueError):
        fit_isometry(line, line)
    with pytest.raises(ValueError):
        fit_isometry(line, line[:5])


def test_lower_bound_is_binding():
    eps = 1e-2
    lb = lower_bound_dilation_minimax(eps)
    north = np.array([0.0, 0.0, 1 / math.pi])
    image = (1 + eps) ** 2 * north
    # the best central shift w splits the gap between O and the pole evenly
    shift = 0.5 * (image[2] - north[2])
    assert lb == pytest.approx(float(cc_distance(np.zeros(3), [0, 0, shift])), rel=1e-12)
