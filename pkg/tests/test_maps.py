import logging
import math

import numpy as np
import pytest

from heisenberg import group
from heisenberg.geodesics import cc_distance
from heisenberg.group import Isometry
from heisenberg.maps import (
    POTENTIALS,
    Composition,
    Dilation,
    IsometryMap,
    KRFlow,
    Morphism,
    NumericError,
    PotentialField,
    Spiral,
    audit_potential,
    bilip_estimate,
    integrate_flow,
    kr_vector_field,
    parse_map,
    phi_conjugate,
    spiral_bilip_bound,
    spiral_jacobian_norm,
)
from heisenberg.pansu import op_norm, pansu_jacobian


def pairs_in_ball(rng, n, R):
    return rng.uniform(-R, R, size=(n, 3)) * [1, 1, R], rng.uniform(-R, R, size=(n, 3)) * [1, 1, R]


def test_dilation_and_spiral_values():
    eps = 0.01
    np.testing.assert_allclose(Dilation(1 + eps)([0, 0, 1]), [0, 0, (1 + eps) ** 2])
    k, s = 0.3, 2.5
    expected = [s * math.cos(k * math.log(s)), s * math.sin(k * math.log(s)), -k * s * s]
    np.testing.assert_allclose(Spiral(k)([s, 0, 0]), expected, rtol=1e-14)
    np.testing.assert_array_equal(Spiral(k)([0, 0, 4.0]), [0, 0, 4.0])


def test_kr_field_examples():
    np.testing.assert_allclose(kr_vector_field(POTENTIALS["one"], [0.3, -2, 5]), [0, 0, 1])
    np.testing.assert_allclose(kr_vector_field(POTENTIALS["x"], [0, 0, 0]), [0, 0.25, 0])
    # 1/4 Y + x T at (1,0,0): Y = d_y - 2x d_t contributes -1/2
    np.testing.assert_allclose(kr_vector_field(POTENTIALS["x"], [1, 0, 0]), [0, 0.25, 0.5])


def test_constant_flow_is_vertical_translation(rng):
    np.testing.assert_allclose(KRFlow("one", 2.5)([1, 1, 0]), [1, 1, 2.5], atol=1e-12)
    p = rng.normal(size=(20, 3))
    moved = integrate_flow(POTENTIALS["one"], 0.7, p)
    np.testing.assert_allclose(moved, group.multiply([0, 0, 0.7], p), atol=1e-10)
    np.testing.assert_array_equal(integrate_flow(POTENTIALS["sin_x"], 0.0, p), p)


def test_rk4_converges_at_fourth_order():
    # sin_x has a constant field along its orbits, so RK4 is exact there
    pf, p, s = POTENTIALS["xy_bump"], np.array([0.4, -0.3, 0.2]), 2.0
    ref = integrate_flow(pf, s, p, h=1e-4)
    errs = [np.linalg.norm(integrate_flow(pf, s, p, h=h) - ref) for h in (0.2, 0.1, 0.05)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(12 < r < 20 for r in ratios), ratios


def test_flow_determinism():
    p = np.array([0.1, 0.2, 0.3])
    a = KRFlow("xy_bump", 0.4)(p)
    b = KRFlow("xy_bump", 0.4)(p)
    assert a.tobytes() == b.tobytes()


def test_flow_rejects_bad_inputs():
    with pytest.raises(ValueError):
        KRFlow("sin_x", 1.0, h=0.0)
    with pytest.raises(KeyError):
        KRFlow("nope", 1.0)
    blow = PotentialField("blow", lambda x, y, t: np.exp(t), lambda x, y, t: 0 * x, lambda x, y, t: 0 * x, 0.0)
    with pytest.raises(NumericError), np.errstate(over="ignore", invalid="ignore"):
        integrate_flow(blow, 5.0, [0, 0, 700.0], h=0.5)


def test_audit_catches_wrong_derivative():
    bad = PotentialField("bad", lambda x, y, t: x * x, lambda x, y, t: x, lambda x, y, t: 0 * x, 2.0)
    with pytest.raises(ValueError):
        audit_potential(bad)
    for pf in POTENTIALS.values():
        assert audit_potential(pf) < 1e-6


def test_bump_constant_covers_second_derivatives(rng):
    pf = POTENTIALS["xy_bump"]
    x, y = rng.uniform(-3, 3, 500), rng.uniform(-3, 3, 500)
    h = 1e-4
    pxx = (pf.value(x + h, y, 0) - 2 * pf.value(x, y, 0) + pf.value(x - h, y, 0)) / h ** 2
    assert np.max(np.abs(pxx)) <= pf.c0


def test_bilip_trivial_cases(rng):
    p, q = pairs_in_ball(rng, 500, 2.0)
    eps = 0.02
    est = bilip_estimate(Dilation(1 + eps), p, q)
    assert est.upper == pytest.approx(1 + eps, rel=1e-9) and est.lower == pytest.approx(1 + eps, rel=1e-9)
    est = bilip_estimate(IsometryMap(Isometry((1, -2, 0.5), 0.9, 1)), p, q)
    assert est.upper == pytest.approx(1, abs=1e-8) and est.lower == pytest.approx(1, abs=1e-8)


def test_spiral_bilip_constant(rng):
    p, q = pairs_in_ball(rng, 10_000, 5.0)
    est = bilip_estimate(Spiral(0.1), p, q)
    assert est.upper <= spiral_bilip_bound(0.1) + 1e-3
    assert est.upper <= spiral_jacobian_norm(0.1) + 1e-3
    assert est.lower >= 1 / spiral_jacobian_norm(0.1) - 1e-3


@pytest.mark.parametrize("m", [Spiral(0.2), KRFlow("sin_x", 0.3), Dilation(1.05)])
def test_lipschitz_from_jacobian(m, rng):
    p, q = pairs_in_ball(rng, 400, 1.5)
    sup_j = float(np.max(op_norm(pansu_jacobian(m, rng.uniform(-1.5, 1.5, size=(400, 3))).matrix)))
    assert bilip_estimate(m, p, q).upper <= sup_j + 1e-2


def test_bilip_skips_coincident_pairs(caplog):
    p = np.array([[0, 0, 0], [1, 0, 0]], dtype=float)
    with caplog.at_level(logging.WARNING):
        est = bilip_estimate(Dilation(2.0), p, [[0, 0, 0], [2, 0, 0]])
    assert est.skipped == 1
    with pytest.raises(ValueError):
        bilip_estimate(Dilation(2.0), p, p)


def test_spiral_is_vertical_lines_preserving(rng):
    z = rng.normal(size=(50, 3))
    delta = 0.37
    lifted = z + [0, 0, delta]
    diff = Spiral(0.4)(lifted) - Spiral(0.4)(z)
    np.testing.assert_allclose(diff, np.tile([0, 0, delta], (50, 1)), atol=1e-12)


def test_phi_conjugate_examples():
    p = np.array([0.7, -1.3, 2.0])
    x, y, t = p
    np.testing.assert_allclose(phi_conjugate(Morphism(2, 0, 0, 1), p), [-x, 0, -t + 2 * x * y], atol=1e-14)
    np.testing.assert_array_equal(phi_conjugate(IsometryMap(), p), [0, 0, 0])
    eps = 0.1
    np.testing.assert_allclose(phi_conjugate(Dilation(1 + eps), [0, 0, 1]), [0, 0, 1 - (1 + eps) ** 2])


def test_composition_applies_right_to_left():
    f = Composition((Dilation(2.0), IsometryMap(Isometry((1, 0, 0)))))
    np.testing.assert_allclose(f([0, 0, 0]), [2, 0, 0])
    with pytest.raises(ValueError):
        Composition(())


def test_parse_map():
    assert parse_map("spiral:k=0.05") == Spiral(0.05)
    assert parse_map("dilation:eps=1e-3") == Dilation(1.001)
    assert parse_map("krflow:p=sin_x,s=0.1,h=1e-3") == KRFlow("sin_x", 0.1, 1e-3)
    assert parse_map("morphism:a=2") == Morphism(2, 0, 0, 1)
    iso = parse_map("isometry:theta=0.5,m=1,w=1/2/3")
    assert iso.iso == Isometry((1, 2, 3), 0.5, 1)
    comp = parse_map("dilation:lam=2|spiral:k=0.1")
    np.testing.assert_allclose(comp([1, 0, 0]), Dilation(2)(Spiral(0.1)([1, 0, 0])))
    for bad in ("warp:k=1", "spiral:k", "dilation:lam=-1"):
        with pytest.raises(ValueError):
            parse_map(bad)


def test_describe_roundtrips():
    for m in (Spiral(0.25), Dilation(1.5), KRFlow("x", 0.2, 0.01), Morphism(1, 2, 3, 4)):
        assert parse_map(m.describe()) == m


def test_dilation_preserves_distance_ratio(rng):
    p, q = rng.normal(size=(100, 3)), rng.normal(size=(100, 3))
    np.testing.assert_allclose(cc_distance(Dilation(3.0)(p), Dilation(3.0)(q)), 3 * cc_distance(p, q), rtol=1e-9)
