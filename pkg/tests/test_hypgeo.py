import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmixlab.hypgeo import (I, HPoint, MoebiusMap, Regime, ball_intersection_geometry,
                            classify_regime, cosh_side, diag_flow, dist, dist_c, frame_matrix,
                            mobius_apply, polar_from, polar_to, rotation, tangent_apply, Frame)

xs = st.floats(-5, 5)
ys = st.floats(0.05, 20)
points = st.builds(HPoint, xs, ys)


def moebius():
    return st.tuples(st.floats(0.3, 3), st.floats(-3, 3), st.floats(-3, 3)).map(
        lambda p: MoebiusMap(p[0], p[1], p[2], (1 + p[1] * p[2]) / p[0]))


def test_known_distances():
    assert dist(I, HPoint(0, 2)) == pytest.approx(math.log(2), rel=1e-15)
    assert dist(I, HPoint(1, 1)) == pytest.approx(math.acosh(1.5), rel=1e-15)
    assert dist(I, I) == 0.0


def test_point_validation():
    with pytest.raises(ValueError):
        HPoint(0.0, 0.0)
    with pytest.raises(ValueError):
        HPoint(0.0, -1.0)


def test_nearby_points_keep_precision():
    d = dist(HPoint(0, 1), HPoint(1e-9, 1))
    assert d == pytest.approx(1e-9, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(points, points, points)
def test_metric_axioms(a, b, c):
    assert dist(a, b) == pytest.approx(dist(b, a), abs=1e-12)
    assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9


@settings(max_examples=60, deadline=None)
@given(points, points, moebius())
def test_isometry_invariance(a, b, g):
    d0 = dist(a, b)
    d1 = dist(mobius_apply(g, a), mobius_apply(g, b))
    assert d1 == pytest.approx(d0, rel=1e-9, abs=1e-9)


def test_moebius_normalization_and_group_law():
    g = MoebiusMap(2.0, 1.0, 0.0, 2.0)
    assert g.a * g.d - g.b * g.c == pytest.approx(1.0)
    neg = MoebiusMap(-1.0, -2.0, -3.0, -7.0)
    assert neg.a > 0
    h = MoebiusMap(1.0, 3.0, 0.5, 2.5)
    assert (g @ g.inverse()).isclose(MoebiusMap.identity())
    z = HPoint(0.3, 0.7)
    lhs = mobius_apply(g @ h, z)
    rhs = mobius_apply(g, mobius_apply(h, z))
    assert lhs.x == pytest.approx(rhs.x, abs=1e-12) and lhs.y == pytest.approx(rhs.y, rel=1e-12)
    with pytest.raises(ValueError):
        MoebiusMap(0.0, 1.0, 1.0, 0.0)


def test_flow_and_rotation_at_base():
    z = mobius_apply(diag_flow(2.0), I)
    assert z.x == pytest.approx(0.0) and z.y == pytest.approx(math.exp(2.0))
    _, ang = tangent_apply(rotation(0.3), (I, 0.0))
    assert ang == pytest.approx(0.6)


def test_frame_roundtrip():
    z = HPoint(-0.4, 1.7)
    f = Frame.from_state(z, 1.1)
    w, a = f.state()
    assert (w.x, w.y) == pytest.approx((z.x, z.y), abs=1e-12)
    assert a == pytest.approx(1.1, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(points, st.floats(0, 2 * math.pi), st.floats(0.01, 6), st.floats(0, 2 * math.pi - 1e-3))
def test_polar_roundtrip(z, angle, r, theta):
    x = polar_to((z, angle), r, theta)
    r2, th2 = polar_from((z, angle), x)
    assert r2 == pytest.approx(r, rel=1e-8, abs=1e-9)
    diff = (th2 - theta + math.pi) % (2 * math.pi) - math.pi
    assert abs(diff) < 1e-7


def test_polar_base_point():
    assert polar_from((I, 0.0), I) == (0.0, 0.0)
    with pytest.raises(ValueError):
        polar_to((I, 0.0), -1.0, 0.0)


def test_law_of_cosines_matches_distance():
    z = HPoint(0.2, 1.3)
    p = polar_to((z, 0.4), 1.1, 0.0)
    q = polar_to((z, 0.4), 0.7, 1.2)
    assert math.acosh(cosh_side(1.1, 0.7, 1.2)) == pytest.approx(dist(p, q), rel=1e-12)


def test_vectorized_distance_agrees():
    rng = np.random.default_rng(0)
    z = rng.uniform(-2, 2, 20) + 1j * rng.uniform(0.1, 3, 20)
    w = rng.uniform(-2, 2, 20) + 1j * rng.uniform(0.1, 3, 20)
    ref = [dist(HPoint.from_complex(a), HPoint.from_complex(b)) for a, b in zip(z, w)]
    assert np.allclose(dist_c(z, w), ref, rtol=1e-14)


@pytest.mark.parametrize("rho,expected", [
    (0.5, Regime.CONTAINED), (1.0, Regime.CONTAINED),          # boundary t - t' -> Contained
    (1.5, Regime.LENS_CENTER_INSIDE), (2.0, Regime.LENS_CENTER_INSIDE),
    (2.5, Regime.LENS_CENTER_OUTSIDE), (3.0, Regime.EMPTY), (4.0, Regime.EMPTY),
])
def test_regime_classification(rho, expected):
    assert classify_regime(2.0, 1.0, rho) is expected


def test_regime_argument_errors():
    with pytest.raises(ValueError):
        classify_regime(1.0, 2.0, 0.5)
    with pytest.raises(ValueError):
        classify_regime(2.0, 1.0, -0.1)


@pytest.mark.parametrize("t,tp,rho", [(1.0, 0.8, 1.5), (2.0, 1.5, 2.8), (1.2, 0.7, 1.5)])
def test_lens_outside_pythagoras(t, tp, rho):
    g = ball_intersection_geometry(t, tp, rho)
    assert g.regime is Regime.LENS_CENTER_OUTSIDE
    assert g.a + g.b == pytest.approx(rho)
    assert math.cosh(g.a) * math.cosh(g.h) == pytest.approx(math.cosh(t), rel=1e-12)
    assert math.cosh(g.b) * math.cosh(g.h) == pytest.approx(math.cosh(tp), rel=1e-12)


def test_lens_outside_reference_values():
    # frozen from the hyperbolic Pythagoras relations above
    g = ball_intersection_geometry(1.0, 0.8, 1.5)
    assert (g.a, g.b, g.h) == pytest.approx((0.86288, 0.63712, 0.45517), abs=5e-6)


@pytest.mark.parametrize("t,tp,rho", [(1.0, 0.8, 1.5), (2.0, 1.5, 1.0), (1.5, 1.5, 0.7)])
def test_lens_corner_angles(t, tp, rho):
    g = ball_intersection_geometry(t, tp, rho)
    z = HPoint(0.1, 0.9)
    zp = polar_to((z, 0.0), rho, 0.0)
    w = polar_to((z, 0.0), t, g.psi_max)
    assert dist(w, zp) == pytest.approx(tp, rel=1e-10)
    _, th_z = polar_from((zp, 0.0), z)
    _, th_w = polar_from((zp, 0.0), w)
    ang = abs((th_w - th_z + math.pi) % (2 * math.pi) - math.pi)
    assert ang == pytest.approx(g.theta_max, abs=1e-9)


def test_contained_and_empty_geometry():
    g = ball_intersection_geometry(3.0, 1.0, 0.5)
    assert g.regime is Regime.CONTAINED and g.theta_max == math.pi and g.psi_max == math.pi
    assert g.a is None
    g = ball_intersection_geometry(3.0, 1.0, 1.5)
    assert g.psi_max == pytest.approx(math.asin(math.sinh(1.0) / math.sinh(1.5)))
    assert ball_intersection_geometry(1.0, 0.5, 2.0).regime is Regime.EMPTY


def test_frame_matrix_moves_base():
    z = HPoint(0.7, 2.5)
    w = mobius_apply(frame_matrix(z, 2.0), I)
    assert (w.x, w.y) == pytest.approx((z.x, z.y))
