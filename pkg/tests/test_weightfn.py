import math

import numpy as np
import pytest

from qmixlab.errors import QuadratureError, RegimeBoundaryError
from qmixlab.hypgeo import HPoint, MoebiusMap, Regime, dist, mobius_apply
from qmixlab.weightfn import (C1, C6, WeightArgs, bound_form, isometry_invariance_check,
                              regime_grid, verify_weight_bounds, weight_bound,
                              weight_integral_check, weight_quadrature, weight_quadrature_pair)


def mc_weight(t, tp, rho, n, seed=1, chunk=10 ** 6):
    """Monte Carlo estimate of F in hyperboloid coordinates.

    Samples from an equal mixture of the two single-shell densities
    proportional to 1/sqrt(cosh t - cosh d(x, center)), both of which are
    sampled exactly, and weights by the full integrand."""
    rng = np.random.default_rng(seed)
    mass = lambda s: 4 * math.pi * math.sqrt(2) * math.sinh(s / 2)
    mt, mp = mass(t), mass(tp)
    ch, sh = math.cosh(rho), math.sinh(rho)
    s = s2 = 0.0
    for _ in range(n // chunk):
        about_z = rng.random(chunk) < 0.5
        u = rng.random(chunk)
        ph = rng.uniform(0, 2 * math.pi, chunk)
        R = np.where(about_z, t, tp)
        cr = np.cosh(R) - (np.sqrt(np.cosh(R) - 1) * (1 - u)) ** 2
        sr = np.sqrt(np.maximum(cr * cr - 1, 0))
        X0, X1 = cr, sr * np.cos(ph)
        # samples drawn about z' are moved out along the axis by rho
        Y0 = np.where(about_z, X0, ch * X0 + sh * X1)
        Y1 = np.where(about_z, X1, sh * X0 + ch * X1)
        gz = math.cosh(t) - Y0
        gp = math.cosh(tp) - (ch * Y0 - sh * Y1)
        f = np.where((gz > 0) & (gp > 0), 1 / np.sqrt(np.abs(gz * gp)), 0.0)
        qz = np.where(gz > 0, 1 / np.sqrt(np.abs(gz)) / mt, 0.0)
        qp = np.where(gp > 0, 1 / np.sqrt(np.abs(gp)) / mp, 0.0)
        w = f / (0.5 * qz + 0.5 * qp)
        s += w.sum()
        s2 += (w * w).sum()
    mean = s / n
    return mean, math.sqrt((s2 / n - mean ** 2) / n)


def test_against_monte_carlo():
    ref = weight_quadrature(WeightArgs(1.2, 0.7, 1.0), tol=1e-10)
    m, se = mc_weight(1.2, 0.7, 1.0, 10 ** 7)
    assert abs(m - ref) <= 3 * se
    assert se / m < 1e-3


def test_frozen_value_and_symmetry():
    # frozen after the Monte Carlo agreement above
    v = weight_quadrature(WeightArgs(1.2, 0.7, 1.0), tol=1e-10)
    assert v == pytest.approx(7.088694036070092, rel=1e-9)
    assert weight_quadrature(WeightArgs(0.7, 1.2, 1.0), tol=1e-10) == pytest.approx(v, rel=1e-12)


def test_contained_regime_reduces_to_single_shell_mass():
    # when B(z', t') sits deep inside B(z, t) with rho tiny, F is close to the
    # t'-shell mass divided by sqrt(cosh t - cosh t'') for d(x, z) <= t'
    t, tp = 3.0, 0.2
    v = weight_quadrature(WeightArgs(t, tp, 1e-3))
    lo = 4 * math.pi * math.sqrt(2) * math.sinh(tp / 2) / math.sqrt(math.cosh(t) - 1)
    hi = 4 * math.pi * math.sqrt(2) * math.sinh(tp / 2) / math.sqrt(math.cosh(t) - math.cosh(tp + 1e-3))
    assert lo < v < hi


def test_empty_and_degenerate():
    assert weight_quadrature(WeightArgs(1.0, 0.5, 2.0)) == 0.0
    with pytest.raises(QuadratureError):
        weight_quadrature(WeightArgs(1.0, 1.0, 0.0))
    with pytest.raises(RegimeBoundaryError):
        weight_quadrature(WeightArgs(2.0, 1.0, 1.0 + 1e-8))
    with pytest.raises(ValueError):
        WeightArgs(-1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        weight_quadrature(WeightArgs(2.0, 1.0, 0.5), tol=0.0)


def test_args_are_ordered():
    a = WeightArgs(0.5, 2.0, 1.7)
    assert (a.t, a.tp) == (2.0, 0.5)
    assert a.regime is Regime.LENS_CENTER_INSIDE


@pytest.mark.parametrize("t,tp,rho", [(3.0, 1.0, 0.5), (1.0, 0.9, 1.5), (2.0, 1.5, 1.0), (2.0, 0.5, 2.3)])
def test_single_point_below_bound(t, tp, rho):
    a = WeightArgs(t, tp, rho)
    assert weight_quadrature(a) < weight_bound(a).value


def test_bound_forms():
    # regime 3 example
    assert C1 * bound_form(1.5, 1.0, 2.0) == pytest.approx(32 * math.pi / math.sqrt(math.sinh(2.0)))
    # regime 2: (1 - 1/cosh(t' + rho - t))^{-1/8} / sqrt(sinh rho)
    u = 1.0 + 1.5 - 2.0
    assert bound_form(2.0, 1.0, 1.5) == pytest.approx(
        (1 - 1 / math.cosh(u)) ** -0.125 / math.sqrt(math.sinh(1.5)))
    d = 2.0
    assert bound_form(3.0, 1.0, 0.5) == pytest.approx(
        math.exp(-d / 4) / (math.sinh(0.5) * math.sinh(d) * (d - 0.5)) ** 0.25)
    assert bound_form(1.0, 0.5, 2.0) == 0.0
    with pytest.raises(RegimeBoundaryError):
        bound_form(2.0, 1.0, 1.0)


def test_regime_grid_margins():
    pts = regime_grid([1.0, 2.0], 3, 4)
    regimes = {WeightArgs(*p).regime for p in pts}
    assert regimes == {Regime.CONTAINED, Regime.LENS_CENTER_INSIDE, Regime.LENS_CENTER_OUTSIDE}
    assert min(WeightArgs(*p).boundary_distance() for p in pts) >= 0.05 - 1e-12


def test_small_grid_verification():
    rep = verify_weight_bounds(regime_grid([0.8, 1.6], 2, 3))
    assert rep.passed and 0 < rep.max_ratio < 1
    lines = rep.csv().strip().splitlines()
    assert lines[0] == "t,tp,rho,regime,F_quad,F_bound,ratio"
    assert len(lines) == len(rep.points) + 1


def test_pair_quadrature_matches_distance_form():
    z, zp = HPoint(0.3, 0.8), HPoint(1.1, 2.0)
    rho = dist(z, zp)
    assert weight_quadrature_pair(1.5, 1.0, z, zp) == pytest.approx(
        weight_quadrature(WeightArgs(1.5, 1.0, rho)), rel=1e-10)


def test_isometry_invariance():
    z, zp = HPoint(0.0, 1.0), HPoint(0.0, math.exp(1.3))
    translate = MoebiusMap(1.0, 2.5, 0.0, 1.0)
    dilate = MoebiusMap(math.sqrt(3.0), 0.0, 0.0, 1 / math.sqrt(3.0))
    rot = MoebiusMap(math.cos(0.7), math.sin(0.7), -math.sin(0.7), math.cos(0.7))
    pairs = [((z, zp), (mobius_apply(g, z), mobius_apply(g, zp))) for g in (translate, dilate, rot)]
    rep = isometry_invariance_check(1.5, 1.0, pairs)
    assert rep.passed and rep.max_diff < 1e-8
    with pytest.raises(ValueError):
        isometry_invariance_check(1.5, 1.0, [((z, zp), (z, HPoint(0.0, 2.0)))])


def test_weight_integral_example():
    lhs, rhs = weight_integral_check(3.0, 1.0, 0.5, 2.5)
    assert lhs <= rhs
    assert rhs == pytest.approx(C6 / 0.25 * math.exp(-0.5))


def test_weight_integral_constant_variants():
    # one factor of C1 still fits under C6; the square of the full bound does not
    lhs, rhs = weight_integral_check(3.0, 1.0, 0.5, 2.5, prefactor=C1)
    assert lhs <= rhs
    lhs, rhs = weight_integral_check(3.0, 1.0, 0.5, 2.5, prefactor=C1 ** 2)
    assert lhs > rhs


def test_weight_integral_validation():
    with pytest.raises(ValueError):
        weight_integral_check(3.0, 1.0, 1.5, 2.5)
    with pytest.raises(ValueError):
        weight_integral_check(3.0, 1.0, 0.5, 1.0)
