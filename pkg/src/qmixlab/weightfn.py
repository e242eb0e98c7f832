"""Geometric weight F_{t,t',rho}: the integral over B(z,t) ∩ B(z',t') of
1/(sqrt(cosh t - cosh d(x,z)) sqrt(cosh t' - cosh d(x,z'))), its
three-regime analytic bound and the integrated bound.

Quadrature works in polar coordinates (r, theta) around z with theta
measured from the direction of z'.  Along a ray the distance P(r) to z'
satisfies cosh P = B cosh r - C sinh r (B = cosh rho, C = sinh rho cos theta),
so the ray meets B(z', t') exactly for r between two explicit roots r_lo and
r_hi and

    cosh t' - cosh P(r) = (q/2) e^{r_lo} expm1(r - r_lo) expm1(r_hi - r),   q = B - C.

Both square-root singularities therefore sit at known radii and are removed
by substitution: r = r_lo + v^2 on the lower half of the interval and
e = g sinh^2(u) on the upper half, where e is the distance to the nearer
upper singularity and g the gap to the farther one.  The second substitution
stays uniform as the two shells meet (g -> 0), which is what happens on the
ray through a corner of the lens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import QuadratureError, RegimeBoundaryError
from .hypgeo import (HPoint, Regime, ball_intersection_geometry, classify_regime,
                     cosh_dist_c, dist, polar_from, polar_to)
from .quadrature import checked_quad, gl_nodes

C1 = 32.0 * math.pi
C_CASE3 = 99.0
C6 = 480.0 * math.pi
BOUNDARY_EPS = 1e-6
_INNER_N = 48
_G_FLOOR = 1e-30


@dataclass(frozen=True)
class WeightArgs:
    """(t, t', rho), stored with t >= tp (F is symmetric in the radii)."""

    t: float
    tp: float
    rho: float

    def __post_init__(self):
        t, tp, rho = float(self.t), float(self.tp), float(self.rho)
        if not (t > 0 and tp > 0):
            raise ValueError("radii must be positive")
        if rho < 0:
            raise ValueError("rho must be nonnegative")
        if tp > t:
            t, tp = tp, t
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "tp", tp)
        object.__setattr__(self, "rho", rho)

    @property
    def regime(self) -> Regime:
        return classify_regime(self.t, self.tp, self.rho)

    def boundary_distance(self) -> float:
        """Distance from rho to the nearest regime boundary."""
        return min(abs(self.rho - (self.t - self.tp)), abs(self.rho - self.t),
                   abs(self.rho - (self.t + self.tp)))


@dataclass(frozen=True)
class WeightBound:
    value: float
    regime: Regime


# -- per-ray radial integral ------------------------------------------------------

def _ray_integral(t, tp, B, C, n=_INNER_N):
    """int sinh r / (sqrt(cosh t - cosh r) sqrt(cosh t' - cosh P(r))) dr over
    the part of the ray inside both balls, cosh P = B cosh r - C sinh r."""
    A = math.cosh(tp)
    q = B - C
    p = B + C
    disc = A * A - p * q
    if disc <= 0.0 or q <= 0.0:
        return 0.0
    sd = math.sqrt(disc)
    r_hi = math.log((A + sd) / q)
    r_lo = math.log(p / (A + sd))
    lo = max(0.0, r_lo)
    hi = min(t, r_hi)
    if hi <= lo:
        return 0.0
    mid = 0.5 * (lo + hi)
    e_lo = math.exp(r_lo)

    def common(r):
        # sinh r / sqrt(2 sinh((t+r)/2) * (q/2) e^{r_lo}) : smooth everywhere
        return np.sinh(r) / np.sqrt(2.0 * np.sinh(0.5 * (t + r)) * 0.5 * q * e_lo)

    # lower half: r = r_lo + v^2
    g_l = lo - r_lo
    v, w = gl_nodes(math.sqrt(g_l), math.sqrt(mid - r_lo), n)
    v2 = v * v
    r = r_lo + v2
    ratio = np.expm1(v2) / v2
    val = common(r) * 2.0 / np.sqrt(ratio * np.sinh(0.5 * (t - r)) * np.expm1(r_hi - r))
    total = float(np.dot(w, val))

    # upper half: e = hi - r = g sinh^2 u
    g = max(abs(t - r_hi), _G_FLOOR)
    top_t = t - hi        # gap from hi to the t-shell (0 or g)
    top_p = r_hi - hi     # gap from hi to the t'-shell (0 or g)
    umax = math.asinh(math.sqrt((hi - mid) / g))
    panels = max(1, int(math.ceil(umax / 4.0)))
    edges = np.linspace(0.0, umax, panels + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        u, w = gl_nodes(a, b, n)
        su = np.sinh(u)
        e = g * su * su
        r = hi - e
        dt_ = top_t + e
        dp_ = top_p + e
        # 2 sinh(dt/2)/dt and expm1(dp)/dp, both -> 1 as the gaps close
        f1 = np.where(dt_ > 1e-300, 2.0 * np.sinh(0.5 * dt_) / np.maximum(dt_, 1e-300), 1.0)
        f2 = np.where(dp_ > 1e-300, np.expm1(dp_) / np.maximum(dp_, 1e-300), 1.0)
        f3 = np.expm1(r - r_lo)
        # sqrt(dt * dp) = g sinh u cosh u cancels de = 2 g sinh u cosh u du
        val = common(r) * 2.0 / np.sqrt(0.5 * f1 * f2 * f3)
        total += float(np.dot(w, val))
    return total


def _angular_limits(t, tp, rho):
    """(theta_end, breakpoints) for the angular integral around z."""
    geom = ball_intersection_geometry(t, tp, rho)
    sr = math.sinh(rho)
    if rho < tp or sr == 0.0:
        theta_end = math.pi
    else:
        theta_tan = math.asin(min(1.0, math.sinh(tp) / sr))
        # tangent point of the ray to the t'-sphere, cosh r = cosh rho / cosh t'
        inside = math.cosh(rho) / math.cosh(tp) < math.cosh(t)
        if geom.regime is Regime.CONTAINED or inside:
            theta_end = theta_tan
        else:
            theta_end = geom.psi_max
    pts = []
    if geom.regime in (Regime.LENS_CENTER_INSIDE, Regime.LENS_CENTER_OUTSIDE):
        psi = geom.psi_max
        if 0.0 < psi < theta_end * (1 - 1e-12):
            pts.append(psi)
    return theta_end, pts


def weight_quadrature(args: WeightArgs, tol: float = 1e-9, n: int = _INNER_N) -> float:
    """F_{t,t',rho} by the substituted polar quadrature described above."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    t, tp, rho = args.t, args.tp, args.rho
    reg = args.regime
    if reg is Regime.EMPTY:
        return 0.0
    if rho == 0.0 and t == tp:
        raise QuadratureError("F diverges for coincident shells (rho = 0, t = t')")
    if args.boundary_distance() < BOUNDARY_EPS:
        raise RegimeBoundaryError(f"rho = {rho} within {BOUNDARY_EPS:g} of a regime boundary")
    B = math.cosh(rho)
    S = math.sinh(rho)
    theta_end, pts = _angular_limits(t, tp, rho)
    if rho == 0.0:
        return 2.0 * math.pi * _ray_integral(t, tp, B, 0.0, n)

    def f(th):
        return _ray_integral(t, tp, B, S * math.cos(th), n)

    val, _ = checked_quad(f, 0.0, theta_end, epsabs=tol, epsrel=tol, limit=400,
                       points=pts or None)
    return 2.0 * val


# -- concrete-pair quadrature -----------------------------------------------------

def weight_quadrature_pair(t: float, tp: float, z: HPoint, zp: HPoint,
                           tol: float = 1e-9, n: int = _INNER_N) -> float:
    """F for the concrete centers z, z'.

    Rays are parameterized by the absolute direction phi at z; the ray
    coefficients of cosh d(., z') are fitted from two concrete points on each
    ray, so nothing here passes through the distance-only parameterization
    except the breakpoint locations."""
    if tp > t:
        t, tp, z, zp = tp, t, zp, z
    rho = dist(z, zp)
    args = WeightArgs(t, tp, rho)
    if args.regime is Regime.EMPTY:
        return 0.0
    if args.boundary_distance() < BOUNDARY_EPS:
        raise RegimeBoundaryError(f"rho = {rho} within {BOUNDARY_EPS:g} of a regime boundary")
    _, phi0 = polar_from((z, 0.0), zp)
    theta_end, pts = _angular_limits(t, tp, rho)
    r1, r2 = 0.5, 1.0
    M = np.array([[math.cosh(r1), -math.sinh(r1)], [math.cosh(r2), -math.sinh(r2)]])
    Minv = np.linalg.inv(M)
    zpc = np.array([zp.z])

    def f(phi):
        p1 = polar_to((z, 0.0), r1, phi).z
        p2 = polar_to((z, 0.0), r2, phi).z
        ch = cosh_dist_c(np.array([p1, p2]), zpc)
        B, C = Minv @ ch
        return _ray_integral(t, tp, B, C, n)

    # integrate phi over one full turn starting at phi0 so the lens sits at
    # both ends; breakpoints mirror the ones used on the half-turn
    marks = sorted({theta_end, 2 * math.pi - theta_end, *pts,
                    *[2 * math.pi - p for p in pts]})
    marks = [m for m in marks if 0.0 < m < 2 * math.pi]
    val, _ = checked_quad(lambda s: f(phi0 + s), 0.0, 2 * math.pi, epsabs=tol, epsrel=tol,
                          limit=800, points=marks or None)
    return val


# -- analytic bound ---------------------------------------------------------------

def bound_form(t: float, tp: float, rho: float) -> float:
    """The regime-wise form B(t, t', rho) without the constant C1."""
    args = WeightArgs(t, tp, rho)
    t, tp, rho = args.t, args.tp, args.rho
    reg = args.regime
    if reg is Regime.EMPTY:
        return 0.0
    if args.boundary_distance() == 0.0 or rho == 0.0:
        raise RegimeBoundaryError(f"rho = {rho} lies on a regime boundary")
    if reg is Regime.CONTAINED:
        d = t - tp
        return math.exp(-d / 4.0) / (math.sinh(rho) * math.sinh(d) * (d - rho)) ** 0.25
    if reg is Regime.LENS_CENTER_INSIDE:
        u = tp + rho - t
        return (1.0 - 1.0 / math.cosh(u)) ** (-0.125) / math.sqrt(math.sinh(rho))
    return 1.0 / math.sqrt(math.sinh(rho))


def weight_bound(args: WeightArgs) -> WeightBound:
    return WeightBound(value=C1 * bound_form(args.t, args.tp, args.rho), regime=args.regime)


# -- grid verification ------------------------------------------------------------

@dataclass(frozen=True)
class WeightPoint:
    t: float
    tp: float
    rho: float
    regime: Regime
    f_quad: float
    f_bound: float

    @property
    def ratio(self) -> float:
        return self.f_quad / self.f_bound if self.f_bound > 0 else 0.0


@dataclass
class WeightReport:
    points: List[WeightPoint]
    max_ratio: float
    argmax: Optional[Tuple[float, float, float]]
    violations: List[WeightPoint]
    case3_max: float
    monotone_flags: List[Tuple[float, float, float]]

    @property
    def passed(self) -> bool:
        return not self.violations and self.case3_max <= C_CASE3 * (1 + 1e-6)

    def csv(self) -> str:
        lines = ["t,tp,rho,regime,F_quad,F_bound,ratio"]
        for p in self.points:
            lines.append(f"{p.t:.17g},{p.tp:.17g},{p.rho:.17g},{p.regime.value},"
                         f"{p.f_quad:.17g},{p.f_bound:.17g},{p.ratio:.17g}")
        return "\n".join(lines) + "\n"


def regime_grid(t_values: Sequence[float], tp_count: int, rho_count: int,
                margin: float = 0.05, tp_min: float = 0.3):
    """(t, t', rho) triples: for each t, t' on a grid over [tp_min, t] and
    rho_count values of rho inside each nonempty regime, kept at least
    `margin` away from every boundary and from rho = 0."""
    out = []
    for t in t_values:
        for tp in np.linspace(tp_min, t, tp_count):
            tp = float(tp)
            cuts = [0.0, t - tp, t, t + tp]
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                if hi - lo <= 2 * margin:
                    continue
                for rho in np.linspace(lo + margin, hi - margin, rho_count):
                    out.append((float(t), tp, float(rho)))
    return out


def verify_weight_bounds(points: Sequence[Tuple[float, float, float]], tol: float = 1e-9,
                         rel_slack: float = 1e-6, mono_slack: float = 1e-8,
                         jobs: int = 1) -> WeightReport:
    """Compare quadrature F against C1 * B at each (t, t', rho)."""
    def one(p):
        args = WeightArgs(*p)
        return WeightPoint(args.t, args.tp, args.rho, args.regime,
                           weight_quadrature(args, tol), weight_bound(args).value)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            res = list(pool.map(one, points))
    else:
        res = [one(p) for p in points]
    viol = [p for p in res if p.f_quad > p.f_bound * (1 + rel_slack)]
    best = max(res, key=lambda p: p.ratio) if res else None
    case3 = [p.f_quad * math.sqrt(math.sinh(p.rho)) for p in res
             if p.regime is Regime.LENS_CENTER_OUTSIDE]
    # empirical monotonicity in rho within each (t, t', regime) run
    flags = []
    runs = {}
    for p in res:
        runs.setdefault((p.t, p.tp, p.regime), []).append(p)
    for run in runs.values():
        run.sort(key=lambda p: p.rho)
        for a, b in zip(run[:-1], run[1:]):
            if b.f_quad > a.f_quad * (1 + mono_slack):
                flags.append((b.t, b.tp, b.rho))
    return WeightReport(points=res, max_ratio=best.ratio if best else 0.0,
                        argmax=(best.t, best.tp, best.rho) if best else None,
                        violations=viol, case3_max=max(case3, default=0.0),
                        monotone_flags=flags)


# -- isometry invariance ---------------------------------------------------------

@dataclass
class IsometryReport:
    values: List[Tuple[float, float]]
    max_diff: float
    mismatches: List[int]

    @property
    def passed(self) -> bool:
        return not self.mismatches


def isometry_invariance_check(t: float, tp: float, pairs, tol: float = 1e-9) -> IsometryReport:
    """For each ((z, z'), (w, w')) with equal center distances, compare the
    concrete-pair quadratures."""
    vals, bad = [], []
    worst = 0.0
    for k, ((z, zp), (w, wp)) in enumerate(pairs):
        if abs(dist(z, zp) - dist(w, wp)) > 1e-12:
            raise ValueError(f"pair {k}: center distances differ")
        f1 = weight_quadrature_pair(t, tp, z, zp, tol)
        f2 = weight_quadrature_pair(t, tp, w, wp, tol)
        vals.append((f1, f2))
        d = abs(f1 - f2)
        worst = max(worst, d)
        if d > 2 * tol * (1 + max(f1, f2)):
            bad.append(k)
    return IsometryReport(values=vals, max_diff=worst, mismatches=bad)


# -- integrated bound -------------------------------------------------------------

def _below_gap(w, d, beta):
    """Regime-1 integrand at rho = d - w^2 times d rho/dw = 2w (w cancelled)."""
    rho = d - w * w
    core = np.exp(-0.5 * d) * np.sqrt(np.sinh(rho) / np.sinh(d))
    return 2.0 * core * (1 + rho) * np.exp(-beta * rho)


def _above_gap(w, d, beta):
    """Regime-2 integrand at rho = d + w^2 times 2w.  With u = w^2,
    1 - 1/cosh u = 2 sinh^2(u/2)/cosh u, so the w^{-1} blowup cancels."""
    u = w * w
    rho = d + u
    half = np.where(u > 0, np.sinh(0.5 * u) / np.maximum(0.5 * u, 1e-300), 1.0)
    # (2 sinh^2(u/2)/cosh u)^{-1/4} = (cosh u)^{1/4} / (sqrt(2) sinh(u/2))^{1/2}
    core = np.cosh(u) ** 0.25 / np.sqrt(math.sqrt(2.0) * 0.5 * half)
    return 2.0 * core * (1 + rho) * np.exp(-beta * rho)


def weight_integral_check(t: float, tp: float, beta: float, T: float, tol: float = 1e-10,
                          prefactor: float = 1.0) -> Tuple[float, float]:
    """(lhs, rhs) for int_0^{2T} sinh rho (1 + rho) e^{-beta rho} Fhat^2 d rho
    against (480 pi / beta^2) e^{-beta (t - t') / 2}, with Fhat^2 = prefactor * B^2.

    prefactor = 1 bounds the bare regime forms; prefactor = C1 reproduces the
    constant carried through the derivation of the bound.  Squaring the full bound
    (prefactor = C1^2) does not satisfy the inequality.

    The squared regime-1 form has a (t - t' - rho)^{-1/2} endpoint singularity
    and the regime-2 form a (rho - (t - t'))^{-1/2} one; both sides of
    rho = t - t' are substituted as rho = (t - t') -/+ w^2."""
    if tp > t:
        t, tp = tp, t
    if not (0 < beta <= 1):
        raise ValueError("beta must lie in (0, 1]")
    if 2 * T < t + tp:
        raise ValueError("need 2T >= t + t'")
    d = t - tp
    lhs = 0.0
    if d > 0:
        lhs += checked_quad(lambda w: _below_gap(w, d, beta), 0.0, math.sqrt(d),
                            epsabs=tol, epsrel=tol)[0]
    lhs += checked_quad(lambda w: _above_gap(w, d, beta), 0.0, math.sqrt(tp),
                        epsabs=tol, epsrel=tol)[0]
    # regime 3: sinh(rho) B^2 = 1
    lhs += checked_quad(lambda r: (1 + r) * math.exp(-beta * r), t, t + tp,
                        epsabs=tol, epsrel=tol)[0]
    lhs *= prefactor
    rhs = C6 / beta ** 2 * math.exp(-0.5 * beta * d)
    return lhs, rhs
