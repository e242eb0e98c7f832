"""Upper half-plane primitives: distance, isometries, tangent states, polar
coordinates, hyperbolic trigonometry and two-ball intersection geometry.

Angles of unit tangent vectors are measured counterclockwise from the
positive imaginary direction, so the state (i, 0) is the base frame that the
identity matrix represents.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (self.y > 0.0) or not math.isfinite(self.y) or not math.isfinite(self.x):
            raise ValueError(f"point must lie in the upper half-plane, got y={self.y}")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(float(z.real), float(z.imag))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


I = HPoint(0.0, 1.0)


def _canonical(a, b, c, d):
    for v in (a, b, c):
        if v != 0.0:
            if v < 0.0:
                return -a, -b, -c, -d
            return a, b, c, d
    if d < 0.0:
        return -a, -b, -c, -d
    return a, b, c, d


@dataclass(frozen=True)
class MoebiusMap:
    """Element of PSL(2, R).  Construction rescales to unit determinant and
    picks the sign so that the first nonzero of (a, b, c) is positive."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not det > 0.0:
            raise ValueError(f"matrix must have positive determinant, got {det}")
        s = 1.0 / math.sqrt(det)
        a, b, c, d = _canonical(self.a * s, self.b * s, self.c * s, self.d * s)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap.from_matrix(self.matrix() @ other.matrix())

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def isclose(self, other: "MoebiusMap", tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.matrix() - other.matrix())) <= tol)


def diag_flow(t: float) -> MoebiusMap:
    """The geodesic-flow element diag(e^{t/2}, e^{-t/2})."""
    return MoebiusMap(math.exp(t / 2), 0.0, 0.0, math.exp(-t / 2))


def rotation(phi: float) -> MoebiusMap:
    """Stabilizer of i; rotates tangent directions at i by 2*phi."""
    c, s = math.cos(phi), math.sin(phi)
    return MoebiusMap(c, s, -s, c)


@dataclass(frozen=True)
class Frame:
    """Unit tangent state stored as the group element g with g.(i, 0) = state."""

    m: MoebiusMap

    @classmethod
    def from_state(cls, z: HPoint, angle: float) -> "Frame":
        return cls(frame_matrix(z, angle))

    def state(self) -> Tuple[HPoint, float]:
        return tangent_apply(self.m, (I, 0.0))


def frame_matrix(z: HPoint, angle: float) -> MoebiusMap:
    sy = math.sqrt(z.y)
    g0 = MoebiusMap(sy, z.x / sy, 0.0, 1.0 / sy)
    return g0 @ rotation(angle / 2.0)


# -- distance -----------------------------------------------------------------

def dist(z: HPoint, w: HPoint) -> float:
    """Hyperbolic distance.  Uses the half-angle form
    sinh(d/2) = |z - w| / (2 sqrt(y y')), accurate for nearby points."""
    return 2.0 * math.asinh(math.hypot(z.x - w.x, z.y - w.y) / (2.0 * math.sqrt(z.y * w.y)))


def dist_c(z, w):
    """Vectorized distance on complex arrays."""
    z = np.asarray(z)
    w = np.asarray(w)
    return 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))


def cosh_dist_c(z, w):
    z = np.asarray(z)
    w = np.asarray(w)
    return 1.0 + np.abs(z - w) ** 2 / (2.0 * z.imag * w.imag)


# -- group actions ------------------------------------------------------------

def mobius_apply(g: MoebiusMap, z: HPoint) -> HPoint:
    w = (g.a * z.z + g.b) / (g.c * z.z + g.d)
    # keep the image strictly inside H even when rounding bites
    return HPoint(w.real, (z.y / abs(g.c * z.z + g.d) ** 2))


def mobius_apply_c(m, z):
    """Apply 2x2 matrices (..., 2, 2) to complex points (...) elementwise."""
    m = np.asarray(m)
    z = np.asarray(z)
    den = m[..., 1, 0] * z + m[..., 1, 1]
    num = m[..., 0, 0] * z + m[..., 0, 1]
    w = num / den
    return w.real + 1j * (z.imag / np.abs(den) ** 2)


def tangent_apply(g: MoebiusMap, state: Tuple[HPoint, float]) -> Tuple[HPoint, float]:
    """Push a unit tangent state forward: v -> v / (cz + d)^2."""
    z, angle = state
    den = g.c * z.z + g.d
    new_angle = (angle - 2.0 * cmath.phase(den)) % TWO_PI
    return mobius_apply(g, z), new_angle


# -- polar coordinates --------------------------------------------------------

def polar_to(base: Tuple[HPoint, float], r: float, theta: float) -> HPoint:
    """Point reached by flowing for time r from the base state rotated by theta."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    z, angle = base
    g = frame_matrix(z, angle + theta) @ diag_flow(r)
    return mobius_apply(g, I)


def polar_from(base: Tuple[HPoint, float], x: HPoint) -> Tuple[float, float]:
    """Inverse of polar_to; theta in [0, 2 pi), theta = 0 when x is the base point."""
    z, angle = base
    g = frame_matrix(z, angle)
    xp = mobius_apply(g.inverse(), x).z
    # disk model centered at i: geodesics through the center are diameters and
    # the upward direction at i maps to the positive real axis
    w = (xp - 1j) / (xp + 1j)
    if w == 0:
        return 0.0, 0.0
    return dist(z, x), cmath.phase(w) % TWO_PI


def cosh_side(s1: float, s2: float, gamma: float) -> float:
    """Hyperbolic law of cosines: cosh of the side opposite the included angle."""
    return math.cosh(s1) * math.cosh(s2) - math.sinh(s1) * math.sinh(s2) * math.cos(gamma)


# -- two-ball intersection ----------------------------------------------------

class Regime(enum.Enum):
    CONTAINED = "Contained"
    LENS_CENTER_INSIDE = "LensCenterInside"
    LENS_CENTER_OUTSIDE = "LensCenterOutside"
    EMPTY = "Empty"


@dataclass(frozen=True)
class IntersectionGeom:
    """Geometry of B(z, t) and B(z', t') with d(z, z') = rho, t >= t'.

    theta_max is the half-angle at z' subtended by the lens (angle between
    [z', z] and [z', w]) and psi_max the corresponding angle at z.  a, b, h
    are the lengths |[z, m]|, |[m, z']|, |[m, w]| where m is the foot of the
    common chord on [z, z']; they are set only in the LensCenterOutside
    regime, where m lies strictly between the centers.
    """

    regime: Regime
    a: Optional[float] = None
    b: Optional[float] = None
    h: Optional[float] = None
    theta_max: Optional[float] = None
    psi_max: Optional[float] = None


def classify_regime(t: float, tp: float, rho: float) -> Regime:
    """Regime of the intersection.  Boundary values go to the lower regime:
    rho = t - tp is Contained, rho = t is LensCenterInside, rho = t + tp is
    Empty."""
    if t < tp:
        raise ValueError("expected t >= tp; swap the arguments first")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if rho <= t - tp:
        return Regime.CONTAINED
    if rho <= t:
        return Regime.LENS_CENTER_INSIDE
    if rho < t + tp:
        return Regime.LENS_CENTER_OUTSIDE
    return Regime.EMPTY


def _clamped_acos(x: float) -> float:
    return math.acos(max(-1.0, min(1.0, x)))


def ball_intersection_geometry(t: float, tp: float, rho: float) -> IntersectionGeom:
    if not (t > 0 and tp > 0):
        raise ValueError("radii must be positive")
    regime = classify_regime(t, tp, rho)
    if regime is Regime.EMPTY:
        return IntersectionGeom(regime)
    if regime is Regime.CONTAINED:
        # the small ball sits inside the big one; angles describe the cone
        # of rays from z that meet B(z', tp)
        psi = math.pi if rho <= tp else math.asin(math.sinh(tp) / math.sinh(rho))
        return IntersectionGeom(regime, theta_max=math.pi, psi_max=psi)

    sr = math.sinh(rho)
    cos_theta = 1.0 - (math.cosh(t) - math.cosh(rho - tp)) / (math.sinh(tp) * sr)
    cos_psi = (math.cosh(rho) * math.cosh(t) - math.cosh(tp)) / (sr * math.sinh(t))
    theta_max = _clamped_acos(cos_theta)
    psi_max = _clamped_acos(cos_psi)
    if regime is Regime.LENS_CENTER_INSIDE:
        return IntersectionGeom(regime, theta_max=theta_max, psi_max=psi_max)

    ct = math.cosh(t)
    tanh_a = (ct * math.cosh(rho) - math.cosh(tp)) / (ct * sr)
    a = math.atanh(tanh_a)
    b = rho - a
    h = math.acosh(max(1.0, ct / math.cosh(a)))
    return IntersectionGeom(regime, a=a, b=b, h=h, theta_max=theta_max, psi_max=psi_max)
