"""Wave-propagator kernel K_t(d) = 1_{d<t} / sqrt(cosh t - cosh d), its
periodization over a Fuchsian group, Gaussian mollification, spherical
functions and the eigen-action (Selberg transform) check.

Radial integrals against 1/sqrt(cosh t - cosh r) substitute r = t - u^2,
which turns the endpoint blowup into a smooth integrand.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EnumerationError, QuadratureError
from .hypgeo import HPoint, cosh_dist_c
from .quadrature import converged_composite, fixed_gl, gl_nodes

NORMALIZATION = 1.0 / (2.0 * math.sqrt(2.0) * math.pi)


def _cosh_gap(t, r):
    """cosh t - cosh r without cancellation."""
    return 2.0 * np.sinh(0.5 * (t + r)) * np.sinh(0.5 * (t - r))


def kernel_K(t: float, d: float) -> float:
    if t <= 0 or d < 0:
        raise ValueError("need t > 0 and d >= 0")
    if d >= t:
        return 0.0
    return 1.0 / math.sqrt(float(_cosh_gap(t, d)))


def kernel_mass(t: float) -> float:
    """Closed form int_H K_t(x, y) dy = 4 pi sqrt(cosh t - 1)."""
    if t <= 0:
        raise ValueError("t must be positive")
    return 4.0 * math.pi * math.sqrt(2.0) * math.sinh(t / 2.0)


def radial_integral(fn, t, n=64, panels=1):
    """int_0^t fn(r) sinh(r) / sqrt(cosh t - cosh r) dr via r = t - u^2.

    `fn` takes an array of radii."""
    def integrand(u):
        u2 = u * u
        r = t - u2
        # 2u / sqrt(cosh t - cosh r) with the u cancelled analytically
        jac = 2.0 / np.sqrt(2.0 * np.sinh(t - 0.5 * u2) * np.sinh(0.5 * u2) / np.maximum(u2, 1e-300))
        jac = np.where(u2 > 0, jac, 2.0 / np.sqrt(np.sinh(t)))
        return fn(r) * np.sinh(r) * jac

    su = math.sqrt(t)
    if panels == 1:
        return fixed_gl(integrand, 0.0, su, n)
    edges = np.linspace(0.0, su, panels + 1)
    return sum(fixed_gl(integrand, lo, hi, n) for lo, hi in zip(edges[:-1], edges[1:]))


def kernel_mass_quadrature(t: float, n: int = 64) -> float:
    """2 pi int_0^t sinh r / sqrt(cosh t - cosh r) dr by substituted quadrature."""
    return 2.0 * math.pi * radial_integral(lambda r: np.ones_like(r), t, n)


def kernel_K_gamma(t: float, x: HPoint, y: HPoint, model) -> float:
    """Periodized kernel (1/(2 sqrt2 pi)) sum_gamma K_t(x, gamma y).

    Elements are drawn from the model's group-ball enumeration; the sum is
    certified complete when the enumeration radius covers
    t + d(base, x) + d(base, y)."""
    from .flowsim import enumerate_group, base_distance

    need = t + base_distance(model, x) + base_distance(model, y)
    if need > model.enum_radius:
        raise EnumerationError(
            f"enumeration radius {model.enum_radius} < required {need:.4g}")
    mats, _ = enumerate_group(model, need)
    gy = _apply_many(mats, y.z)
    ch = cosh_dist_c(np.full(gy.shape, x.z), gy)
    cht = math.cosh(t)
    inside = ch < cht
    vals = 1.0 / np.sqrt(cht - ch[inside])
    return NORMALIZATION * float(np.sum(np.sort(vals)))


def _apply_many(mats, z):
    num = mats[:, 0, 0] * z + mats[:, 0, 1]
    den = mats[:, 1, 0] * z + mats[:, 1, 1]
    w = num / den
    return w.real + 1j * (z.imag / np.abs(den) ** 2)


# -- mollified kernel -----------------------------------------------------------

def gaussian(x, eps):
    return np.exp(-0.5 * (x / eps) ** 2) / (math.sqrt(2.0 * math.pi) * eps)


def mollified_kernel(t: float, d: float, eps: float, tol: float = 1e-10,
                     width: float = 8.0) -> float:
    """(1/(2 sqrt2 pi)) int_d^inf (phi_eps(t - v) - phi_eps(-t - v)) / sqrt(cosh v - cosh d) dv.

    The v-range is cut where the Gaussian tails fall below the tolerance;
    v = d + u^2 removes the endpoint singularity.  The mirrored bump at -t
    contributes only when t < width * eps.
    """
    if eps <= 0 or tol <= 0:
        raise ValueError("eps and tol must be positive")
    vmax = t + width * eps
    if vmax <= d:
        return 0.0

    def integrand(u):
        u2 = u * u
        v = d + u2
        g = gaussian(t - v, eps)
        if t < width * eps:
            g = g - gaussian(-t - v, eps)
        # 2u / sqrt(cosh v - cosh d), u cancelled
        den = np.sqrt(2.0 * np.sinh(d + 0.5 * u2) * np.sinh(0.5 * u2) / np.maximum(u2, 1e-300))
        den = np.where(u2 > 0, den, np.sqrt(max(np.sinh(d), 0.0)))
        return g * 2.0 / den

    umax = math.sqrt(vmax - d)
    # place panel edges so the Gaussian bump at v = t is resolved
    pieces = [0.0]
    lo_bump = t - width * eps
    if lo_bump > d:
        pieces.append(math.sqrt(lo_bump - d))
    pieces.append(umax)
    total = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        if hi <= lo:
            continue
        panels = max(1, int(math.ceil((hi - lo) / max(eps, 1e-3))))
        total += converged_composite(integrand, lo, hi, tol, panels=panels, n=16)
    return NORMALIZATION * total


# -- spherical functions and the eigen-action ------------------------------------

def spherical_fn(rho: float, r, tol: float = 1e-13, max_nodes: int = 1 << 16):
    """phi_rho(r) = (1/2pi) int_0^{2pi} (cosh r + sinh r cos th)^{i rho - 1/2} d th.

    Periodic analytic integrand, so the trapezoid rule converges
    geometrically; node counts double until successive values agree to tol.
    Vectorizes over r.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s = complex(-0.5, rho)
    m = 16
    prev = _spherical_trap(s, r, m)
    while m < max_nodes:
        m *= 2
        cur = _spherical_trap(s, r, m)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur if cur.size > 1 else float(cur[0])
        prev = cur
    raise QuadratureError(f"spherical function not converged to {tol:g} with {m} nodes")


def _spherical_trap(s, r, m):
    th = 2.0 * math.pi * np.arange(m) / m
    base = np.cosh(r)[:, None] + np.sinh(r)[:, None] * np.cos(th)[None, :]
    # base >= e^{-r} > 0, so the principal log is real
    vals = np.exp(s * np.log(base))
    return np.mean(vals, axis=1).real


def selberg_check(t: float, rho: float, tol: float = 1e-10, n: int = 96):
    """Kernel action on the radial eigenfunction at the center versus
    the multiplier sin(t rho)/rho.  Returns (lhs, rhs)."""
    if t <= 0 or rho <= 0:
        raise ValueError("t and rho must be positive")
    panels = max(1, int(math.ceil(rho * t / 4.0)))

    def fn(r):
        return spherical_fn(rho, r, tol=tol * 1e-2)

    lhs = NORMALIZATION * 2.0 * math.pi * radial_integral(fn, t, n=n, panels=panels)
    rhs = math.sin(t * rho) / rho
    return lhs, rhs
