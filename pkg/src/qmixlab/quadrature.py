"""Small quadrature toolkit: fixed and composite Gauss-Legendre rules plus a
checked wrapper around QUADPACK.

Integrands passed to the Gauss-Legendre helpers must accept numpy arrays.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import QuadratureError


@lru_cache(maxsize=64)
def _unit_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_nodes(a, b, n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _unit_rule(n)
    h = b - a
    return a + h * x, h * w


def fixed_gl(f, a, b, n=32):
    x, w = gl_nodes(a, b, n)
    return float(np.dot(w, f(x)))


def composite_gl(f, a, b, panels, n=16):
    """Composite rule with `panels` equal panels of n nodes each."""
    x, w = _unit_rule(n)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    nodes = edges[:-1, None] + h[:, None] * x[None, :]
    weights = h[:, None] * w[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    # sum per panel first, then across panels (stable ordering)
    return float(np.sum(np.sum(weights * vals, axis=1)))


def converged_composite(f, a, b, tol, panels=1, n=16, max_panels=1 << 16):
    """Composite Gauss-Legendre with panel doubling until two successive
    estimates agree to `tol` (absolute).

    Raises
    ------
    QuadratureError
        If `max_panels` is exceeded before convergence.
    """
    prev = composite_gl(f, a, b, panels, n)
    while panels < max_panels:
        panels *= 2
        cur = composite_gl(f, a, b, panels, n)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"composite rule on [{a}, {b}] not converged to {tol:g} "
        f"within {max_panels} panels (last change {abs(cur - prev):.3g})")


def checked_quad(f, a, b, epsabs=1e-12, epsrel=1e-10, limit=200, points=None):
    """scipy.integrate.quad that turns integration warnings into
    QuadratureError instead of silently returning a poor value."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel,
                                      limit=limit, points=points)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc).strip().splitlines()[0]) from exc
    return val, err
