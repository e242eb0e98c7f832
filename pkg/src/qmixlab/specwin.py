"""Spectral window G_{tau,T}(a, b) = |(1/T) int_0^T cos(t tau) h_t(a) h_t(b) dt|
with h_t(x) = sin(t x)/x, its closed form, an independent quadrature, the
8 pi a b lower-bound sweep and ridge grids for contour plots."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import converged_composite

TAYLOR_CUTOFF = 1e-4


@dataclass(frozen=True)
class WindowParams:
    """Spectral window I = [rho_min, rho_max] with half-width delta and
    frequency offset tau.  T is derived from T * delta = pi / 2."""

    rho_min: float
    rho_max: float
    delta: float
    tau: float = 0.0
    T: float = field(init=False)

    def __post_init__(self):
        if not (0 < self.rho_min <= self.rho_max):
            raise ValueError("need 0 < rho_min <= rho_max")
        if not (0 < self.delta < (2.0 / 9.0) * self.rho_min):
            raise ValueError(
                f"delta must lie in (0, 2/9 * rho_min) = (0, {2 * self.rho_min / 9:.6g}), "
                f"got {self.delta}")
        object.__setattr__(self, "T", math.pi / (2.0 * self.delta))


@dataclass(frozen=True)
class WindowValue:
    g: float
    bound: float
    margin: float

    @classmethod
    def at(cls, a, b, tau, T):
        g = window_closed_form(a, b, tau, T)
        return cls(g=g, bound=1.0 / (8 * math.pi * a * b), margin=g * 8 * math.pi * a * b - 1.0)


def h_sinc(t, x):
    """sin(t x)/x, equal to t at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(t * x) < TAYLOR_CUTOFF
    out[small] = t - t ** 3 * x[small] ** 2 / 6.0
    xs = x[~small]
    out[~small] = np.sin(t * xs) / xs
    return out if out.ndim else float(out)


def h_mod(t, tau, x):
    return math.cos(t * tau) * h_sinc(t, x)


def _S(x, T):
    # sin(T x)/x with the removable singularity patched
    return h_sinc(T, x)


def window_closed_form(a, b, tau, T):
    """Four-term closed form of G_{tau,T}(a, b).  Vectorizes over a and b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = (_S(a - b - tau, T) + _S(a - b + tau, T)
         - _S(a + b - tau, T) - _S(a + b + tau, T))
    g = np.abs(s) / (4.0 * T * a * b)
    return g if np.ndim(g) else float(g)


def window_quadrature(a, b, tau, T, tol=1e-11, max_panels=1 << 14):
    """Direct quadrature of (1/(T a b)) |int_0^T cos(t tau) sin(t a) sin(t b) dt|.

    Panels start at the scale of the fastest oscillation present
    (|a| + |b| + |tau|) and double until the estimate settles to `tol`.
    """
    fastest = abs(a) + abs(b) + abs(tau)
    panels = max(1, int(math.ceil(T * fastest / math.pi)))

    def f(t):
        return np.cos(t * tau) * np.sin(t * a) * np.sin(t * b)

    val = converged_composite(f, 0.0, T, tol * T * a * b, panels=panels, n=16,
                              max_panels=max(max_panels, 4 * panels))
    return abs(val) / (T * a * b)


@dataclass
class SweepReport:
    min_margin: float
    argmin: tuple
    checked: int
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_spectral_bound(params: WindowParams, na=40, nb=40, ntau=40, tau_range=None,
                          slack=1e-9, jitter=None) -> SweepReport:
    """Sweep a, b over [rho_min, rho_max] and tau over [-tau_range, tau_range]
    (default 2 * rho_max), keep tuples with |a - b - tau| < delta and check
    G * 8 pi a b - 1 >= -slack.

    Grid endpoints are nudged inward when `jitter` is given so the sweep
    honours the strict inequality min(I) < a, b."""
    if min(na, nb, ntau) < 2:
        raise ValueError("grid sizes must be at least 2")
    lo, hi = params.rho_min, params.rho_max
    if jitter:
        lo, hi = lo + jitter, hi - jitter
    tr = 2.0 * params.rho_max if tau_range is None else tau_range
    a = np.linspace(lo, hi, na)
    b = np.linspace(lo, hi, nb)
    taus = np.linspace(-tr, tr, ntau)
    A, B, TAU = np.meshgrid(a, b, taus, indexing="ij")
    keep = np.abs(A - B - TAU) < params.delta
    A, B, TAU = A[keep], B[keep], TAU[keep]
    violations = []
    if A.size == 0:
        return SweepReport(min_margin=math.inf, argmin=(), checked=0, violations=[])
    g = np.empty_like(A)
    # tau differs per point; group evaluation by tau value
    for tv in np.unique(TAU):
        sel = TAU == tv
        g[sel] = window_closed_form(A[sel], B[sel], tv, params.T)
    margin = g * 8.0 * math.pi * A * B - 1.0
    k = int(np.argmin(margin))
    bad = np.nonzero(margin < -slack)[0]
    for i in bad:
        violations.append((float(A[i]), float(B[i]), float(TAU[i]), float(margin[i])))
    return SweepReport(min_margin=float(margin[k]),
                       argmin=(float(A[k]), float(B[k]), float(TAU[k])),
                       checked=int(A.size), violations=violations)


def random_admissible(params: WindowParams, n: int, rng) -> np.ndarray:
    """n random (a, b, tau) tuples with a, b in the open window and
    |a - b - tau| < delta.  Returns an (n, 3) array."""
    a = rng.uniform(params.rho_min, params.rho_max, n)
    b = rng.uniform(params.rho_min, params.rho_max, n)
    off = rng.uniform(-params.delta, params.delta, n)
    tau = a - b - off
    return np.column_stack([a, b, tau])


def ridge_grid(a_range, b_range, tau, T, n):
    """n x n matrix of G values; row i is a_i (ascending), column j is b_j
    (ascending).  Returns (a_values, b_values, matrix)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    a = np.linspace(a_range[0], a_range[1], n)
    b = np.linspace(b_range[0], b_range[1], n)
    A, B = np.meshgrid(a, b, indexing="ij")
    return a, b, window_closed_form(A, B, tau, T)


def ridge_csv(a, b, grid) -> str:
    """CSV text: header 'a\\b, b1, b2, ...' then one row per a value."""
    lines = ["a\\b," + ",".join(f"{v:.17g}" for v in b)]
    for ai, row in zip(a, grid):
        lines.append(f"{ai:.17g}," + ",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"
