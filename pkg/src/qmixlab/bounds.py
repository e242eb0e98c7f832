"""Right-hand side of the quantitative mixing bound, the rate map beta(x)
and the window half-width delta(eps) used for the large-scale limit."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .modelzoo import SpectrumData, lhs_double_sum  # noqa: F401  (re-exported)

C8 = 50000.0 * math.pi


def beta_of_lambda(x: float) -> float:
    """1 - sqrt(1 - 4x) below the threshold 1/4, and 1 above it."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x <= 0.25:
        return 1.0 - math.sqrt(1.0 - 4.0 * x)
    return 1.0


@dataclass(frozen=True)
class QuantInputs:
    rho_max: float
    T: float
    beta: float
    a_l2_sq: float
    a_sup_sq: float
    thin_vol: float
    inj_rad: float

    def __post_init__(self):
        for name in ("rho_max", "T", "beta", "a_l2_sq", "a_sup_sq", "thin_vol", "inj_rad"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
        if not (self.rho_max > 0 and self.T > 0 and self.inj_rad > 0):
            raise ValueError("rho_max, T and inj_rad must be positive")
        if not (0 < self.beta <= 1):
            raise ValueError("beta must lie in (0, 1]")
        if min(self.a_l2_sq, self.a_sup_sq, self.thin_vol) < 0:
            raise ValueError("norms and thin volume must be nonnegative")


def rhs_quantitative(q: QuantInputs) -> float:
    thin = 8.0 * math.pi ** 2 * q.a_sup_sq * q.thin_vol * math.exp(6.0 * q.T) / q.inj_rad
    return C8 * q.rho_max ** 4 * (q.a_l2_sq + thin) / (q.T * q.beta ** 3)


def delta_for_epsilon(eps: float, rho_min: float, rho_max: float, beta_min: float,
                      weyl_const: float, a_max: float) -> float:
    """min(eps / (4 C8 C9 max(I)^4 a_max^2 / (beta_min^3 pi)), (2/9) min(I)).

    The first branch solves 2 C8 C9 max(I)^4 a_max^2 / (T beta_min^3) = eps
    with T = pi / (2 delta)."""
    for name, v in (("eps", eps), ("rho_min", rho_min), ("rho_max", rho_max),
                    ("beta_min", beta_min), ("weyl_const", weyl_const), ("a_max", a_max)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    scale = 4.0 * C8 * weyl_const * rho_max ** 4 * a_max ** 2 / (beta_min ** 3 * math.pi)
    return min(eps / scale, (2.0 / 9.0) * rho_min)
