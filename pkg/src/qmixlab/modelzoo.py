"""Exactly solvable spectra (discrete circle, flat torus), the window
statistics evaluated on them, and a plain-text spectrum exchange format.

Sums in the statistics use math.fsum, which is correctly rounded and hence
independent of summation order: relabeling modes leaves every statistic
bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import SpectrumFormatError, SpectrumValidationError

HERMITIAN_TOL = 1e-12
CONVENTIONS = ("rho", "mu")


@dataclass(frozen=True)
class SpectrumData:
    """Frequencies (ascending), mode labels, a sparse table of matrix
    elements <psi_j, a psi_k> keyed by label pairs, |X| and the mean of a.

    `hermitian` records whether the observable is real-valued; complex
    observables such as a single character have non-Hermitian tables."""

    freqs: Tuple[float, ...]
    labels: Tuple[Hashable, ...]
    matel: Mapping[Tuple[Hashable, Hashable], complex]
    volume: float
    obs_mean: float
    convention: str = "mu"
    hermitian: bool = True
    _index: Dict[Hashable, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "freqs", tuple(float(f) for f in self.freqs))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "matel", dict(self.matel))
        if not self.freqs:
            raise SpectrumValidationError("no modes")
        if len(self.freqs) != len(self.labels):
            raise SpectrumValidationError("freqs and labels differ in length")
        if any(b < a for a, b in zip(self.freqs[:-1], self.freqs[1:])):
            raise SpectrumValidationError("frequencies must be sorted ascending")
        idx = {lab: k for k, lab in enumerate(self.labels)}
        if len(idx) != len(self.labels):
            raise SpectrumValidationError("mode labels must be distinct")
        object.__setattr__(self, "_index", idx)
        for (j, k) in self.matel:
            if j not in idx or k not in idx:
                raise SpectrumValidationError(f"matrix element ({j}, {k}) refers to an unknown mode")
        if not (self.volume > 0):
            raise SpectrumValidationError("volume must be positive")
        if self.convention not in CONVENTIONS:
            raise SpectrumValidationError(f"convention must be one of {CONVENTIONS}")
        if self.hermitian:
            bad = hermitian_defect(self.matel)
            if bad is not None:
                raise SpectrumValidationError(
                    f"matrix elements not Hermitian at ({bad[0]}, {bad[1]})")

    def freq_of(self, label) -> float:
        return self.freqs[self._index[label]]

    def get(self, j, k) -> complex:
        return self.matel.get((j, k), 0j)

    def in_window(self, interval) -> List[Hashable]:
        lo, hi = interval
        return [lab for lab, f in zip(self.labels, self.freqs) if lo <= f <= hi]

    def relabel(self, mapping: Mapping) -> "SpectrumData":
        """Same spectrum with labels renamed through `mapping` and modes
        reordered stably among equal frequencies by the new labels' order
        in `mapping`."""
        order = sorted(range(len(self.labels)),
                       key=lambda k: (self.freqs[k], list(mapping).index(self.labels[k])))
        return SpectrumData(freqs=[self.freqs[k] for k in order],
                            labels=[mapping[self.labels[k]] for k in order],
                            matel={(mapping[j], mapping[k]): v for (j, k), v in self.matel.items()},
                            volume=self.volume, obs_mean=self.obs_mean,
                            convention=self.convention, hermitian=self.hermitian)


def hermitian_defect(matel: Mapping) -> Optional[Tuple]:
    for (j, k), v in matel.items():
        w = matel.get((k, j), 0j)
        if abs(complex(v) - complex(w).conjugate()) > HERMITIAN_TOL:
            return (j, k)
    return None


# -- discrete circle --------------------------------------------------------------

def circle_model(N: int) -> SpectrumData:
    """Characters psi_k = e^{2 pi i k x/N}/sqrt(N) on Z/N with a(x) = e^{2 pi i x/N}.

    a psi_k = sqrt(N)^{-1} e^{2 pi i (k+1) x/N}, so <psi_j, a psi_k> = 1 iff
    j = k + 1 mod N.  Frequencies are folded to min(k, N - k); modes are
    ordered by frequency, ties broken by label."""
    if N < 2:
        raise ValueError("N must be at least 2")
    labels = sorted(range(N), key=lambda k: (min(k, N - k), k))
    freqs = [float(min(k, N - k)) for k in labels]
    matel = {((k + 1) % N, k): 1.0 + 0j for k in range(N)}
    return SpectrumData(freqs, labels, matel, volume=float(N), obs_mean=0.0,
                        convention="mu", hermitian=False)


# -- flat torus --------------------------------------------------------------------

@dataclass(frozen=True)
class FlatTorus:
    L1: float
    L2: float
    cutoff: float

    def __post_init__(self):
        if not (self.L1 > 0 and self.L2 > 0 and self.cutoff > 0):
            raise ValueError("side lengths and cutoff must be positive")

    @property
    def area(self) -> float:
        return self.L1 * self.L2


def torus_spectrum(torus: FlatTorus) -> List[Tuple[int, int, float]]:
    """All (m, n, mu) with mu = 2 pi sqrt(m^2/L1^2 + n^2/L2^2) <= cutoff,
    sorted by mu and then lexicographically by (m, n)."""
    R = torus.cutoff / (2.0 * math.pi)
    M = int(math.floor(R * torus.L1))
    Nn = int(math.floor(R * torus.L2))
    m, n = np.meshgrid(np.arange(-M, M + 1), np.arange(-Nn, Nn + 1), indexing="ij")
    m, n = m.ravel(), n.ravel()
    mu = 2.0 * math.pi * np.sqrt((m / torus.L1) ** 2 + (n / torus.L2) ** 2)
    # compare squared radii in exact integer-scaled form where possible
    keep = mu <= torus.cutoff * (1 + 1e-15)
    m, n, mu = m[keep], n[keep], mu[keep]
    order = np.lexsort((n, m, mu))
    return [(int(m[k]), int(n[k]), float(mu[k])) for k in order]


def torus_matrix_elements(torus: FlatTorus, coeffs: Mapping[Tuple[int, int], complex]) -> SpectrumData:
    """Characters e^{2 pi i (m x/L1 + n y/L2)}/sqrt(L1 L2) against the
    Fourier series a = sum a_hat(p, q) e^{2 pi i (p x/L1 + q y/L2)}:
    <psi_(m,n), a psi_(m',n')> = a_hat(m - m', n - n')."""
    modes = torus_spectrum(torus)
    labels = [(m, n) for m, n, _ in modes]
    present = set(labels)
    matel = {}
    for (m, n) in labels:
        for (p, q), c in coeffs.items():
            c = complex(c)
            if c == 0:
                continue
            tgt = (m + p, n + q)
            if tgt in present:
                matel[(tgt, (m, n))] = c
    herm = all(abs(complex(coeffs.get((-p, -q), 0)) - complex(c).conjugate()) <= HERMITIAN_TOL
               for (p, q), c in coeffs.items())
    mean = complex(coeffs.get((0, 0), 0))
    if abs(mean.imag) > HERMITIAN_TOL:
        raise ValueError("observable mean must be real")
    return SpectrumData([mu for _, _, mu in modes], labels, matel, volume=torus.area,
                        obs_mean=mean.real, convention="mu", hermitian=herm)


# -- statistics ---------------------------------------------------------------------

def window_count(spec: SpectrumData, interval) -> int:
    lo, hi = interval
    return sum(1 for f in spec.freqs if lo <= f <= hi)


def _offdiag_terms(spec: SpectrumData, interval, delta, tau):
    lo, hi = interval
    for (j, k), v in spec.matel.items():
        if j == k:
            continue
        fj, fk = spec.freq_of(j), spec.freq_of(k)
        if lo <= fj <= hi and lo <= fk <= hi and abs(fj - fk - tau) < delta:
            yield abs(complex(v)) ** 2


def lhs_double_sum(spec: SpectrumData, interval, delta: float, tau: float) -> float:
    """Sum over j, k != j in the window with |f_j - f_k - tau| < delta of |matel(j,k)|^2."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return math.fsum(_offdiag_terms(spec, interval, delta, tau))


def mixing_statistic(spec: SpectrumData, interval, delta: float, tau: float) -> float:
    """lhs_double_sum / N(I); 0 for an empty window (see window_count)."""
    n = window_count(spec, interval)
    if n == 0:
        return 0.0
    return lhs_double_sum(spec, interval, delta, tau) / n


def qe_statistic(spec: SpectrumData, interval) -> float:
    """(1/N(I)) sum_{j in window} |matel(j,j) - mean|^2."""
    lo, hi = interval
    terms = [abs(spec.get(lab, lab) - spec.obs_mean) ** 2
             for lab, f in zip(spec.labels, spec.freqs) if lo <= f <= hi]
    if not terms:
        return 0.0
    return math.fsum(terms) / len(terms)


def weyl_ratio(spec: SpectrumData, interval) -> float:
    return window_count(spec, interval) / spec.volume


def max_mixing_over_tau(spec: SpectrumData, interval, delta: float, taus: Iterable[float]):
    """(max statistic, maximizing tau) over a tau grid."""
    best, arg = -1.0, None
    for tau in taus:
        v = mixing_statistic(spec, interval, delta, float(tau))
        if v > best:
            best, arg = v, float(tau)
    return best, arg


# -- exchange format ------------------------------------------------------------------

def export_spectrum(spec: SpectrumData) -> str:
    """Line format: VOLUME, MEAN, CONVENTION, HERMITIAN headers, then
    'MODE j freq' and 'MATEL j k re im' with j the mode's position."""
    lines = [f"VOLUME {spec.volume:.17g}", f"MEAN {spec.obs_mean:.17g}",
             f"CONVENTION {spec.convention}", f"HERMITIAN {'true' if spec.hermitian else 'false'}"]
    pos = {lab: k for k, lab in enumerate(spec.labels)}
    for k, f in enumerate(spec.freqs):
        lines.append(f"MODE {k} {f:.17g}")
    entries = sorted((pos[j], pos[k], complex(v)) for (j, k), v in spec.matel.items() if v != 0)
    for j, k, v in entries:
        lines.append(f"MATEL {j} {k} {v.real:.17g} {v.imag:.17g}")
    return "\n".join(lines) + "\n"


def write_spectrum(spec: SpectrumData, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(export_spectrum(spec))


def parse_spectrum(text: str) -> SpectrumData:
    head = {}
    modes = []
    matel = {}
    seen_modes = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kw = tok[0].upper()
        try:
            if kw in ("VOLUME", "MEAN"):
                if len(tok) != 2:
                    raise ValueError(f"{kw} takes one value")
                head[kw] = float(tok[1])
            elif kw == "CONVENTION":
                if len(tok) != 2 or tok[1] not in CONVENTIONS:
                    raise ValueError("CONVENTION must be rho or mu")
                head[kw] = tok[1]
            elif kw == "HERMITIAN":
                if len(tok) != 2 or tok[1] not in ("true", "false"):
                    raise ValueError("HERMITIAN must be true or false")
                head[kw] = tok[1] == "true"
            elif kw == "MODE":
                if len(tok) != 3:
                    raise ValueError("MODE takes an index and a frequency")
                j = int(tok[1])
                if j in seen_modes:
                    raise ValueError(f"mode {j} defined twice")
                seen_modes[j] = lineno
                modes.append((j, float(tok[2])))
            elif kw == "MATEL":
                if len(tok) != 5:
                    raise ValueError("MATEL takes j k re im")
                j, k = int(tok[1]), int(tok[2])
                if j not in seen_modes or k not in seen_modes:
                    raise ValueError(f"MATEL refers to undefined mode ({j}, {k})")
                matel[(j, k)] = complex(float(tok[3]), float(tok[4]))
            else:
                raise ValueError(f"unknown record {tok[0]!r}")
        except ValueError as exc:
            raise SpectrumFormatError(str(exc), line=lineno) from None
    for kw in ("VOLUME", "MEAN", "CONVENTION"):
        if kw not in head:
            raise SpectrumFormatError(f"missing {kw} header")
    if not modes:
        raise SpectrumFormatError("no modes")
    return SpectrumData(freqs=[f for _, f in modes], labels=[j for j, _ in modes], matel=matel,
                        volume=head["VOLUME"], obs_mean=head["MEAN"],
                        convention=head["CONVENTION"], hermitian=head.get("HERMITIAN", True))


def ingest_spectrum(path) -> SpectrumData:
    with open(path, encoding="utf-8") as fh:
        return parse_spectrum(fh.read())
