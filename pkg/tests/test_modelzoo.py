import math
from collections import Counter

import numpy as np
import pytest

from qmixlab.errors import SpectrumFormatError, SpectrumValidationError
from qmixlab.modelzoo import (FlatTorus, SpectrumData, circle_model, export_spectrum,
                              ingest_spectrum, lhs_double_sum, max_mixing_over_tau,
                              mixing_statistic, parse_spectrum, qe_statistic, torus_matrix_elements,
                              torus_spectrum, weyl_ratio, window_count, write_spectrum)


def test_circle_matrix_elements():
    s = circle_model(4)
    assert s.get(1, 0) == 1 and s.get(2, 0) == 0
    for N in (2, 5, 8):
        s = circle_model(N)
        for j in range(N):
            assert sum(abs(s.get(j, k)) ** 2 for k in range(N)) == 1
            assert s.get(j, j) == 0
    assert circle_model(8).freqs == (0, 1, 1, 2, 2, 3, 3, 4)
    with pytest.raises(ValueError):
        circle_model(1)


@pytest.mark.parametrize("N", [4, 8, 256])
def test_circle_mixing_split(N):
    s = circle_model(N)
    I = (0, N / 2)
    # neighbouring characters differ by one folded step: each mode's unit
    # off-diagonal mass splits evenly between tau = +1 and tau = -1
    assert mixing_statistic(s, I, 0.5, 1.0) == 0.5
    assert mixing_statistic(s, I, 0.5, -1.0) == 0.5
    total = math.fsum(mixing_statistic(s, I, 0.5, tau) for tau in range(-N, N + 1))
    assert total == 1.0
    assert lhs_double_sum(s, I, 0.5, 1.0) + lhs_double_sum(s, I, 0.5, -1.0) == window_count(s, I)
    assert mixing_statistic(s, I, 0.5, 10.0 * N) == 0.0
    assert qe_statistic(s, I) == 0.0


def test_torus_spectrum_examples():
    modes = torus_spectrum(FlatTorus(1, 1, 2 * math.pi * 1.5))
    assert modes[0] == (0, 0, 0.0)
    assert {(m, n) for m, n, _ in modes} == {(m, n) for m in (-1, 0, 1) for n in (-1, 0, 1)}
    mus = [mu for _, _, mu in modes]
    assert mus == sorted(mus)
    assert modes[1][:2] == (-1, 0)             # ties broken by (m, n)


def _sign_orbit_size(m, n):
    return (1 if m == 0 else 2) * (1 if n == 0 else 2)


def test_irrational_squared_aspect_is_simple_up_to_sign():
    # mu^2 ~ m^2 + n^2 / sqrt(2): equal values force |m| = |m'| and |n| = |n'|
    modes = torus_spectrum(FlatTorus(5.0, 5.0 * 2 ** 0.25, 12.0))
    counts = Counter(round(mu, 9) for _, _, mu in modes if mu > 0)
    for m, n, mu in modes:
        if mu > 0:
            assert counts[round(mu, 9)] == _sign_orbit_size(m, n)


def test_sqrt2_aspect_has_arithmetic_coincidences():
    # with L2/L1 = sqrt(2), mu^2 ~ 2 m^2 + n^2, so (2, 1) and (0, 3) coincide
    L = 5.0
    modes = {(m, n): mu for m, n, mu in torus_spectrum(FlatTorus(L, math.sqrt(2) * L, 12.0))}
    assert modes[(2, 1)] == pytest.approx(modes[(0, 3)], rel=1e-14)
    counts = Counter(round(mu, 9) for mu in modes.values() if mu > 0)
    assert any(counts[round(mu, 9)] > _sign_orbit_size(m, n) for (m, n), mu in modes.items() if mu > 0)


def test_torus_matrix_elements():
    T = FlatTorus(3.0, 3.0 * math.sqrt(2), 5.0)
    s = torus_matrix_elements(T, {(1, 0): 1.0})
    assert not s.hermitian
    for (j, k), v in s.matel.items():
        assert j[0] - k[0] == 1 and j[1] == k[1] and v == 1
    real = torus_matrix_elements(T, {(1, 0): 0.5, (-1, 0): 0.5})
    assert real.hermitian and real.volume == pytest.approx(T.area)
    const = torus_matrix_elements(T, {(0, 0): 2.5})
    assert all(j == k and v == 2.5 for (j, k), v in const.matel.items())
    assert len(const.matel) == len(const.labels)
    assert qe_statistic(const, (0, 5)) == 0.0
    assert qe_statistic(real, (0, 5)) == 0.0
    assert mixing_statistic(const, (0, 5), 0.1, 0.0) == 0.0


def test_relabeling_invariance_is_exact():
    T = FlatTorus(7.0, 7.0 * math.sqrt(2), 3.0)
    s = torus_matrix_elements(T, {(1, 0): 0.5, (-1, 0): 0.5, (0, 1): 0.25j, (0, -1): -0.25j})
    rng = np.random.default_rng(0)
    perm = rng.permutation(len(s.labels))
    mapping = {lab: int(p) for lab, p in zip(s.labels, perm)}
    r = s.relabel(mapping)
    for tau in (0.0, 0.3, -0.7):
        assert mixing_statistic(r, (1, 2.5), 0.2, tau) == mixing_statistic(s, (1, 2.5), 0.2, tau)


def test_torus_family_keeps_mixing_away_from_zero():
    taus = np.linspace(-1, 1, 201)
    vals = []
    for L in (10, 20):
        s = torus_matrix_elements(FlatTorus(L, math.sqrt(2) * L, 2.0 + 1e-9), {(1, 0): 0.5, (-1, 0): 0.5})
        best, arg = max_mixing_over_tau(s, (1.0, 2.0), 0.1, taus)
        assert qe_statistic(s, (1.0, 2.0)) == 0.0
        vals.append(best)
    assert vals[1] >= 0.5 * vals[0] > 0


def test_weyl_ratio():
    r = [weyl_ratio(torus_matrix_elements(FlatTorus(L, L, 5.0), {(0, 0): 1}), (2, 4)) for L in (40, 80)]
    assert abs(r[1] / r[0] - 1) < 0.01
    # annulus area over (2 pi)^2
    assert r[1] == pytest.approx((16 - 4) / (4 * math.pi), rel=0.01)
    s = circle_model(8)
    assert weyl_ratio(s, (10, 20)) == 0.0
    assert mixing_statistic(s, (10, 20), 0.5, 0.0) == 0.0


def test_spectrum_validation():
    with pytest.raises(SpectrumValidationError, match="no modes"):
        SpectrumData([], [], {}, 1.0, 0.0)
    with pytest.raises(SpectrumValidationError, match="sorted"):
        SpectrumData([2.0, 1.0], [0, 1], {}, 1.0, 0.0)
    with pytest.raises(SpectrumValidationError, match="distinct"):
        SpectrumData([1.0, 2.0], [0, 0], {}, 1.0, 0.0)
    with pytest.raises(SpectrumValidationError, match="unknown"):
        SpectrumData([1.0], [0], {(0, 3): 1}, 1.0, 0.0)
    with pytest.raises(SpectrumValidationError, match="Hermitian"):
        SpectrumData([1.0, 2.0], [0, 1], {(0, 1): 1}, 1.0, 0.0)
    with pytest.raises(ValueError):
        lhs_double_sum(circle_model(4), (0, 2), 0.0, 1.0)


def test_roundtrip(tmp_path):
    s = circle_model(8)
    p = tmp_path / "c8.txt"
    write_spectrum(s, p)
    r = ingest_spectrum(p)
    assert not r.hermitian and r.volume == 8.0
    for tau in (-1.0, 0.0, 1.0):
        assert mixing_statistic(r, (0, 4), 0.5, tau) == mixing_statistic(s, (0, 4), 0.5, tau)
    assert export_spectrum(r) == export_spectrum(s)


GOOD = "VOLUME 2\nMEAN 0\nCONVENTION mu\nMODE 0 1.0\nMODE 1 2.0\nMATEL 0 1 1 0\nMATEL 1 0 1 0\n"


def test_parse_defaults_and_errors():
    s = parse_spectrum(GOOD)
    assert s.hermitian and s.get(0, 1) == 1
    bad = GOOD.replace("MODE 1 2.0", "MODE 1 two")
    with pytest.raises(SpectrumFormatError, match="line 5"):
        parse_spectrum(bad)
    with pytest.raises(SpectrumFormatError, match="line 6"):
        parse_spectrum(GOOD.replace("MATEL 0 1 1 0", "MATEL 0 9 1 0"))
    with pytest.raises(SpectrumFormatError, match="line 3"):
        parse_spectrum(GOOD.replace("CONVENTION mu", "CONVENTION nu"))
    with pytest.raises(SpectrumFormatError, match="line 1"):
        parse_spectrum("BOGUS 1\n" + GOOD)
    with pytest.raises(SpectrumFormatError, match="missing VOLUME"):
        parse_spectrum(GOOD.replace("VOLUME 2\n", ""))
    with pytest.raises(SpectrumFormatError, match="no modes"):
        parse_spectrum("VOLUME 1\nMEAN 0\nCONVENTION mu\n")
    # a one-sided table declared Hermitian is rejected after parsing
    with pytest.raises(SpectrumValidationError, match="Hermitian"):
        parse_spectrum(GOOD.replace("MATEL 1 0 1 0\n", ""))
