"""Geodesic flow on a compact quotient Γ\\H.

States are frames g in PSL(2, R) (the tangent state g.(i, 0)); the flow is
right multiplication by diag(e^{s/2}, e^{-s/2}) and the quotient is realized
by left-reducing the base point into the Dirichlet domain centered at the
model's base point.  Everything that touches many samples works on stacked
(n, 2, 2) matrix arrays.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import EnumerationError, ReductionError, SamplingError
from .hypgeo import HPoint, I, Frame, MoebiusMap, dist_c, mobius_apply_c, tangent_apply
from .quadrature import fixed_gl
from .streams import BLOCK_SIZE, block_rng, map_blocks

REDUCE_SLACK = 1e-13
REDUCE_CAP = 10_000
MAX_FLOW_STEP = 5.0
LETTERS = "abcdABCD"


@dataclass(frozen=True)
class SurfaceModel:
    """Fuchsian group given by side pairings of a Dirichlet domain.

    generators[k] and generators[inverse_index[k]] are mutually inverse.
    inradius and circumradius describe the domain around `base` and bound
    the regions used for observables and rejection sampling."""

    name: str
    generators: Tuple[MoebiusMap, ...]
    inverse_index: Tuple[int, ...]
    base: HPoint
    area: float
    inj_rad: float
    beta: float
    enum_radius: float = 12.0
    inradius: float = 0.0
    circumradius: float = 0.0
    relation: str = ""

    def __post_init__(self):
        if len(self.generators) != len(self.inverse_index):
            raise ValueError("every generator needs an inverse index")
        for k, g in enumerate(self.generators):
            m = g.matrix()
            if abs(np.linalg.det(m) - 1.0) > 1e-12:
                raise ValueError(f"generator {k} is not unimodular")
            prod = m @ self.generators[self.inverse_index[k]].matrix()
            if min(np.abs(prod - np.eye(2)).max(), np.abs(prod + np.eye(2)).max()) > 1e-10:
                raise ValueError(f"generator {k} and its listed inverse do not compose to identity")
        if not (self.area > 0):
            raise ValueError("area must be positive")
        if not (0 < self.beta <= 1):
            raise ValueError("beta must lie in (0, 1]")

    @functools.cached_property
    def gen_array(self) -> np.ndarray:
        return np.array([g.matrix() for g in self.generators])

    @functools.cached_property
    def pullback_points(self) -> np.ndarray:
        """g^{-1}.base for each generator g: dist(g z, base) = dist(z, g^{-1} base)."""
        inv = np.array([self.generators[j].matrix() for j in self.inverse_index])
        return mobius_apply_c(inv, np.full(len(inv), self.base.z))

    def word(self, letters: str) -> MoebiusMap:
        """Product of generators named by letters a, b, c, d (A = a^{-1}, ...)."""
        m = np.eye(2)
        for ch in letters:
            m = m @ self.generators[LETTERS.index(ch)].matrix()
        return MoebiusMap.from_matrix(m) if np.linalg.det(m) > 0 else MoebiusMap.identity()


def _word_matrix(model: SurfaceModel, letters: str) -> np.ndarray:
    m = np.eye(2)
    for ch in letters:
        m = m @ model.gen_array[LETTERS.index(ch)]
    return m


def base_distance(model: SurfaceModel, x: HPoint) -> float:
    return float(dist_c(np.array(model.base.z), np.array(x.z)))


# -- the Bolza surface ----------------------------------------------------------

def _bolza_generators():
    ch = 1.0 + math.sqrt(2.0)                  # cosh(l/2), l = side-pairing length
    sh = math.sqrt(2.0 + 2.0 * math.sqrt(2.0))
    A = np.array([[ch, sh], [sh, ch]], dtype=complex)
    C = np.array([[1j, 1j], [-1.0, 1.0]])      # disk -> half-plane, 0 -> i
    Ci = np.linalg.inv(C)
    gens = []
    for k in range(4):
        ph = k * math.pi / 4.0
        R = np.diag([np.exp(0.5j * ph), np.exp(-0.5j * ph)])
        Rm = np.diag([np.exp(-0.5j * ph), np.exp(0.5j * ph)])
        gH = C @ R @ A @ Rm @ Ci
        if np.abs(gH.imag).max() > 1e-12:
            raise RuntimeError("conjugated generator is not real")
        gens.append(MoebiusMap.from_matrix(gH.real))
    gens += [g.inverse() for g in gens]
    half_side = math.acosh(ch)
    # right triangle (center, side midpoint, vertex) with angle pi/8 at the center
    circ = math.atanh(math.tanh(half_side) / math.cos(math.pi / 8.0))
    return tuple(gens), half_side, circ


@functools.lru_cache(maxsize=4)
def bolza_model(enum_radius: float = 12.0, beta: float = 1.0) -> SurfaceModel:
    """Genus-2 Bolza surface: regular octagon centered at i with opposite
    sides paired.  beta = 1 is a configuration input (lambda_1 > 1/4)."""
    gens, inrad, circ = _bolza_generators()
    model = SurfaceModel(name="bolza", generators=gens, inverse_index=(4, 5, 6, 7, 0, 1, 2, 3),
                         base=I, area=4.0 * math.pi, inj_rad=1.0, beta=beta,
                         enum_radius=enum_radius, inradius=inrad, circumradius=circ,
                         relation="aBcDAbCd")
    # the shortest closed geodesic has an axis meeting the domain, so some
    # conjugate representing it moves the base by at most systole + 2 * circ
    sys_len = shortest_translation(model, 2 * inrad + 2 * circ + 0.5)
    return replace(model, inj_rad=0.5 * sys_len)


PRESETS = {"bolza": bolza_model}


def model_by_name(name: str, **kw) -> SurfaceModel:
    try:
        return PRESETS[name](**kw)
    except KeyError:
        raise ValueError(f"unknown surface preset {name!r}") from None


# -- group-ball enumeration -------------------------------------------------------

def _canonical_sign(m):
    flat = m.reshape(len(m), 4)
    k = np.argmax(np.abs(flat), axis=1)
    s = np.sign(flat[np.arange(len(m)), k])
    return m * s[:, None, None]


def _keys(m):
    flat = m.reshape(len(m), 4)
    scale = 1e9 / np.abs(flat).max(axis=1)
    return np.round(flat * scale[:, None]).astype(np.int64)


@functools.lru_cache(maxsize=16)
def _enumerate_cached(model: SurfaceModel, radius: float):
    gens = model.gen_array
    base = model.base.z
    prune = radius + model.circumradius
    ident = np.eye(2)[None]
    seen = {tuple(_keys(ident)[0])}
    found = [ident]
    frontier = ident
    while len(frontier):
        cand = (frontier[:, None] @ gens[None]).reshape(-1, 2, 2)
        cand = _canonical_sign(cand)
        d = dist_c(np.full(len(cand), base), mobius_apply_c(cand, np.full(len(cand), base)))
        cand = cand[d <= prune]
        keep = []
        for row, key in enumerate(map(tuple, _keys(cand))):
            if key not in seen:
                seen.add(key)
                keep.append(row)
        frontier = cand[keep]
        found.append(frontier)
    mats = np.concatenate(found)
    d = dist_c(np.full(len(mats), base), mobius_apply_c(mats, np.full(len(mats), base)))
    sel = d <= radius
    mats, d = mats[sel], d[sel]
    keys = _keys(mats)
    order = np.lexsort((*keys.T[::-1], np.round(d, 12)))
    mats, d = mats[order], d[order]
    mats.setflags(write=False)
    d.setflags(write=False)
    return mats, d


def enumerate_group(model: SurfaceModel, radius: float):
    """All gamma with d(base, gamma.base) <= radius, as ((m, 2, 2) matrices,
    distances), sorted by distance; the identity comes first.

    Breadth-first over right multiplication by side pairings, pruned at
    radius + circumradius: a geodesic from base to gamma.base crosses a chain
    of adjacent translates of the domain, each within circumradius of it."""
    if radius > model.enum_radius + 1e-12:
        raise EnumerationError(f"radius {radius:.4g} exceeds enum_radius {model.enum_radius}")
    # cache on a coarse grid of radii and filter down
    key = min(model.enum_radius, math.ceil(radius * 2.0) / 2.0)
    mats, d = _enumerate_cached(model, key)
    n = int(np.searchsorted(d, radius, side="right"))
    return mats[:n], d[:n]


def shortest_translation(model: SurfaceModel, radius: float) -> float:
    mats, _ = enumerate_group(model, radius)
    tr = np.abs(mats[1:, 0, 0] + mats[1:, 1, 1])
    hyp = tr[tr > 2.0]
    if hyp.size == 0:
        raise EnumerationError(f"no nontrivial element within radius {radius}")
    return float(2.0 * np.arccosh(hyp.min() / 2.0))


# -- reduction and flow -----------------------------------------------------------

def _base_points(mats):
    den = mats[:, 1, 0] * 1j + mats[:, 1, 1]
    num = mats[:, 0, 0] * 1j + mats[:, 0, 1]
    w = num / den
    return w.real + 1j / np.abs(den) ** 2


def _renormalize(mats):
    det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    return mats / np.sqrt(det)[:, None, None]


def reduce_points(z, model: SurfaceModel):
    """Greedy Dirichlet reduction of complex points.  Returns (reduced points,
    accumulated group elements as (n, 2, 2), step counts)."""
    z = np.array(z, dtype=complex, ndmin=1)
    n = len(z)
    acc = np.broadcast_to(np.eye(2), (n, 2, 2)).copy()
    steps = np.zeros(n, dtype=np.int64)
    pulls = model.pullback_points
    gens = model.gen_array
    base = model.base.z
    active = np.arange(n)
    for _ in range(REDUCE_CAP):
        za = z[active]
        d0 = dist_c(za, base)
        dk = dist_c(za[:, None], pulls[None, :])
        k = np.argmin(dk, axis=1)
        better = dk[np.arange(len(za)), k] < d0 - REDUCE_SLACK
        if not better.any():
            return z, acc, steps
        idx = active[better]
        g = gens[k[better]]
        z[idx] = mobius_apply_c(g, z[idx])
        acc[idx] = g @ acc[idx]
        steps[idx] += 1
        active = idx
    raise ReductionError(f"reduction did not terminate within {REDUCE_CAP} steps")


def reduce(z: HPoint, model: SurfaceModel) -> HPoint:
    out, _, _ = reduce_points(np.array([z.z]), model)
    return HPoint.from_complex(out[0])


def in_domain(z, model: SurfaceModel, slack: float = 1e-9):
    """Closed Dirichlet domain membership for complex points (vectorized)."""
    z = np.asarray(z, dtype=complex)
    d0 = dist_c(z, model.base.z)
    dk = dist_c(z[..., None], model.pullback_points)
    return np.all(d0[..., None] <= dk + slack, axis=-1)


def reduce_frames(mats, model: SurfaceModel):
    """Left-multiply frames so their base points lie in the domain."""
    z = _base_points(mats)
    _, acc, steps = reduce_points(z, model)
    return _renormalize(acc @ mats), steps


def flow_frames(mats, s: float, model: SurfaceModel):
    """Flow stacked frames for time s, in steps of at most MAX_FLOW_STEP."""
    mats = np.asarray(mats, dtype=float)
    total = np.zeros(len(mats), dtype=np.int64)
    if s == 0:
        return mats.copy(), total
    k = int(math.ceil(abs(s) / MAX_FLOW_STEP))
    h = s / k
    a = np.diag([math.exp(h / 2.0), math.exp(-h / 2.0)])
    for _ in range(k):
        mats, steps = reduce_frames(mats @ a, model)
        total += steps
    return mats, total


def frames_from_states(z, angle):
    """Stacked frame matrices g0(z) R(angle/2) for complex points and angles."""
    z = np.asarray(z, dtype=complex)
    sy = np.sqrt(z.imag)
    c, s = np.cos(0.5 * np.asarray(angle)), np.sin(0.5 * np.asarray(angle))
    out = np.empty(z.shape + (2, 2))
    out[..., 0, 0] = sy * c - z.real / sy * s
    out[..., 0, 1] = sy * s + z.real / sy * c
    out[..., 1, 0] = -s / sy
    out[..., 1, 1] = c / sy
    return out


def states_from_frames(mats):
    """(points, angles) of stacked frames."""
    den = mats[:, 1, 0] * 1j + mats[:, 1, 1]
    return _base_points(mats), (-2.0 * np.angle(den)) % (2.0 * math.pi)


@dataclass(frozen=True)
class FlowState:
    frame: Frame
    word_length: int = 0

    def state(self):
        return self.frame.state()


def flow(state: FlowState, s: float, model: SurfaceModel) -> FlowState:
    mats, steps = flow_frames(state.frame.m.matrix()[None], s, model)
    return FlowState(Frame(MoebiusMap.from_matrix(mats[0])), state.word_length + int(steps[0]))


# -- sampling ---------------------------------------------------------------------

def _sample_block(model: SurfaceModel, seed: int, block: int, size: int, stream: int):
    """size uniform states on T^1 of the domain: (points, angles)."""
    rng = block_rng(seed, block, stream)
    cosh_r = math.cosh(model.circumradius) - 1.0
    pts = []
    got = 0
    tries = 0
    while got < size:
        m = max(64, 2 * (size - got))
        u = rng.random(m)
        psi = rng.random(m) * 2.0 * math.pi
        r = np.arccosh(1.0 + u * cosh_r)
        # point at distance r from i in direction psi, via the disk model
        w = np.tanh(0.5 * r) * np.exp(1j * psi)
        z = 1j * (1.0 + w) / (1.0 - w)
        z = z.real + 1j * np.abs(z.imag)
        if model.base != I:
            raise SamplingError("sampler assumes the domain is centered at i")
        ok = in_domain(z, model, slack=0.0)
        tries += m
        pts.append(z[ok])
        got += int(ok.sum())
        if tries > 1e4 and got / tries < 1e-4:
            raise SamplingError(f"rejection efficiency {got / tries:.2e} below 1e-4")
    z = np.concatenate(pts)[:size]
    angle = rng.random(size) * 2.0 * math.pi
    return z, angle


def sample_states(model: SurfaceModel, n: int, seed: int, stream: int = 0, jobs: int = 1):
    """n uniform Liouville samples as (points, angles); independent of jobs."""
    parts = map_blocks(lambda b, m: _sample_block(model, seed, b, m, stream), n, jobs)
    return (np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))


def sample_t1(model: SurfaceModel, rng_stream: Tuple[int, int]) -> FlowState:
    """One uniform state from the counter stream (seed, index)."""
    seed, index = rng_stream
    z, angle = _sample_block(model, seed, index, 1, stream=7)
    return FlowState(Frame(MoebiusMap.from_matrix(frames_from_states(z, angle)[0])), 0)


# -- injectivity radius -----------------------------------------------------------

def local_injrad_many(z, model: SurfaceModel, chunk: int = 2048):
    """Half the minimal displacement min_{gamma != id} d(z, gamma z).

    Points are reduced first (the value is Gamma-invariant).  A minimum m
    found among elements with d(base, gamma base) <= L is certified once
    2 d(z, base) + m <= L; uncertified points are retried with larger L."""
    z, _, _ = reduce_points(np.array(z, dtype=complex, ndmin=1), model)
    out = np.full(len(z), np.nan)
    todo = np.arange(len(z))
    L = min(model.enum_radius, 2.0 * model.circumradius + 2.0 * model.inj_rad + 1.0)
    while True:
        mats, _ = enumerate_group(model, L)
        mats = mats[1:]
        for lo in range(0, len(todo), chunk):
            idx = todo[lo:lo + chunk]
            zz = z[idx]
            gz = mobius_apply_c(mats[None], zz[:, None])
            m = dist_c(zz[:, None], gz).min(axis=1)
            ok = 2.0 * dist_c(zz, model.base.z) + m <= L
            out[idx[ok]] = 0.5 * m[ok]
        todo = todo[np.isnan(out[todo])]
        if len(todo) == 0:
            return out
        if L >= model.enum_radius:
            raise EnumerationError(f"enumeration radius {model.enum_radius} too small to "
                                   f"certify the injectivity radius at {len(todo)} points")
        L = min(model.enum_radius, L + 2.0)


def local_injrad(z: HPoint, model: SurfaceModel) -> float:
    return float(local_injrad_many(np.array([z.z]), model)[0])


def thin_part_volume(model: SurfaceModel, R: float, n: int, seed: int, jobs: int = 1):
    """area * fraction of uniform points with local injectivity radius < R,
    with the binomial standard error."""
    if n < 1000:
        raise ValueError("need n >= 1000")
    z, _ = sample_states(model, n, seed, stream=1, jobs=jobs)
    p = float(np.mean(local_injrad_many(z, model) < R))
    return model.area * p, model.area * math.sqrt(p * (1 - p) / n)


# -- observables and correlations ---------------------------------------------------

@dataclass(frozen=True)
class Observable:
    """Point function on the domain, extended Gamma-periodically.  eval acts
    on complex arrays of reduced points; mean and l2_norm refer to the
    normalized measure."""

    name: str
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    mean: float
    l2_norm: float

    def __call__(self, x):
        if isinstance(x, HPoint):
            return float(self.eval(np.array([x.z]))[0])
        return self.eval(np.asarray(x, dtype=complex))


def constant_observable(c: float) -> Observable:
    return Observable(f"const({c:g})", lambda z: np.full(np.shape(z), float(c)), float(c), abs(c))


def bump_observable(model: SurfaceModel, center: HPoint, radius: float,
                    name: Optional[str] = None) -> Observable:
    """(1 - (d/radius)^2)^2 on B(center, radius), zero elsewhere.  The ball
    must sit inside the inscribed disk of the domain so the periodic
    extension is the plain formula on reduced points."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if base_distance(model, center) + radius > model.inradius:
        raise ValueError("bump support must lie inside the inscribed disk of the domain")
    cz = center.z

    def ev(z):
        d = dist_c(z, cz)
        return np.where(d < radius, (1.0 - (d / radius) ** 2) ** 2, 0.0)

    def radial(p):
        return fixed_gl(lambda r: (1.0 - (r / radius) ** 2) ** (2 * p) * np.sinh(r), 0.0, radius, 64)

    mean = 2.0 * math.pi * radial(1) / model.area
    l2 = math.sqrt(2.0 * math.pi * radial(2) / model.area)
    return Observable(name or f"bump({center.x:g},{center.y:g};{radius:g})", ev, mean, l2)


def mixing_bound(beta: float, t: float, f_norm: float, g_norm: float) -> float:
    if not (0 < beta <= 1):
        raise ValueError("beta must lie in (0, 1]")
    if t < 0:
        raise ValueError("t must be nonnegative")
    return 11.0 * math.exp(beta) * (1.0 + t) * math.exp(-beta * t) * f_norm * g_norm


def _corr_block(model, f, g, times, seed, block, size, stream):
    z, angle = _sample_block(model, seed, block, size, stream)
    gx = g.eval(z)
    start = frames_from_states(z, angle)
    out = np.empty((len(times), size))
    order = np.argsort(times, kind="stable")
    pos = [k for k in order if times[k] >= 0]
    neg = [k for k in order[::-1] if times[k] < 0]
    for seq in (pos, neg):
        mats, now = start, 0.0
        for k in seq:
            mats, _ = flow_frames(mats, times[k] - now, model)
            now = times[k]
            out[k] = f.eval(_base_points(mats)) * gx
    return out


def correlation_sweep(model: SurfaceModel, f: Observable, g: Observable, times: Sequence[float],
                      n: int, seed: int, jobs: int = 1, stream: int = 0):
    """Estimates and standard errors of <f o phi_t, g> - E f E g for each t.

    Each block of samples is flowed through the sorted times; blocks are
    concatenated in index order before summation so results do not depend
    on `jobs`."""
    if n < 1000:
        raise ValueError("need n >= 1000")
    times = np.asarray(times, dtype=float)
    parts = map_blocks(lambda b, m: _corr_block(model, f, g, times, seed, b, m, stream), n, jobs)
    X = np.concatenate(parts, axis=1)
    est = np.sum(X, axis=1) / n - f.mean * g.mean
    ci = np.std(X, axis=1, ddof=1) / math.sqrt(n)
    return est, ci


def correlation(model: SurfaceModel, f: Observable, g: Observable, t: float, n: int,
                seed: int, jobs: int = 1) -> Tuple[float, float]:
    est, ci = correlation_sweep(model, f, g, [t], n, seed, jobs)
    return float(est[0]), float(ci[0])
