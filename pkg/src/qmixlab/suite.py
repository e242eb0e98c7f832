"""Check orchestration: each check is a pure function of the configuration
and seed returning a CheckResult; the runner fans checks out to a thread
pool, writes CSV tables, optional SVG figures and a report sorted by check
id."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from . import bounds, flowsim, modelzoo, specwin, wavekernel, weightfn
from .config import SuiteConfig
from .errors import QmixError
from .hypgeo import HPoint, MoebiusMap, dist, mobius_apply
from .streams import block_rng

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class CheckResult:
    check_id: str
    status: str
    metrics: Dict[str, Any]
    tables: Dict[str, str] = field(default_factory=dict)
    figures: Dict[str, Callable[[str], None]] = field(default_factory=dict)
    artifacts: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {"check_id": self.check_id, "status": self.status,
                "metrics": {k: _jsonable(v) for k, v in sorted(self.metrics.items())},
                "artifacts": sorted(self.artifacts)}


def _jsonable(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _rng(cfg: SuiteConfig, check_id: str):
    return block_rng(cfg.get("suite", "seed"), 0, stream=1 + _stream_index(check_id))


def _stream_index(check_id: str) -> int:
    from .config import CHECK_IDS
    return CHECK_IDS.index(check_id)


# -- specwin -------------------------------------------------------------------------

def _window(cfg):
    s = cfg.section("specwin")
    return specwin.WindowParams(s["rho_min"], s["rho_max"], s["delta"])


def check_specwin_bound_sweep(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("specwin")
    p = _window(cfg)
    rep = specwin.verify_spectral_bound(p, s["grid"], s["grid"], s["grid"])
    rng = _rng(cfg, "specwin.bound_sweep")
    tup = specwin.random_admissible(p, s["random"], rng)
    g = np.array([specwin.window_closed_form(a, b, tau, p.T) for a, b, tau in tup])
    margin = g * 8 * math.pi * tup[:, 0] * tup[:, 1] - 1.0
    checked = rep.checked + len(tup)
    min_margin = min(rep.min_margin, float(margin.min()))
    ok = rep.passed and bool(np.all(margin >= -1e-9)) and checked >= 10_000
    a, b, grid = specwin.ridge_grid((p.rho_min, p.rho_max), (p.rho_min, p.rho_max),
                                    s["ridge_tau"], p.T, s["ridge_n"])
    text = specwin.ridge_csv(a, b, grid)
    res = CheckResult("specwin.bound_sweep", _status(ok), {
        "checked": checked, "min_margin": min_margin, "violations": len(rep.violations),
        "T": p.T}, tables={"specwin_ridge.csv": text})
    from . import plots
    res.figures["specwin_ridge.svg"] = lambda path: plots.contour_svg(
        path, a, b, grid, f"G(a, b), tau = {s['ridge_tau']:g}, T = {p.T:.4g}", text)
    return res


def check_specwin_closed_vs_quad(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("specwin")
    p = _window(cfg)
    tup = specwin.random_admissible(p, s["quad_samples"], _rng(cfg, "specwin.closed_vs_quad"))
    err = [abs(specwin.window_closed_form(a, b, tau, p.T) - specwin.window_quadrature(a, b, tau, p.T))
           for a, b, tau in tup]
    worst = max(err)
    return CheckResult("specwin.closed_vs_quad", _status(worst <= 1e-9),
                       {"samples": len(tup), "max_abs_error": worst})


# -- kernel ----------------------------------------------------------------------------

def check_kernel_mass(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("kernel")
    ts = np.linspace(s["t_min"], s["t_max"], s["mass_count"])
    rows, worst = [], 0.0
    for t in ts:
        exact = wavekernel.kernel_mass(float(t))
        quad = wavekernel.kernel_mass_quadrature(float(t))
        rel = abs(quad - exact) / exact
        worst = max(worst, rel)
        rows.append((float(t), exact, quad, rel))
    return CheckResult("kernel.mass", _status(worst <= 1e-8),
                       {"count": len(ts), "max_rel_error": worst},
                       tables={"kernel_mass.csv": _table(("t", "closed", "quadrature", "rel_error"), rows)})


def check_kernel_selberg(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("kernel")
    rows, worst = [], 0.0
    for t in s["selberg_t"]:
        for rho in s["selberg_rho"]:
            lhs, rhs = wavekernel.selberg_check(t, rho)
            worst = max(worst, abs(lhs - rhs))
            rows.append((t, rho, lhs, rhs, abs(lhs - rhs)))
    return CheckResult("kernel.selberg", _status(worst <= 1e-6),
                       {"points": len(rows), "max_abs_error": worst},
                       tables={"kernel_selberg.csv": _table(("t", "rho", "lhs", "rhs", "abs_error"), rows)})


def check_kernel_mollifier(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("kernel")
    probes = list(zip(s["probes"][0::2], s["probes"][1::2]))
    eps = [2.0 ** -k for k in s["eps_exponents"]]
    rows, ok, finals = [], True, []
    series = []
    for t, d in probes:
        sharp = wavekernel.NORMALIZATION * wavekernel.kernel_K(t, d)
        errs = [abs(wavekernel.mollified_kernel(t, d, e) - sharp) for e in eps]
        mono = all(b < a for a, b in zip(errs[:-1], errs[1:]))
        ok = ok and mono and errs[-1] < 1e-4
        finals.append(errs[-1])
        rows += [(t, d, e, err) for e, err in zip(eps, errs)]
        series.append((f"t={t:g}, d={d:g}", errs, None))
    text = _table(("t", "d", "eps", "abs_error"), rows)
    res = CheckResult("kernel.mollifier", _status(ok),
                      {"probes": len(probes), "max_final_error": max(finals)},
                      tables={"kernel_mollifier.csv": text})
    from . import plots
    res.figures["kernel_mollifier.svg"] = lambda path: plots.lines_svg(
        path, eps, series, "mollified vs sharp kernel", "eps", "abs error", text, logy=True)
    return res


# -- weight ------------------------------------------------------------------------------

def check_weight_bounds(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("weight")
    tol = cfg.get("suite", "tol")
    pts = weightfn.regime_grid(np.linspace(s["t_min"], s["t_max"], s["t_count"]), s["tp_count"],
                               s["rho_count"], margin=s["margin"], tp_min=s["tp_min"])
    rep = weightfn.verify_weight_bounds(pts, tol=tol, jobs=jobs)
    regimes = sorted({p.regime.value for p in rep.points})
    ok = rep.passed and len(rep.points) >= 1000 and len(regimes) == 3
    text = rep.csv()
    res = CheckResult("weight.bounds", _status(ok), {
        "points": len(rep.points), "regimes": len(regimes), "max_ratio": rep.max_ratio,
        "argmax_t": rep.argmax[0], "argmax_tp": rep.argmax[1], "argmax_rho": rep.argmax[2],
        "violations": len(rep.violations), "case3_max_scaled": rep.case3_max,
        "monotonicity_flags": len(rep.monotone_flags)},
        tables={"weight_bounds.csv": text})
    from . import plots
    res.figures["weight_bounds.svg"] = lambda path: plots.scatter_svg(
        path, [p.rho for p in rep.points], [p.ratio for p in rep.points],
        [p.regime.value for p in rep.points], "F / (32 pi B)", "rho", "ratio", text)
    return res


def isometry_pairs(t_rho: float, n: int, rng) -> List[Tuple[Tuple[HPoint, HPoint], Tuple[HPoint, HPoint]]]:
    """n pairs of center pairs at distance t_rho related by an isometry: a
    translation, a dilation, then random unimodular Moebius maps.  Draws
    whose recomputed distances differ by more than 1e-12 are redrawn."""
    from .hypgeo import polar_to
    out = []
    while len(out) < n:
        z = HPoint(rng.uniform(-1, 1), math.exp(rng.uniform(-1, 1)))
        zp = polar_to((z, 0.0), t_rho, rng.uniform(0, 2 * math.pi))
        if len(out) == 0:
            g = MoebiusMap(1.0, 1.0, 0.0, 1.0)
        elif len(out) == 1:
            g = MoebiusMap(2.0, 0.0, 0.0, 1.0)
        else:
            a, b, c = rng.uniform(0.5, 1.5), rng.normal(), rng.normal()
            g = MoebiusMap(a, b, c, (1.0 + b * c) / a)
        pair = ((z, zp), (mobius_apply(g, z), mobius_apply(g, zp)))
        if abs(dist(*pair[0]) - dist(*pair[1])) <= 1e-12:
            out.append(pair)
    return out


def check_weight_isometry(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("weight")
    tol = cfg.get("suite", "tol")
    pairs = isometry_pairs(s["pair_rho"], s["pairs"], _rng(cfg, "weight.isometry"))
    rep = weightfn.isometry_invariance_check(s["pair_t"], s["pair_tp"], pairs, tol)
    rows = [(k, a, b, abs(a - b)) for k, (a, b) in enumerate(rep.values)]
    ok = rep.passed and len(pairs) >= s["pairs"]
    return CheckResult("weight.isometry", _status(ok), {
        "pairs": len(pairs), "max_abs_diff": rep.max_diff, "mismatches": len(rep.mismatches),
        "tol": tol}, tables={"weight_isometry.csv": _table(("pair", "F_first", "F_second", "abs_diff"), rows)})


def check_weight_integral(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("weight")
    rows = []
    worst = {"bare": 0.0, "proof_chain": 0.0, "squared_constant": 0.0}
    pref = {"bare": 1.0, "proof_chain": weightfn.C1, "squared_constant": weightfn.C1 ** 2}
    for t in s["integral_t"]:
        for frac in s["integral_tp_frac"]:
            tp = t * frac
            for beta in s["integral_beta"]:
                T = 0.5 * (t + tp)
                lhs, rhs = weightfn.weight_integral_check(t, tp, beta, T)
                for name, c in pref.items():
                    worst[name] = max(worst[name], c * lhs / rhs)
                rows.append((t, tp, beta, lhs, rhs, lhs / rhs))
    ok = worst["bare"] <= 1.0 and worst["proof_chain"] <= 1.0
    return CheckResult("weight.integral", _status(ok), {
        "points": len(rows), "max_ratio_bare": worst["bare"],
        "max_ratio_proof_chain": worst["proof_chain"],
        "max_ratio_squared_constant": worst["squared_constant"]},
        tables={"weight_integral.csv": _table(("t", "tp", "beta", "lhs_bare", "rhs", "ratio_bare"), rows)})


# -- mixing --------------------------------------------------------------------------------

def _mix_setup(cfg):
    s = cfg.section("mix")
    model = flowsim.model_by_name(s["preset"], beta=s["beta"])
    fx, fy, fr = s["f_bump"]
    gx, gy, gr = s["g_bump"]
    f = flowsim.bump_observable(model, HPoint(fx, fy), fr, "f")
    g = flowsim.bump_observable(model, HPoint(gx, gy), gr, "g")
    return model, f, g


def check_mix_correlation(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("mix")
    model, f, g = _mix_setup(cfg)
    times = list(s["times"])
    est, ci = flowsim.correlation_sweep(model, f, g, times, s["samples"],
                                        cfg.get("suite", "seed"), jobs=jobs,
                                        stream=1 + _stream_index("mix.bolza_correlation"))
    bound = [flowsim.mixing_bound(model.beta, t, f.l2_norm, g.l2_norm) for t in times]
    excess = [abs(e) - 3 * c - b for e, c, b in zip(est, ci, bound)]
    rows = [(t, float(e), float(c), b) for t, e, c, b in zip(times, est, ci, bound)]
    text = _table(("t", "estimate", "ci", "bound"), rows)
    res = CheckResult("mix.bolza_correlation", _status(max(excess) <= 0), {
        "samples": s["samples"], "beta": model.beta, "f_l2": f.l2_norm, "g_l2": g.l2_norm,
        "max_excess": max(excess), "max_abs_estimate": float(np.max(np.abs(est)))},
        tables={"mix_correlation.csv": text})
    from . import plots
    res.figures["mix_correlation.svg"] = lambda path: plots.lines_svg(
        path, times, [("|estimate| + 3 ci", np.abs(est) + 3 * ci, None), ("bound", bound, None)],
        "correlation decay on the Bolza surface", "t", "value", text, logy=True)
    return res


def _wrap(a):
    return np.abs((a + math.pi) % (2 * math.pi) - math.pi)


def check_mix_flow_algebra(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("mix")
    model = flowsim.model_by_name(s["preset"], beta=s["beta"])
    n = s["flow_states"]
    seed = cfg.get("suite", "seed")
    z, ang = flowsim.sample_states(model, n, seed, stream=1 + _stream_index("mix.flow_algebra"))
    rng = _rng(cfg, "mix.flow_algebra")
    s1 = rng.uniform(-6, 6, n)
    s2 = rng.uniform(-6, 6, n)
    F = flowsim.frames_from_states(z, ang)

    def flow_each(mats, times):
        return np.concatenate([flowsim.flow_frames(mats[k:k + 1], float(times[k]), model)[0]
                               for k in range(len(mats))])

    A = flow_each(flow_each(F, s1), s2)
    B = flow_each(F, s1 + s2)
    za, aa = flowsim.states_from_frames(A)
    zb, ab = flowsim.states_from_frames(B)
    comp = float(max(np.max(np.abs(za - zb)), np.max(_wrap(aa - ab))))
    C = flow_each(flow_each(F, s1), -s1)
    zc, ac = flowsim.states_from_frames(C)
    inv = float(max(np.max(np.abs(zc - z)), np.max(_wrap(ac - ang))))
    inside = bool(np.all(flowsim.in_domain(za, model)) and np.all(flowsim.in_domain(zb, model)))
    again, _, steps = flowsim.reduce_points(za.copy(), model)
    idem = float(np.max(np.abs(again - za)))
    det = float(np.max(np.abs(A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0] - 1)))
    ok = comp <= 1e-9 and inv <= 1e-9 and inside and idem <= 1e-9 and det <= 1e-9
    return CheckResult("mix.flow_algebra", _status(ok), {
        "states": n, "composition_error": comp, "inversion_error": inv,
        "reduced_in_domain": inside, "reduction_idempotence_error": idem,
        "determinant_error": det})


def check_mix_geometry(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("mix")
    model = flowsim.model_by_name(s["preset"], beta=s["beta"])
    rel = flowsim._word_matrix(model, model.relation)
    rel_err = float(min(np.abs(rel - np.eye(2)).max(), np.abs(rel + np.eye(2)).max()))
    systole = 2 * model.inj_rad
    gen_len = 2 * math.acosh(abs(model.generators[0].trace) / 2)
    R = s["thin_factor"] * model.inj_rad
    vol, ci = flowsim.thin_part_volume(model, R, s["thin_samples"], cfg.get("suite", "seed"), jobs=jobs)
    vol0, _ = flowsim.thin_part_volume(model, model.inj_rad * (1 - 1e-9), s["thin_samples"],
                                       cfg.get("suite", "seed"), jobs=jobs)
    ok = (rel_err <= 1e-8 and abs(model.area - 4 * math.pi) <= 1e-12
          and abs(systole - gen_len) <= 1e-10 and 0 < vol < model.area and vol0 == 0)
    return CheckResult("mix.geometry", _status(ok), {
        "relation_error": rel_err, "area": model.area, "systole": systole,
        "circumradius": model.circumradius, "thin_radius": R, "thin_volume": vol,
        "thin_volume_ci": ci, "thin_volume_below_systole": vol0})


# -- exact models ------------------------------------------------------------------------

def check_models_circle(cfg: SuiteConfig, jobs: int) -> CheckResult:
    rows, ok = [], True
    for N in cfg.get("models", "circle_n"):
        spec = modelzoo.circle_model(N)
        I = (0.0, N / 2.0)
        up = modelzoo.mixing_statistic(spec, I, 0.5, 1.0)
        down = modelzoo.mixing_statistic(spec, I, 0.5, -1.0)
        qe = modelzoo.qe_statistic(spec, I)
        lhs = modelzoo.lhs_double_sum(spec, I, 0.5, 1.0) + modelzoo.lhs_double_sum(spec, I, 0.5, -1.0)
        ok = ok and up == 0.5 and down == 0.5 and up + down == 1.0 and qe == 0.0 and lhs == N
        rows.append((N, up, down, up + down, qe))
    return CheckResult("models.circle", _status(ok), {"sizes": len(rows)},
                       tables={"models_circle.csv": _table(
                           ("N", "stat_tau_plus1", "stat_tau_minus1", "stat_total", "qe"), rows)})


def check_models_torus(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("models")
    I = tuple(s["torus_window"])
    taus = np.linspace(-s["tau_max"], s["tau_max"], s["tau_count"])
    rows = []
    for L in s["torus_l"]:
        torus = modelzoo.FlatTorus(L, s["torus_aspect"] * L, I[1] + 1e-9)
        spec = modelzoo.torus_matrix_elements(torus, {(1, 0): 0.5, (-1, 0): 0.5})
        qe = modelzoo.qe_statistic(spec, I)
        mx, arg = modelzoo.max_mixing_over_tau(spec, I, s["torus_delta"], taus)
        rows.append((L, modelzoo.window_count(spec, I), qe, mx, arg))
    qes = [r[2] for r in rows]
    mxs = [r[3] for r in rows]
    qe_ok = all(b <= a for a, b in zip(qes[:-1], qes[1:]))
    mix_ok = all(m >= 0.5 * mxs[0] for m in mxs)
    W = tuple(s["weyl_window"])
    weyl = []
    for L in (s["torus_l"][-2], s["torus_l"][-1]):
        torus = modelzoo.FlatTorus(L, L, W[1] + 1e-9)
        weyl.append(modelzoo.weyl_ratio(modelzoo.torus_matrix_elements(torus, {(0, 0): 1.0}), W))
    weyl_change = abs(weyl[1] / weyl[0] - 1)
    ok = qe_ok and mix_ok and mxs[0] > 0
    return CheckResult("models.torus", _status(ok), {
        "qe_monotone": qe_ok, "qe_max": max(qes), "mix_max_first": mxs[0], "mix_min": min(mxs),
        "weyl_ratio_last": weyl[1], "weyl_relative_change": weyl_change},
        tables={"models_torus.csv": _table(("L", "window_count", "qe", "max_mix", "argmax_tau"), rows)})


# -- bound evaluator ------------------------------------------------------------------------

def check_bound_evaluator(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("bound")
    unit = bounds.rhs_quantitative(bounds.QuantInputs(1, 1, 1, 1, 1, 1, 1))
    hand = 50000 * math.pi * (1 + 8 * math.pi ** 2 * math.exp(6))
    unit_err = abs(unit - hand) / hand
    delta = bounds.delta_for_epsilon(s["eps"], s["rho_min"], s["rho_max"], s["beta_min"],
                                     s["weyl_const"], s["a_max"])
    hand_d = min(s["eps"] * s["beta_min"] ** 3 * math.pi
                 / (4 * 50000 * math.pi * s["weyl_const"] * s["rho_max"] ** 4 * s["a_max"] ** 2),
                 2 * s["rho_min"] / 9)
    d_err = abs(delta - hand_d) / hand_d
    beta_ok = (bounds.beta_of_lambda(0) == 0 and bounds.beta_of_lambda(0.25) == 1
               and abs(bounds.beta_of_lambda(3 / 16) - 0.5) <= 1e-15)
    ok = unit_err <= 1e-12 and d_err <= 1e-12 and beta_ok
    return CheckResult("bound.evaluator", _status(ok), {
        "rhs_unit": unit, "rhs_unit_rel_error": unit_err, "delta": delta,
        "delta_rel_error": d_err, "beta_map_ok": beta_ok})


def check_spectrum_ingested(cfg: SuiteConfig, jobs: int) -> CheckResult:
    s = cfg.section("spectrum")
    spec = modelzoo.ingest_spectrum(s["path"])
    I = tuple(s["window"])
    lhs = modelzoo.lhs_double_sum(spec, I, s["delta"], s["tau"])
    T = math.pi / (2 * s["delta"])
    rhs = bounds.rhs_quantitative(bounds.QuantInputs(I[1], T, s["beta"], s["a_l2_sq"],
                                                     s["a_sup_sq"], s["thin_vol"], s["inj_rad"]))
    metrics = {"modes": len(spec.freqs), "window_count": modelzoo.window_count(spec, I),
               "lhs": lhs, "rhs": rhs, "convention": spec.convention,
               "mean_zero": abs(spec.obs_mean) <= 1e-12}
    return CheckResult("spectrum.ingested", _status(lhs <= rhs), metrics)


CHECKS: Dict[str, Callable[[SuiteConfig, int], CheckResult]] = {
    "specwin.bound_sweep": check_specwin_bound_sweep,
    "specwin.closed_vs_quad": check_specwin_closed_vs_quad,
    "kernel.mass": check_kernel_mass,
    "kernel.selberg": check_kernel_selberg,
    "kernel.mollifier": check_kernel_mollifier,
    "weight.bounds": check_weight_bounds,
    "weight.isometry": check_weight_isometry,
    "weight.integral": check_weight_integral,
    "mix.bolza_correlation": check_mix_correlation,
    "mix.flow_algebra": check_mix_flow_algebra,
    "mix.geometry": check_mix_geometry,
    "models.circle": check_models_circle,
    "models.torus": check_models_torus,
    "bound.evaluator": check_bound_evaluator,
    "spectrum.ingested": check_spectrum_ingested,
}


def run_check(check_id: str, cfg: SuiteConfig, jobs: int = 1) -> CheckResult:
    try:
        return CHECKS[check_id](cfg, jobs)
    except QmixError as exc:
        return CheckResult(check_id, "error", {"error": f"{type(exc).__name__}: {exc}"})


def exit_code(results: List[CheckResult]) -> int:
    if any(r.status == "error" for r in results):
        return EXIT_NUMERIC
    if any(r.status == "fail" for r in results):
        return EXIT_FAIL
    return EXIT_PASS


def render_report(results: List[CheckResult], fmt: str) -> str:
    results = sorted(results, key=lambda r: r.check_id)
    if fmt == "json":
        return json.dumps([r.to_json() for r in results], indent=2, sort_keys=True) + "\n"
    rows = []
    for r in results:
        for k, v in sorted(r.metrics.items()):
            v = _jsonable(v)
            rows.append((r.check_id, r.status, k, repr(v) if isinstance(v, float) else v))
    return _table(("check_id", "status", "metric", "value"), rows)


def run_suite(cfg: SuiteConfig, checks=None) -> Tuple[int, List[CheckResult]]:
    """Run the selected checks, write tables/figures/report under suite.out
    and return (exit code, results sorted by check id)."""
    checks = tuple(checks) if checks is not None else cfg.checks
    jobs = cfg.get("suite", "jobs")
    out = cfg.get("suite", "out")
    os.makedirs(out, exist_ok=True)
    if jobs > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: run_check(c, cfg, jobs), checks))
    else:
        results = [run_check(c, cfg, jobs) for c in checks]
    results.sort(key=lambda r: r.check_id)
    plots_on = cfg.get("suite", "plots")
    for r in results:
        for name, text in sorted(r.tables.items()):
            with open(os.path.join(out, name), "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            r.artifacts.append(name)
        if plots_on:
            for name, draw in sorted(r.figures.items()):
                draw(os.path.join(out, name))
                r.artifacts.append(name)
    fmt = cfg.get("suite", "format")
    with open(os.path.join(out, f"report.{fmt}"), "w", encoding="utf-8", newline="") as fh:
        fh.write(render_report(results, fmt))
    with open(os.path.join(out, "config.echo"), "w", encoding="utf-8") as fh:
        fh.write(cfg.dump())
    return exit_code(results), results
