"""Suite configuration: flat "section.key = value" lines with '#' comments.

Every key has a typed default; the default's type decides how a value is
parsed (bool true/false, int, float, comma-separated tuple, or string).
dump() writes every key in sorted order, and parse(dump(c)) == c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

from .errors import ConfigError

CHECK_IDS = (
    "specwin.bound_sweep",
    "specwin.closed_vs_quad",
    "kernel.mass",
    "kernel.selberg",
    "kernel.mollifier",
    "weight.bounds",
    "weight.isometry",
    "weight.integral",
    "mix.bolza_correlation",
    "mix.flow_algebra",
    "mix.geometry",
    "models.circle",
    "models.torus",
    "bound.evaluator",
    "spectrum.ingested",
)

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "suite": {
        "checks": ("all",),
        "seed": 20240611,
        "jobs": 1,
        "out": "qmix-out",
        "format": "json",
        "plots": False,
        "tol": 1e-9,
    },
    "specwin": {
        "rho_min": 1.0,
        "rho_max": 2.0,
        "delta": 0.2,
        "grid": 60,
        "random": 10000,
        "quad_samples": 1000,
        "ridge_n": 121,
        "ridge_tau": 0.0,
    },
    "kernel": {
        "mass_count": 50,
        "t_min": 0.1,
        "t_max": 5.0,
        "selberg_t": (0.5, 1.0, 2.0, 4.0),
        "selberg_rho": (0.3, 1.0, 2.5, 5.0),
        "probes": (1.0, 0.5, 2.0, 1.0, 3.0, 0.5),
        "eps_exponents": (2, 3, 4, 5, 6, 7, 8),
    },
    "weight": {
        "t_min": 0.5,
        "t_max": 3.0,
        "t_count": 10,
        "tp_min": 0.3,
        "tp_count": 10,
        "rho_count": 4,
        "margin": 0.05,
        "pairs": 20,
        "pair_t": 1.5,
        "pair_tp": 1.0,
        "pair_rho": 1.3,
        "integral_t": (0.5, 1.0, 2.0, 3.0, 5.0),
        "integral_tp_frac": (0.2, 0.4, 0.6, 0.8, 1.0),
        "integral_beta": (0.3, 0.6, 1.0),
    },
    "mix": {
        "preset": "bolza",
        "beta": 1.0,
        "samples": 100000,
        "times": (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0),
        "f_bump": (0.3, 1.2, 0.6),
        "g_bump": (-0.2, 0.8, 0.5),
        "flow_states": 1000,
        "thin_factor": 1.02,
        "thin_samples": 4000,
    },
    "models": {
        "circle_n": (4, 8, 16, 32, 64, 128, 256),
        "torus_l": (10.0, 20.0, 40.0, 80.0),
        "torus_aspect": math.sqrt(2.0),
        "torus_window": (1.0, 2.0),
        "torus_delta": 0.1,
        "tau_max": 1.0,
        "tau_count": 401,
        "weyl_window": (2.0, 4.0),
    },
    "bound": {
        "eps": 0.1,
        "rho_min": 1.0,
        "rho_max": 2.0,
        "beta_min": 0.5,
        "weyl_const": 1.0,
        "a_max": 1.0,
    },
    "spectrum": {
        "path": "",
        "window": (1.0, 2.0),
        "delta": 0.2,
        "tau": 0.0,
        "beta": 1.0,
        "a_l2_sq": 1.0,
        "a_sup_sq": 1.0,
        "thin_vol": 0.0,
        "inj_rad": 1.0,
    },
}


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(_format(x) for x in v)
    return str(v)


def _parse_scalar(text: str, proto, key, line):
    try:
        if isinstance(proto, bool):
            if text not in ("true", "false"):
                raise ValueError("expected true or false")
            return text == "true"
        if isinstance(proto, int):
            return int(text)
        if isinstance(proto, float):
            v = float(text)
            if not math.isfinite(v):
                raise ValueError("value must be finite")
            return v
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value {text!r}: {exc}", line=line, key=key) from None


def _parse_value(text: str, proto, key, line):
    if isinstance(proto, tuple):
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ConfigError("empty list", line=line, key=key)
        elem = proto[0] if proto else ""
        return tuple(_parse_scalar(p, elem, key, line) for p in parts)
    return _parse_scalar(text, proto, key, line)


@dataclass(frozen=True)
class SuiteConfig:
    values: Dict[str, Dict[str, Any]] = field(default_factory=lambda: {
        s: dict(kv) for s, kv in DEFAULTS.items()})

    def get(self, section: str, key: str):
        return self.values[section][key]

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self.values[name])

    def with_value(self, dotted: str, value) -> "SuiteConfig":
        section, key = _split_key(dotted, None)
        vals = {s: dict(kv) for s, kv in self.values.items()}
        proto = DEFAULTS[section][key]
        if isinstance(value, str) and not isinstance(proto, str):
            value = _parse_value(value, proto, dotted, None)
        vals[section][key] = value
        cfg = SuiteConfig(vals)
        cfg.validate()
        return cfg

    @property
    def checks(self) -> Tuple[str, ...]:
        sel = self.get("suite", "checks")
        if sel == ("all",):
            return tuple(c for c in CHECK_IDS if c != "spectrum.ingested" or self.get("spectrum", "path"))
        out = []
        for item in sel:
            matched = [c for c in CHECK_IDS if c == item or c.startswith(item + ".")]
            if not matched:
                raise ConfigError(f"unknown check {item!r}", key="suite.checks")
            out.extend(m for m in matched if m not in out)
        return tuple(sorted(out))

    def validate(self) -> None:
        if self.get("suite", "format") not in ("csv", "json"):
            raise ConfigError("format must be csv or json", key="suite.format")
        if self.get("suite", "jobs") < 1:
            raise ConfigError("jobs must be at least 1", key="suite.jobs")
        if self.get("suite", "seed") < 0:
            raise ConfigError("seed must be nonnegative", key="suite.seed")
        if not self.get("suite", "tol") > 0:
            raise ConfigError("tol must be positive", key="suite.tol")
        self.checks  # raises on unknown check names

    def dump(self) -> str:
        lines = []
        for s in sorted(self.values):
            for k in sorted(self.values[s]):
                lines.append(f"{s}.{k} = {_format(self.values[s][k])}")
        return "\n".join(lines) + "\n"


def _split_key(dotted: str, line):
    if "." not in dotted:
        raise ConfigError("keys must look like section.key", line=line, key=dotted)
    section, key = dotted.split(".", 1)
    if section not in DEFAULTS or key not in DEFAULTS[section]:
        raise ConfigError("unknown configuration key", line=line, key=dotted)
    return section, key


def parse_config(text: str) -> SuiteConfig:
    vals = {s: dict(kv) for s, kv in DEFAULTS.items()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'section.key = value'", line=lineno)
        dotted, value = (p.strip() for p in line.split("=", 1))
        section, key = _split_key(dotted, lineno)
        vals[section][key] = _parse_value(value, DEFAULTS[section][key], dotted, lineno)
    cfg = SuiteConfig(vals)
    cfg.validate()
    return cfg


def load_config(path) -> SuiteConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)
