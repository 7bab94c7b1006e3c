"""JSON run configuration.

Layout (``schema_version`` 1)::

    {
      "schema_version": 1,
      "domain": {"lengths": [1.0], "omega": [[0.0, 0.5]]},
      "controller": {"lambda": 5.0, "D": 1.0, "sigma": null},
      "model": {"M": 64, "c": 0.0},
      "simulation": {"dt": 0.001, "t_end": null, "scheme": "exponential_euler",
                     "sign_treatment": "implicit", "y0": "bump",
                     "log_every": 1, "seed": 0, "open_loop": false},
      "disturbance": {"kind": "sinusoid", "amplitude": null, "profile": "flat",
                      "frequency": 1.0, "seed": 0, "switch_period": 0.05},
      "diagnostics": {"certificate_tol": null},
      "sweep": {"lambda": [], "sigma": [], "D": [], "omega": []}
    }

Only ``domain`` and ``controller.lambda`` are required. ``null`` means the
documented default (``sigma = 1e-6 D``, ``dt = min(0.1/lambda, 0.1/gamma)``,
``t_end = 8/lambda``, disturbance amplitude equal to ``D``,
certificate tolerance ``0.05 lambda``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .disturbance import DisturbanceSpec
from .errors import ConfigError, HeatStabError
from .simulator import SimConfig
from .spectral import DomainSpec

SCHEMA_VERSION = 1

_SECTIONS = {
    "schema_version": None,
    "domain": {"lengths", "omega"},
    "controller": {"lambda", "D", "sigma"},
    "model": {"M", "c"},
    "simulation": {"dt", "t_end", "scheme", "sign_treatment", "y0", "log_every", "seed", "open_loop"},
    "disturbance": {"kind", "amplitude", "profile", "frequency", "seed", "switch_period"},
    "diagnostics": {"certificate_tol"},
    "sweep": {"lambda", "sigma", "D", "omega"},
}


@dataclass(frozen=True)
class RunConfig:
    sim: SimConfig
    certificate_tol: float | None = None
    sweep: dict = field(default_factory=dict, compare=True)


def _num(section, key, value, *, integer=False, optional=True):
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{section}.{key}: value required")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object")
    for key, val in raw.items():
        if key not in _SECTIONS:
            raise ConfigError(f"unknown section {key!r}")
        allowed = _SECTIONS[key]
        if allowed is not None:
            if not isinstance(val, dict):
                raise ConfigError(f"section {key!r} must be an object")
            extra = set(val) - allowed
            if extra:
                raise ConfigError(f"{key}: unknown field(s) {sorted(extra)}")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version {version!r} not supported (expected {SCHEMA_VERSION})")

    dom = raw.get("domain")
    if dom is None or "lengths" not in dom:
        raise ConfigError("domain.lengths: value required")
    try:
        domain = DomainSpec.box(dom["lengths"], dom.get("omega"))
    except ConfigError as exc:
        raise ConfigError(f"domain: {exc}") from None
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"domain: malformed ({exc})") from None

    ctl = raw.get("controller", {})
    lam = _num("controller", "lambda", ctl.get("lambda"), optional=False)
    D = _num("controller", "D", ctl.get("D", 0.0), optional=False)
    sigma = _num("controller", "sigma", ctl.get("sigma"))

    model = raw.get("model", {})
    M = _num("model", "M", model.get("M", 64), integer=True, optional=False)
    c = _num("model", "c", model.get("c", 0.0), optional=False)

    sim = raw.get("simulation", {})
    y0 = sim.get("y0", "bump")
    if not isinstance(y0, str):
        if not isinstance(y0, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in y0):
            raise ConfigError("simulation.y0: expected a profile name or a list of numbers")
        y0 = tuple(float(v) for v in y0)
    open_loop = sim.get("open_loop", False)
    if not isinstance(open_loop, bool):
        raise ConfigError("simulation.open_loop: expected true or false")
    for key in ("scheme", "sign_treatment"):
        if key in sim and not isinstance(sim[key], str):
            raise ConfigError(f"simulation.{key}: expected a string")

    dist = raw.get("disturbance", {})
    profile = dist.get("profile", "flat")
    if isinstance(profile, list):
        profile = tuple(_num("disturbance", "profile", v, optional=False) for v in profile)
    elif not isinstance(profile, str):
        raise ConfigError("disturbance.profile: expected a name or a list of numbers")
    if "kind" in dist and not isinstance(dist["kind"], str):
        raise ConfigError("disturbance.kind: expected a string")
    try:
        dspec = DisturbanceSpec(
            kind=dist.get("kind", "zero"),
            amplitude=_num("disturbance", "amplitude", dist.get("amplitude")),
            profile=profile,
            frequency=_num("disturbance", "frequency", dist.get("frequency", 1.0), optional=False),
            seed=_num("disturbance", "seed", dist.get("seed", 0), integer=True, optional=False),
            switch_period=_num("disturbance", "switch_period", dist.get("switch_period", 0.05), optional=False),
        )
        cfg = SimConfig(
            domain=domain,
            M=M,
            lam=lam,
            D=D,
            sigma=sigma,
            c=c,
            dt=_num("simulation", "dt", sim.get("dt")),
            t_end=_num("simulation", "t_end", sim.get("t_end")),
            scheme=sim.get("scheme", "exponential_euler"),
            sign_treatment=sim.get("sign_treatment", "implicit"),
            y0=y0,
            disturbance=dspec,
            log_every=_num("simulation", "log_every", sim.get("log_every", 1), integer=True, optional=False),
            seed=_num("simulation", "seed", sim.get("seed", 0), integer=True, optional=False),
            open_loop=open_loop,
        )
    except HeatStabError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    tol = _num("diagnostics", "certificate_tol", raw.get("diagnostics", {}).get("certificate_tol"))

    sweep = {}
    for key, vals in raw.get("sweep", {}).items():
        if not isinstance(vals, list):
            raise ConfigError(f"sweep.{key}: expected a list")
        if vals:
            sweep[key] = [tuple(map(tuple, v)) if key == "omega" else _num("sweep", key, v, optional=False) for v in vals]
    return RunConfig(cfg, tol, sweep)


def to_dict(rc: RunConfig) -> dict:
    """Inverse of :func:`from_dict` (canonical form)."""
    cfg = rc.sim
    y0 = cfg.y0 if isinstance(cfg.y0, str) else list(cfg.y0)
    out = {
        "schema_version": SCHEMA_VERSION,
        "domain": cfg.domain.to_dict(),
        "controller": {"lambda": cfg.lam, "D": cfg.D, "sigma": cfg.sigma},
        "model": {"M": cfg.M, "c": cfg.c},
        "simulation": {
            "dt": cfg.dt,
            "t_end": cfg.t_end,
            "scheme": cfg.scheme,
            "sign_treatment": cfg.sign_treatment,
            "y0": y0,
            "log_every": cfg.log_every,
            "seed": cfg.seed,
            "open_loop": cfg.open_loop,
        },
        "disturbance": cfg.disturbance.to_dict(),
        "diagnostics": {"certificate_tol": rc.certificate_tol},
    }
    if rc.sweep:
        out["sweep"] = {k: [[list(b) for b in v] if k == "omega" else v for v in vals] for k, vals in rc.sweep.items()}
    return out


def loads(text: str) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(raw)


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return loads(text)


def with_overrides(rc: RunConfig, seed=None, dt=None, t_end=None) -> RunConfig:
    sim = rc.sim
    if seed is not None:
        sim = replace(sim, seed=int(seed), disturbance=replace(sim.disturbance, seed=int(seed)))
    if dt is not None:
        sim = replace(sim, dt=float(dt))
    if t_end is not None:
        sim = replace(sim, t_end=float(t_end))
    return replace(rc, sim=sim)
