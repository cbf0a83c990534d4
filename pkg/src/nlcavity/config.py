"""Scenario files: loading, validation and resolution into model objects.

A scenario is a YAML mapping. Exactly one of ``preset`` (a shipped preset
name) or ``system`` (an inline system in the preset schema) must be given.
Every dimensioned value needs a unit suffix; errors name the offending key
and, when read from a file, its line.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .adiabatic import PumpModel, calibrate_pump_model, optimal_phi
from .drive import DrivePulse, adiabatic_gaussian
from .errors import ConfigError, UnitError
from .model import (
    KAPPA_CONVENTIONS,
    CavityMode,
    EmitterParams,
    SystemParams,
    cooperativity_exact,
    g1_for_cooperativity,
    kappa_from_Q,
)
from .presets import get_preset, system_hash
from .units import parse_quantity

TOP_KEYS = {
    "preset", "system", "kappa_convention", "tol", "workers", "out",
    "operating_point", "drive", "sweep", "shape", "store", "overlap",
}

DEFAULTS = {
    "kappa_convention": "paper",
    "tol": 1e-10,
    "workers": 1,
    "operating_point": {},
    "drive": {"kind": "adiabatic_gaussian", "rate_fraction": 0.05, "depletion": 25.0, "samples": 4001},
    "sweep": {
        "power_min": "0.01 mW",
        "power_max": "10000 mW",
        "n_power": 100,
        "spacing": "log",
        "delta_min": 0.0,
        "delta_max": 50.0,
        "n_delta": 50,
        "contour_deltas": [3.0, 10.0, 30.0],
    },
    "shape": {"kind": "gaussian", "width_kappa": 200.0, "norm_fraction": 0.9, "samples": 4001, "method": "adiabatic"},
    "store": {"rate_fraction": 0.3, "depletion": 16.0, "bandwidth_kappa": 50.0},
    "overlap": {},
}


def _line_map(text: str) -> dict:
    """Map dotted key paths to 1-based line numbers."""
    out = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return out

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                path = f"{prefix}.{k.value}" if prefix else str(k.value)
                out[path] = k.start_mark.line + 1
                walk(v, path)

    walk(root, "")
    return out


class _Ctx:
    def __init__(self, source: str = "<config>", lines: Optional[dict] = None):
        self.source = source
        self.lines = lines or {}

    def error(self, key: str, msg: str) -> ConfigError:
        line = self.lines.get(key)
        loc = f"{self.source}:{line}" if line else self.source
        return ConfigError(f"{loc}: {key}: {msg}")

    def q(self, value, kind: str, key: str) -> float:
        try:
            return parse_quantity(value, kind)
        except UnitError as exc:
            raise self.error(key, str(exc)) from None

    def num(self, value, key: str, positive: bool = False) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(key, f"expected a dimensionless number, got {value!r}")
        if positive and not value > 0:
            raise self.error(key, f"must be positive, got {value!r}")
        return float(value)


@dataclass
class Scenario:
    system: dict
    kappa_convention: str = "paper"
    tol: float = 1e-10
    workers: int = 1
    out: Optional[str] = None
    operating_point: dict = field(default_factory=dict)
    drive: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    shape: dict = field(default_factory=dict)
    store: dict = field(default_factory=dict)
    overlap: dict = field(default_factory=dict)
    source: str = "<config>"
    lines: dict = field(default_factory=dict)

    @property
    def ctx(self) -> _Ctx:
        return _Ctx(self.source, self.lines)

    @property
    def system_hash(self) -> str:
        return system_hash(self.system)

    @property
    def label(self) -> str:
        return str(self.system.get("label", "inline"))

    def echo(self) -> dict:
        """Fully expanded scenario; loading it reproduces every output.

        ``workers`` and ``out`` are left out: neither changes any result.
        """
        d = {
            "system": copy.deepcopy(self.system),
            "kappa_convention": self.kappa_convention,
            "tol": self.tol,
            "operating_point": copy.deepcopy(self.operating_point),
            "drive": copy.deepcopy(self.drive),
            "sweep": copy.deepcopy(self.sweep),
            "shape": copy.deepcopy(self.shape),
            "store": copy.deepcopy(self.store),
        }
        if self.overlap:
            d["overlap"] = copy.deepcopy(self.overlap)
        return d


def _merge(defaults: dict, given: dict) -> dict:
    out = copy.deepcopy(defaults)
    out.update(copy.deepcopy(given or {}))
    return out


def load_scenario(
    path=None,
    *,
    preset: Optional[str] = None,
    overrides: Optional[dict] = None,
) -> Scenario:
    """Read a scenario file and/or a preset name; ``overrides`` win over both."""
    raw: dict = {}
    source, lines = "<command line>", {}
    if path is not None:
        p = Path(path)
        source = str(p)
        if not p.exists():
            raise ConfigError(f"{source}: file not found")
        text = p.read_text()
        try:
            raw = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{source}: YAML parse error: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{source}: top level must be a mapping")
        lines = _line_map(text)
    ctx = _Ctx(source, lines)
    unknown = set(raw) - TOP_KEYS
    if unknown:
        k = sorted(unknown)[0]
        raise ctx.error(k, f"unknown key (allowed: {', '.join(sorted(TOP_KEYS))})")
    if preset is not None:
        if "system" in raw:
            raise ctx.error("system", "both a preset and an inline system were given")
        raw["preset"] = preset
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = v
    has_preset = raw.get("preset") is not None
    has_system = raw.get("system") is not None
    if has_preset == has_system:
        raise ctx.error("preset", "exactly one of 'preset' or 'system' must be given")
    if has_preset:
        try:
            system = get_preset(str(raw["preset"]))
        except KeyError as exc:
            raise ctx.error("preset", str(exc.args[0])) from None
    else:
        system = raw["system"]
        if not isinstance(system, dict):
            raise ctx.error("system", "must be a mapping")
    conv = raw.get("kappa_convention", DEFAULTS["kappa_convention"])
    if conv not in KAPPA_CONVENTIONS:
        raise ctx.error("kappa_convention", f"must be one of {KAPPA_CONVENTIONS}, got {conv!r}")
    tol = ctx.num(raw.get("tol", DEFAULTS["tol"]), "tol", positive=True)
    workers = raw.get("workers", DEFAULTS["workers"])
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ctx.error("workers", f"must be a positive integer, got {workers!r}")
    sc = Scenario(
        system=system,
        kappa_convention=conv,
        tol=tol,
        workers=workers,
        out=raw.get("out"),
        operating_point=_merge(DEFAULTS["operating_point"], raw.get("operating_point")),
        drive=_merge(DEFAULTS["drive"], raw.get("drive")),
        sweep=_merge(DEFAULTS["sweep"], raw.get("sweep")),
        shape=_merge(DEFAULTS["shape"], raw.get("shape")),
        store=_merge(DEFAULTS["store"], raw.get("store")),
        overlap=_merge(DEFAULTS["overlap"], raw.get("overlap")),
        source=source,
        lines=lines,
    )
    # fail early on a malformed system
    build_system(sc)
    return sc


def _mode(spec: dict, label: str, ctx: _Ctx, key: str) -> CavityMode:
    if not isinstance(spec, dict):
        raise ctx.error(key, "must be a mapping")
    for k in ("wavelength", "Q", "V_n"):
        if k not in spec:
            raise ctx.error(f"{key}.{k}", "missing")
    try:
        return CavityMode(
            label=label,
            wavelength=ctx.q(spec["wavelength"], "length", f"{key}.wavelength"),
            quality_factor=ctx.num(spec["Q"], f"{key}.Q", positive=True),
            normalized_mode_volume=ctx.num(spec["V_n"], f"{key}.V_n", positive=True),
            refractive_index=ctx.num(spec.get("n", 1.0), f"{key}.n"),
            polarization=spec.get("polarization", "TE"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ctx.error(key, str(exc)) from None


def build_system(sc: Scenario, *, delta: float = 0.0, g2: float = 0.0) -> SystemParams:
    """System rates from the scenario's system block (no pump yet unless ``g2``)."""
    ctx = sc.ctx
    s = sc.system
    pre = "system"
    for k in ("emitter", "mode_a", "mode_c"):
        if k not in s:
            raise ctx.error(f"{pre}.{k}", "missing")
    ma = _mode(s["mode_a"], "a", ctx, f"{pre}.mode_a")
    mc = _mode(s["mode_c"], "c", ctx, f"{pre}.mode_c")
    em = s["emitter"]
    if "gamma" not in em:
        raise ctx.error(f"{pre}.emitter.gamma", "missing")
    gamma = ctx.q(em["gamma"], "rate", f"{pre}.emitter.gamma")
    if not gamma > 0:
        raise ctx.error(f"{pre}.emitter.gamma", "must be positive")
    if ("g1" in em) == ("cooperativity" in em):
        raise ctx.error(f"{pre}.emitter", "give exactly one of 'g1' or 'cooperativity'")
    if "g1" in em:
        g1 = ctx.q(em["g1"], "rate", f"{pre}.emitter.g1")
    else:
        # resolved against the paper-convention kappa_a so g1 does not move
        # when the linewidth convention is switched
        C = ctx.num(em["cooperativity"], f"{pre}.emitter.cooperativity")
        g1 = g1_for_cooperativity(C, gamma, kappa_from_Q(ma, "paper"))
    emitter = EmitterParams(g1=g1, gamma=gamma, gamma_ratio=float(em.get("gamma_ratio", 1.0)))
    return SystemParams.from_modes(emitter, ma, mc, delta=delta, g2=g2, convention=sc.kappa_convention)


def pump_model(sc: Scenario, base: Optional[SystemParams] = None) -> PumpModel:
    ctx = sc.ctx
    base = base or build_system(sc)
    pump = sc.system.get("pump", {})
    C = cooperativity_exact(base.g1, base.gamma, base.kappa_a)
    if "g2_per_sqrt_mW" in pump:
        g = ctx.q(pump["g2_per_sqrt_mW"], "rate", "system.pump.g2_per_sqrt_mW")
        return PumpModel.analytic(g, base.kappa_a, base.kappa_c_in)
    if "anchor" not in pump:
        raise ctx.error("system.pump", "needs an 'anchor' {power, delta, F} or 'g2_per_sqrt_mW'")
    a = pump["anchor"]
    P = ctx.q(a["power"], "power", "system.pump.anchor.power") * 1e3
    d = ctx.num(a["delta"], "system.pump.anchor.delta")
    F = ctx.num(a["F"], "system.pump.anchor.F")
    try:
        return calibrate_pump_model(P, d, F, C)
    except ValueError as exc:
        raise ctx.error("system.pump.anchor", str(exc)) from None


def operating_params(sc: Scenario) -> SystemParams:
    """System at the configured (delta, pump) operating point.

    ``operating_point`` may fix g2 directly (``g2``), the branching parameter
    (``phi``), the optimum (``optimal: true``) or a pump power (``power``,
    mapped through the pump model). Default: the preset's anchor power.
    """
    ctx = sc.ctx
    op = sc.operating_point
    pump = sc.system.get("pump", {})
    default_delta = pump.get("anchor", {}).get("delta", 10.0)
    delta = ctx.num(op.get("delta", default_delta), "operating_point.delta")
    if delta < 0:
        raise ctx.error("operating_point.delta", "must be >= 0")
    base = build_system(sc, delta=delta)
    chosen = [k for k in ("g2", "phi", "optimal", "power") if k in op]
    if len(chosen) > 1:
        raise ctx.error("operating_point", f"conflicting settings {chosen}; give one")
    if "g2" in op:
        return base.with_g2(ctx.q(op["g2"], "rate", "operating_point.g2"))
    if "phi" in op:
        return base.with_phi(ctx.num(op["phi"], "operating_point.phi"))
    if op.get("optimal"):
        return base.with_phi(optimal_phi(base.derived.C_in))
    model = pump_model(sc, build_system(sc))
    if "power" in op:
        P = ctx.q(op["power"], "power", "operating_point.power") * 1e3
    elif "anchor" in pump:
        P = ctx.q(pump["anchor"]["power"], "power", "system.pump.anchor.power") * 1e3
    else:
        raise ctx.error("operating_point", "no pump power, phi or g2 given")
    return base.with_phi(model.phi(P, delta))


def build_drive(sc: Scenario, params: SystemParams) -> DrivePulse:
    ctx = sc.ctx
    d = sc.drive
    kind = d.get("kind", "adiabatic_gaussian")
    n = int(d.get("samples", 4001))
    if kind == "adiabatic_gaussian":
        return adiabatic_gaussian(
            params,
            ctx.num(d.get("rate_fraction", 0.05), "drive.rate_fraction", positive=True),
            ctx.num(d.get("depletion", 25.0), "drive.depletion", positive=True),
            n=n,
        )
    if kind == "gaussian":
        return DrivePulse.gaussian(
            ctx.q(d.get("peak"), "rate", "drive.peak"),
            ctx.q(d.get("center"), "time", "drive.center"),
            ctx.q(d.get("width"), "time", "drive.width"),
            ctx.q(d.get("t_end"), "time", "drive.t_end"),
            n=n,
        )
    if kind == "smoothed_square":
        return DrivePulse.smoothed_square(
            ctx.q(d.get("peak"), "rate", "drive.peak"),
            ctx.q(d.get("t_on"), "time", "drive.t_on"),
            ctx.q(d.get("t_off"), "time", "drive.t_off"),
            ctx.q(d.get("rise"), "time", "drive.rise"),
            ctx.q(d.get("t_end"), "time", "drive.t_end"),
            n=n,
        )
    raise ctx.error("drive.kind", f"unknown drive kind {kind!r}")


def sweep_axes(sc: Scenario):
    import numpy as np

    ctx = sc.ctx
    s = sc.sweep
    pmin = ctx.q(s["power_min"], "power", "sweep.power_min") * 1e3
    pmax = ctx.q(s["power_max"], "power", "sweep.power_max") * 1e3
    n_p = int(s["n_power"])
    if not 0 < pmin < pmax:
        raise ctx.error("sweep.power_min", "need 0 < power_min < power_max")
    if s["spacing"] == "log":
        P = np.logspace(math.log10(pmin), math.log10(pmax), n_p)
    elif s["spacing"] == "linear":
        P = np.linspace(pmin, pmax, n_p)
    else:
        raise ctx.error("sweep.spacing", "must be 'log' or 'linear'")
    if "deltas" in s:
        D = np.asarray([ctx.num(v, "sweep.deltas") for v in s["deltas"]], dtype=float)
    else:
        D = np.linspace(ctx.num(s["delta_min"], "sweep.delta_min"), ctx.num(s["delta_max"], "sweep.delta_max"), int(s["n_delta"]))
    contours = np.asarray([ctx.num(v, "sweep.contour_deltas") for v in s.get("contour_deltas", [])], dtype=float)
    return P, D, contours
