"""``nlcavity`` command-line front end."""

from __future__ import annotations

import functools
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, export
from .adiabatic import efficiency_closed_form, sweep_landscape
from .config import (
    Scenario,
    build_drive,
    build_system,
    load_scenario,
    operating_params,
    pump_model,
    sweep_axes,
)
from .drive import adiabatic_gaussian
from .dynamics import Wavepacket, extract_wavepacket, integrate
from .errors import ConfigError, NLCavityError, NumericalError
from .presets import get_preset, preset_names, system_hash

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
PUMP_KEYS = ("g2", "phi", "optimal", "power")


def _guarded(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except NumericalError as exc:
            click.echo(f"numerical failure: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
        except (ConfigError, NLCavityError, ValueError, KeyError) as exc:
            click.echo(f"configuration error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_CONFIG)

    return wrapper


def scenario_options(func):
    opts = [
        click.option("--preset", default=None, help="Shipped preset name (see 'presets list')."),
        click.option("--config", "config", type=click.Path(dir_okay=False), default=None, help="Scenario YAML file."),
        click.option("--out", "out", type=click.Path(file_okay=False), default=None, help="Output directory."),
        click.option("--tol", type=float, default=None, help="Relative integration tolerance."),
        click.option("--workers", type=int, default=None, help="Worker threads for sweeps."),
        click.option("--kappa-convention", type=click.Choice(["paper", "energy"]), default=None),
    ]
    for opt in reversed(opts):
        func = opt(func)
    return func


def _scenario(preset, config, out, tol, workers, kappa_convention, op=None) -> Scenario:
    overrides = {"tol": tol, "workers": workers, "kappa_convention": kappa_convention, "out": out}
    sc = load_scenario(config, preset=preset, overrides=overrides)
    for k, v in (op or {}).items():
        if v is None:
            continue
        if k in PUMP_KEYS:
            # a command-line pump setting replaces whatever the file chose
            for other in PUMP_KEYS:
                sc.operating_point.pop(other, None)
        sc.operating_point[k] = v
    return sc


def _outdir(sc: Scenario, default: str) -> Path:
    return Path(sc.out or default)


def _params_summary(p) -> dict:
    d = p.derived
    return {
        "g1": p.g1,
        "gamma": p.gamma,
        "kappa_a": p.kappa_a,
        "kappa_c_in": p.kappa_c_in,
        "kappa_c_ex": p.kappa_c_ex,
        "kappa_c": p.kappa_c,
        "g2": p.g2,
        "C_in": d.C_in,
        "phi": d.phi,
        "delta": d.delta,
        "gamma_total": d.gamma_total,
    }


@click.group()
@click.version_option(__version__, prog_name="nlcavity")
def main():
    """Single-photon frequency conversion in a doubly resonant chi(2) cavity."""


@main.command()
@scenario_options
@click.option("--delta", type=float, default=None, help="Overcoupling kappa_c_ex / kappa_c_in.")
@click.option("--power", default=None, help="Pump power with unit, e.g. '3 mW'.")
@click.option("--phi", type=float, default=None, help="Branching parameter (overrides power).")
@_guarded
def simulate(preset, config, out, tol, workers, kappa_convention, delta, power, phi):
    """Integrate the amplitude equations and write trajectory, photon and loss budget."""
    sc = _scenario(preset, config, out, tol, workers, kappa_convention, {"delta": delta, "power": power, "phi": phi})
    p = operating_params(sc)
    drive = build_drive(sc, p)
    tr = integrate(p, drive, drive.t_end, sc.tol, n_samples=int(sc.drive.get("samples", 4001)))
    wp = extract_wavepacket(tr, p)
    h, echo = sc.system_hash, sc.echo()
    d = _outdir(sc, "nlcavity-simulate")
    export.write_columns(d / "trajectory.csv", tr.csv_columns(), kind="trajectory", system_hash=h, resolved=echo)
    export.write_columns(d / "wavepacket.csv", wp.csv_columns(), kind="wavepacket", system_hash=h, resolved=echo)
    budget = tr.budget.as_dict()
    budget["wavepacket_norm"] = wp.norm
    closed = float(efficiency_closed_form(p.derived.C_in, p.derived.phi, p.kappa_ratio))
    export.write_report(
        d / "summary.txt",
        "simulation summary",
        {
            "parameters (rad/s unless dimensionless)": _params_summary(p),
            "loss budget (probabilities)": budget,
            "efficiency": {"F_simulated": tr.budget.extracted, "F_closed_form": closed},
            "solver": {
                "accepted_steps": tr.stats.accepted,
                "rejected_steps": tr.stats.rejected,
                "tol": sc.tol,
            },
        },
        system_hash=h,
    )
    export.write_echo(d / "resolved.yaml", echo, h)
    click.echo(f"F = {tr.budget.extracted:.6f} (closed form {closed:.6f}); wrote {d}")


@main.command()
@scenario_options
@_guarded
def sweep(preset, config, out, tol, workers, kappa_convention):
    """Closed-form efficiency landscape over pump power and overcoupling."""
    sc = _scenario(preset, config, out, tol, workers, kappa_convention)
    base = build_system(sc)
    model = pump_model(sc, base)
    C = base.derived.C_in
    P, D, contours = sweep_axes(sc)
    grid = sweep_landscape(model, C, P, D, workers=sc.workers)
    h, echo = sc.system_hash, sc.echo()
    echo["pump_model"] = {"phi_per_mW": model.phi_per_mW, "reference_delta": model.reference_delta, "tag": model.calibration_tag}
    d = _outdir(sc, "nlcavity-sweep")
    export.write_csv(d / "sweep.csv", ["P_b_mW", "delta", "phi", "F"], grid.rows(), kind="sweep", system_hash=h, resolved=echo)
    export.write_csv(d / "ridge.csv", ["delta", "P_b_star_mW", "F_max"], grid.ridge_rows(), kind="ridge", system_hash=h, resolved=echo)
    if contours.size:
        cg = sweep_landscape(model, C, P, contours, workers=sc.workers)
        export.write_csv(d / "contours.csv", ["P_b_mW", "delta", "phi", "F"], cg.rows(), kind="contours", system_hash=h, resolved=echo)
        export.write_contour_plot(d / "contours.gp", "contours.csv", contours)
    export.write_sweep_plot(d / "sweep.gp", "sweep.csv", "ridge.csv")
    export.write_echo(d / "resolved.yaml", echo, h)
    click.echo(f"{grid.F.size} grid points, max F = {float(grid.F.max()):.6f}; wrote {d}")


def _target(sc: Scenario, p, target_path):
    s = sc.shape
    F = float(efficiency_closed_form(p.derived.C_in, p.derived.phi, p.kappa_ratio))
    if target_path:
        _, cols, rows = export.read_csv(target_path)
        if cols[:3] != ["u", "re_psi", "im_psi"]:
            raise ConfigError(f"{target_path}: expected columns u,re_psi,im_psi")
        a = np.asarray(rows)
        return Wavepacket(a[:, 0], a[:, 1] + 1j * a[:, 2])
    if s.get("kind", "gaussian") != "gaussian":
        raise ConfigError(f"shape.kind: unknown target kind {s.get('kind')!r}")
    width = float(s["width_kappa"]) / p.kappa_c
    n = int(s.get("samples", 4001))
    u = np.linspace(0.0, 10.0 * width, n)
    psi = np.exp(-0.5 * ((u - 5.0 * width) / width) ** 2).astype(complex)
    return Wavepacket(u, psi).normalized(float(s["norm_fraction"]) * F)


@main.command("shape-pulse")
@scenario_options
@click.option("--delta", type=float, default=None)
@click.option("--power", default=None)
@click.option("--phi", type=float, default=None)
@click.option("--target", "target_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Target wavepacket CSV (u, re_psi, im_psi).")
@click.option("--method", type=click.Choice(["adiabatic", "exact"]), default=None)
@_guarded
def shape_pulse(preset, config, out, tol, workers, kappa_convention, delta, power, phi, target_path, method):
    """Drive that emits a requested photon shape, checked by forward simulation."""
    from .pulse import emitted_wavepacket, shape_drive

    sc = _scenario(preset, config, out, tol, workers, kappa_convention, {"delta": delta, "power": power, "phi": phi})
    if method:
        sc.shape["method"] = method
    p = operating_params(sc)
    target = _target(sc, p, target_path)
    res = shape_drive(target, p, method=sc.shape.get("method", "adiabatic"))
    em = emitted_wavepacket(p, res.drive, sc.tol)
    err = em.l2_distance(target)
    h, echo = sc.system_hash, sc.echo()
    if target_path:
        echo["shape"]["target_file"] = str(target_path)
    d = _outdir(sc, "nlcavity-shape")
    export.write_csv(
        d / "drive.csv", ["t", "omega_rad_per_s"], zip(res.drive.times, res.drive.omega),
        kind="drive", system_hash=h, resolved=echo,
    )
    export.write_columns(d / "emitted.csv", em.csv_columns(), kind="wavepacket", system_hash=h, resolved=echo)
    export.write_columns(d / "target.csv", target.csv_columns(), kind="wavepacket", system_hash=h, resolved=echo)
    export.write_report(
        d / "shape.txt",
        "pulse shaping report",
        {
            "shaping": {
                "method": sc.shape.get("method", "adiabatic"),
                "target_norm": target.norm,
                "captured_norm": res.captured_norm,
                "system_efficiency": res.system_efficiency,
                "truncated": res.truncated,
                "peak_omega_rad_per_s": float(res.drive.omega.max()),
            },
            "verification": {"emitted_norm": em.norm, "relative_l2_error": err},
        },
        system_hash=h,
    )
    export.write_echo(d / "resolved.yaml", echo, h)
    click.echo(f"relative L2 error {err:.3e}, emitted norm {em.norm:.6f}; wrote {d}")


@main.command()
@scenario_options
@click.option("--delta", type=float, default=None)
@click.option("--power", default=None)
@click.option("--phi", type=float, default=None)
@_guarded
def store(preset, config, out, tol, workers, kappa_convention, delta, power, phi):
    """Generate a photon, then absorb its time reverse (explicit waveguide)."""
    from .dynamics import BathConfig
    from .pulse import storage_reciprocity

    sc = _scenario(preset, config, out, tol, workers, kappa_convention, {"delta": delta, "power": power, "phi": phi})
    p = operating_params(sc)
    s = sc.store
    drive = adiabatic_gaussian(p, float(s["rate_fraction"]), float(s["depletion"]), n=2001)
    T = drive.t_end
    bw = float(s["bandwidth_kappa"]) * p.kappa_c
    n = max(200, int(math.ceil(1.5 * T * bw / (2 * math.pi))))
    bath = BathConfig.from_kappa(p.kappa_c_ex, n, bw)
    tol_b = max(sc.tol, 1e-10)
    r = storage_reciprocity(p, drive, bath, tol=tol_b, n_samples=2001)
    h, echo = sc.system_hash, sc.echo()
    d = _outdir(sc, "nlcavity-store")
    export.write_columns(d / "generated.csv", r.generated.csv_columns(), kind="wavepacket", system_hash=h, resolved=echo)
    rel = abs(r.storage_probability - r.generation_efficiency) / r.generation_efficiency
    export.write_report(
        d / "storage.txt",
        "storage report",
        {
            "bath": {"modes": n, "bandwidth_rad_per_s": bw, "horizon_s": T, "recurrence_s": bath.recurrence_time},
            "result": {
                "generation_efficiency": r.generation_efficiency,
                "storage_probability": r.storage_probability,
                "relative_difference": rel,
            },
        },
        system_hash=h,
    )
    export.write_echo(d / "resolved.yaml", echo, h)
    click.echo(f"generation {r.generation_efficiency:.6f}, storage {r.storage_probability:.6f}; wrote {d}")


@main.command()
@click.option("--field-a", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--field-c", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--material", type=click.Choice(["GaAs", "GaP"]), default="GaAs")
@click.option("--pump-power", default="1 mW", show_default=True)
@click.option("--focal-radius", default=None, help="Pump spot radius with unit; default from the preset or '2.85 um'.")
@click.option("--pump-wavelength", default=None)
@click.option("--components", default=None, help="Restrict to a component pair, e.g. 'y,z'.")
@click.option("--preset", default=None, help="Preset whose linewidths convert g2 into phi.")
@click.option("--delta", type=float, default=10.0, show_default=True)
@click.option("--out", "out", type=click.Path(file_okay=False), default="nlcavity-overlap")
@_guarded
def overlap(field_a, field_c, material, pump_power, focal_radius, pump_wavelength, components, preset, delta, out):
    """Per-photon normalize two mode fields and evaluate g2 for a uniform pump."""
    from .fieldio import read_field
    from .overlap import MATERIALS, PumpField, g2_uniform_pump, normalize_per_photon
    from .units import parse_quantity

    fa, fc = read_field(field_a), read_field(field_c)
    notes = {}
    for name, f in (("field_a", fa), ("field_c", fc)):
        notes[name] = "already per-photon; normalization skipped" if f.per_photon else "normalized to one photon"
    fa = fa if fa.per_photon else normalize_per_photon(fa)
    fc = fc if fc.per_photon else normalize_per_photon(fc)
    sysd = get_preset(preset) if preset else None
    pump_d = (sysd or {}).get("pump", {})
    r = parse_quantity(focal_radius or pump_d.get("focal_radius", "2.85 um"), "length", "focal-radius")
    lam = parse_quantity(pump_wavelength or pump_d.get("wavelength", "2.85 um"), "length", "pump-wavelength")
    P = parse_quantity(pump_power, "power", "pump-power")
    comp = tuple(c.strip() for c in components.split(",")) if components else None
    if comp is not None and (len(comp) != 2 or any(c not in "xyz" for c in comp)):
        raise ConfigError(f"--components: expected two of x,y,z, got {components!r}")
    res = g2_uniform_pump(fa, fc, PumpField(P, r, lam), MATERIALS[material], comp)
    sections = {
        "inputs": {"field_a": str(field_a), "field_c": str(field_c), "material": material,
                   "pump_power_W": P, "focal_radius_m": r, "components": components or "all"},
        "normalization": notes,
        "overlap": res.as_dict(),
    }
    h = system_hash(sysd) if sysd else system_hash({"field_a": str(field_a), "field_c": str(field_c)})
    if sysd:
        sc = load_scenario(None, preset=preset)
        p = build_system(sc, delta=delta).with_g2(abs(res.g2))
        sections["branching"] = {"delta": delta, "kappa_a": p.kappa_a, "kappa_c": p.kappa_c, "phi": p.derived.phi}
    d = Path(out)
    export.write_report(d / "overlap.txt", "overlap report", sections, system_hash=h)
    click.echo(f"|g2| = {abs(res.g2):.6e} rad/s, overlap coefficient {res.overlap_coefficient:.6f}; wrote {d}")


@main.group()
def presets():
    """Inspect shipped presets."""


@presets.command("list")
def presets_list():
    for name in preset_names():
        p = get_preset(name)
        click.echo(f"{name}\t{system_hash(p)}\t{p['label']}")


@presets.command("show")
@click.argument("name")
@_guarded
def presets_show(name):
    p = get_preset(name)
    click.echo(json.dumps(p, indent=2, sort_keys=True))


if __name__ == "__main__":  # pragma: no cover
    main()
