"""Shipped device presets.

Presets are plain nested dicts in the same schema accepted for inline
systems in scenario files, with unit-suffixed strings for every dimensioned
value. They are versioned and never mutated; :func:`get_preset` hands out
deep copies.
"""

from __future__ import annotations

import copy
import hashlib
import json

PRESET_SCHEMA_VERSION = 1

GAAS_950_1425 = {
    "label": "GaAs nanobeam, InAs/GaAs quantum dot 950 nm -> telecom 1425 nm",
    "version": 1,
    "material": "GaAs",
    "emitter": {
        # gamma_0 taken as 1/(1 ns), a typical InAs/GaAs dot; gamma = ratio * gamma_0
        "gamma": "2.0e8 rad/s",
        "gamma_ratio": 0.20,
        # g1 fixed so that 4 g1^2 / (gamma kappa_a) = 3.7e4 with kappa_a = omega_a / 2Q_a
        "cooperativity": 3.7e4,
    },
    "mode_a": {"wavelength": "950 nm", "Q": 7.3e4, "V_n": 1.45, "n": 3.54, "polarization": "TM", "gamma_ratio": 0.20},
    "mode_c": {"wavelength": "1425 nm", "Q": 1.2e7, "V_n": 0.77, "n": 3.38, "polarization": "TE", "gamma_ratio": 0.10},
    "pump": {
        "wavelength": "2.85 um",
        "focal_radius": "2.85 um",
        "anchor": {"power": "3 mW", "delta": 10.0, "F": 0.7},
    },
    "geometry": {
        "width": "420 nm",
        "depth": "307.5 nm",
        "mirror_period": "360 nm",
        "center_period": "337 nm",
        "hole_semi_axes": ["84 nm", "108 nm"],
        "taper_periods": 4,
    },
}

GAP_637_950 = {
    "label": "GaP nanobeam, diamond NV 637 nm -> 950 nm (scaled design)",
    "version": 1,
    "material": "GaP",
    "emitter": {
        # gamma_0 taken as 1/(12 ns), the NV excited-state lifetime
        "gamma": "1.6667e7 rad/s",
        "gamma_ratio": 0.20,
        "cooperativity": 3.7e4,
    },
    "mode_a": {"wavelength": "637 nm", "Q": 7.3e4, "V_n": 1.45, "n": 3.31, "polarization": "TM", "gamma_ratio": 0.20},
    "mode_c": {"wavelength": "950 nm", "Q": 1.2e7, "V_n": 0.77, "n": 3.13, "polarization": "TE", "gamma_ratio": 0.10},
    "pump": {
        "wavelength": "1.933 um",
        "focal_radius": "1.933 um",
        "anchor": {"power": "4 mW", "delta": 10.0, "F": 0.7},
    },
    "geometry": {},
}

PRESETS = {"gaas": GAAS_950_1425, "gap": GAP_637_950}


def preset_names():
    return sorted(PRESETS)


def get_preset(name: str) -> dict:
    key = name.lower()
    if key not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return copy.deepcopy(PRESETS[key])


def system_hash(system: dict) -> str:
    """Short content hash of a system description (canonical JSON)."""
    blob = json.dumps(system, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
