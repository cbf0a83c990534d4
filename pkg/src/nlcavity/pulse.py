"""Drive shaping for a target photon, and time-reversed photon storage."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import make_interp_spline

from .adiabatic import efficiency_closed_form
from .drive import DrivePulse
from .dynamics import (
    BathConfig,
    BathTrajectory,
    Wavepacket,
    bath_amplitudes_from_wavepacket,
    default_bath,
    extract_wavepacket,
    integrate,
    integrate_bath_resolved,
)
from .errors import AdiabaticityViolation, BandwidthViolation, SingularTailWarning, UnachievableNorm
from .model import SystemParams, gamma_total

CS2_FLOOR = 1e-6
ADIABATIC_GUARD = 0.5


class TargetWavepacket(Wavepacket):
    """Desired outgoing photon; its norm is the requested emission probability."""


def system_efficiency(params: SystemParams) -> float:
    """Closed-form emission probability at the system's present g2."""
    d = params.derived
    return efficiency_closed_form(d.C_in, d.phi, params.kappa_ratio)


def emission_gain(params: SystemParams) -> float:
    """K in ``|psi|^2 = K Omega^2 |c_s|^2`` under adiabatic following."""
    gt = gamma_total(params)
    amp = 8.0 * params.g1 * params.g2 / (gt * (params.kappa_a * params.kappa_c + 4.0 * params.g2**2))
    return params.kappa_c_ex * amp * amp


@dataclass(frozen=True)
class ShapedDrive:
    drive: DrivePulse
    captured_norm: float
    population: np.ndarray  # |c_s|^2 implied by the inversion
    truncated: bool
    system_efficiency: float


def shape_drive(
    target: Wavepacket,
    params: SystemParams,
    *,
    method: str = "adiabatic",
    guard: float = ADIABATIC_GUARD,
    floor: float = CS2_FLOOR,
) -> ShapedDrive:
    """Control field that makes the system emit ``target``.

    ``method="adiabatic"`` uses ``|psi|^2 = K Omega^2 c_s^2`` and
    ``c_s^2(u) = 1 - (1/F) int_0^u |psi|^2``, where F is the closed-form
    emission probability. It lags the target by roughly ``2/kappa_c``, so the
    relative shape error scales like ``1.3 / (kappa_c * duration)``.

    ``method="exact"`` instead runs the amplitude equations backwards from
    c_c = psi / (i sqrt(kappa_c_ex)), recovering c_a, c_e and Omega*c_s from
    derivatives of the target (quintic spline) and |c_s|^2 from population
    bookkeeping. It has no adiabatic lag but needs a target smooth to third
    order.

    Only ``|psi|`` is used: a real drive cannot imprint a phase. Where
    ``c_s^2`` drops below ``floor`` the drive is switched off and the
    shortfall is reported through ``captured_norm``.

    Raises
    ------
    UnachievableNorm
        Target norm above F.
    BandwidthViolation
        RMS spectral width of the target not below kappa_c.
    AdiabaticityViolation
        Implied depletion rate ``4 Omega^2 / gamma_total`` above ``guard * kappa_c``.
    """
    F = system_efficiency(params)
    u = target.u
    inten = np.abs(target.psi) ** 2
    if target.norm == 0:
        return ShapedDrive(DrivePulse(u, np.zeros_like(u)), 0.0, np.ones_like(u), False, F)
    if target.norm > F * (1 + 1e-9):
        raise UnachievableNorm(f"target norm {target.norm:.6g} exceeds the system efficiency {F:.6g}")
    bw = target.rms_bandwidth()
    if bw >= params.kappa_c:
        raise BandwidthViolation(
            f"target bandwidth {bw:.4g} rad/s is not below kappa_c = {params.kappa_c:.4g} rad/s"
        )
    cum = cumulative_trapezoid(inten, u, initial=0.0)
    if method == "adiabatic":
        cs2 = 1.0 - cum / F
        omega_cs = np.sqrt(inten / emission_gain(params))
    elif method == "exact":
        omega_cs, cs2 = _invert_exact(u, np.abs(target.psi), params)
    else:
        raise ValueError(f"unknown shaping method {method!r}")
    bad = np.nonzero(cs2 < floor)[0]
    truncated = bad.size > 0
    valid = np.ones(u.size, dtype=bool)
    if truncated:
        valid[bad[0]:] = False
        warnings.warn(
            f"population of |s> reaches {floor:g} at u={u[bad[0]]:.4g} s; drive truncated there",
            SingularTailWarning,
            stacklevel=2,
        )
    omega = np.zeros_like(u)
    omega[valid] = omega_cs[valid] / np.sqrt(cs2[valid])
    captured = float(cum[bad[0] - 1]) if truncated and bad[0] > 0 else (0.0 if truncated else float(cum[-1]))
    rate = 4.0 * omega**2 / gamma_total(params)
    worst = float(np.max(rate))
    if worst > guard * params.kappa_c:
        raise AdiabaticityViolation(
            f"implied depletion rate {worst:.4g} rad/s exceeds {guard} * kappa_c = "
            f"{guard * params.kappa_c:.4g} rad/s"
        )
    return ShapedDrive(DrivePulse(u, omega), captured, np.clip(cs2, 0.0, None), truncated, F)


def _invert_exact(u, mag, params: SystemParams):
    """Omega*c_s and |c_s|^2 that reproduce the photon magnitude ``mag`` exactly."""
    g1, g2 = params.g1, params.g2
    if g1 == 0 or g2 == 0 or params.kappa_c_ex == 0:
        raise UnachievableNorm("system cannot emit into the waveguide (g1, g2 or kappa_c_ex is zero)")
    # physical phase of adiabatic emission: psi = -|psi| for a positive drive
    spl = make_interp_spline(u, -mag / (1j * math.sqrt(params.kappa_c_ex)), k=5)
    cc, dcc, d2cc, d3cc = (spl(u, nu=n) for n in range(4))
    ka, kc, gam = params.kappa_a, params.kappa_c, params.gamma
    ca = 1j / g2 * (dcc + 0.5 * kc * cc)
    dca = 1j / g2 * (d2cc + 0.5 * kc * dcc)
    d2ca = 1j / g2 * (d3cc + 0.5 * kc * d2cc)
    ce = 1j / g1 * (dca + 1j * g2 * cc + 0.5 * ka * ca)
    dce = 1j / g1 * (d2ca + 1j * g2 * dcc + 0.5 * ka * dca)
    omega_cs = (1j * (dce + 1j * g1 * ca + 0.5 * gam * ce)).real
    lost = cumulative_trapezoid(
        gam * np.abs(ce) ** 2 + ka * np.abs(ca) ** 2 + kc * np.abs(cc) ** 2, u, initial=0.0
    )
    cs2 = 1.0 - lost - np.abs(ce) ** 2 - np.abs(ca) ** 2 - np.abs(cc) ** 2
    return np.clip(omega_cs, 0.0, None), cs2


def emitted_wavepacket(params: SystemParams, drive: DrivePulse, tol: float = 1e-10) -> Wavepacket:
    """Forward-simulate ``drive`` and return the waveguide photon on the drive grid."""
    tr = integrate(params, drive, drive.t_end, tol, n_samples=drive.times.size, check_residual=False)
    return extract_wavepacket(tr, params)


@dataclass(frozen=True)
class StorageResult:
    probability: float
    trajectory: BathTrajectory


def simulate_storage(
    incoming: Wavepacket,
    drive: DrivePulse,
    params: SystemParams,
    bath: Optional[BathConfig] = None,
    horizon: Optional[float] = None,
    tol: float = 1e-8,
    check_decay: bool = True,
) -> StorageResult:
    """Absorb an incoming photon into |s>.

    The emitter starts in |g> with both cavity modes empty and the photon in
    the waveguide, arriving at the cavity with amplitude ``incoming.psi(u)``
    at time u. The explicit waveguide model is used so that reflection and
    transmission past the cavity are accounted for exactly.
    """
    if abs(incoming.norm - 1.0) > 1e-3:
        raise ValueError(f"incoming wavepacket must be normalized to 1 (norm {incoming.norm:.6g})")
    if horizon is None:
        horizon = max(drive.t_end, float(incoming.u[-1]))
    if bath is None:
        bath = default_bath(params, horizon)
        need = 20.0 * incoming.rms_bandwidth()
        if bath.bandwidth < need:
            n = int(math.ceil(bath.n_modes * need / bath.bandwidth))
            bath = BathConfig.from_kappa(params.kappa_c_ex, n, need)
    b0 = bath_amplitudes_from_wavepacket(incoming, bath)
    tr = integrate_bath_resolved(
        params, drive, bath, horizon, tol, initial_bath=b0, check_decay=check_decay
    )
    return StorageResult(float(abs(tr.amplitudes[-1, 0]) ** 2), tr)


@dataclass(frozen=True)
class ReciprocityResult:
    generation_efficiency: float
    storage_probability: float
    generated: Wavepacket


def storage_reciprocity(
    params: SystemParams,
    drive: DrivePulse,
    bath: Optional[BathConfig] = None,
    tol: float = 1e-8,
    n_samples: int = 4001,
) -> ReciprocityResult:
    """Generate a photon, then store its time reverse with the reversed drive."""
    T = drive.t_end
    if bath is None:
        bath = default_bath(params, T)
    gen = integrate_bath_resolved(params, drive, bath, T, tol, n_samples=n_samples)
    wp = gen.wavepacket()
    F = gen.budget.extracted
    incoming = wp.time_reversed(T).normalized()
    st = simulate_storage(incoming, drive.time_reversed(T), params, bath, T, tol, check_decay=False)
    return ReciprocityResult(F, st.probability, wp)
