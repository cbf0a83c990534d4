"""Exact single-excitation dynamics, loss bookkeeping and the outgoing photon.

The four amplitudes (c_s, c_e, c_a, c_c) evolve under the effective
non-Hermitian Hamiltonian. Loss integrals are carried as extra components of
the integrated state so they share the Runge-Kutta stages of the amplitudes;
``residual + sum(losses)`` therefore equals the initial norm to integrator
accuracy.

Integration runs in dimensionless time ``tau = kappa_a * t``; everything
returned is back in seconds and rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from . import kernels
from .drive import DrivePulse
from .errors import BathTooNarrow, NonConvergence, NormMismatch, StepUnderflow
from .model import SystemParams

DEFAULT_TOL = 1e-10
MAX_STEPS = 50_000_000


@dataclass(frozen=True)
class AmplitudeState:
    t: float
    c_s: complex = 1.0 + 0.0j
    c_e: complex = 0.0j
    c_a: complex = 0.0j
    c_c: complex = 0.0j

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c_s, self.c_e, self.c_a, self.c_c], dtype=complex)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.vector) ** 2))


@dataclass(frozen=True)
class LossBudget:
    emitted_free_space: float
    lost_mode_a: float
    lost_mode_c_inherent: float
    extracted: float
    residual_norm: float

    @property
    def total_loss(self) -> float:
        return self.emitted_free_space + self.lost_mode_a + self.lost_mode_c_inherent + self.extracted

    @property
    def total(self) -> float:
        return self.total_loss + self.residual_norm

    @property
    def efficiency(self) -> float:
        """Extracted fraction of everything that has left the system."""
        loss = self.total_loss
        return self.extracted / loss if loss > 0 else 0.0

    def as_dict(self) -> dict:
        return {
            "emitted_free_space": self.emitted_free_space,
            "lost_mode_a": self.lost_mode_a,
            "lost_mode_c_inherent": self.lost_mode_c_inherent,
            "extracted": self.extracted,
            "residual_norm": self.residual_norm,
        }


@dataclass(frozen=True)
class SolverStats:
    accepted: int
    rejected: int
    smallest_step: float
    max_norm_rise: float


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # (n, 4): c_s, c_e, c_a, c_c
    budget: LossBudget
    stats: SolverStats
    initial_norm: float = 1.0

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> AmplitudeState:
        return AmplitudeState(float(self.times[i]), *(complex(v) for v in self.amplitudes[i]))

    @property
    def norm(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def csv_columns(self) -> dict:
        a = self.amplitudes
        return {
            "t": self.times,
            "re_cs": a[:, 0].real,
            "im_cs": a[:, 0].imag,
            "re_ce": a[:, 1].real,
            "im_ce": a[:, 1].imag,
            "re_ca": a[:, 2].real,
            "im_ca": a[:, 2].imag,
            "re_cc": a[:, 3].real,
            "im_cc": a[:, 3].imag,
        }


@dataclass(frozen=True)
class Wavepacket:
    """Outgoing photon amplitude in retarded time ``u = t - z/v`` (per sqrt(s))."""

    u: np.ndarray
    psi: np.ndarray
    norm: float = field(default=float("nan"))

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        psi = np.asarray(self.psi, dtype=complex)
        if u.ndim != 1 or u.shape != psi.shape:
            raise ValueError("u and psi must be 1-D arrays of equal length")
        if u.size > 2 and not np.allclose(np.diff(u), u[1] - u[0], rtol=1e-9, atol=0):
            raise ValueError("wavepacket grid must be uniform")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "norm", float(trapezoid(np.abs(psi) ** 2, u)))

    @property
    def step(self) -> float:
        return float(self.u[1] - self.u[0])

    def normalized(self, to: float = 1.0) -> "Wavepacket":
        if self.norm <= 0:
            raise ValueError("cannot normalize an empty wavepacket")
        return Wavepacket(self.u, self.psi * math.sqrt(to / self.norm))

    def time_reversed(self, t_total: Optional[float] = None) -> "Wavepacket":
        """``conj(psi(t_total - u))`` on the mirrored grid."""
        if t_total is None:
            t_total = float(self.u[0] + self.u[-1])
        return Wavepacket(t_total - self.u[::-1], np.conj(self.psi[::-1]))

    def shifted_carrier(self, detuning: float) -> "Wavepacket":
        """Multiply by ``exp(-i detuning u)``: a carrier offset of ``detuning`` rad/s."""
        return Wavepacket(self.u, self.psi * np.exp(-1j * detuning * self.u))

    def rms_bandwidth(self, pad: int = 8) -> float:
        """Spectral standard deviation (rad/s) of ``|psi(omega)|^2``."""
        n = self.u.size
        spec = np.fft.fft(self.psi, n=pad * n)
        w = 2 * np.pi * np.fft.fftfreq(pad * n, d=self.step)
        p = np.abs(spec) ** 2
        tot = p.sum()
        if tot == 0:
            return 0.0
        mean = np.sum(w * p) / tot
        return float(np.sqrt(np.sum((w - mean) ** 2 * p) / tot))

    def l2_distance(self, other: "Wavepacket", align_phase: bool = True) -> float:
        """Relative L2 distance to ``other`` (same grid), optionally after the
        best global phase rotation of ``self``."""
        if other.u.shape != self.u.shape or not np.allclose(other.u, self.u):
            raise ValueError("wavepackets are on different grids")
        a = self.psi
        b = other.psi
        if align_phase:
            ov = trapezoid(np.conj(a) * b, self.u)
            if abs(ov) > 0:
                a = a * ov / abs(ov)
        num = trapezoid(np.abs(a - b) ** 2, self.u)
        den = trapezoid(np.abs(b) ** 2, self.u)
        return float(math.sqrt(num / den))

    def csv_columns(self) -> dict:
        return {
            "u": self.u,
            "re_psi": self.psi.real,
            "im_psi": self.psi.imag,
            "abs2_psi": np.abs(self.psi) ** 2,
        }


@dataclass(frozen=True)
class BathConfig:
    """Discretized one-directional waveguide continuum.

    ``bandwidth`` is the total angular-frequency span of the ``n_modes``
    modes, centred on the mode-c resonance. The Markovian out-coupling rate
    implied by the coupling is ``2 pi g_w^2 / v``.
    """

    n_modes: int
    bandwidth: float
    coupling: float
    group_velocity: float = 1.0

    def __post_init__(self):
        if self.n_modes < 100:
            raise ValueError("a discretized bath needs at least 100 modes")
        if not self.bandwidth > 0 or not self.group_velocity > 0:
            raise ValueError("bandwidth and group velocity must be positive")
        if self.coupling < 0:
            raise ValueError("coupling must be >= 0")
        if self.coupling > 0 and self.bandwidth < 20.0 * self.kappa_ex:
            raise BathTooNarrow(
                f"bath bandwidth {self.bandwidth:.4g} rad/s is below 20x the implied "
                f"out-coupling rate {self.kappa_ex:.4g} rad/s"
            )

    @classmethod
    def from_kappa(cls, kappa_ex: float, n_modes: int, bandwidth: float, group_velocity: float = 1.0):
        return cls(n_modes, bandwidth, math.sqrt(kappa_ex * group_velocity / (2 * math.pi)), group_velocity)

    @property
    def kappa_ex(self) -> float:
        return 2 * math.pi * self.coupling**2 / self.group_velocity

    @property
    def spacing(self) -> float:
        """Angular-frequency spacing between neighbouring modes."""
        return self.bandwidth / self.n_modes

    @property
    def detunings(self) -> np.ndarray:
        return (np.arange(self.n_modes) - 0.5 * (self.n_modes - 1)) * self.spacing

    @property
    def mode_coupling(self) -> float:
        """Coupling to one discrete mode, ``g_w sqrt(dk)``."""
        return self.coupling * math.sqrt(self.spacing / self.group_velocity)

    @property
    def recurrence_time(self) -> float:
        return 2 * math.pi / self.spacing


@dataclass(frozen=True)
class BathTrajectory:
    times: np.ndarray
    amplitudes: np.ndarray
    bath: np.ndarray  # discrete-mode amplitudes at the final time
    bath_config: BathConfig
    budget: LossBudget
    stats: SolverStats

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def wavepacket(self, u: Optional[np.ndarray] = None) -> Wavepacket:
        """Photon field reconstructed from the final bath amplitudes.

        The mode emitted at retarded time u sits at ``z = v (T - u)`` when the
        run ends at T, so ``psi(u) = sqrt(dw / 2 pi) sum_j b_j exp(i w_j (T - u))``.
        """
        if u is None:
            u = self.times
        dw = self.bath_config.spacing
        w = self.bath_config.detunings
        T = self.horizon
        phase = np.exp(1j * np.outer(T - np.asarray(u), w))
        return Wavepacket(u, math.sqrt(dw / (2 * math.pi)) * (phase @ self.bath))


def _scaled(params: SystemParams, drive: DrivePulse):
    s = params.kappa_a
    dx, dc = drive.ppoly(time_scale=s, value_scale=1.0 / s)
    return s, dx, dc


def _max_rate(params: SystemParams, drive: DrivePulse) -> float:
    return max(
        params.g1,
        abs(params.g2),
        params.gamma,
        params.kappa_a,
        params.kappa_c,
        float(np.max(drive.omega)),
    )


def _raise_on_status(status: int, stats: SolverStats, horizon: float):
    if status == kernels.STATUS_STEP_UNDERFLOW:
        raise StepUnderflow(
            f"required step fell below 1e-15 of the horizon {horizon:.3e} s "
            f"after {stats.accepted} accepted steps"
        )
    if status == kernels.STATUS_MAX_STEPS:
        raise NonConvergence(f"step budget exhausted after {stats.accepted} accepted steps")


def integrate(
    params: SystemParams,
    drive: DrivePulse,
    horizon: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    *,
    initial: Optional[AmplitudeState] = None,
    n_samples: int = 4001,
    check_residual: bool = True,
    max_steps: int = MAX_STEPS,
) -> Trajectory:
    """Integrate the amplitude equations from t = 0 to ``horizon``.

    Parameters
    ----------
    params, drive
        System rates and control field.
    horizon
        End time in seconds (defaults to the end of the drive).
    tol
        Relative tolerance of the adaptive integrator.
    initial
        Starting amplitudes; defaults to the emitter in |s>.
    n_samples
        Number of uniformly spaced output samples.
    check_residual
        Raise :class:`NonConvergence` if more than ``100 * tol`` of the
        initial population is still in the system at the horizon.
    """
    drive.check_resolution()
    if horizon is None:
        horizon = drive.t_end
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if initial is None:
        initial = AmplitudeState(0.0)
    s, dx, dc = _scaled(params, drive)
    p = np.array(
        [params.g1, params.g2, params.gamma, params.kappa_a, params.kappa_c_in, params.kappa_c_ex]
    ) / s
    y0 = np.zeros(8, dtype=np.complex128)
    y0[:4] = initial.vector
    norm0 = initial.norm
    T = horizon * s
    t_eval = np.linspace(0.0, T, n_samples)
    h0 = min(T / 10.0, 0.1 * s / _max_rate(params, drive))
    atol = tol * 1e-2 * math.sqrt(max(norm0, 1e-300))
    Y, yf, status, nacc, nrej, hsmall, rise = kernels.dopri5(
        kernels.RHS_CAVITY, 0.0, T, y0, p, np.zeros(0), dx, dc,
        tol, atol, h0, 1e-15 * T, max_steps, t_eval, 4,
    )
    stats = SolverStats(int(nacc), int(nrej), float(hsmall) / s, float(rise))
    _raise_on_status(int(status), stats, horizon)
    amps = Y[:, :4]
    residual = float(np.sum(np.abs(yf[:4]) ** 2))
    budget = LossBudget(
        emitted_free_space=float(yf[4].real),
        lost_mode_a=float(yf[5].real),
        lost_mode_c_inherent=float(yf[6].real),
        extracted=float(yf[7].real),
        residual_norm=residual,
    )
    if check_residual and residual > 100.0 * tol * norm0:
        raise NonConvergence(
            f"residual norm {residual:.3e} exceeds 100*tol={100 * tol:.1e} at the horizon; "
            "extend the horizon or strengthen the drive"
        )
    return Trajectory(t_eval / s, amps, budget, stats, norm0)


def efficiency_exact(
    params: SystemParams,
    drive: DrivePulse,
    horizon: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    **kwargs,
) -> float:
    """Extraction probability from the exact dynamics (extracted / all losses)."""
    return integrate(params, drive, horizon, tol, **kwargs).budget.efficiency


def extract_wavepacket(traj: Trajectory, params: SystemParams, tol: float = 1e-3) -> Wavepacket:
    """Waveguide photon ``psi(u) = i sqrt(kappa_c_ex) c_c(u)``.

    Its norm is the extracted probability; a quadrature mismatch with the
    loss budget larger than ``tol`` raises :class:`NormMismatch` (usually an
    output grid too coarse for the photon).
    """
    psi = 1j * math.sqrt(params.kappa_c_ex) * traj.amplitudes[:, 3]
    wp = Wavepacket(traj.times, psi)
    if abs(wp.norm - traj.budget.extracted) > tol:
        raise NormMismatch(
            f"wavepacket norm {wp.norm:.6g} differs from extracted probability "
            f"{traj.budget.extracted:.6g} by more than {tol}"
        )
    return wp


def default_bath(params: SystemParams, horizon: float, bandwidth_factor: float = 50.0, margin: float = 1.5):
    """Bath spanning ``bandwidth_factor * kappa_c`` with modes dense enough
    that the recurrence time exceeds ``margin * horizon``."""
    bw = bandwidth_factor * params.kappa_c
    spacing = 2 * math.pi / (margin * horizon)
    n = max(100, int(math.ceil(bw / spacing)))
    return BathConfig.from_kappa(params.kappa_c_ex, n, bw)


def bath_amplitudes_from_wavepacket(wp: Wavepacket, bath: BathConfig) -> np.ndarray:
    """Discrete-mode amplitudes of an incoming photon that reaches the cavity
    with field ``psi(u)`` at time ``u``."""
    w = bath.detunings
    weights = np.full(wp.u.size, wp.step)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    spec = np.exp(1j * np.outer(w, wp.u)) @ (wp.psi * weights) / math.sqrt(2 * math.pi)
    return math.sqrt(bath.spacing) * spec


def measure_bath_decay(params: SystemParams, bath: BathConfig, tol: float = 1e-8) -> float:
    """Decay rate of an isolated mode-c photon coupled to the discretized bath.

    Fits ``ln |c_c|^2`` over 1..4 expected lifetimes.
    """
    expected = params.kappa_c_in + bath.kappa_ex
    T = 4.0 / expected
    probe = SystemParams.from_rates(
        g1=0.0, gamma=params.gamma, kappa_a=params.kappa_a,
        kappa_c_in=params.kappa_c_in, kappa_c_ex=0.0, g2=0.0,
    )
    tr = _run_bath(probe, DrivePulse.zero(T), bath, T, tol, AmplitudeState(0.0, 0, 0, 0, 1.0), None, 401)
    t = tr.times
    pop = np.abs(tr.amplitudes[:, 3]) ** 2
    sel = t >= 1.0 / expected
    return float(-np.polyfit(t[sel], np.log(pop[sel]), 1)[0])


def _run_bath(params, drive, bath, horizon, tol, initial, initial_bath, n_samples, max_steps=MAX_STEPS):
    s, dx, dc = _scaled(params, drive)
    G = bath.mode_coupling
    p = np.array([params.g1, params.g2, params.gamma, params.kappa_a, params.kappa_c_in, G]) / s
    w = bath.detunings / s
    nb = bath.n_modes
    y0 = np.zeros(7 + nb, dtype=np.complex128)
    y0[:4] = initial.vector
    if initial_bath is not None:
        y0[7:] = initial_bath
    norm0 = float(np.sum(np.abs(y0[:4]) ** 2) + np.sum(np.abs(y0[7:]) ** 2))
    T = horizon * s
    t_eval = np.linspace(0.0, T, n_samples)
    rate = max(_max_rate(params, drive), 0.5 * bath.bandwidth)
    h0 = min(T / 10.0, 0.1 * s / rate)
    atol = tol * 1e-2 * math.sqrt(max(norm0, 1e-300))
    Y, yf, status, nacc, nrej, hsmall, rise = kernels.dopri5(
        kernels.RHS_BATH, 0.0, T, y0, p, w, dx, dc,
        tol, atol, h0, 1e-15 * T, max_steps, t_eval, 0,
    )
    stats = SolverStats(int(nacc), int(nrej), float(hsmall) / s, float(rise))
    _raise_on_status(int(status), stats, horizon)
    b = yf[7:].copy()
    budget = LossBudget(
        emitted_free_space=float(yf[4].real),
        lost_mode_a=float(yf[5].real),
        lost_mode_c_inherent=float(yf[6].real),
        extracted=float(np.sum(np.abs(b) ** 2)),
        residual_norm=float(np.sum(np.abs(yf[:4]) ** 2)),
    )
    return BathTrajectory(t_eval / s, Y[:, :4], b, bath, budget, stats)


def integrate_bath_resolved(
    params: SystemParams,
    drive: DrivePulse,
    bath: Optional[BathConfig] = None,
    horizon: Optional[float] = None,
    tol: float = 1e-8,
    *,
    initial: Optional[AmplitudeState] = None,
    initial_bath: Optional[np.ndarray] = None,
    n_samples: int = 2001,
    check_decay: bool = True,
) -> BathTrajectory:
    """Integrate the cavity coupled to an explicit discretized waveguide.

    No Markov approximation is made: the waveguide appears as ``n_modes``
    extra amplitudes. ``params.kappa_c_ex`` is ignored in favour of the bath
    coupling. In the returned budget ``extracted`` is the final photon
    population of the waveguide.

    Raises :class:`BathTooNarrow` if the measured decay of an isolated mode-c
    photon deviates by more than 5% from ``kappa_c_in + 2 pi g_w^2 / v``, or
    if the horizon exceeds the bath recurrence time.
    """
    drive.check_resolution()
    if horizon is None:
        horizon = drive.t_end
    if bath is None:
        bath = default_bath(params, horizon)
    if horizon >= bath.recurrence_time:
        raise BathTooNarrow(
            f"horizon {horizon:.3e} s exceeds the bath recurrence time "
            f"{bath.recurrence_time:.3e} s; use more modes"
        )
    if check_decay:
        expected = params.kappa_c_in + bath.kappa_ex
        measured = measure_bath_decay(params, bath)
        if abs(measured - expected) > 0.05 * expected:
            raise BathTooNarrow(
                f"mode-c decay {measured:.4g} rad/s deviates from the Markovian "
                f"{expected:.4g} rad/s by more than 5%"
            )
    if initial is None:
        initial = AmplitudeState(0.0) if initial_bath is None else AmplitudeState(0.0, 0, 0, 0, 0)
    return _run_bath(params, drive, bath, horizon, tol, initial, initial_bath, n_samples)
