"""Sampled control-field Rabi frequency Omega(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DriveUnderResolved
from .model import SystemParams, gamma_total


@dataclass(frozen=True)
class DrivePulse:
    """Real, non-negative Rabi frequency sampled at ``times`` (s).

    Evaluated between samples by monotone cubic (PCHIP) interpolation and
    taken as zero outside the sampled window.
    """

    times: np.ndarray
    omega: np.ndarray
    interpolation: str = "pchip"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        om = np.asarray(self.omega, dtype=float)
        if t.ndim != 1 or t.shape != om.shape:
            raise ValueError("times and omega must be 1-D arrays of equal length")
        if t.size < 2:
            raise ValueError("a drive needs at least two samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("drive sample times must be strictly increasing")
        if not np.all(np.isfinite(om)):
            raise ValueError("drive contains non-finite values")
        if np.any(om < 0):
            raise ValueError("drive Rabi frequency must be non-negative")
        if self.interpolation != "pchip":
            raise ValueError(f"unsupported interpolation {self.interpolation!r}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "omega", om)

    @classmethod
    def zero(cls, t_end: float) -> "DrivePulse":
        return cls(np.array([0.0, t_end]), np.zeros(2))

    @classmethod
    def gaussian(cls, peak: float, center: float, width: float, t_end: float, n: int = 4001):
        """``peak * exp(-(t - center)^2 / (2 width^2))`` on ``[0, t_end]``."""
        t = np.linspace(0.0, t_end, n)
        return cls(t, peak * np.exp(-0.5 * ((t - center) / width) ** 2))

    @classmethod
    def smoothed_square(cls, peak: float, t_on: float, t_off: float, rise: float, t_end: float, n: int = 4001):
        """Flat top between ``t_on`` and ``t_off`` with tanh edges of duration ``rise``."""
        t = np.linspace(0.0, t_end, n)
        om = 0.5 * peak * (np.tanh((t - t_on) / rise) - np.tanh((t - t_off) / rise))
        return cls(t, np.clip(om, 0.0, None))

    def __call__(self, t):
        return self.interpolant()(t)

    def interpolant(self):
        f = PchipInterpolator(self.times, self.omega, extrapolate=False)
        return lambda t: np.nan_to_num(f(t), nan=0.0)

    def ppoly(self, time_scale: float = 1.0, value_scale: float = 1.0):
        """Breakpoints and power-basis coefficients after rescaling.

        ``time_scale`` multiplies times, ``value_scale`` multiplies Omega, so
        dimensionless integration can consume the drive directly.
        """
        f = PchipInterpolator(self.times * time_scale, self.omega * value_scale)
        return np.ascontiguousarray(f.x), np.ascontiguousarray(f.c)

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def time_reversed(self, t_total: float) -> "DrivePulse":
        """Omega(t_total - t)."""
        return DrivePulse(t_total - self.times[::-1], self.omega[::-1].copy())

    def check_resolution(self, max_jump: float = 0.1) -> None:
        """Reject drives whose consecutive samples jump by more than ``max_jump``
        of the peak: the interpolant would not represent a smooth pulse."""
        peak = float(np.max(self.omega))
        if peak == 0.0:
            return
        jump = float(np.max(np.abs(np.diff(self.omega)))) / peak
        if jump > max_jump:
            raise DriveUnderResolved(
                f"drive changes by {jump:.3g} of its peak between samples (limit {max_jump})"
            )


def adiabatic_gaussian(
    params: SystemParams,
    rate_fraction: float = 0.05,
    depletion: float = 25.0,
    n: int = 4001,
) -> DrivePulse:
    """Slow Gaussian drive that empties |s> while staying adiabatic.

    The peak Omega is chosen so the |s> depletion rate 4 Omega^2 / gamma_total
    equals ``rate_fraction * kappa_c``; the width makes the integrated
    depletion equal ``depletion`` (residual population ``exp(-depletion)``).
    """
    gt = gamma_total(params)
    rate = rate_fraction * params.kappa_c
    peak = math.sqrt(rate * gt / 4.0)
    width = depletion / (rate * math.sqrt(math.pi))
    return DrivePulse.gaussian(peak, 4.0 * width, width, 8.0 * width, n=n)
