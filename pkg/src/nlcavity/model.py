"""Parameter records and derived rates for the emitter / two-mode cavity system.

All rates and frequencies are angular (rad/s). Cavity linewidths follow
``kappa = omega / (2 Q)`` by default; pass ``convention="energy"`` for the
more common ``omega / Q``. The two differ by exactly a factor of two, which
matters when comparing linewidths quoted elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Optional

from scipy import constants as _sc

KappaConvention = Literal["paper", "energy"]
KAPPA_CONVENTIONS = ("paper", "energy")


@dataclass(frozen=True)
class PhysicalConstants:
    vacuum_permittivity: float = _sc.epsilon_0
    reduced_planck: float = _sc.hbar
    light_speed: float = _sc.c


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class CavityMode:
    label: str
    wavelength: float
    quality_factor: float
    normalized_mode_volume: float
    refractive_index: float = 1.0
    polarization: str = "TE"
    angular_frequency: float = field(init=False)

    def __post_init__(self):
        if self.label not in ("a", "c"):
            raise ValueError(f"mode label must be 'a' or 'c', got {self.label!r}")
        if self.polarization not in ("TE", "TM"):
            raise ValueError(f"polarization must be TE or TM, got {self.polarization!r}")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if not self.quality_factor > 0:
            raise ValueError("Q must be positive")
        if not self.normalized_mode_volume > 0:
            raise ValueError("V_n must be positive")
        if not self.refractive_index >= 1:
            raise ValueError("refractive index must be >= 1")
        omega = 2.0 * math.pi * CONSTANTS.light_speed / self.wavelength
        object.__setattr__(self, "angular_frequency", omega)


@dataclass(frozen=True)
class EmitterParams:
    g1: float
    gamma: float
    gamma_ratio: float = 1.0
    dipole_moment: Optional[float] = None

    def __post_init__(self):
        if not self.g1 >= 0:
            raise ValueError("g1 must be >= 0")
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if not self.gamma_ratio > 0:
            raise ValueError("gamma_ratio must be > 0")


@dataclass(frozen=True)
class DerivedQuantities:
    C_in: float
    phi: float
    gamma_total: float
    delta: float


@dataclass(frozen=True)
class SystemParams:
    """Rates of the emitter, the two cavity modes and the pump coupling.

    ``mode_a``/``mode_c`` may be omitted for purely rate-based studies; the
    pump frequency is then undefined.
    """

    emitter: EmitterParams
    kappa_a: float
    kappa_c_in: float
    kappa_c_ex: float
    g2: float
    mode_a: Optional[CavityMode] = None
    mode_c: Optional[CavityMode] = None
    pump_frequency: Optional[float] = None

    def __post_init__(self):
        if not self.kappa_a > 0:
            raise ValueError("kappa_a must be > 0")
        if not self.kappa_c_in > 0:
            raise ValueError("kappa_c_in must be > 0")
        if not self.kappa_c_ex >= 0:
            raise ValueError("kappa_c_ex must be >= 0")
        if not math.isfinite(self.g2):
            raise ValueError("g2 must be finite")
        if self.mode_a is not None and self.mode_c is not None:
            expected = self.mode_a.angular_frequency - self.mode_c.angular_frequency
            if self.pump_frequency is None:
                object.__setattr__(self, "pump_frequency", expected)
            elif abs(self.pump_frequency - expected) > 1e-9 * abs(expected):
                raise ValueError(
                    f"pump frequency {self.pump_frequency:.6e} rad/s differs from "
                    f"omega_a - omega_c = {expected:.6e} rad/s"
                )

    @classmethod
    def from_modes(
        cls,
        emitter: EmitterParams,
        mode_a: CavityMode,
        mode_c: CavityMode,
        *,
        delta: float = 0.0,
        g2: float = 0.0,
        convention: KappaConvention = "paper",
    ) -> "SystemParams":
        """Build from cavity modes, deriving linewidths from Q.

        ``delta`` is the overcoupling ratio kappa_c_ex / kappa_c_in.
        """
        if delta < 0:
            raise ValueError("delta must be >= 0")
        kc_in = kappa_from_Q(mode_c, convention)
        return cls(
            emitter=emitter,
            kappa_a=kappa_from_Q(mode_a, convention),
            kappa_c_in=kc_in,
            kappa_c_ex=delta * kc_in,
            g2=g2,
            mode_a=mode_a,
            mode_c=mode_c,
        )

    @classmethod
    def from_rates(
        cls, *, g1, gamma, kappa_a, kappa_c_in, kappa_c_ex, g2, gamma_ratio=1.0
    ) -> "SystemParams":
        return cls(
            emitter=EmitterParams(g1=g1, gamma=gamma, gamma_ratio=gamma_ratio),
            kappa_a=kappa_a,
            kappa_c_in=kappa_c_in,
            kappa_c_ex=kappa_c_ex,
            g2=g2,
        )

    @property
    def kappa_c(self) -> float:
        return self.kappa_c_in + self.kappa_c_ex

    @property
    def g1(self) -> float:
        return self.emitter.g1

    @property
    def gamma(self) -> float:
        return self.emitter.gamma

    @property
    def delta(self) -> float:
        return self.kappa_c_ex / self.kappa_c_in

    @property
    def kappa_ratio(self) -> float:
        """Fraction of mode-c leakage that goes into the waveguide."""
        return self.kappa_c_ex / self.kappa_c

    @property
    def derived(self) -> DerivedQuantities:
        return DerivedQuantities(
            C_in=cooperativity_exact(self.g1, self.gamma, self.kappa_a),
            phi=branching_phi(self),
            gamma_total=gamma_total(self),
            delta=self.delta,
        )

    def with_g2(self, g2: float) -> "SystemParams":
        return replace(self, g2=g2)

    def with_phi(self, phi: float) -> "SystemParams":
        """Copy with g2 set so that 4 g2^2 / (kappa_a kappa_c) equals ``phi``."""
        if phi < 0:
            raise ValueError("phi must be >= 0")
        return replace(self, g2=math.sqrt(phi * self.kappa_a * self.kappa_c / 4.0))

    def with_delta(self, delta: float) -> "SystemParams":
        return replace(self, kappa_c_ex=delta * self.kappa_c_in)


def kappa_from_Q(mode: CavityMode, convention: KappaConvention = "paper") -> float:
    if convention == "paper":
        return mode.angular_frequency / (2.0 * mode.quality_factor)
    if convention == "energy":
        return mode.angular_frequency / mode.quality_factor
    raise ValueError(f"unknown kappa convention {convention!r}")


def cooperativity_exact(g1: float, gamma: float, kappa_a: float) -> float:
    if not gamma > 0 or not kappa_a > 0:
        raise ValueError("gamma and kappa_a must be strictly positive")
    return 4.0 * g1 * g1 / (gamma * kappa_a)


def cooperativity_geometric(mode: CavityMode, gamma_ratio: float) -> float:
    """Peak cooperativity estimate from Q and the normalized mode volume.

    ``C ~ (3 Q / 2 pi^2) / V_n * (gamma_0 / gamma)`` with V_n in units of
    (lambda/n)^3. Assumes the dipole sits at the field maximum, so this is
    an upper estimate rather than an exact value.
    """
    if not gamma_ratio > 0:
        raise ValueError("gamma_ratio must be > 0")
    return 3.0 * mode.quality_factor / (2.0 * math.pi**2) / mode.normalized_mode_volume / gamma_ratio


def g1_for_cooperativity(C_in: float, gamma: float, kappa_a: float) -> float:
    return math.sqrt(C_in * gamma * kappa_a / 4.0)


def branching_phi(params: SystemParams) -> float:
    return 4.0 * params.g2**2 / (params.kappa_a * params.kappa_c)


def gamma_total(params: SystemParams) -> float:
    """Cavity-enhanced decay rate of the excited state."""
    ka_eff = params.kappa_a + 4.0 * params.g2**2 / params.kappa_c
    return params.gamma + 4.0 * params.g1**2 / ka_eff
