"""chi(2) mode overlap: per-photon normalization, g2 integrals, pump field.

Fields are cell-centred on a rectilinear grid and integrated with the
midpoint rule. Field arrays have shape ``(3, nx, ny, nz)`` for the
(x, y, z) components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .errors import GridMismatch, ZeroField
from .model import CONSTANTS

AXES = {"x": 0, "y": 1, "z": 2}


def zincblende_tensor(chi_xyz: float) -> np.ndarray:
    """chi_ijk = chi_xyz for i, j, k all distinct, zero otherwise."""
    t = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        t[i, j, k] = chi_xyz
    return t


@dataclass(frozen=True)
class Chi2Material:
    name: str
    chi_xyz: float  # m/V
    refractive_index: Mapping[float, float] = field(default_factory=dict)  # wavelength (m) -> n
    tensor: Optional[np.ndarray] = None  # full 3x3x3 table; defaults to zincblende

    def __post_init__(self):
        if self.tensor is None:
            if not self.chi_xyz > 0:
                raise ValueError("chi_xyz must be positive")
            object.__setattr__(self, "tensor", zincblende_tensor(self.chi_xyz))
        else:
            t = np.asarray(self.tensor, dtype=float)
            if t.shape != (3, 3, 3):
                raise ValueError("chi2 tensor must have 27 entries (3x3x3)")
            object.__setattr__(self, "tensor", t)

    def index_at(self, wavelength: float, rtol: float = 1e-6) -> float:
        for lam, n in self.refractive_index.items():
            if abs(lam - wavelength) <= rtol * wavelength:
                return n
        raise KeyError(f"no refractive index tabulated for {wavelength:.4e} m in {self.name}")


GAAS = Chi2Material("GaAs", 550e-12, {1425e-9: 3.38, 950e-9: 3.54})
GAP = Chi2Material("GaP", 320e-12, {950e-9: 3.13, 637e-9: 3.31})
MATERIALS = {"GaAs": GAAS, "GaP": GAP}


@dataclass(frozen=True)
class ModeField:
    """Complex vector field on a uniform cell-centred grid.

    ``axes`` holds the cell-centre coordinates along x, y, z (m).
    ``per_photon`` marks fields already scaled so the stored electromagnetic
    energy is hbar*omega/2; ``scale`` is the factor applied by the last
    normalization.
    """

    axes: tuple
    E: np.ndarray
    eps: np.ndarray
    omega: float
    per_photon: bool = False
    scale: float = 1.0

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if len(axes) != 3:
            raise ValueError("need x, y and z axes")
        for name, a in zip("xyz", axes):
            if a.ndim != 1 or a.size < 1:
                raise ValueError(f"axis {name} must be a non-empty 1-D array")
            if a.size > 1:
                d = np.diff(a)
                if np.any(d <= 0) or not np.allclose(d, d[0], rtol=1e-9, atol=0):
                    raise ValueError(f"axis {name} must be uniformly spaced and increasing")
        shape = tuple(a.size for a in axes)
        E = np.asarray(self.E, dtype=complex)
        eps = np.asarray(self.eps, dtype=float)
        if E.shape != (3,) + shape:
            raise GridMismatch(f"field shape {E.shape} does not match grid {(3,) + shape}")
        if eps.shape != shape:
            raise GridMismatch(f"permittivity shape {eps.shape} does not match grid {shape}")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "eps", eps)

    @property
    def shape(self):
        return self.eps.shape

    @property
    def spacing(self):
        return tuple(float(a[1] - a[0]) if a.size > 1 else 1.0 for a in self.axes)

    @property
    def cell_volume(self) -> float:
        dx, dy, dz = self.spacing
        return dx * dy * dz

    def energy(self) -> float:
        """Midpoint-rule value of the integral of eps0 * eps |E|^2."""
        dens = self.eps * np.sum(np.abs(self.E) ** 2, axis=0)
        return CONSTANTS.vacuum_permittivity * kernels.slab_sum(dens.astype(complex), self.cell_volume).real


def _check_congruent(*fields: ModeField):
    ref = fields[0]
    for f in fields[1:]:
        if f.shape != ref.shape or any(
            a.size != b.size or not np.allclose(a, b, rtol=1e-9, atol=1e-15) for a, b in zip(f.axes, ref.axes)
        ):
            raise GridMismatch(f"grids differ: {ref.shape} vs {f.shape}")


def normalize_per_photon(field: ModeField) -> ModeField:
    """Rescale so the stored energy is hbar*omega/2 (one photon)."""
    U = field.energy()
    if not U > 0:
        raise ZeroField("field has zero energy and cannot be normalized")
    s = math.sqrt(CONSTANTS.reduced_planck * field.omega / 2.0 / U)
    return replace(field, E=field.E * s, per_photon=True, scale=s)


def _contract(tensor, Ea, Eb, Ec):
    """sum_ijk chi_ijk conj(E_a,i) (E_b,j E_c,k + E_c,j E_b,k) per cell."""
    return np.einsum("ijk,i...,j...,k...->...", tensor, np.conj(Ea), Eb, Ec) + np.einsum(
        "ijk,i...,j...,k...->...", tensor, np.conj(Ea), Ec, Eb
    )


def g2_full(field_a: ModeField, pump_profile: np.ndarray, field_c: ModeField, material: Chi2Material) -> complex:
    """Nonlinear coupling rate (rad/s) for a spatially resolved pump.

    ``pump_profile`` has shape ``(3, nx, ny, nz)`` in V/m on the grid of the
    two mode fields, which should already be per-photon normalized.
    """
    _check_congruent(field_a, field_c)
    Eb = np.asarray(pump_profile, dtype=complex)
    if Eb.shape != field_a.E.shape:
        raise GridMismatch(f"pump shape {Eb.shape} does not match mode grid {field_a.E.shape}")
    f = _contract(material.tensor, field_a.E, Eb, field_c.E)
    integral = kernels.slab_sum(np.ascontiguousarray(f), field_a.cell_volume)
    return complex(-CONSTANTS.vacuum_permittivity / CONSTANTS.reduced_planck * integral)


def pump_field_from_power(P_b: float, r: float) -> float:
    """Peak pump amplitude E_b (V/m) for power P_b (W) in a spot of radius r (m)."""
    if P_b < 0 or not r > 0:
        raise ValueError("need P_b >= 0 and r > 0")
    c = CONSTANTS
    return math.sqrt(4.0 * P_b / (c.vacuum_permittivity * c.light_speed * math.pi * r * r))


def power_from_pump_field(E_b: float, r: float) -> float:
    if not r > 0:
        raise ValueError("need r > 0")
    c = CONSTANTS
    return c.vacuum_permittivity * c.light_speed * math.pi * r * r * E_b * E_b / 4.0


@dataclass(frozen=True)
class PumpField:
    """Classical x-polarized pump, kept consistent between power and amplitude."""

    power: float
    focal_radius: float
    wavelength: float
    polarization: str = "x"

    def __post_init__(self):
        if self.power < 0 or not self.focal_radius > 0 or not self.wavelength > 0:
            raise ValueError("need power >= 0, focal radius > 0, wavelength > 0")
        if self.polarization not in AXES:
            raise ValueError("polarization must be one of x, y, z")

    @classmethod
    def from_amplitude(cls, E_b: float, focal_radius: float, wavelength: float, polarization: str = "x"):
        return cls(power_from_pump_field(E_b, focal_radius), focal_radius, wavelength, polarization)

    @property
    def amplitude(self) -> float:
        return pump_field_from_power(self.power, self.focal_radius)

    def profile(self, shape) -> np.ndarray:
        Eb = np.zeros((3,) + tuple(shape), dtype=complex)
        Eb[AXES[self.polarization]] = self.amplitude
        return Eb


@dataclass(frozen=True)
class OverlapResult:
    g2: complex  # rad/s
    overlap_coefficient: float
    pump_amplitude: float  # V/m
    g2_per_sqrt_mW: float

    def as_dict(self) -> dict:
        return {
            "overlap_coefficient": self.overlap_coefficient,
            "g2_rad_per_s": abs(self.g2),
            "g2_phase_rad": float(np.angle(self.g2)) if self.g2 != 0 else 0.0,
            "pump_E_V_per_m": self.pump_amplitude,
            "g2_rad_per_s_per_sqrt_mW": self.g2_per_sqrt_mW,
        }


def g2_uniform_pump(
    field_a: ModeField,
    field_c: ModeField,
    pump: PumpField,
    material: Chi2Material,
    components: Optional[Sequence[str]] = None,
) -> OverlapResult:
    """g2 for a pump that is constant over the mode volume.

    With ``components=None`` every field component enters (identical to
    :func:`g2_full` with a uniform profile). ``components=("y", "z")``
    keeps only the mode-a y and mode-c z components, the dominant pair for a
    TM/TE mode pair under an x-polarized pump.

    The overlap coefficient is the dimensionless normalized overlap
    ``|sum chi_hat conj(E_a) E_c| / sqrt(int|E_a|^2 int|E_c|^2)`` with
    ``chi_hat`` the tensor divided by its largest entry.
    """
    _check_congruent(field_a, field_c)
    T = material.tensor
    b = AXES[pump.polarization]
    # pump enters as a unit vector along b; both index orderings kept
    M = T[:, b, :] + T[:, :, b]
    Ea, Ec = field_a.E, field_c.E
    if components is not None:
        ia, ic = AXES[components[0]], AXES[components[1]]
        mask = np.zeros((3, 3))
        mask[ia, ic] = 1.0
        M = M * mask
    f = np.einsum("ik,i...,k...->...", M, np.conj(Ea), Ec)
    dv = field_a.cell_volume
    integral = kernels.slab_sum(np.ascontiguousarray(f), dv)
    E_b = pump.amplitude
    eps0, hbar = CONSTANTS.vacuum_permittivity, CONSTANTS.reduced_planck
    g2 = complex(-eps0 * E_b / hbar * integral)
    chi_max = float(np.max(np.abs(T)))
    na = math.sqrt(np.sum(np.abs(Ea) ** 2) * dv)
    nc = math.sqrt(np.sum(np.abs(Ec) ** 2) * dv)
    coeff = abs(integral) / (chi_max * na * nc) if na > 0 and nc > 0 and chi_max > 0 else 0.0
    per_sqrt_mW = eps0 / hbar * abs(integral) * pump_field_from_power(1e-3, pump.focal_radius)
    return OverlapResult(g2, float(coeff), E_b, float(per_sqrt_mW))


def uniform_axes(n: Sequence[int], lengths: Sequence[float], centers=(0.0, 0.0, 0.0)):
    """Cell-centre coordinates for boxes of the given side lengths.

    Built as ``(i - (n-1)/2) * h`` so the grid is exactly mirror-symmetric.
    """
    out = []
    for ni, L, c in zip(n, lengths, centers):
        h = L / ni
        out.append(c + (np.arange(ni) - 0.5 * (ni - 1)) * h)
    return tuple(out)


def gaussian_mode(axes, omega: float, width: float, component: str, eps: float = 1.0, center=(0.0, 0.0, 0.0), amplitude=1.0):
    """Single-component Gaussian test field ``A exp(-|r - r0|^2 / (2 w^2))``."""
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    r2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2 + (Z - center[2]) ** 2
    E = np.zeros((3,) + X.shape, dtype=complex)
    E[AXES[component]] = amplitude * np.exp(-0.5 * r2 / width**2)
    return ModeField(axes, E, np.full(X.shape, eps), omega)
