"""Closed-form conversion efficiency and the pump-power landscape."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AmbiguousBranchWarning, ApproximationOutOfRange, Unachievable


def efficiency_closed_form(C_in, phi, kappa_ratio):
    """Probability that the photon is converted and leaves through the waveguide.

    ``F = C/(1+phi+C) * phi/(1+phi) * kappa_ratio``: emission into mode a,
    transfer a -> c, then out-coupling. Works elementwise on arrays.
    """
    C_in = np.asarray(C_in, dtype=float)
    phi = np.asarray(phi, dtype=float)
    kappa_ratio = np.asarray(kappa_ratio, dtype=float)
    if np.any(C_in < 0) or np.any(phi < 0):
        raise ValueError("C_in and phi must be non-negative")
    if np.any(kappa_ratio < 0) or np.any(kappa_ratio > 1):
        raise ValueError("kappa_ratio must lie in [0, 1]")
    out = C_in / (1.0 + phi + C_in) * phi / (1.0 + phi) * kappa_ratio
    return out if out.ndim else float(out)


def optimal_phi(C_in: float) -> float:
    if C_in < 0:
        raise ValueError("C_in must be non-negative")
    return math.sqrt(1.0 + C_in)


def efficiency_at_optimum(C_in: float, kappa_ratio: float = 1.0) -> float:
    """Exact maximum over phi, which simplifies to (phi* - 1)/(phi* + 1)."""
    p = optimal_phi(C_in)
    return (p - 1.0) / (p + 1.0) * kappa_ratio


def efficiency_max(C_in: float, kappa_ratio: float = 1.0) -> float:
    """Large-cooperativity approximation ``(1 - 2/sqrt(C)) * kappa_ratio``.

    Underestimates the exact optimum by about ``2/C``.
    """
    if C_in < 4:
        raise ApproximationOutOfRange(f"approximation needs C_in >= 4, got {C_in}")
    return (1.0 - 2.0 / math.sqrt(C_in)) * kappa_ratio


def kappa_ratio_from_delta(delta):
    delta = np.asarray(delta, dtype=float)
    out = delta / (1.0 + delta)
    return out if out.ndim else float(out)


def phi_for_efficiency(F: float, C_in: float, kappa_ratio: float, branch: str = "lower") -> float:
    """Invert the closed form for phi.

    ``F (1+phi)(1+C+phi) = C phi r`` is quadratic in phi; ``branch`` picks the
    root below (``"lower"``) or above (``"upper"``) the optimum.
    """
    if not F > 0:
        raise Unachievable("F must be positive to fix phi")
    top = efficiency_at_optimum(C_in, kappa_ratio)
    if F > top:
        raise Unachievable(f"F={F} exceeds the maximum {top:.6g} reachable at this kappa ratio")
    a = F
    b = F * (2.0 + C_in) - C_in * kappa_ratio
    c = F * (1.0 + C_in)
    disc = max(b * b - 4 * a * c, 0.0)
    sq = math.sqrt(disc)
    # numerically stable pair of roots, product c/a
    q = -0.5 * (b - sq) if b < 0 else -0.5 * (b + sq)
    r1, r2 = q / a, c / q
    lo, hi = min(r1, r2), max(r1, r2)
    return lo if branch == "lower" else hi


@dataclass(frozen=True)
class PumpModel:
    """Linear map from pump power to the branching parameter.

    ``phi(P, delta) = phi_per_mW * P_mW * (1 + reference_delta) / (1 + delta)``
    """

    phi_per_mW: float
    reference_delta: float
    calibration_tag: str = "analytic"

    def __post_init__(self):
        if not self.phi_per_mW > 0:
            raise ValueError("phi_per_mW must be positive")
        if self.reference_delta < 0:
            raise ValueError("reference delta must be >= 0")
        if self.calibration_tag not in ("analytic", "calibrated"):
            raise ValueError("calibration_tag must be 'analytic' or 'calibrated'")

    def phi(self, P_mW, delta):
        P_mW = np.asarray(P_mW, dtype=float)
        delta = np.asarray(delta, dtype=float)
        out = self.phi_per_mW * P_mW * (1.0 + self.reference_delta) / (1.0 + delta)
        return out if out.ndim else float(out)

    def power_for_phi(self, phi, delta):
        phi = np.asarray(phi, dtype=float)
        delta = np.asarray(delta, dtype=float)
        out = phi * (1.0 + delta) / (self.phi_per_mW * (1.0 + self.reference_delta))
        return out if out.ndim else float(out)

    @classmethod
    def analytic(cls, g2_per_sqrt_mW: float, kappa_a: float, kappa_c_in: float, reference_delta: float = 0.0):
        """From a computed overlap: g2 = g2_per_sqrt_mW * sqrt(P_mW)."""
        kc = kappa_c_in * (1.0 + reference_delta)
        return cls(4.0 * g2_per_sqrt_mW**2 / (kappa_a * kc), reference_delta, "analytic")


def calibrate_pump_model(P_mW: float, delta: float, F: float, C_in: float) -> PumpModel:
    """Fix the power-to-phi slope from one measured (or quoted) operating point.

    The anchor is placed on the rising, below-optimum branch.
    """
    if not P_mW > 0:
        raise ValueError("anchor power must be positive")
    r = kappa_ratio_from_delta(delta)
    if not F > 0:
        raise Unachievable("an anchor with F = 0 carries no calibration")
    top = efficiency_at_optimum(C_in, r)
    if F > top:
        raise Unachievable(f"anchor F={F} exceeds the maximum {top:.6g} for delta={delta}")
    if F > 0.99 * top:
        warnings.warn(
            f"anchor F={F} is within 1% of the maximum {top:.6g}; branch choice is ill-conditioned",
            AmbiguousBranchWarning,
            stacklevel=2,
        )
    phi = phi_for_efficiency(F, C_in, r, "lower")
    return PumpModel(phi / P_mW, float(delta), "calibrated")


@dataclass(frozen=True)
class SweepGrid:
    powers_mW: np.ndarray
    deltas: np.ndarray
    phi: np.ndarray  # (n_delta, n_power)
    F: np.ndarray  # (n_delta, n_power)
    ridge_power_mW: np.ndarray
    ridge_F: np.ndarray

    def rows(self):
        """``(P_b_mW, delta, phi, F)`` in delta-major, power-minor order."""
        for i, d in enumerate(self.deltas):
            for j, P in enumerate(self.powers_mW):
                yield float(P), float(d), float(self.phi[i, j]), float(self.F[i, j])

    def ridge_rows(self):
        for d, P, F in zip(self.deltas, self.ridge_power_mW, self.ridge_F):
            yield float(d), float(P), float(F)


def _row(model: PumpModel, C_in: float, powers: np.ndarray, delta: float):
    phi = model.phi(powers, delta)
    return phi, efficiency_closed_form(C_in, phi, kappa_ratio_from_delta(delta))


def sweep_landscape(
    model: PumpModel,
    C_in: float,
    powers_mW: Sequence[float],
    deltas: Sequence[float],
    workers: int = 1,
) -> SweepGrid:
    """Efficiency over a (pump power, overcoupling) grid plus the optimum ridge.

    Rows are evaluated independently (optionally on ``workers`` threads) and
    assembled by index, so the result does not depend on ``workers``.
    """
    P = np.asarray(powers_mW, dtype=float)
    D = np.asarray(deltas, dtype=float)
    if P.ndim != 1 or D.ndim != 1 or P.size == 0 or D.size == 0:
        raise ValueError("power and delta axes must be non-empty 1-D sequences")
    if np.any(P < 0) or np.any(D < 0):
        raise ValueError("powers and deltas must be non-negative")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda d: _row(model, C_in, P, d), D))
    else:
        results = [_row(model, C_in, P, d) for d in D]
    phi = np.vstack([r[0] for r in results])
    F = np.vstack([r[1] for r in results])
    phi_star = optimal_phi(C_in)
    ridge_P = model.power_for_phi(phi_star, D)
    ridge_F = efficiency_at_optimum(C_in, 1.0) * kappa_ratio_from_delta(D)
    return SweepGrid(P, D, phi, F, np.atleast_1d(ridge_P), np.atleast_1d(ridge_F))
