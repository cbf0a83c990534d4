import math
import warnings

import numpy as np
import pytest

from conftest import rates_system
from nlcavity.config import load_scenario, operating_params
from nlcavity.drive import DrivePulse, adiabatic_gaussian
from nlcavity.dynamics import BathConfig, Wavepacket, integrate
from nlcavity.errors import AdiabaticityViolation, BandwidthViolation, SingularTailWarning, UnachievableNorm
from nlcavity.pulse import (
    TargetWavepacket,
    emission_gain,
    emitted_wavepacket,
    shape_drive,
    simulate_storage,
    storage_reciprocity,
    system_efficiency,
)


@pytest.fixture(scope="module")
def gaas():
    return operating_params(load_scenario(preset="gaas"))


def gaussian_target(params, width_kappa, norm, n=4001):
    w = width_kappa / params.kappa_c
    u = np.linspace(0.0, 10 * w, n)
    return TargetWavepacket(u, np.exp(-0.5 * ((u - 5 * w) / w) ** 2)).normalized(norm)


def test_emission_gain_identity(gaas):
    from nlcavity.model import gamma_total

    assert emission_gain(gaas) * gamma_total(gaas) / 4 == pytest.approx(system_efficiency(gaas), rel=1e-12)


def test_zero_target_gives_zero_drive(gaas):
    u = np.linspace(0, 1e-7, 101)
    res = shape_drive(Wavepacket(u, np.zeros(101)), gaas)
    assert np.all(res.drive.omega == 0.0)
    assert res.captured_norm == 0.0


def test_short_target_round_trip_exact_inversion(gaas):
    F = system_efficiency(gaas)
    target = gaussian_target(gaas, 10, 0.9 * F)
    res = shape_drive(target, gaas, method="exact")
    em = emitted_wavepacket(gaas, res.drive)
    assert em.l2_distance(target) < 1e-2
    assert em.norm == pytest.approx(target.norm, abs=1e-3)


def test_adiabatic_inversion_error_falls_with_duration(gaas):
    F = system_efficiency(gaas)
    errs = []
    for width in (20, 300):
        target = gaussian_target(gaas, width, 0.9 * F)
        em = emitted_wavepacket(gaas, shape_drive(target, gaas).drive)
        errs.append(em.l2_distance(target))
    # lag error ~ 1.3/(kappa_c * width)
    assert errs[0] > 10 * errs[1]
    assert errs[1] < 1e-2


def test_full_norm_target_truncates_tail(gaas):
    F = system_efficiency(gaas)
    target = gaussian_target(gaas, 200, F)
    with pytest.warns(SingularTailWarning):
        res = shape_drive(target, gaas)
    assert res.truncated
    assert res.captured_norm >= 0.999 * F
    assert res.drive.omega[-1] == 0.0


def test_rejections(gaas):
    F = system_efficiency(gaas)
    with pytest.raises(UnachievableNorm):
        shape_drive(gaussian_target(gaas, 200, 1.01 * F), gaas)
    with pytest.raises(BandwidthViolation):
        shape_drive(gaussian_target(gaas, 0.5, 0.5 * F), gaas)
    # a 1.5/kappa_c photon needs a depletion rate above kappa_c / 2
    with pytest.raises(AdiabaticityViolation):
        shape_drive(gaussian_target(gaas, 1.5, 0.9 * F), gaas)


def test_forward_norm_equals_budget(gaas):
    F = system_efficiency(gaas)
    res = shape_drive(gaussian_target(gaas, 15, 0.8 * F), gaas, method="exact")
    tr = integrate(gaas, res.drive, check_residual=False)
    em = emitted_wavepacket(gaas, res.drive)
    assert em.norm == pytest.approx(tr.budget.extracted, abs=1e-3)


@pytest.fixture(scope="module")
def storage_setup():
    p = rates_system(phi="opt")
    drive = adiabatic_gaussian(p, 0.3, 16, n=2001)
    bath = BathConfig.from_kappa(p.kappa_c_ex, 2000, 50 * p.kappa_c)
    return p, drive, bath


def test_storage_reciprocity(storage_setup):
    p, drive, bath = storage_setup
    r = storage_reciprocity(p, drive, bath)
    assert r.storage_probability == pytest.approx(r.generation_efficiency, rel=0.01)


def test_storage_without_drive_is_negligible(storage_setup):
    p, drive, bath = storage_setup
    r = storage_reciprocity(p, drive, bath)
    T = drive.t_end
    incoming = r.generated.time_reversed(T).normalized()
    st = simulate_storage(incoming, DrivePulse.zero(T), p, bath, T, check_decay=False)
    assert st.probability < 1e-12


def test_detuned_photon_is_not_stored(storage_setup):
    p, drive, bath = storage_setup
    r = storage_reciprocity(p, drive, bath)
    T = drive.t_end
    incoming = r.generated.time_reversed(T).normalized().shifted_carrier(10 * p.kappa_c)
    st = simulate_storage(incoming, drive.time_reversed(T), p, bath, T, check_decay=False)
    assert st.probability < 0.05 * r.generation_efficiency


def test_storage_requires_normalized_input(storage_setup):
    p, drive, bath = storage_setup
    u = np.linspace(0, drive.t_end, 101)
    with pytest.raises(ValueError):
        simulate_storage(Wavepacket(u, np.ones(101)), drive, p, bath)
