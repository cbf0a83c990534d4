import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from scipy.integrate import cumulative_trapezoid

from conftest import rates_system, reference_solution
from nlcavity.adiabatic import efficiency_closed_form, optimal_phi
from nlcavity.config import load_scenario, operating_params
from nlcavity.drive import DrivePulse, adiabatic_gaussian
from nlcavity.dynamics import AmplitudeState, Wavepacket, efficiency_exact, extract_wavepacket, integrate
from nlcavity.errors import DriveUnderResolved, NonConvergence
from nlcavity.model import gamma_total
from nlcavity.pulse import emission_gain


def test_zero_drive_leaves_state_untouched():
    p = rates_system(phi=3.0)
    tr = integrate(p, DrivePulse.zero(1e-7), check_residual=False, n_samples=11)
    # dense output may round the constant c_s by an ulp
    assert np.max(np.abs(tr.amplitudes[:, 0] - 1.0)) < 1e-15
    assert np.all(tr.amplitudes[:, 1:] == 0.0)
    b = tr.budget
    assert b.emitted_free_space == b.lost_mode_a == b.lost_mode_c_inherent == b.extracted == 0.0
    assert b.residual_norm == 1.0
    wp = extract_wavepacket(tr, p)
    assert np.all(wp.psi == 0.0)


def test_uncoupled_emitter_decays_to_free_space():
    p = rates_system(g1=0.0, phi=3.0)
    # pulse area pi/2 for c_s -> c_e, short on the 1/gamma scale
    w = 2e-10
    peak = (math.pi / 2) / (w * math.sqrt(2 * math.pi))
    drive = DrivePulse.gaussian(peak, 6 * w, w, 12 * w, n=2001)
    tr = integrate(p, drive, 40 / p.gamma, check_residual=False)
    b = tr.budget
    assert b.extracted == 0.0 and b.lost_mode_a == 0.0
    assert b.emitted_free_space > 0.99
    assert b.emitted_free_space + b.residual_norm == pytest.approx(1.0, abs=1e-9)


def test_no_conversion_branching_ratio():
    # g2 = 0 with C_in = 100: decays split 1 : C between free space and mode a
    gamma, ka = 1e8, 1e10
    g1 = math.sqrt(100 * gamma * ka / 4)
    p = rates_system(g1=g1, gamma=gamma, kappa_a=ka, g2=0.0)
    drive = adiabatic_gaussian(p, 0.05, 20)
    # rate_fraction refers to kappa_c, here far slower than gamma_total, so the run is adiabatic
    tr = integrate(p, drive, check_residual=False)
    b = tr.budget
    assert b.extracted == 0.0
    decayed = b.emitted_free_space + b.lost_mode_a
    assert b.lost_mode_a / decayed == pytest.approx(100 / 101, rel=1e-4)


def test_matches_independent_integrator(small_system):
    p = small_system
    drive = adiabatic_gaussian(p, 0.3, 8, n=1001)
    T = drive.t_end
    tr = integrate(p, drive, T, 1e-11, n_samples=401, check_residual=False)
    t, amps, losses = reference_solution(p, drive, T, n=401)
    assert np.max(np.abs(tr.amplitudes - amps)) < 1e-7
    b = tr.budget
    got = [b.emitted_free_space, b.lost_mode_a, b.lost_mode_c_inherent, b.extracted]
    assert np.allclose(got, losses, atol=1e-8, rtol=0)


def test_no_extraction_channel_gives_zero():
    p = rates_system(kappa_c_ex=0.0, phi=5.0)
    tr = integrate(p, adiabatic_gaussian(p, 0.05, 20))
    assert tr.budget.extracted == 0.0


def test_gaas_optimum_matches_closed_form():
    sc = load_scenario(preset="gaas")
    sc.operating_point.update({"delta": 10.0, "optimal": True})
    p = operating_params(sc)
    assert p.derived.phi == pytest.approx(192.35, abs=0.01)
    F = efficiency_exact(p, adiabatic_gaussian(p))
    closed = efficiency_closed_form(p.derived.C_in, p.derived.phi, 10 / 11)
    assert closed == pytest.approx(0.900, abs=1e-3)
    assert F == pytest.approx(closed, rel=0.02)


def test_large_overcoupling_approaches_internal_efficiency():
    sc = load_scenario(preset="gaas")
    sc.operating_point.update({"delta": 1000.0, "optimal": True})
    p = operating_params(sc)
    F = efficiency_exact(p, adiabatic_gaussian(p))
    assert F == pytest.approx(0.99, abs=0.005)


def test_wavepacket_follows_adiabatic_formula(small_system):
    p = small_system
    drive = adiabatic_gaussian(p, 0.05, 20)
    tr = integrate(p, drive)
    wp = extract_wavepacket(tr, p)
    om = drive(tr.times)
    cs2 = np.exp(-cumulative_trapezoid(4 * om**2 / gamma_total(p), tr.times, initial=0.0))
    model = Wavepacket(tr.times, math.sqrt(emission_gain(p)) * om * np.sqrt(cs2))
    assert wp.l2_distance(model) < 0.02
    assert wp.norm == pytest.approx(tr.budget.extracted, abs=1e-6)


def test_initial_state_and_norm_scaling(small_system):
    p = small_system
    drive = adiabatic_gaussian(p, 0.3, 12, n=1001)
    half = AmplitudeState(0.0, c_s=math.sqrt(0.5))
    a = integrate(p, drive, check_residual=False)
    b = integrate(p, drive, initial=half, check_residual=False)
    assert b.budget.total == pytest.approx(0.5, abs=1e-9)
    assert b.budget.extracted == pytest.approx(0.5 * a.budget.extracted, rel=1e-6)


def test_residual_check_raises_when_horizon_too_short(small_system):
    drive = adiabatic_gaussian(small_system, 0.3, 12, n=1001)
    with pytest.raises(NonConvergence):
        integrate(small_system, drive, 0.5 * drive.t_end)


def test_under_resolved_drive_rejected(small_system):
    drive = DrivePulse(np.array([0.0, 1e-9, 2e-9]), np.array([0.0, 1e9, 0.0]))
    with pytest.raises(DriveUnderResolved):
        integrate(small_system, drive)


def test_step_budget_reported(small_system):
    drive = adiabatic_gaussian(small_system, 0.3, 12, n=1001)
    with pytest.raises(NonConvergence, match="step budget"):
        integrate(small_system, drive, max_steps=10)


@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    st.floats(7.0, 9.5), st.floats(7.0, 8.5), st.floats(8.5, 10.0),
    st.floats(6.5, 8.0), st.floats(0.0, 2.0), st.floats(-2.0, 2.5), st.floats(0.02, 0.5),
)
def test_conservation_random_systems(lg1, lgam, lka, lkin, ldelta, lphi, frac):
    p = rates_system(
        g1=10**lg1, gamma=10**lgam, kappa_a=10**lka, kappa_c_in=10**lkin,
        kappa_c_ex=10**(lkin + ldelta), phi=10**lphi,
    )
    drive = adiabatic_gaussian(p, frac, 15, n=1001)
    tr = integrate(p, drive, tol=1e-10, check_residual=False)
    assert tr.budget.total == pytest.approx(1.0, abs=1e-8)
    assert tr.stats.max_norm_rise < 1e-9
