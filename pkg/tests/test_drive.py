import numpy as np
import pytest

from conftest import rates_system
from nlcavity import kernels
from nlcavity.drive import DrivePulse, adiabatic_gaussian
from nlcavity.errors import DriveUnderResolved
from nlcavity.model import gamma_total


def test_validation():
    with pytest.raises(ValueError):
        DrivePulse(np.array([0.0, 1.0]), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        DrivePulse(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        DrivePulse(np.array([0.0]), np.array([1.0]))


def test_interpolant_vanishes_outside_support():
    d = DrivePulse.gaussian(2.0, 5.0, 1.0, 10.0, n=201)
    assert d(5.0) == pytest.approx(2.0)
    assert d(-1.0) == 0.0 and d(11.0) == 0.0


def test_kernel_pchip_matches_scipy():
    d = DrivePulse.gaussian(2.0, 5.0, 1.0, 10.0, n=51)
    x, c = d.ppoly()
    t = np.linspace(-0.5, 10.5, 777)
    got = np.array([kernels.pchip_eval(v, x, c) for v in t])
    assert np.allclose(got, d(t), rtol=0, atol=1e-14)


def test_time_reversal():
    d = DrivePulse.gaussian(2.0, 3.0, 1.0, 10.0, n=201)
    r = d.time_reversed(10.0)
    t = np.linspace(0, 10, 50)
    assert np.allclose(r(t), d(10.0 - t), atol=1e-12)


def test_resolution_check():
    DrivePulse.gaussian(1.0, 5.0, 1.0, 10.0, n=401).check_resolution()
    with pytest.raises(DriveUnderResolved):
        DrivePulse.gaussian(1.0, 5.0, 0.1, 10.0, n=41).check_resolution()


def test_adiabatic_gaussian_depletion():
    p = rates_system(phi="opt")
    d = adiabatic_gaussian(p, 0.1, 20.0)
    rate = 4 * d.omega**2 / gamma_total(p)
    assert rate.max() == pytest.approx(0.1 * p.kappa_c, rel=1e-12)
    assert np.trapezoid(rate, d.times) == pytest.approx(20.0, rel=1e-6)
