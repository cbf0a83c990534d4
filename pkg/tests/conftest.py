import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from nlcavity.model import SystemParams


def rates_system(g1=5e8, gamma=1e8, kappa_a=1e9, kappa_c_in=2e7, kappa_c_ex=2e8, phi=None, g2=0.0):
    p = SystemParams.from_rates(
        g1=g1, gamma=gamma, kappa_a=kappa_a, kappa_c_in=kappa_c_in, kappa_c_ex=kappa_c_ex, g2=g2
    )
    if phi == "opt":
        phi = math.sqrt(1 + p.derived.C_in)
    return p.with_phi(phi) if phi is not None else p


def reference_solution(params, drive, horizon, n=2001, rtol=1e-11, atol=1e-13):
    """Amplitudes and loss integrals from scipy's DOP853 on the raw (unscaled) equations."""
    g1, g2, gam, ka = params.g1, params.g2, params.gamma, params.kappa_a
    kc, kin, kex = params.kappa_c, params.kappa_c_in, params.kappa_c_ex
    om = drive.interpolant()

    def f(t, y):
        cs, ce, ca, cc = y[0] + 1j * y[1], y[2] + 1j * y[3], y[4] + 1j * y[5], y[6] + 1j * y[7]
        w = float(om(t)) if drive.t_start <= t <= drive.t_end else 0.0
        d = (
            -1j * w * ce,
            -1j * w * cs - 1j * g1 * ca - 0.5 * gam * ce,
            -1j * g1 * ce - 1j * g2 * cc - 0.5 * ka * ca,
            -1j * g2 * ca - 0.5 * kc * cc,
        )
        out = []
        for v in d:
            out += [v.real, v.imag]
        return out + [gam * abs(ce) ** 2, ka * abs(ca) ** 2, kin * abs(cc) ** 2, kex * abs(cc) ** 2]

    t = np.linspace(0.0, horizon, n)
    sol = solve_ivp(f, (0.0, horizon), [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0], method="DOP853",
                    t_eval=t, rtol=rtol, atol=atol)
    y = sol.y
    amps = np.stack([y[0] + 1j * y[1], y[2] + 1j * y[3], y[4] + 1j * y[5], y[6] + 1j * y[7]], axis=1)
    return t, amps, y[8:, -1]


@pytest.fixture
def small_system():
    return rates_system(phi="opt")


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
