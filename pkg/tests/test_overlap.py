import math

import numpy as np
import pytest
from scipy.special import erf

from nlcavity.errors import GridMismatch, ZeroField
from nlcavity.model import CONSTANTS
from nlcavity.overlap import (
    GAAS,
    ModeField,
    PumpField,
    g2_full,
    g2_uniform_pump,
    gaussian_mode,
    normalize_per_photon,
    pump_field_from_power,
    power_from_pump_field,
    uniform_axes,
    zincblende_tensor,
)

EPS0, HBAR = 8.8541878188e-12, 1.054571817e-34
W = 0.4e-6
PUMP = PumpField(3e-3, 2.85e-6, 2.85e-6)


def two_gaussians(nx, ny=24, nz=24, xa=0.3e-6, xc=-0.2e-6, lx=6 * W):
    ax = uniform_axes((nx, ny, nz), (lx, 12 * W, 12 * W))
    X, Y, Z = np.meshgrid(*ax, indexing="ij")
    Ea = np.zeros((3,) + X.shape, complex)
    Ec = np.zeros_like(Ea)
    Ea[1] = np.exp(-((X - xa) ** 2 + Y**2 + Z**2) / (2 * W * W))
    Ec[2] = np.exp(-((X - xc) ** 2 + Y**2 + Z**2) / (2 * W * W))
    eps = np.ones(X.shape)
    return ModeField(ax, Ea, eps, 2.0e15), ModeField(ax, Ec, eps, 1.3e15)


def closed_form_g2(xa=0.3e-6, xc=-0.2e-6, lx=6 * W):
    # y-polarized a, z-polarized c, x-polarized pump: chi_yxz and chi_yzx both contribute
    m = 0.5 * (xa + xc)
    ix = math.exp(-((xa - xc) ** 2) / (4 * W * W)) * 0.5 * math.sqrt(math.pi) * W * (
        erf((lx / 2 - m) / W) - erf((-lx / 2 - m) / W)
    )
    integral = ix * math.pi * W * W
    return -EPS0 * PUMP.amplitude / HBAR * 2 * GAAS.chi_xyz * integral


def test_constants_are_codata():
    assert CONSTANTS.vacuum_permittivity == pytest.approx(EPS0, rel=1e-10)
    assert CONSTANTS.reduced_planck == pytest.approx(HBAR, rel=1e-9)


def test_zincblende_tensor_entries():
    t = zincblende_tensor(1.0)
    assert t.sum() == 6
    assert t[0, 1, 2] == t[2, 1, 0] == 1 and t[0, 0, 1] == 0 and t[1, 1, 1] == 0


def test_uniform_box_normalization():
    ax = uniform_axes((8, 6, 4), (2e-6, 1e-6, 0.5e-6))
    E = np.zeros((3, 8, 6, 4), complex)
    E[0] = 7.0
    f = normalize_per_photon(ModeField(ax, E, np.full((8, 6, 4), 12.0), 2e15))
    V = 2e-6 * 1e-6 * 0.5e-6
    assert np.abs(f.E[0]) ** 2 == pytest.approx(HBAR * 2e15 / (2 * EPS0 * 12.0 * V), rel=1e-9)
    assert f.per_photon


def test_normalization_idempotent():
    ax = uniform_axes((32, 32, 32), (8 * W, 8 * W, 8 * W))
    f = normalize_per_photon(gaussian_mode(ax, 2e15, W, "y", eps=11.0))
    g = normalize_per_photon(f)
    assert g.scale == pytest.approx(1.0, abs=1e-12)


def test_gaussian_normalization_constant():
    ax = uniform_axes((64, 64, 64), (12 * W, 12 * W, 12 * W))
    f = normalize_per_photon(gaussian_mode(ax, 2e15, W, "x", eps=3.0))
    # int exp(-r^2/w^2) d^3r = (pi w^2)^(3/2)
    A = math.sqrt(HBAR * 2e15 / 2 / (EPS0 * 3.0 * (math.pi * W * W) ** 1.5))
    # unit-amplitude input, so the applied scale is the normalized peak amplitude
    assert f.scale == pytest.approx(A, rel=1e-6)


def test_zero_field_cannot_be_normalized():
    ax = uniform_axes((4, 4, 4), (1e-6, 1e-6, 1e-6))
    with pytest.raises(ZeroField):
        normalize_per_photon(ModeField(ax, np.zeros((3, 4, 4, 4)), np.ones((4, 4, 4)), 1e15))


def test_uniform_pump_matches_closed_form_with_second_order_convergence():
    ref = closed_form_g2()
    errs = []
    for nx in (128, 256, 512, 1024):
        fa, fc = two_gaussians(nx)
        errs.append(abs(g2_uniform_pump(fa, fc, PUMP, GAAS).g2 - ref) / abs(ref))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert errs[-1] < 1e-6
    assert min(orders) >= 1.9


def test_parity_odd_mode_gives_zero():
    ax = uniform_axes((64, 24, 24), (8 * W, 12 * W, 12 * W))
    X, Y, Z = np.meshgrid(*ax, indexing="ij")
    g = np.exp(-(X**2 + Y**2 + Z**2) / (2 * W * W))
    Ea = np.zeros((3,) + X.shape, complex)
    Ec = np.zeros_like(Ea)
    Ea[1] = g
    Ec[2] = (X / W) * g
    eps = np.ones(X.shape)
    fa, fc = ModeField(ax, Ea, eps, 2e15), ModeField(ax, Ec, eps, 1.3e15)
    res = g2_uniform_pump(fa, fc, PUMP, GAAS)
    scale = EPS0 * PUMP.amplitude / HBAR * 2 * GAAS.chi_xyz * np.sum(np.abs(Ea[1] * Ec[2])) * fa.cell_volume
    assert abs(res.g2) < 1e-12 * scale


def test_full_and_uniform_paths_agree():
    fa, fc = two_gaussians(64, 16, 16)
    prof = PUMP.profile(fa.shape)
    full = g2_full(fa, prof, fc, GAAS)
    uni = g2_uniform_pump(fa, fc, PUMP, GAAS).g2
    assert full == pytest.approx(uni, rel=1e-12)


def test_component_mask_keeps_dominant_pair():
    fa, fc = two_gaussians(64, 16, 16)
    a = g2_uniform_pump(fa, fc, PUMP, GAAS).g2
    b = g2_uniform_pump(fa, fc, PUMP, GAAS, components=("y", "z")).g2
    c = g2_uniform_pump(fa, fc, PUMP, GAAS, components=("z", "y")).g2
    assert a == b and c == 0


def test_pump_linearity():
    fa, fc = two_gaussians(32, 12, 12)
    g1 = g2_uniform_pump(fa, fc, PumpField(1e-3, 2.85e-6, 2.85e-6), GAAS).g2
    g4 = g2_uniform_pump(fa, fc, PumpField(4e-3, 2.85e-6, 2.85e-6), GAAS).g2
    assert g4 == pytest.approx(2 * g1, rel=1e-13)
    prof = PUMP.profile(fa.shape)
    assert g2_full(fa, 2 * prof, fc, GAAS) == pytest.approx(2 * g2_full(fa, prof, fc, GAAS), rel=1e-13)
    assert g2_uniform_pump(fa, fc, PumpField(0.0, 2.85e-6, 2.85e-6), GAAS).g2 == 0


def test_sign_alternating_overlap_is_weaker():
    ax = uniform_axes((96, 24, 24), (12 * W, 12 * W, 12 * W))
    X, Y, Z = np.meshgrid(*ax, indexing="ij")
    d = 1.2 * W
    lobe = lambda x0: np.exp(-((X - x0) ** 2 + Y**2 + Z**2) / (2 * W * W))
    Ea = np.zeros((3,) + X.shape, complex)
    Ea[1] = lobe(0.3 * W)
    two = np.zeros_like(Ea)
    two[2] = lobe(d) - lobe(-d)
    rect = np.zeros_like(Ea)
    rect[2] = lobe(d) + lobe(-d)
    eps = np.ones(X.shape)
    fa = ModeField(ax, Ea, eps, 2e15)
    g_two = abs(g2_uniform_pump(fa, ModeField(ax, two, eps, 1.3e15), PUMP, GAAS).g2)
    g_rect = abs(g2_uniform_pump(fa, ModeField(ax, rect, eps, 1.3e15), PUMP, GAAS).g2)
    # overlap of two Gaussians separated by s is proportional to exp(-s^2/(4 w^2))
    o = lambda s: math.exp(-s * s / (4 * W * W))
    expected = (o(d - 0.3 * W) - o(d + 0.3 * W)) / (o(d - 0.3 * W) + o(d + 0.3 * W))
    assert g_two / g_rect == pytest.approx(expected, rel=1e-6)
    # the weaker overlap is recovered by a stronger pump: g2 scales as sqrt(P)
    boost = (g_rect / g_two) ** 2
    fc2 = ModeField(ax, two, eps, 1.3e15)
    strong = PumpField(PUMP.power * boost, PUMP.focal_radius, PUMP.wavelength)
    assert abs(g2_uniform_pump(fa, fc2, strong, GAAS).g2) == pytest.approx(g_rect, rel=1e-10)


def test_pump_field_from_power():
    assert pump_field_from_power(0.0, 2.85e-6) == 0.0
    E = pump_field_from_power(3e-3, 2.85e-6)
    assert E == pytest.approx(4.2e5, rel=0.01)
    assert E == pytest.approx(math.sqrt(4 * 3e-3 / (EPS0 * 299792458.0 * math.pi * 2.85e-6**2)), rel=1e-9)
    assert power_from_pump_field(E, 2.85e-6) == pytest.approx(3e-3, rel=1e-12)
    assert PumpField.from_amplitude(E, 2.85e-6, 2.85e-6).power == pytest.approx(3e-3, rel=1e-12)


def test_grid_mismatch_reports_shapes():
    fa, _ = two_gaussians(32, 12, 12)
    _, fc = two_gaussians(16, 12, 12)
    with pytest.raises(GridMismatch, match=r"\(32, 12, 12\)"):
        g2_uniform_pump(fa, fc, PUMP, GAAS)
    with pytest.raises(GridMismatch):
        ModeField(fa.axes, fa.E[:, :-1], fa.eps, fa.omega)
