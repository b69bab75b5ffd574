import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jv

from rsbcool import cavity_field as cf
from rsbcool.errors import FitError, InvalidParameterError, MissingParameterError
from rsbcool.params import MechanicalMode, OpticalMode


def _setup(kappa=1.0, ratio=22.97, coupling=1.0, radius=24e-6):
    return OpticalMode.from_linewidth(1.94e15, kappa, coupling, radius=radius), MechanicalMode(ratio * kappa)


@given(st.floats(0.0, 20.0))
def test_truncation_discards_negligible_weight(beta):
    orders, j = cf.bessel_orders(beta)
    assert 1.0 - np.sum(j**2) < 1e-12


@given(st.floats(0.0, 1e-10), st.floats(0.0, 20.0))
def test_index_and_amplitude_are_inverse(x0_scale, beta):
    opt, mech = _setup()
    assert cf.modulation_index(cf.amplitude_from_beta(beta, opt, mech), opt, mech) == pytest.approx(beta, rel=1e-12)


def test_amplitude_calibration_triple():
    mech = MechanicalMode(2 * math.pi * 40.6e6)
    omega0 = 1.94e15
    per_beta = 5.4e-12 / 0.94
    opt = OpticalMode.from_linewidth(omega0, 1e7, radius=per_beta * omega0 / mech.omega_m)
    assert cf.calibration_constant(opt, mech) == pytest.approx(per_beta, rel=1e-12)
    x = [cf.OscillationState.from_beta(b, opt, mech).x0 for b in (0.94, 1.47, 1.75)]
    np.testing.assert_allclose(x, [5.4e-12, 8.4e-12, 10.0e-12], rtol=0.01)
    assert cf.amplitude_from_beta(2.0, opt, mech) == pytest.approx(2 * cf.amplitude_from_beta(1.0, opt, mech))
    assert cf.modulation_index(0.0, opt, mech) == 0.0


def test_oscillation_state_validation():
    opt, mech = _setup()
    with pytest.raises(InvalidParameterError):
        cf.OscillationState.from_beta(-1.0, opt, mech)
    no_radius = OpticalMode.from_linewidth(1e15, 1.0)
    with pytest.raises(MissingParameterError):
        cf.modulation_index(1e-12, no_radius, mech)


def test_linewidth_displacement():
    opt = OpticalMode.from_linewidth(2 * math.pi * 3e8 / 970e-9, 2 * math.pi * 3.2e6, radius=24.16e-6)
    # sub-picometre for a 24 um radius
    assert cf.linewidth_displacement(opt) == pytest.approx(0.25e-12, rel=0.05)


def test_field_without_modulation_is_single_lorentzian():
    opt, mech = _setup(coupling=0.7)
    t = np.linspace(0.0, 3.0, 7)
    a = cf.intracavity_field(t, 0.0, 0.4, opt, mech.omega_m, drive=2.0)
    expected = 2.0 / math.sqrt(opt.tau_ex) / (0.5 * opt.kappa + 0.4j)
    np.testing.assert_allclose(a, expected, rtol=1e-14)
    lab = cf.intracavity_field(t, 0.0, 0.4, opt, mech.omega_m, drive=2.0, rotating=False)
    np.testing.assert_allclose(lab, expected * np.exp(1j * (opt.omega0 + 0.4) * t), rtol=1e-6)


@given(st.floats(0.0, 5.0), st.floats(-3.0, 1.0), st.floats(0.0, 1.0))
@settings(max_examples=40)
def test_field_energy_is_periodic(beta, d, t0):
    opt, mech = _setup()
    period = 2 * math.pi / mech.omega_m
    t = t0 * period + np.array([0.0, period])
    p = np.abs(cf.intracavity_field(t, beta, d * mech.omega_m, opt, mech.omega_m)) ** 2
    assert p[1] == pytest.approx(p[0], rel=1e-10)


def test_field_solves_mode_equation():
    # central difference of the series against the right-hand side of the mode equation
    opt, mech = _setup()
    beta, d = 1.47, -mech.omega_m
    t = np.linspace(0.1, 0.4, 5)
    h = 1e-6
    a = cf.intracavity_field(t, beta, d, opt, mech.omega_m)
    da = (cf.intracavity_field(t + h, beta, d, opt, mech.omega_m) - cf.intracavity_field(t - h, beta, d, opt, mech.omega_m)) / (2 * h)
    rhs = (-0.5 * opt.kappa - 1j * (d + beta * mech.omega_m * np.sin(mech.omega_m * t))) * a + 1 / math.sqrt(opt.tau_ex)
    np.testing.assert_allclose(da, rhs, rtol=1e-6, atol=1e-8)


def test_dc_transmission_matches_time_average_of_series():
    opt, mech = _setup(coupling=0.6)
    n = 4096
    t = np.arange(n) * 2 * math.pi / mech.omega_m / n
    for beta, d in [(0.5, -mech.omega_m), (1.47, -0.3 * mech.omega_m), (2.0, 0.0)]:
        s_out = cf.transmitted_field(t, beta, d, opt, mech.omega_m)
        avg = np.mean(np.abs(s_out) ** 2)
        assert cf.dc_transmission(d, beta, opt.coupling, opt.kappa, mech.omega_m) == pytest.approx(avg, rel=1e-12)


def test_critical_dip_is_empty():
    assert cf.dc_transmission(0.0, 0.0, 1.0, 1.0, 23.0) == pytest.approx(0.0, abs=1e-15)


@given(st.floats(-5.0, 5.0), st.floats(0.05, 20.0))
def test_unmodulated_dip_is_lorentzian(d, coupling):
    value = cf.dc_transmission(d, 0.0, coupling, 1.0, 23.0)
    assert value == pytest.approx(1 - coupling / (1 + coupling) ** 2 / (0.25 + d * d), rel=1e-13, abs=1e-15)


@given(st.floats(0.0, 4.0), st.floats(-3.0, 3.0), st.floats(0.05, 1.0))
def test_transmission_bounded(beta, d, coupling):
    value = cf.dc_transmission(d * 23.0, beta, coupling, 1.0, 23.0)
    assert -1e-12 <= value <= 1.0 + 1e-9


def test_bessel_dip_depths():
    beta = 1.47
    depths = [1 - cf.dc_transmission(-n * 22.97, beta, 1.0, 1.0, 22.97) for n in range(3)]
    # well separated dips: depth ~ J_n^2 up to sub-percent neighbour overlap
    j2 = jv(np.arange(3), beta) ** 2
    np.testing.assert_allclose(depths, j2, rtol=0.01)
    np.testing.assert_allclose(j2, [0.2793, 0.3064, 0.0505], atol=5e-5)


@given(st.floats(0.0, 20.0))
def test_dip_weight_conserved(beta):
    orders, j = cf.bessel_orders(beta)
    assert np.sum(j**2) == pytest.approx(1.0, abs=1e-12)


def test_scan_minima():
    omega_m = 22.97
    d = np.linspace(-3 * omega_m, 3 * omega_m, 60001)
    step = d[1] - d[0]
    scan = cf.transmission_scan(d, 0.0, 1.0, 1.0, omega_m)
    assert len(scan.local_minima()) == 1
    scan = cf.transmission_scan(d, 1.75, 1.0, 1.0, omega_m)
    minima = scan.local_minima()
    assert len(minima) >= 5
    assert np.all(jv(np.arange(-2, 3), 1.75) ** 2 > 0.02)
    for n in range(-2, 3):
        assert np.min(np.abs(minima + n * omega_m)) < 0.01 + step
    with pytest.raises(InvalidParameterError):
        cf.TransmissionScan(np.array([1.0, 0.0]), np.array([1.0, 1.0]))


def test_fit_noiseless_beta():
    orders = np.arange(-2, 3)
    fit = cf.fit_modulation_index(zip(orders, jv(orders, 1.75) ** 2))
    assert fit.beta == pytest.approx(1.75, rel=1e-6)
    assert fit.residual_rms < 1e-9
    assert all(abs(b - 1.75) > 0.1 for b in fit.alternatives)


def test_fit_gain_independent():
    orders = np.arange(0, 3)
    fit = cf.fit_modulation_index(zip(orders, 123.0 * jv(orders, 0.94) ** 2))
    assert fit.beta == pytest.approx(0.94, rel=1e-6)


def test_fit_with_noise():
    rng = np.random.default_rng(7)
    orders = np.arange(-2, 3)
    errors = []
    for _ in range(50):
        w = jv(orders, 0.94) ** 2 * (1 + 0.01 * rng.standard_normal(orders.size))
        errors.append(cf.fit_modulation_index(zip(orders, w)).beta / 0.94 - 1)
    assert np.max(np.abs(errors)) < 0.03


def test_fit_pure_carrier_has_no_interior_minimum():
    with pytest.raises(FitError):
        cf.fit_modulation_index([(0, 1.0), (1, 0.0)], beta_max=3.0)
    # beyond the first zero of J_1 the same data are matched exactly again
    assert cf.fit_modulation_index([(0, 1.0), (1, 0.0)]).beta == pytest.approx(3.8317, abs=1e-4)
    with pytest.raises(ValueError):
        cf.fit_modulation_index([(0, 1.0)])
