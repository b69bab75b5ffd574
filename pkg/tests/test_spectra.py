import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsbcool import constants, io, quantum, spectra
from rsbcool.errors import DegenerateWindowError, InvalidParameterError, SubZeroPointError
from rsbcool.params import MechanicalMode, OpticalMode, angular
from rsbcool.presets import load_sample
from rsbcool.verify import pipeline_run

K_B = constants.CODATA.k_B
HBAR = constants.CODATA.hbar


@pytest.fixture
def mech():
    return MechanicalMode(angular(40.6e6), angular(1.3e3), 10e-12)


def test_thermal_peak_value(mech):
    g = angular(10e3)
    peak = spectra.thermal_psd(mech.omega_m, 20.0, mech, g)
    assert peak == pytest.approx(4 * K_B * 20.0 / (mech.m_eff * g * mech.omega_m**2), rel=1e-14)


def test_thermal_area_is_equipartition():
    # adaptive quadrature at high precision, independent of numpy
    omega_m, gamma, m, t = 1.0, 1e-4, 2.0, 3.0
    mech = MechanicalMode(omega_m, gamma, m)
    mpmath.mp.dps = 30
    f = lambda w: float(spectra.thermal_psd(float(w), t, mech, gamma)) / K_B
    pts = [0, 1 - 50 * gamma, 1 - gamma, 1, 1 + gamma, 1 + 50 * gamma, mpmath.inf]
    area = float(mpmath.quad(f, pts)) * K_B / (2 * math.pi)
    assert area == pytest.approx(K_B * t / (m * omega_m**2), rel=1e-3)


def test_halving_temperature_halves_area(mech):
    g = angular(20e3)
    w = mech.omega_m + np.linspace(-20, 20, 2001) * g
    full = spectra.fit_lorentzian(spectra.Spectrum(w, spectra.thermal_psd(w, 30.0, mech, g)))
    half = spectra.fit_lorentzian(spectra.Spectrum(w, spectra.thermal_psd(w, 15.0, mech, g)))
    assert half.area == pytest.approx(full.area / 2, rel=1e-9)
    assert half.width == pytest.approx(full.width, rel=1e-9)
    with pytest.raises(InvalidParameterError):
        spectra.thermal_psd(w, 1.0, mech, 0.0)


def test_three_mode_synthesis():
    s = load_sample("sample2")
    modes = []
    for f in (40.6e6, 52.0e6, 61.0e6):
        m = MechanicalMode(angular(f), angular(1.3e3) * f / 40.6e6, 10e-12)
        modes.append(spectra.ModeSpec(m, 300.0, m.gamma_m))
    grid = angular(np.linspace(35e6, 65e6, 300_001))
    spec = spectra.synthesize(modes, grid, s.readout.sensitivity)
    y = spec.density
    peaks = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])) + 1
    assert len(peaks) == 3
    assert np.all(y[peaks] > 10 * s.readout.sensitivity(spec.omega[peaks]) ** 2)
    assert len(spec.meta["signal_to_background_db"]) == 3


def test_background_only_synthesis():
    s = load_sample("sample2")
    grid = angular(np.linspace(1e6, 100e6, 1001))
    spec = spectra.synthesize([], grid, s.readout.sensitivity)
    np.testing.assert_array_equal(spec.density, s.readout.sensitivity(grid) ** 2)


def test_signal_to_background_at_room_temperature():
    s = load_sample("sample2")
    mode = spectra.ModeSpec(s.mech, 300.0, s.mech.gamma_m)
    assert spectra.signal_to_background_db(mode, s.readout.sensitivity) == pytest.approx(60.0, abs=1.0)


def test_spectrum_validation():
    with pytest.raises(InvalidParameterError):
        spectra.Spectrum(np.array([0.0, 1.0, 3.0]), np.ones(3))
    with pytest.raises(InvalidParameterError):
        spectra.Spectrum(np.array([0.0, 1.0, 2.0]), np.array([1.0, -1.0, 1.0]))
    with pytest.raises(InvalidParameterError):
        spectra.Spectrum(np.array([0.0, 1.0]), np.ones(3))


def test_grid_refinement_changes_no_sample(mech):
    g = angular(5e3)
    coarse = mech.omega_m + np.arange(-100, 101) * g / 4
    fine = mech.omega_m + np.arange(-1000, 1001) * g / 40
    a = spectra.synthesize([spectra.ModeSpec(mech, 10.0, g)], coarse).density
    b = spectra.synthesize([spectra.ModeSpec(mech, 10.0, g)], fine).density[::10]
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_noiseless_fit_recovers_parameters():
    w = np.linspace(0.9e6, 1.1e6, 801)
    spec = spectra.Spectrum(w, spectra.lorentzian(w, 1.003e6, 7e3, 5.0, 1e-6))
    fit = spectra.fit_lorentzian(spec)
    assert fit.center == pytest.approx(1.003e6, rel=1e-6)
    assert fit.width == pytest.approx(7e3, rel=1e-6)
    assert fit.area == pytest.approx(5.0, rel=1e-6)
    assert fit.background == pytest.approx(1e-6, rel=1e-6)


def test_noisy_fit_monte_carlo():
    width, area = 1e3, 2.0
    w = np.linspace(1e6 - 5 * width, 1e6 + 5 * width, 500)
    clean = spectra.Spectrum(w, spectra.lorentzian(w, 1e6, width, area))
    dw, da = [], []
    for seed in range(100):
        fit = spectra.fit_lorentzian(spectra.measurement_noise(clean, np.random.default_rng(seed), 0.05))
        dw.append(abs(fit.width / width - 1))
        da.append(abs(fit.area / area - 1))
    assert np.median(dw) < 0.02
    assert np.median(da) < 0.02


def test_fit_window_and_degenerate_cases():
    w = np.linspace(0.0, 10.0, 101)
    with pytest.raises(DegenerateWindowError):
        spectra.fit_lorentzian(spectra.Spectrum(w, np.full(101, 3.0)))
    spec = spectra.Spectrum(w, spectra.lorentzian(w, 3.0, 0.5, 1.0) + spectra.lorentzian(w, 8.0, 0.5, 1.0))
    fit = spectra.fit_lorentzian(spec, window=(1.0, 5.5))
    assert fit.center == pytest.approx(3.0, rel=1e-3)
    with pytest.raises(DegenerateWindowError):
        spectra.fit_lorentzian(spec, window=(20.0, 30.0))
    with pytest.raises(DegenerateWindowError):
        spectra.fit_lorentzian(spec, window=(3.0, 3.25))


def test_occupancy_examples(mech):
    area = spectra.area_for_occupancy(5900, mech)
    fit = spectra.LorentzianFit(mech.omega_m, 1.0, area, 0.0, 0.0)
    assert spectra.occupancy_from_spectrum(fit, mech) == pytest.approx(5900, rel=1e-12)
    energy = mech.m_eff * mech.omega_m**2 * area / (2 * math.pi)
    assert energy == pytest.approx(HBAR * mech.omega_m * 5900.5, rel=1e-12)
    zero = spectra.LorentzianFit(mech.omega_m, 1.0, spectra.area_for_occupancy(0.0, mech), 0.0, 0.0)
    assert spectra.occupancy_from_spectrum(zero, mech) == pytest.approx(0.0, abs=1e-9)
    doubled = spectra.LorentzianFit(mech.omega_m, 1.0, 2 * area, 0.0, 0.0)
    assert spectra.occupancy_from_spectrum(doubled, mech) + 0.5 == pytest.approx(2 * 5900.5, rel=1e-12)
    below = spectra.LorentzianFit(mech.omega_m, 1.0, 0.5 * spectra.area_for_occupancy(0.0, mech), 0.0, 0.0)
    with pytest.raises(SubZeroPointError):
        spectra.occupancy_from_spectrum(below, mech)


@pytest.mark.parametrize("n_f", [1e3, 1e4, 1e5])
def test_pipeline_round_trip(mech, n_f):
    gamma_eff = mech.omega_m / 1e3
    recovered = [pipeline_run(n_f, mech, gamma_eff, seed) for seed in range(30)]
    assert np.median(np.abs(np.array(recovered) / n_f - 1)) < 0.03


def _sideband_setup():
    optical = OpticalMode.from_linewidth(1.94e15, angular(5.8e6))
    return optical, MechanicalMode(angular(40.6e6), angular(1.3e3), 10e-12)


def test_heterodyne_equal_sidebands_at_line_center():
    optical, mech = _sideband_setup()
    grid = angular(200e6) + np.linspace(-1.5, 1.5, 3001) * mech.omega_m
    het = spectra.heterodyne_spectrum(0.0, 1e6, angular(200e6), optical, mech, angular(50e3), grid)
    # (n+1)/n - 1 = 1/n: the difference sits exactly at the 1e-6 level
    assert abs(het.stokes_power / het.anti_stokes_power - 1) <= 1e-6 * (1 + 1e-9)


def test_heterodyne_forty_fold_suppression():
    optical, mech = _sideband_setup()
    # detuning with A-/A+ = 40 on the red side
    from scipy.optimize import brentq

    d = brentq(lambda x: quantum.sideband_weights(optical, mech, x).ratio - 40.0, -mech.omega_m, 0.0, xtol=1e-3)
    grid = angular(200e6) + np.linspace(-1.5, 1.5, 3001) * mech.omega_m
    het = spectra.heterodyne_spectrum(d, 1e6, angular(200e6), optical, mech, angular(50e3), grid)
    assert het.stokes_suppression_db == pytest.approx(16.0, abs=0.05)


def test_heterodyne_zero_point_asymmetry():
    optical, mech = _sideband_setup()
    grid = angular(200e6) + np.linspace(-1.5, 1.5, 3001) * mech.omega_m
    het = spectra.heterodyne_spectrum(0.0, 0.0, angular(200e6), optical, mech, angular(50e3), grid)
    assert het.anti_stokes_power == 0.0
    assert het.stokes_power > 0
    upper = grid > angular(200e6)
    assert np.all(het.spectrum.density[upper] < het.spectrum.density[~upper].max() * 1e-2)


@pytest.mark.parametrize("n", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("d_fraction", [-1.0, -0.5])
def test_heterodyne_thermometry_consistency(n, d_fraction):
    optical, mech = _sideband_setup()
    d = d_fraction * mech.omega_m
    aom = angular(200e6)
    gamma = angular(300e3)
    grid = aom + np.linspace(-1.5, 1.5, 20001) * mech.omega_m
    het = spectra.heterodyne_spectrum(d, n, aom, optical, mech, gamma, grid)
    w = het.weights
    assert quantum.occupancy_from_sidebands(het.stokes_power, het.anti_stokes_power, w) == pytest.approx(n, rel=1e-9)
    stokes, anti = spectra.sideband_powers_from_spectrum(het.spectrum, aom, mech.omega_m, gamma)
    assert quantum.occupancy_from_sidebands(stokes, anti, w) == pytest.approx(n, rel=1e-6)


def test_heterodyne_high_occupancy_consistency():
    optical, mech = _sideband_setup()
    grid = angular(200e6) + np.linspace(-1.5, 1.5, 3001) * mech.omega_m
    het = spectra.heterodyne_spectrum(0.0, 1e6, angular(200e6), optical, mech, angular(50e3), grid)
    n = quantum.occupancy_from_sidebands(het.stokes_power, het.anti_stokes_power, het.weights)
    assert n == pytest.approx(1e6, rel=1e-6)


def test_spectrum_csv_round_trip(tmp_path, mech):
    grid = mech.omega_m + np.linspace(-1e5, 1e5, 11)
    spec = spectra.synthesize([spectra.ModeSpec(mech, 10.0, angular(1e4))], grid)
    path = tmp_path / "s.csv"
    path.write_text(io.spectrum_csv(spec, {"n_f": 5.0}))
    back = io.read_spectrum(path)
    np.testing.assert_allclose(back.omega, spec.omega, rtol=1e-15)
    np.testing.assert_array_equal(back.density, spec.density)
    assert back.units == "m^2/Hz" and back.sidedness == "one-sided"
