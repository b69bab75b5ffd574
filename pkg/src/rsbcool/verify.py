"""Acceptance checks: target values, exact identities and oracle agreement.

Each check returns a :class:`Check`; :func:`run_all` runs them in order.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from . import cavity_field, cooling, noise, oracle, quantum, readout, spectra
from .constants import CODATA
from .errors import RegimeWarning
from .params import Environment, MechanicalMode, OpticalMode, angular, coupled_fraction
from .presets import load_sample


@dataclass(frozen=True)
class Check:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title}: {self.detail}"


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_noise_floor() -> Check:
    s = load_sample("sample2")
    n = noise.n_min_noise(s.require_env(), s.mech, 1.6e-11, s.optical, omega_laser=angular(300e12), rounded_constants=True)
    return Check(1, "phase-noise occupancy floor", _rel(n, 5200) <= 0.05, f"n_min = {n:.1f} (target 5200 +/- 5%)")


def check_shot_noise() -> Check:
    x = float(readout.shot_noise_sensitivity(0.0, 4.0e4, 0.5, 1e-6, 1064e-9 / 1.4, 1.0, 1.4))
    return Check(2, "shot-noise sensitivity", _rel(x, 5e-19) <= 0.10, f"x_min(0) = {x:.3e} m/rtHz (target 5e-19 +/- 10%)")


def check_beta_calibration() -> Check:
    betas = (0.94, 1.47, 1.75)
    targets = (5.4e-12, 8.4e-12, 10.0e-12)
    per_beta = targets[0] / betas[0]
    mech = MechanicalMode(angular(40.6e6))
    omega0 = 2.0 * math.pi * CODATA.c / 970e-9
    # resonator radius consistent with the calibration constant
    optical = OpticalMode.from_linewidth(omega0, angular(5.8e6), 1.0, radius=per_beta * omega0 / mech.omega_m)
    amplitudes, ok = [], True
    for beta, target in zip(betas, targets):
        orders = np.arange(-2, 3)
        fit = cavity_field.fit_modulation_index(zip(orders, cavity_field.jv(orders, beta) ** 2))
        x0 = cavity_field.OscillationState.from_beta(fit.beta, optical, mech).x0
        amplitudes.append(x0)
        ok &= _rel(x0, target) <= 0.01
    detail = ", ".join(f"{x * 1e12:.3f}" for x in amplitudes) + " pm (targets 5.4, 8.4, 10.0 pm +/- 1%)"
    return Check(3, "beta to amplitude calibration", bool(ok), detail)


def check_detailed_balance(draws: int = 1000, seed: int = 4) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        kappa = 10.0 ** rng.uniform(5, 9)
        omega_m = kappa * 10.0 ** rng.uniform(-1, 3)
        opt = OpticalMode.from_linewidth(1e15, kappa)
        mech = MechanicalMode(omega_m)
        n = quantum.n_min_detailed_balance(quantum.sideband_weights(opt, mech, -omega_m))
        worst = max(worst, _rel(n, kappa**2 / (16.0 * omega_m**2)))
    s = load_sample("sample2")

    def excess(d):
        return quantum.sideband_weights(s.optical, s.mech, d).ratio - 40.0

    d40 = optimize.brentq(excess, -s.mech.omega_m, 0.0, xtol=1e-6)
    w40 = quantum.sideband_weights(s.optical, s.mech, d40)
    n40 = quantum.n_min_detailed_balance(w40)
    ok = worst <= 1e-12 and abs(n40 - 1.0 / 39.0) < 1e-9 and n40 < 0.03
    detail = (
        f"max rel. error {worst:.1e} over {draws} draws; 40-fold ({quantum.suppression_db(w40):.2f} dB) "
        f"suppression gives n_min = {n40:.5f}"
    )
    return Check(4, "detailed-balance identity", bool(ok), detail)


def check_coupled_power() -> Check:
    s = load_sample("sample1")
    frac = coupled_fraction(s.optical.kappa, s.mech.omega_m)
    p = 3e-3 * frac
    ok = _rel(frac, 5e-4) <= 0.10 and _rel(p, 1.5e-6) <= 0.10
    return Check(5, "coupled-power fraction", bool(ok), f"fraction {frac:.3e}, 3 mW -> {p * 1e6:.3f} uW")


def check_oracle() -> Check:
    kappa = 1.0
    omega_m = 22.97 * kappa
    betas = np.linspace(0.0, 2.0, 5)[:, None]
    dets = np.linspace(-2.0 * omega_m, 0.0, 5)[None, :]
    worst_rel = worst_abs = 0.0
    for k, coupling in enumerate((0.5, 1.0)):
        opt = OpticalMode.from_linewidth(1e3, kappa, coupling)
        numeric = oracle.dc_transmission_numeric(opt, omega_m, dets, betas)
        exact = cavity_field.dc_transmission(dets, betas, coupling, kappa, omega_m)
        if k == 0:
            worst_rel = float(np.max(np.abs(numeric - exact) / np.abs(exact)))
        else:
            # critical coupling reaches zero transmission; compare against the incident power
            worst_abs = float(np.max(np.abs(numeric - exact)))
    # free ring-down from the empty cavity at beta = 0
    opt = OpticalMode.from_linewidth(1e3, kappa, 1.0)
    traj = oracle.integrate(opt, omega_m, 0.3 * kappa, 0.0, 10.0 / kappa)
    a_ss = (1.0 / math.sqrt(opt.tau_ex)) / (0.5 * kappa + 0.3j * kappa)
    env = np.abs(traj.amplitude - a_ss)
    slope = -np.polyfit(traj.time, np.log(env), 1)[0]
    decay_err = _rel(slope, 0.5 * kappa)
    ok = worst_rel <= 1e-6 and worst_abs <= 1e-6 and decay_err <= 0.01
    detail = (
        f"5x5 grid max rel. error {worst_rel:.1e} (K=0.5), max abs. error {worst_abs:.1e} (K=1); "
        f"decay rate {slope:.5f} vs kappa/2 = {0.5 * kappa}"
    )
    return Check(6, "oracle equivalence", bool(ok), detail)


def check_cooling_asymptote() -> Check:
    ratios = np.geomspace(1.0, 1e3, 61)
    omega_m = 1.0
    values = cooling.normalized_rate(-omega_m, omega_m / ratios, omega_m)
    monotone = bool(np.all(np.diff(values) > 0))
    tail = float(values[-1])
    worst = 0.0
    mech = MechanicalMode(omega_m)
    for r in (100.0, 300.0, 1000.0):
        kappa = omega_m / r
        d_star = cooling.optimal_detuning(OpticalMode.from_linewidth(1e6, kappa), mech)
        worst = max(worst, abs(d_star + omega_m) / kappa)
    ok = monotone and tail <= 1.0 and 1.0 - tail < 1e-3 and worst < 0.01
    detail = f"monotone={monotone}, ratio at Omega_m/kappa=1e3: {tail:.8f}; max |Delta*+Omega_m|/kappa = {worst:.2e}"
    return Check(7, "cooling-rate asymptote", ok, detail)


def check_cooling_factor() -> Check:
    mech = MechanicalMode(angular(40.6e6), angular(1.3e3), 10e-12)
    opt = OpticalMode.from_linewidth(1e15, angular(3.2e6))
    res = cooling.cooling_factor(angular(1.56e6), mech, opt)
    ok = res.cooling_factor > 1e3 and _rel(res.cooling_factor, 1.2e3) <= 0.01 and res.rate_below_kappa
    return Check(8, "cooling factor", bool(ok), f"n_R/n_f = {res.cooling_factor:.1f}, Gamma_c < kappa: {res.rate_below_kappa}")


def pipeline_run(n_f, mech, gamma_eff, seed, snr_db=20.0, noise=0.05, bins=500, span=10.0):
    """One synthesize -> noise -> fit -> occupancy pass; returns the recovered occupancy."""
    t_eff = spectra.temperature_for_occupancy(n_f, mech.omega_m)
    mode = spectra.ModeSpec(mech, t_eff, gamma_eff)
    peak = spectra.thermal_psd(mech.omega_m, t_eff, mech, gamma_eff)
    level = math.sqrt(peak / 10.0 ** (snr_db / 10.0))
    grid = mech.omega_m + np.linspace(-0.5 * span, 0.5 * span, bins) * gamma_eff
    spec = spectra.synthesize([mode], grid, background=lambda w: np.full_like(np.asarray(w, dtype=float), level))
    spec = spectra.measurement_noise(spec, np.random.default_rng(seed), noise)
    return spectra.occupancy_from_spectrum(spectra.fit_lorentzian(spec), mech)


def check_spectrum_pipeline(runs: int = 100) -> Check:
    s = load_sample("sample2")
    n_r = cooling.thermal_occupancy(s.require_env().temperature, s.mech.omega_m)
    n_f = 5900.0
    gamma_eff = s.mech.require_damping() * n_r / n_f
    recovered = np.array([pipeline_run(n_f, s.mech, gamma_eff, seed) for seed in range(runs)])
    median_err = float(np.median(np.abs(recovered / n_f - 1.0)))
    exact_fit = spectra.LorentzianFit(s.mech.omega_m, gamma_eff, spectra.area_for_occupancy(n_f, s.mech), 0.0, 0.0)
    exact = spectra.occupancy_from_spectrum(exact_fit, s.mech)
    ok = median_err <= 0.03 and _rel(exact, n_f) < 1e-9
    detail = f"median |error| {median_err * 100:.2f}% over {runs} runs at 20 dB; encoded area -> n_f = {exact:.6f}"
    return Check(9, "spectrum pipeline round trip", bool(ok), detail)


def check_readout() -> Check:
    p_cav, p_lo = 1e-6, 1e-3
    scale = 2.0 * math.sqrt(p_cav * p_lo)
    rng = np.random.default_rng(10)
    pmd = readout.random_unitary(rng)
    chain = readout.analyzer_chain(readout.compensating_angles(pmd), pmd)
    worst_h = 0.0
    field = readout.PolarizationField.from_powers(p_cav, p_lo)
    for kappa in (1e6, 1e7, 1e8):
        for coupling in (0.1, 1.0, 10.0):
            opt = OpticalMode.from_linewidth(1e15, kappa, coupling, radius=40e-6)
            d = np.linspace(-5.0 * kappa, 5.0 * kappa, 201)
            h = readout.detect(field, d, opt.tau0, opt.tau_ex, chain).h
            h_cf = readout.error_signal(d, opt.tau0, opt.tau_ex, p_cav, p_lo)
            worst_h = max(worst_h, float(np.max(np.abs(h - h_cf))) / scale)
    worst_cal = 0.0
    for kappa in np.geomspace(1e6, 1e9, 4):
        for coupling in (0.1, 1.0, 10.0):
            opt = OpticalMode.from_linewidth(1.77e15, kappa, coupling, radius=38e-6)
            omega, dphi = 0.7 * kappa, 1e-4
            x0 = readout.calibrate(dphi, omega, opt)
            lhs = x0 * opt.omega0 / opt.require_radius()
            worst_cal = max(worst_cal, _rel(lhs, dphi * omega))
            r_x = readout.displacement_response(x0, omega, opt, p_cav, p_lo)
            r_p = readout.phase_modulation_response(dphi, omega, opt, p_cav, p_lo)
            # the two drives differ by a quarter period in phase; amplitudes must agree
            worst_cal = max(worst_cal, abs(abs(r_x) / abs(r_p) - 1.0))
    ok = worst_h <= 1e-12 and worst_cal <= 1e-12
    detail = f"Jones chain vs closed form {worst_h:.1e} (rel. to 2 sqrt(P_cav P_LO)); calibration paths {worst_cal:.1e}"
    return Check(10, "readout two-path equivalence", bool(ok), detail)


CHECKS: tuple[Callable[[], Check], ...] = (
    check_noise_floor,
    check_shot_noise,
    check_beta_calibration,
    check_detailed_balance,
    check_coupled_power,
    check_oracle,
    check_cooling_asymptote,
    check_cooling_factor,
    check_spectrum_pipeline,
    check_readout,
)


def run_all() -> list[Check]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return [check() for check in CHECKS]
