"""Displacement-noise and heterodyne sideband spectra: synthesis, Lorentzian fitting, thermometry.

Convention: densities are one-sided per unit ordinary frequency, sampled on
an angular-frequency grid, so that the integral of S(Omega) dOmega/(2 pi)
over positive frequencies is the variance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize

from . import constants
from .errors import DegenerateWindowError, FitError, InvalidParameterError, SubZeroPointError
from .params import MechanicalMode, OpticalMode
from .quantum import SidebandWeights, sideband_powers, sideband_weights


@dataclass(frozen=True)
class Spectrum:
    omega: np.ndarray
    density: np.ndarray
    units: str = "m^2/Hz"
    sidedness: str = "one-sided"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        density = np.asarray(self.density, dtype=float)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "density", density)
        if omega.ndim != 1 or omega.shape != density.shape or omega.size < 2:
            raise InvalidParameterError("spectrum needs matching 1-D frequency and density arrays")
        steps = np.diff(omega)
        if np.any(steps <= 0):
            raise InvalidParameterError("frequency grid must be increasing")
        if np.max(np.abs(steps - steps.mean())) > 1e-9 * np.max(np.abs(omega)):
            raise InvalidParameterError("frequency grid must be uniform")
        if np.any(density < 0) or not np.all(np.isfinite(density)):
            raise InvalidParameterError("densities must be finite and >= 0")

    @property
    def step(self) -> float:
        return float(self.omega[1] - self.omega[0])

    def window(self, lo, hi) -> "Spectrum":
        mask = (self.omega >= lo) & (self.omega <= hi)
        if mask.sum() < 2:
            raise DegenerateWindowError(f"window [{float(lo)!r}, {float(hi)!r}] rad/s holds fewer than two samples")
        return Spectrum(self.omega[mask], self.density[mask], self.units, self.sidedness, dict(self.meta))


def uniform_grid(lo, hi, n) -> np.ndarray:
    return np.linspace(lo, hi, n)


def thermal_psd(omega, t_eff, mech: MechanicalMode, gamma_eff, rounded_constants=False):
    """Displacement density of a damped oscillator in equilibrium at ``t_eff``."""
    if gamma_eff <= 0:
        raise InvalidParameterError("effective damping must be > 0")
    k_b = constants.get(rounded_constants).k_B
    omega = np.asarray(omega, dtype=float)
    m_eff = mech.require_mass()
    return 4.0 * k_b * t_eff * gamma_eff / m_eff / ((mech.omega_m**2 - omega**2) ** 2 + gamma_eff**2 * omega**2)


class ModeSpec(NamedTuple):
    mech: MechanicalMode
    t_eff: float
    gamma_eff: float


def synthesize(
    modes: Sequence[ModeSpec],
    omega,
    background: Optional[Callable] = None,
    rounded_constants: bool = False,
) -> Spectrum:
    """Sum of thermal mode densities plus an imprecision floor.

    ``background`` maps angular frequency to a displacement sensitivity in
    m/sqrt(Hz) (for example :meth:`ReadoutSetup.sensitivity`); its square is
    added. Peak signal-to-background ratios (dB) are stored in
    ``meta["signal_to_background_db"]``, one per mode.
    """
    omega = np.asarray(omega, dtype=float)
    density = np.zeros_like(omega)
    for mode in modes:
        density += thermal_psd(omega, mode.t_eff, mode.mech, mode.gamma_eff, rounded_constants)
    meta = {}
    if background is not None:
        density += np.asarray(background(omega), dtype=float) ** 2
        meta["signal_to_background_db"] = tuple(
            signal_to_background_db(mode, background, rounded_constants) for mode in modes
        )
    return Spectrum(omega, density, meta=meta)


def signal_to_background_db(mode: ModeSpec, background: Callable, rounded_constants=False) -> float:
    peak = thermal_psd(mode.mech.omega_m, mode.t_eff, mode.mech, mode.gamma_eff, rounded_constants)
    floor = float(np.asarray(background(mode.mech.omega_m))) ** 2
    return 10.0 * math.log10(peak / floor)


def measurement_noise(spectrum: Spectrum, rng: np.random.Generator, relative_sigma: float) -> Spectrum:
    """Multiplicative noise as from averaging periodograms: gamma distributed, mean 1."""
    if relative_sigma <= 0:
        return spectrum
    shape = 1.0 / relative_sigma**2
    factor = rng.gamma(shape, 1.0 / shape, size=spectrum.density.shape)
    return Spectrum(spectrum.omega, spectrum.density * factor, spectrum.units, spectrum.sidedness, dict(spectrum.meta))


# -- Lorentzian fitting -------------------------------------------------------


@dataclass(frozen=True)
class LorentzianFit:
    """Fitted peak. ``area`` is the integral over angular frequency, so variance = area/(2 pi)."""

    center: float
    width: float
    area: float
    background: float
    residual_rms: float

    @property
    def variance(self) -> float:
        return self.area / (2.0 * math.pi)


def lorentzian(omega, center, width, area, background=0.0):
    """Peak of full width ``width`` whose integral over omega is ``area``."""
    half = 0.5 * width
    return area / math.pi * half / ((np.asarray(omega, dtype=float) - center) ** 2 + half**2) + background


def _model_and_jacobian(p, x, n_peaks):
    f = np.full_like(x, p[-1])
    jac = np.empty((x.size, p.size))
    jac[:, -1] = 1.0
    for k in range(n_peaks):
        x0, w, a = p[3 * k : 3 * k + 3]
        u = x - x0
        g = 0.5 * w
        d = u * u + g * g
        f += a / math.pi * g / d
        jac[:, 3 * k] = a / math.pi * g * 2.0 * u / d**2
        jac[:, 3 * k + 1] = a / (2.0 * math.pi) * (u * u - g * g) / d**2
        jac[:, 3 * k + 2] = g / (math.pi * d)
    return f, jac


def _moment_guess(x, y, background):
    excess = y - background
    peak = int(np.argmax(excess))
    half_max = 0.5 * excess[peak]
    # contiguous run above half maximum around the peak
    lo = peak
    while lo > 0 and excess[lo - 1] > half_max:
        lo -= 1
    hi = peak
    while hi < x.size - 1 and excess[hi + 1] > half_max:
        hi += 1
    dx = x[1] - x[0]
    fwhm = max((hi - lo + 1) * dx, 2.0 * dx)
    sel = slice(lo, hi + 1)
    center = float(np.sum(x[sel] * excess[sel]) / np.sum(excess[sel]))
    area = excess[peak] * math.pi * fwhm / 2.0
    return center, fwhm, area


def _fit_peaks(spectrum: Spectrum, guesses, max_nfev):
    x_raw, y_raw = spectrum.omega, spectrum.density
    if x_raw.size < 3 * len(guesses) + 2:
        raise DegenerateWindowError("too few samples for the number of fit parameters")
    if np.ptp(y_raw) == 0:
        raise DegenerateWindowError("window has zero variance")
    origin = 0.5 * (x_raw[0] + x_raw[-1])
    span = 0.5 * (x_raw[-1] - x_raw[0])
    y_scale = float(np.max(np.abs(y_raw)))
    x = (x_raw - origin) / span
    y = y_raw / y_scale

    p0 = []
    for center, width, area in guesses:
        p0 += [(center - origin) / span, width / span, area / (span * y_scale)]
    p0.append(float(np.percentile(y, 5)))
    p0 = np.array(p0)
    n_peaks = len(guesses)

    def residual(p):
        return _model_and_jacobian(p, x, n_peaks)[0] - y

    def jacobian(p):
        return _model_and_jacobian(p, x, n_peaks)[1]

    sol = optimize.least_squares(
        residual, p0, jac=jacobian, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev
    )
    if sol.status <= 0:
        raise FitError(f"Lorentzian fit did not converge: {sol.message}")
    rms = math.sqrt(float(np.mean(sol.fun**2))) * y_scale
    fits = []
    for k in range(n_peaks):
        x0, w, a = sol.x[3 * k : 3 * k + 3]
        w = abs(w)
        if not (w > 0 and a > 0):
            raise FitError("fit converged to a non-physical peak (width or area <= 0)")
        fits.append(
            LorentzianFit(
                float(origin + x0 * span), float(w * span), float(a * span * y_scale), float(sol.x[-1] * y_scale), rms
            )
        )
    return fits


def fit_lorentzian(spectrum: Spectrum, window=None, max_nfev: int = 2000) -> LorentzianFit:
    """Levenberg-Marquardt fit of one Lorentzian plus a constant offset.

    ``window`` is an optional (lo, hi) range in rad/s. Initial values come
    from the centroid and half-maximum width of the data.
    """
    spec = spectrum.window(*window) if window is not None else spectrum
    if spec.omega.size < 5:
        raise DegenerateWindowError("fit window holds fewer than five samples")
    if np.ptp(spec.density) == 0:
        raise DegenerateWindowError("window has zero variance")
    background = float(np.percentile(spec.density, 5))
    return _fit_peaks(spec, [_moment_guess(spec.omega, spec.density, background)], max_nfev)[0]


def fit_lorentzians(spectrum: Spectrum, centers: Sequence[float], width_guess: float, max_nfev: int = 4000):
    """Joint fit of several Lorentzians sharing one offset; ``centers`` seed the peak positions."""
    background = float(np.percentile(spectrum.density, 5))
    guesses = []
    for center in centers:
        height = float(np.interp(center, spectrum.omega, spectrum.density)) - background
        guesses.append((center, width_guess, max(height, 0.0) * math.pi * width_guess / 2.0))
    return _fit_peaks(spectrum, guesses, max_nfev)


def occupancy_from_spectrum(fit: LorentzianFit, mech: MechanicalMode, rounded_constants: bool = False) -> float:
    """Phonon occupancy from the calibrated peak area, via E = m_eff Omega_m^2 <x^2> = hbar Omega_m (n + 1/2)."""
    hbar = constants.get(rounded_constants).hbar
    energy = mech.require_mass() * mech.omega_m**2 * fit.variance
    quantum = hbar * mech.omega_m
    if energy < 0.5 * quantum:
        raise SubZeroPointError(f"mode energy {energy!r} J is below the zero-point energy {0.5 * quantum!r} J")
    return energy / quantum - 0.5


def area_for_occupancy(n, mech: MechanicalMode, rounded_constants: bool = False) -> float:
    """Inverse of :func:`occupancy_from_spectrum`: peak area encoding occupancy ``n``."""
    hbar = constants.get(rounded_constants).hbar
    return 2.0 * math.pi * hbar * (n + 0.5) / (mech.require_mass() * mech.omega_m)


def temperature_for_occupancy(n, omega_m, rounded_constants: bool = False) -> float:
    """Classical temperature with k_B T = hbar Omega_m (n + 1/2)."""
    c = constants.get(rounded_constants)
    return c.hbar * omega_m * (n + 0.5) / c.k_B


# -- heterodyne sideband spectroscopy -----------------------------------------


@dataclass(frozen=True)
class HeterodyneSpectrum:
    """Beat spectrum with the Stokes line at Omega_AOM - Omega_m and anti-Stokes at Omega_AOM + Omega_m."""

    spectrum: Spectrum
    stokes_power: float
    anti_stokes_power: float
    weights: SidebandWeights

    @property
    def stokes_suppression_db(self) -> float:
        return 10.0 * math.log10(self.anti_stokes_power / self.stokes_power)


def heterodyne_spectrum(
    detuning,
    n,
    omega_aom,
    optical: OpticalMode,
    mech: MechanicalMode,
    gamma_eff,
    omega,
    scale: float = 1.0,
) -> HeterodyneSpectrum:
    """RF spectrum (arbitrary units) of the two motional sidebands.

    Integrated powers are A+(n+1) (Stokes) and A- n (anti-Stokes) times
    ``scale``, normalized so that the larger Lorentzian weight is 1.
    """
    if gamma_eff <= 0:
        raise InvalidParameterError("effective damping must be > 0")
    weights = sideband_weights(optical, mech, detuning)
    norm = max(weights.a_minus, weights.a_plus)
    stokes, anti = (scale * p / norm for p in sideband_powers(n, weights))
    omega = np.asarray(omega, dtype=float)
    density = lorentzian(omega, omega_aom - mech.omega_m, gamma_eff, stokes) + lorentzian(
        omega, omega_aom + mech.omega_m, gamma_eff, anti
    )
    spec = Spectrum(omega, density, units="a.u./Hz")
    return HeterodyneSpectrum(spec, stokes, anti, weights)


def sideband_powers_from_spectrum(het: Spectrum, omega_aom, omega_m, gamma_guess):
    """Fit both sidebands jointly; returns (Stokes, anti-Stokes) integrated powers."""
    stokes, anti = fit_lorentzians(het, [omega_aom - omega_m, omega_aom + omega_m], gamma_guess)
    return stokes.area, anti.area
