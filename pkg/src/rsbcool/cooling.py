"""Radiation-pressure cooling rate of a ring resonator and cooling-factor bookkeeping."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import constants
from .errors import RegimeWarning
from .params import LaserDrive, MechanicalMode, OpticalMode


def _lorentz(x, kappa):
    return 1.0 / (x * x + 0.25 * kappa * kappa)


def normalized_rate(delta, kappa, omega_m):
    """Cooling rate divided by its kappa -> 0 maximum, as a function of detuning and linewidth.

    Positive for red detuning (cooling), negative for blue detuning, bounded by 1.
    """
    delta = np.asarray(delta, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    value = (
        0.25
        * omega_m**2
        * kappa**2
        * _lorentz(delta, kappa)
        * (_lorentz(delta + omega_m, kappa) - _lorentz(delta - omega_m, kappa))
    )
    return value if value.ndim else float(value)


def max_cooling_rate(optical: OpticalMode, mech: MechanicalMode, power: float) -> float:
    """Asymptotic rate for Delta = -Omega_m and kappa -> 0 at fixed radius, coupling and power."""
    radius = optical.require_radius()
    m_eff = mech.require_mass()
    k = optical.coupling
    return optical.omega0 / mech.omega_m**3 / (m_eff * radius**2) * 2.0 * k / (k + 1.0) * power


def _check_rate_regime(gamma_c, kappa):
    if np.any(np.abs(gamma_c) >= kappa):
        warnings.warn("|cooling rate| >= kappa: weak-coupling rate expression not valid", RegimeWarning, stacklevel=3)


def cooling_rate_general(optical: OpticalMode, mech: MechanicalMode, laser: LaserDrive):
    """Cooling rate for arbitrary detuning and linewidth (rad/s).

    Negative values mean amplification (blue-detuned drive). ``laser.detuning``
    may be an array.
    """
    radius = optical.require_radius()
    m_eff = mech.require_mass()
    k = optical.coupling
    kappa = optical.kappa
    delta = np.asarray(laser.detuning, dtype=float)
    prefactor = optical.omega0 / mech.omega_m / (m_eff * radius**2) * k / (2.0 * (k + 1.0))
    gamma_c = (
        prefactor
        * kappa**2
        * _lorentz(delta, kappa)
        * (_lorentz(delta + mech.omega_m, kappa) - _lorentz(delta - mech.omega_m, kappa))
        * laser.power
    )
    _check_rate_regime(gamma_c, kappa)
    return gamma_c if gamma_c.ndim else float(gamma_c)


def cooling_rate_rsb(optical: OpticalMode, mech: MechanicalMode, laser: LaserDrive) -> float:
    """Finesse form of the rate when pumping the lower sideband.

    Keeps only the lower-sideband Lorentzian; the upper one is suppressed by
    1 + 16 Omega_m^2/kappa^2 relative to it.
    """
    c = constants.CODATA.c
    m_eff = mech.require_mass()
    tau = optical.tau
    gamma_c = (
        8.0
        * optical.omega0
        / mech.omega_m
        * optical.n_index**2
        * optical.finesse**2
        * laser.power
        / (m_eff * c**2)
        * tau
        / optical.tau_ex
        / (1.0 + 4.0 * tau**2 * mech.omega_m**2)
    )
    _check_rate_regime(gamma_c, optical.kappa)
    return gamma_c


def optimal_detuning(optical: OpticalMode, mech: MechanicalMode, n_grid: int = 4096) -> float:
    """Red detuning (< 0) that maximises the cooling rate.

    A log-spaced scan over |Delta| brackets the maximum, then golden-section
    search refines it.
    """
    kappa, omega_m = optical.kappa, mech.omega_m
    lo = 1e-4 * min(kappa, omega_m)
    hi = 1e2 * max(kappa, omega_m)
    detunings = -np.geomspace(lo, hi, n_grid)
    values = normalized_rate(detunings, kappa, omega_m)
    i = int(np.argmax(values))
    i = min(max(i, 1), n_grid - 2)
    brack = (detunings[i - 1], detunings[i], detunings[i + 1])

    def objective(d):
        return -normalized_rate(d, kappa, omega_m)

    best = optimize.golden(objective, brack=brack, tol=1e-12)
    return float(best)


def cooling_surface(optical: OpticalMode, mech: MechanicalMode, detunings, kappas) -> np.ndarray:
    """Cooling rate normalized to its kappa -> 0 maximum.

    Returns an array of shape (len(kappas), len(detunings)); row i belongs to
    ``kappas[i]``. The normalization depends only on Omega_m, so the template's
    radius, coupling and mass drop out.
    """
    detunings = np.asarray(detunings, dtype=float)
    kappas = np.asarray(kappas, dtype=float)
    if detunings.size == 0 or kappas.size == 0:
        raise ValueError("detuning and linewidth grids must be non-empty")
    if np.any(kappas <= 0):
        raise ValueError("linewidths must be > 0")
    return normalized_rate(detunings[None, :], kappas[:, None], mech.omega_m)


@dataclass(frozen=True)
class CoolingResult:
    gamma_c: float
    gamma_eff: float
    cooling_factor: float
    rate_below_kappa: bool
    below_entropy_bound: bool
    below_q_bound: bool
    heating: bool

    @property
    def valid(self) -> bool:
        return self.rate_below_kappa and self.below_entropy_bound and self.below_q_bound and not self.heating


def cooling_factor(gamma_c: float, mech: MechanicalMode, optical: OpticalMode) -> CoolingResult:
    """Occupancy reduction n_R/n_f = (Gamma_c + Gamma_m)/Gamma_m with its validity flags."""
    gamma_m = mech.require_damping()
    factor = (gamma_c + gamma_m) / gamma_m
    return CoolingResult(
        gamma_c=gamma_c,
        gamma_eff=gamma_m + gamma_c,
        cooling_factor=factor,
        rate_below_kappa=abs(gamma_c) < optical.kappa,
        below_entropy_bound=factor < optical.kappa / gamma_m,
        below_q_bound=factor < mech.q_m,
        heating=gamma_c < 0,
    )


def thermal_occupancy(temperature: float, omega_m: float, rounded_constants: bool = False) -> float:
    """Bose-Einstein occupancy of the reservoir."""
    c = constants.get(rounded_constants)
    return 1.0 / math.expm1(c.hbar * omega_m / (c.k_B * temperature))


def final_occupancy(gamma_c: float, gamma_m: float, n_min: float, n_reservoir: float) -> float:
    """Steady state with both the optical bath (n_min) and the reservoir."""
    return (gamma_c * n_min + gamma_m * n_reservoir) / (gamma_c + gamma_m)
