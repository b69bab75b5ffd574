"""Heating of the mechanical mode by classical laser noise.

Phase noise of the cooling laser, converted by the detuned cavity into
intensity fluctuations, drives the mode with a white radiation-pressure
force. Comparing that force with the thermal Langevin force gives an
equivalent laser temperature; balancing it against the cooling rate gives an
optimum power and a lowest reachable occupancy.

The expressions assume deep sideband resolution (kappa << Omega_m),
Delta = -Omega_m and critical coupling. These are checked and violations
only produce a :class:`RegimeWarning`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

from . import constants
from .errors import InvalidParameterError, PhysicsDomainError, RegimeWarning
from .params import Environment, LaserDrive, MechanicalMode, OpticalMode


def force_psd_phase(s_phi, power, omega_m, radius):
    """Force noise density (N^2/Hz) from laser phase noise S_phi (rad^2/Hz)."""
    return s_phi * power**2 / (omega_m**2 * radius**2)


def force_psd_intensity(s_i, power, omega_m, radius):
    """Force noise density (N^2/Hz) from relative intensity noise S_I (1/Hz)."""
    return s_i * power**2 / (omega_m**2 * radius**2)


def thermal_force_psd(temperature, m_eff, gamma, rounded_constants=False):
    return 2.0 * constants.get(rounded_constants).k_B * temperature * m_eff * gamma


def laser_temperature(s_force, m_eff, gamma, rounded_constants=False):
    """Temperature whose thermal force density equals ``s_force``."""
    if gamma <= 0:
        raise InvalidParameterError("damping must be > 0")
    return s_force / (2.0 * constants.get(rounded_constants).k_B * m_eff * gamma)


def cooling_rate_sideband(omega_laser, power, omega_m, m_eff, radius):
    """Cooling rate omega P/(Omega_m^3 m_eff R^2) used in the noise budget."""
    return omega_laser * power / (omega_m**3 * m_eff * radius**2)


def phase_noise_from_frequency_noise(s_nu, fourier_hz):
    """Phase noise density (rad^2/Hz) from frequency noise density S_nu (Hz^2/Hz) at f."""
    return s_nu / fourier_hz**2


@dataclass(frozen=True)
class NoiseBudget:
    s_f_phase: float
    s_f_intensity: float
    s_f_thermal: float
    gamma_cool: float
    t_laser: float
    t_eff: float
    n_floor: float

    def to_dict(self):
        return asdict(self)


def _check_assumptions(optical: OpticalMode, mech: MechanicalMode, laser: LaserDrive):
    if mech.omega_m < 10.0 * optical.kappa:
        warnings.warn(
            f"Omega_m/kappa = {mech.omega_m / optical.kappa:.3g}: laser-noise formulas assume kappa << Omega_m",
            RegimeWarning,
            stacklevel=3,
        )
    if not math.isclose(laser.detuning, -mech.omega_m, rel_tol=1e-3):
        warnings.warn("laser-noise formulas assume Delta = -Omega_m", RegimeWarning, stacklevel=3)
    if not math.isclose(optical.coupling, 1.0, rel_tol=1e-6):
        warnings.warn("laser-noise formulas assume critical coupling", RegimeWarning, stacklevel=3)


def effective_occupancy(
    optical: OpticalMode,
    mech: MechanicalMode,
    laser: LaserDrive,
    env: Environment,
    rounded_constants: bool = False,
    check_assumptions: bool = True,
) -> NoiseBudget:
    """Noise budget at the given laser power, with T_eff = (Gamma/Gamma_cool)(T + T_laser)."""
    c = constants.get(rounded_constants)
    radius = optical.require_radius()
    m_eff = mech.require_mass()
    gamma = mech.require_damping()
    if check_assumptions:
        _check_assumptions(optical, mech, laser)
    omega_laser = optical.omega0 + laser.detuning
    s_phi = laser.phase_noise_at(mech.omega_m)
    s_f_phase = force_psd_phase(s_phi, laser.power, mech.omega_m, radius)
    s_f_int = force_psd_intensity(laser.s_i, laser.power, mech.omega_m, radius)
    s_f_th = thermal_force_psd(env.temperature, m_eff, gamma, rounded_constants)
    t_laser = laser_temperature(s_f_phase + s_f_int, m_eff, gamma, rounded_constants)
    gamma_cool = cooling_rate_sideband(omega_laser, laser.power, mech.omega_m, m_eff, radius)
    if gamma_cool < 10.0 * gamma:
        warnings.warn(
            f"Gamma_cool/Gamma = {gamma_cool / gamma:.3g}: effective temperature formula assumes Gamma_cool >> Gamma",
            RegimeWarning,
            stacklevel=2,
        )
    if gamma_cool > 0:
        t_eff = gamma / gamma_cool * (env.temperature + t_laser)
    else:
        t_eff = math.inf
    return NoiseBudget(
        s_f_phase=s_f_phase,
        s_f_intensity=s_f_int,
        s_f_thermal=s_f_th,
        gamma_cool=gamma_cool,
        t_laser=t_laser,
        t_eff=t_eff,
        n_floor=c.k_B * t_eff / (c.hbar * mech.omega_m),
    )


def optimal_power(env: Environment, mech: MechanicalMode, s_phi: float, optical: OpticalMode, rounded_constants=False):
    """Laser power minimising the noise-limited occupancy (W)."""
    if s_phi <= 0:
        raise PhysicsDomainError("optimum power is unbounded without phase noise")
    k_b = constants.get(rounded_constants).k_B
    return (
        math.sqrt(2.0 * k_b * env.temperature * mech.require_mass() * mech.require_damping() / s_phi)
        * optical.require_radius()
        * mech.omega_m
    )


def n_min_noise(
    env: Environment,
    mech: MechanicalMode,
    s_phi: float,
    optical: OpticalMode,
    omega_laser: float | None = None,
    rounded_constants: bool = False,
) -> float:
    """Lowest occupancy reachable against phase-noise heating.

    ``omega_laser`` defaults to the cavity resonance frequency.
    """
    c = constants.get(rounded_constants)
    if omega_laser is None:
        omega_laser = optical.omega0
    return (
        math.sqrt(2.0 * c.k_B * env.temperature * mech.require_mass() * mech.require_damping() * s_phi)
        * optical.require_radius()
        * mech.omega_m
        / (c.hbar * omega_laser)
    )
