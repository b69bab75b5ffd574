"""Hänsch-Couillaud polarization readout of the cavity displacement.

Only one polarization (E_cav) couples to the cavity mode; the orthogonal one
(E_LO) passes the taper untouched and acts as a local oscillator. A quarter
wave plate and a polarizing beam splitter at 45 degrees split the light onto
two photodiodes (l, r), and h = |l|^2 - |r|^2 is a dispersive error signal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import constants
from .errors import InvalidParameterError
from .params import OpticalMode


def taper_transfer(detuning, tau0, tau_ex):
    """Complex transmission of the taper for the cavity polarization."""
    detuning = np.asarray(detuning, dtype=float)
    cross = 2j * detuning * tau0 * tau_ex
    t = (tau_ex - tau0 + cross) / (tau_ex + tau0 + cross)
    return t if t.ndim else complex(t)


# -- Jones calculus -----------------------------------------------------------

QUARTER_WAVE = np.array([[1, 0], [0, 1j]], dtype=complex)
HALF_WAVE = np.array([[1, 0], [0, -1]], dtype=complex)


def rotation(theta):
    """Basis rotation R_theta (angle in radians)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def retarder(plate, theta):
    """Wave plate with its fast axis at ``theta``: R_theta^-1 M R_theta."""
    return rotation(-theta) @ plate @ rotation(theta)


def cavity_matrix(t):
    return np.array([[t, 0], [0, 1]], dtype=complex)


REDUCED_ANALYZER = rotation(math.pi / 4) @ QUARTER_WAVE


def analyzer_chain(angles, pmd=None):
    """R_th4 Q(th3) H(th2) Q(th1) P: everything between the taper and the photodiodes."""
    th1, th2, th3, th4 = angles
    m = rotation(th4) @ retarder(QUARTER_WAVE, th3) @ retarder(HALF_WAVE, th2) @ retarder(QUARTER_WAVE, th1)
    if pmd is not None:
        m = m @ np.asarray(pmd, dtype=complex)
    return m


def _phase_aligned_mismatch(m, target):
    """|| m e^{-i phi} - target || with phi chosen to best align global phases."""
    overlap = np.trace(target.conj().T @ m)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return m / phase - target


def is_compensated(angles, pmd, tol=1e-10) -> bool:
    """True if the chain equals R_45 Q up to a global phase (which no detector sees)."""
    return float(np.max(np.abs(_phase_aligned_mismatch(analyzer_chain(angles, pmd), REDUCED_ANALYZER)))) < tol


def compensating_angles(pmd, seed: int = 0, attempts: int = 20):
    """Wave-plate and analyzer angles that undo a fiber's polarization-mode dispersion.

    ``pmd`` must be unitary. Returns angles (th1, th2, th3, th4) in radians.
    """
    pmd = np.asarray(pmd, dtype=complex)
    if not np.allclose(pmd.conj().T @ pmd, np.eye(2), atol=1e-12):
        raise InvalidParameterError("polarization-mode dispersion matrix must be unitary")

    def residual(angles):
        d = _phase_aligned_mismatch(analyzer_chain(angles, pmd), REDUCED_ANALYZER)
        return np.concatenate([d.real.ravel(), d.imag.ravel()])

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(attempts):
        sol = optimize.least_squares(residual, rng.uniform(0, math.pi, 4), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or sol.cost < best.cost:
            best = sol
        if best.cost < 1e-28:
            break
    return tuple(float(a) for a in best.x)


def random_unitary(rng):
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# -- detection ----------------------------------------------------------------


@dataclass(frozen=True)
class PolarizationField:
    """Field amplitudes (sqrt(W)) in the cavity / local-oscillator basis."""

    e_cav: complex
    e_lo: complex

    def __post_init__(self):
        if not (np.all(np.isfinite(self.e_cav)) and np.all(np.isfinite(self.e_lo))):
            raise InvalidParameterError("field amplitudes must be finite")

    @classmethod
    def from_powers(cls, p_cav, p_lo):
        return cls(math.sqrt(p_cav), math.sqrt(p_lo))

    @property
    def p_cav(self):
        return abs(self.e_cav) ** 2

    @property
    def p_lo(self):
        return abs(self.e_lo) ** 2


@dataclass(frozen=True)
class Detection:
    l_power: np.ndarray
    r_power: np.ndarray

    @property
    def h(self):
        return self.l_power - self.r_power


def detect_fields(e_out, e_lo, chain=None) -> Detection:
    """Photodiode powers for given fields just after the taper (arrays broadcast)."""
    m = REDUCED_ANALYZER if chain is None else np.asarray(chain)
    l = m[0, 0] * e_out + m[0, 1] * e_lo
    r = m[1, 0] * e_out + m[1, 1] * e_lo
    return Detection(np.abs(l) ** 2, np.abs(r) ** 2)


def detect(field: PolarizationField, detuning, tau0, tau_ex, chain=None) -> Detection:
    """Photodiode powers after the taper and the analyzer ``chain`` (default R_45 Q)."""
    t = taper_transfer(detuning, tau0, tau_ex)
    return detect_fields(t * field.e_cav, field.e_lo, chain)


def error_signal(detuning, tau0, tau_ex, p_cav, p_lo):
    """Closed-form h(Delta) = |l|^2 - |r|^2 (W) for in-phase real E_cav, E_LO."""
    detuning = np.asarray(detuning, dtype=float)
    h = (
        8.0 * tau0**2 * tau_ex * detuning * math.sqrt(p_cav * p_lo)
        / (tau_ex**2 + 2.0 * tau0 * tau_ex + tau0**2 * (1.0 + 4.0 * detuning**2 * tau_ex**2))
    )
    return h if h.ndim else float(h)


def error_slope(optical: OpticalMode, p_cav, p_lo) -> float:
    """dh/dx at line center (W/m), with Delta = omega0 x / R."""
    return 8.0 * optical.omega0 / (optical.tau_ex * optical.kappa**2 * optical.require_radius()) * math.sqrt(p_cav * p_lo)


def dynamic_response(omega, kappa):
    """RF-power transfer factor 1/((kappa/2)^2 + Omega^2) for a fixed displacement amplitude."""
    return 1.0 / (0.25 * kappa**2 + np.asarray(omega, dtype=float) ** 2)


def hc_signal_displacement(t, x0, omega, optical: OpticalMode, p_cav, p_lo):
    """h(t) for x(t) = x0 sin(Omega t), laser at line center, first order in x0."""
    half = 0.5 * optical.kappa
    t = np.asarray(t, dtype=float)
    return (
        2.0 * math.sqrt(p_lo * p_cav) / optical.tau_ex * (2.0 / optical.kappa) * x0 / optical.require_radius()
        * optical.omega0 * (half * np.sin(omega * t) - omega * np.cos(omega * t)) / (half**2 + omega**2)
    )


def hc_signal_phase_modulation(t, dphi, omega, optical: OpticalMode, p_cav, p_lo):
    """h(t) for a phase modulation of depth ``dphi`` at Omega on both polarizations."""
    half = 0.5 * optical.kappa
    t = np.asarray(t, dtype=float)
    return (
        2.0 * math.sqrt(p_lo * p_cav) / optical.tau_ex * dphi * omega * (2.0 / optical.kappa)
        * (half * np.cos(omega * t) + omega * np.sin(omega * t)) / (half**2 + omega**2)
    )


_N_PHASE = 64


def _fourier_component(h, omega_t):
    return 2.0 / h.size * np.sum(h * np.exp(-1j * omega_t))


def _linear_h(c0, c1, lo0, lo1):
    # h is bilinear in (c, lo): the symmetric difference isolates the first-order part exactly.
    # The perturbation is scaled to the size of the carrier first to avoid cancellation.
    size = np.max(np.abs(c1)) + np.max(np.abs(lo1))
    scale = (abs(c0) + abs(lo0)) / size if size > 0 else 1.0
    plus = detect_fields(c0 + scale * c1, lo0 + scale * lo1).h
    minus = detect_fields(c0 - scale * c1, lo0 - scale * lo1).h
    return 0.5 * (plus - minus) / scale


def displacement_response(x0, omega, optical: OpticalMode, p_cav, p_lo, detuning=0.0) -> complex:
    """Complex amplitude of h at Omega for a small radius oscillation x0 sin(Omega t).

    Built from the first-order perturbative solution of the mode equation,
    not from the closed form :func:`hc_signal_displacement`.
    """
    phase = 2.0 * math.pi * np.arange(_N_PHASE) / _N_PHASE
    s = math.sqrt(p_cav)
    half = 0.5 * optical.kappa
    sqrt_tex = math.sqrt(optical.tau_ex)
    a0 = s / (sqrt_tex * (half + 1j * detuning))
    shift = x0 * optical.omega0 / optical.require_radius()
    a1 = -0.5 * shift * a0 * (
        np.exp(1j * phase) / (half + 1j * (detuning + omega)) - np.exp(-1j * phase) / (half + 1j * (detuning - omega))
    )
    c0 = s - a0 / sqrt_tex
    c1 = -a1 / sqrt_tex
    h1 = _linear_h(c0, c1, math.sqrt(p_lo), 0.0)
    return _fourier_component(h1, phase)


def phase_modulation_response(dphi, omega, optical: OpticalMode, p_cav, p_lo, detuning=0.0) -> complex:
    """Complex amplitude of h at Omega for phase modulation of depth ``dphi`` on the input light."""
    phase = 2.0 * math.pi * np.arange(_N_PHASE) / _N_PHASE
    s = math.sqrt(p_cav)
    lo = math.sqrt(p_lo)
    up, down = np.exp(1j * phase), np.exp(-1j * phase)
    tau0, tau_ex = optical.tau0, optical.tau_ex
    c0 = s * taper_transfer(detuning, tau0, tau_ex)
    c1 = s * 0.5 * dphi * (
        taper_transfer(detuning + omega, tau0, tau_ex) * up - taper_transfer(detuning - omega, tau0, tau_ex) * down
    )
    lo1 = lo * 0.5 * dphi * (up - down)
    h1 = _linear_h(c0, c1, lo, lo1)
    return _fourier_component(h1, phase)


def calibrate(dphi, omega, optical: OpticalMode):
    """Displacement amplitude giving the same readout signal as phase modulation ``dphi`` at Omega."""
    return dphi * optical.require_radius() * omega / optical.omega0


def modulation_depth(volts, degrees_per_volt=17.0):
    """Phase-modulation depth (rad) of the electro-optic calibrator."""
    return math.radians(degrees_per_volt * volts)


# -- sensitivity --------------------------------------------------------------


def shot_noise_sensitivity(omega, finesse, eta_det, p_cav, wavelength_medium, kappa, n_index):
    """Shot-noise limited displacement sensitivity x_min(Omega) (m/sqrt(Hz)).

    ``wavelength_medium`` is the wavelength inside the resonator; the photon
    energy uses the vacuum frequency 2 pi c/(n lambda_medium).
    """
    if not 0 < eta_det <= 1:
        raise InvalidParameterError("detection efficiency must be in (0, 1]")
    for name, value in (("finesse", finesse), ("p_cav", p_cav), ("wavelength_medium", wavelength_medium), ("kappa", kappa)):
        if value <= 0:
            raise InvalidParameterError(f"{name} must be > 0")
    c = constants.CODATA
    omega_light = 2.0 * math.pi * c.c / (n_index * wavelength_medium)
    flat = wavelength_medium / (8.0 * math.pi * finesse * math.sqrt(eta_det * p_cav / (c.hbar * omega_light)))
    return flat * np.sqrt(1.0 + np.asarray(omega, dtype=float) ** 2 / (0.5 * kappa) ** 2)


@dataclass(frozen=True)
class ReadoutSetup:
    """Probe mode plus detection parameters of the displacement monitor."""

    optical: OpticalMode
    eta_det: float
    p_cav: float
    p_lo: float

    @classmethod
    def from_finesse(cls, finesse, radius, wavelength, n_index, eta_det, p_cav, p_lo, coupling=1.0):
        c = constants.CODATA.c
        kappa = c / (n_index * radius * finesse)
        optical = OpticalMode.from_linewidth(2.0 * math.pi * c / wavelength, kappa, coupling, radius, n_index)
        return cls(optical, eta_det, p_cav, p_lo)

    def sensitivity(self, omega):
        o = self.optical
        return shot_noise_sensitivity(omega, o.finesse, self.eta_det, self.p_cav, o.wavelength_medium, o.kappa, o.n_index)
