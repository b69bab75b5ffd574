"""Steady-state field and DC transmission of a cavity whose radius oscillates.

A radius modulation x(t) = x0 sin(Omega_m t) phase-modulates the intracavity
light with index beta = x0 omega0 / (R Omega_m). The steady state is a comb
of Lorentzian responses at Delta = -n Omega_m weighted by Bessel functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from .errors import FitError, InvalidParameterError
from .params import MechanicalMode, OpticalMode


def truncation_order(beta: float) -> int:
    """Largest |n| kept in Bessel sums; the discarded weight is below 1e-12."""
    return max(8, math.ceil(beta + 10.0 * beta ** (1.0 / 3.0) + 6.0))


def bessel_orders(beta: float):
    """Orders -N..N and the matching J_n(beta)."""
    n_max = truncation_order(beta)
    orders = np.arange(-n_max, n_max + 1)
    return orders, jv(orders, beta)


def modulation_index(x0, optical: OpticalMode, mech: MechanicalMode):
    return x0 * optical.omega0 / (optical.require_radius() * mech.omega_m)


def amplitude_from_beta(beta, optical: OpticalMode, mech: MechanicalMode):
    return beta * optical.require_radius() * mech.omega_m / optical.omega0


def calibration_constant(optical: OpticalMode, mech: MechanicalMode) -> float:
    """Displacement per unit modulation index, x0/beta = R Omega_m / omega0 (m)."""
    return optical.require_radius() * mech.omega_m / optical.omega0


def linewidth_displacement(optical: OpticalMode) -> float:
    """Radial displacement that shifts the resonance by one linewidth, kappa R / omega0 (m)."""
    return optical.kappa * optical.require_radius() / optical.omega0


@dataclass(frozen=True)
class OscillationState:
    x0: float
    beta: float

    @classmethod
    def from_amplitude(cls, x0, optical, mech):
        if x0 < 0:
            raise InvalidParameterError("amplitude must be >= 0")
        return cls(x0, modulation_index(x0, optical, mech))

    @classmethod
    def from_beta(cls, beta, optical, mech):
        if beta < 0:
            raise InvalidParameterError("modulation index must be >= 0")
        return cls(amplitude_from_beta(beta, optical, mech), beta)


def intracavity_field(t, beta, detuning, optical: OpticalMode, omega_m, drive=1.0, rotating=True):
    """Steady-state intracavity amplitude a_p(t).

    |a|^2 is energy (J) when |drive|^2 is the incident power (W). With
    ``rotating=True`` (default) the result is in the frame rotating at the
    laser frequency, i.e. a_p(t) exp(-i omega t); otherwise the laser carrier
    exp(i (omega0 + Delta) t) is included.
    """
    t = np.asarray(t, dtype=float)
    orders, j = bessel_orders(beta)
    half = 0.5 * optical.kappa
    coeff = (-1j) ** orders * j / (half + 1j * (detuning + orders * omega_m))
    phase = np.exp(1j * np.multiply.outer(t, orders * omega_m))
    field = drive / math.sqrt(optical.tau_ex) * (phase @ coeff) * np.exp(1j * beta * np.cos(omega_m * t))
    if not rotating:
        field = field * np.exp(1j * (optical.omega0 + detuning) * t)
    return field if field.ndim else complex(field)


def transmitted_field(t, beta, detuning, optical: OpticalMode, omega_m, drive=1.0):
    """Output field s - a_p/sqrt(tau_ex) in the laser frame."""
    a = intracavity_field(t, beta, detuning, optical, omega_m, drive)
    return drive - a / math.sqrt(optical.tau_ex)


def dc_transmission(detuning, beta, coupling, kappa, omega_m):
    """Time-averaged transmitted power normalized to the incident power.

    ``detuning`` and ``beta`` may be arrays; they broadcast against each other.
    """
    detuning = np.asarray(detuning, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0):
        raise InvalidParameterError("modulation index must be >= 0")
    n_max = truncation_order(float(np.max(beta)) if beta.size else 0.0)
    orders = np.arange(-n_max, n_max + 1)
    j2 = jv(orders, beta[..., None]) ** 2
    half = 0.5 * kappa
    lorentz = 1.0 / (half**2 + (detuning[..., None] + orders * omega_m) ** 2)
    depth = coupling * kappa**2 / (1.0 + coupling) ** 2
    value = 1.0 - depth * np.sum(lorentz * j2, axis=-1)
    return value if value.ndim else float(value)


def dc_transmission_for(detuning, beta, optical: OpticalMode, mech: MechanicalMode):
    return dc_transmission(detuning, beta, optical.coupling, optical.kappa, mech.omega_m)


@dataclass(frozen=True)
class TransmissionScan:
    detuning: np.ndarray
    transmission: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.detuning) <= 0):
            raise InvalidParameterError("detuning grid must be strictly increasing")

    def local_minima(self) -> np.ndarray:
        """Detunings of interior local minima."""
        y = self.transmission
        idx = np.flatnonzero((y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:])) + 1
        return self.detuning[idx]


def transmission_scan(detunings, beta, coupling, kappa, omega_m) -> TransmissionScan:
    detunings = np.asarray(detunings, dtype=float)
    return TransmissionScan(detunings, np.asarray(dc_transmission(detunings, beta, coupling, kappa, omega_m)))


@dataclass(frozen=True)
class BetaFit:
    """Best modulation index plus other local optima that fit nearly as well.

    ``alternatives`` lists refined local minima (ascending) whose rms
    residual is below ``AMBIGUITY_RMS``; a few orders often cannot tell
    them apart.
    """

    beta: float
    residual_rms: float
    alternatives: tuple = ()


AMBIGUITY_RMS = 1e-3


def _relative_weights(orders, beta):
    w = jv(orders, beta) ** 2
    return w / w.sum()


def fit_modulation_index(weights, beta_max: float = 5.0, n_scan: int = 5001) -> BetaFit:
    """Fit the modulation index to measured dip weights.

    Parameters
    ----------
    weights : sequence of (order, weight)
        Relative dip weights for at least two sideband orders. Only ratios
        matter: data and model are both normalized to unit sum.
    beta_max : float
        Upper end of the search interval (0, beta_max].

    Returns
    -------
    BetaFit
        The lowest-residual local minimum; other near-perfect minima are
        reported in ``alternatives`` rather than silently dropped.

    Raises
    ------
    FitError
        If the best scan point is at either end of the interval.
    """
    pairs = list(weights)
    if len(pairs) < 2:
        raise ValueError("need at least two sideband orders")
    orders = np.array([int(n) for n, _ in pairs])
    data = np.array([float(w) for _, w in pairs])
    if np.any(data < 0) or data.sum() <= 0:
        raise ValueError("weights must be >= 0 and not all zero")
    data = data / data.sum()

    def residual(beta):
        return float(np.sum((_relative_weights(orders, beta) - data) ** 2))

    grid = np.linspace(beta_max / n_scan, beta_max, n_scan)
    values = np.array([residual(b) for b in grid])
    i = int(np.argmin(values))
    if i == 0 or i == n_scan - 1:
        raise FitError(f"no interior minimum of the residual in (0, {beta_max}]; best scan point beta={grid[i]!r}")
    h = grid[1] - grid[0]
    interior = np.flatnonzero((values[1:-1] <= values[:-2]) & (values[1:-1] < values[2:])) + 1
    found = []
    for j in interior:
        beta = _refine(residual, grid[j], h)
        found.append((math.sqrt(residual(beta) / len(orders)), beta))
    best_rms, best = min(found)
    others = sorted(b for r, b in found if b != best and r < AMBIGUITY_RMS)
    return BetaFit(beta=float(best), residual_rms=best_rms, alternatives=tuple(float(b) for b in others))


def _refine(residual, beta, h):
    # successive parabolic refinement on a shrinking symmetric stencil
    for _ in range(60):
        f0, fm, fp = residual(beta), residual(beta - h), residual(beta + h)
        curvature = fp - 2.0 * f0 + fm
        if curvature <= 0:
            break
        step = 0.5 * h * (fm - fp) / curvature
        step = max(-h, min(h, step))
        beta += step
        h = max(abs(step), h * 1e-3)
        if abs(step) < 1e-14 * max(beta, 1.0):
            break
    return beta
