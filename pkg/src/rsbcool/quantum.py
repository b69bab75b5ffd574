"""Sideband scattering weights, detailed-balance occupancy limits and sideband thermometry.

Naming: the red/Stokes sideband is the motion-increasing process with
power proportional to A+(n+1); the blue/anti-Stokes sideband is the
motion-decreasing process with power proportional to A- n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import HeatingRegimeError, NonPhysicalRatioError
from .params import MechanicalMode, OpticalMode


@dataclass(frozen=True)
class SidebandWeights:
    """Unnormalized Lorentzian weights of the lower (A-) and upper (A+) motional sidebands (s^2)."""

    a_minus: float
    a_plus: float

    @property
    def ratio(self) -> float:
        return self.a_minus / self.a_plus


def sideband_weights(optical: OpticalMode, mech: MechanicalMode, detuning: float) -> SidebandWeights:
    half = 0.5 * optical.kappa
    a_minus = 1.0 / (half**2 + (detuning + mech.omega_m) ** 2)
    a_plus = 1.0 / (half**2 + (detuning - mech.omega_m) ** 2)
    return SidebandWeights(a_minus, a_plus)


def n_min_detailed_balance(weights: SidebandWeights) -> float:
    """Back-action limited occupancy A+/(A- - A+), reservoir neglected."""
    if weights.a_minus <= weights.a_plus:
        raise HeatingRegimeError("A- <= A+: no cooling steady state for this detuning")
    # 1/(r - 1) avoids subtracting two nearly equal large numbers
    return 1.0 / (weights.a_minus / weights.a_plus - 1.0)


def doppler_limit(optical: OpticalMode, mech: MechanicalMode) -> float:
    return optical.kappa / (4.0 * mech.omega_m)


def rsb_limit(optical: OpticalMode, mech: MechanicalMode) -> float:
    return optical.kappa**2 / (16.0 * mech.omega_m**2)


def suppression_db(weights: SidebandWeights) -> float:
    """Stokes suppression A-/A+ in dB."""
    return 10.0 * math.log10(weights.ratio)


def sideband_powers(n: float, weights: SidebandWeights) -> tuple[float, float]:
    """Forward model: (Stokes, anti-Stokes) powers A+(n+1), A- n in arbitrary units."""
    return weights.a_plus * (n + 1.0), weights.a_minus * n


def occupancy_from_sidebands(p_red: float, p_blue: float, weights: SidebandWeights) -> float:
    """Invert measured Stokes (``p_red``) and anti-Stokes (``p_blue``) powers for the occupancy.

    Solves p_red/p_blue = A+(n+1)/(A- n).
    """
    if p_red <= 0 or p_blue <= 0:
        raise ValueError("sideband powers must be > 0")
    denominator = weights.a_minus * p_red - weights.a_plus * p_blue
    if denominator <= 0:
        raise NonPhysicalRatioError(
            f"Stokes/anti-Stokes ratio {p_red / p_blue!r} does not exceed the detailed-balance bound "
            f"A+/A- = {1.0 / weights.ratio!r}"
        )
    return weights.a_plus * p_blue / denominator
