"""Parameter bundles for the optical mode, mechanical mode, drive laser and bath.

All frequencies are angular (rad/s). Conversion from ordinary frequency
happens only at the command-line boundary.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import constants
from .errors import InvalidParameterError, MissingParameterError

_REL_TOL = 1e-12


def angular(f_hz):
    """Ordinary frequency (Hz) to angular frequency (rad/s)."""
    return 2.0 * math.pi * f_hz


def ordinary(omega):
    """Angular frequency (rad/s) to ordinary frequency (Hz)."""
    return omega / (2.0 * math.pi)


def _positive(name, value):
    if value is None or not np.isfinite(value) or value <= 0:
        raise InvalidParameterError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class OpticalMode:
    """A whispering-gallery optical mode.

    Build it with :meth:`from_linewidth` (kappa, K) or :meth:`from_lifetimes`
    (tau0, tau_ex); the other pair is derived. Direct construction checks
    that ``kappa == 1/tau0 + 1/tau_ex``.

    Attributes
    ----------
    omega0 : float
        Resonance frequency (rad/s).
    kappa : float
        Full width at half maximum (rad/s).
    tau0, tau_ex : float
        Intrinsic and coupling photon lifetimes (s).
    radius : float or None
        Cavity radius (m). Operations that need it raise
        :class:`MissingParameterError` when unset.
    n_index : float
        Refractive index of the cavity material.
    """

    omega0: float
    kappa: float
    tau0: float
    tau_ex: float
    radius: Optional[float] = None
    n_index: float = 1.44

    def __post_init__(self):
        _positive("omega0", self.omega0)
        _positive("kappa", self.kappa)
        _positive("tau0", self.tau0)
        _positive("tau_ex", self.tau_ex)
        _positive("n_index", self.n_index)
        if self.radius is not None:
            _positive("radius", self.radius)
        expected = 1.0 / self.tau0 + 1.0 / self.tau_ex
        if abs(expected - self.kappa) > _REL_TOL * self.kappa:
            raise InvalidParameterError(
                f"kappa={self.kappa!r} inconsistent with lifetimes (1/tau0 + 1/tau_ex = {expected!r})"
            )

    @classmethod
    def from_linewidth(cls, omega0, kappa, coupling=1.0, radius=None, n_index=1.44):
        """Build from linewidth and coupling parameter K = tau0/tau_ex."""
        _positive("kappa", kappa)
        _positive("coupling", coupling)
        tau0 = (1.0 + coupling) / kappa
        tau_ex = (1.0 + coupling) / (coupling * kappa)
        return cls(omega0=omega0, kappa=kappa, tau0=tau0, tau_ex=tau_ex, radius=radius, n_index=n_index)

    @classmethod
    def from_lifetimes(cls, omega0, tau0, tau_ex, radius=None, n_index=1.44):
        _positive("tau0", tau0)
        _positive("tau_ex", tau_ex)
        kappa = 1.0 / tau0 + 1.0 / tau_ex
        return cls(omega0=omega0, kappa=kappa, tau0=tau0, tau_ex=tau_ex, radius=radius, n_index=n_index)

    @classmethod
    def create(cls, omega0, *, kappa=None, coupling=None, tau0=None, tau_ex=None, radius=None, n_index=1.44):
        """Build from exactly one of (kappa, coupling) or (tau0, tau_ex)."""
        linewidth_form = kappa is not None or coupling is not None
        lifetime_form = tau0 is not None or tau_ex is not None
        if linewidth_form == lifetime_form:
            raise InvalidParameterError("give exactly one of (kappa, coupling) or (tau0, tau_ex)")
        if linewidth_form:
            if kappa is None or coupling is None:
                raise InvalidParameterError("both kappa and coupling are required")
            return cls.from_linewidth(omega0, kappa, coupling, radius, n_index)
        if tau0 is None or tau_ex is None:
            raise InvalidParameterError("both tau0 and tau_ex are required")
        return cls.from_lifetimes(omega0, tau0, tau_ex, radius, n_index)

    @property
    def coupling(self) -> float:
        """K = tau0/tau_ex (equivalently 1/(kappa*tau_ex - 1)). K = 1 is critical coupling."""
        return self.tau0 / self.tau_ex

    @property
    def tau(self) -> float:
        """Total photon lifetime 1/kappa."""
        return 1.0 / self.kappa

    def require_radius(self) -> float:
        if self.radius is None:
            raise MissingParameterError("cavity radius is not set for this optical mode")
        return self.radius

    @property
    def finesse(self) -> float:
        """Ring-resonator finesse c/(n R kappa)."""
        return constants.CODATA.c / (self.n_index * self.require_radius() * self.kappa)

    @property
    def round_trip_time(self) -> float:
        return 2.0 * math.pi * self.n_index * self.require_radius() / constants.CODATA.c

    @property
    def wavelength(self) -> float:
        """Vacuum wavelength (m)."""
        return 2.0 * math.pi * constants.CODATA.c / self.omega0

    @property
    def wavelength_medium(self) -> float:
        return self.wavelength / self.n_index

    def with_kappa(self, kappa) -> "OpticalMode":
        """Same mode with a different linewidth at fixed coupling parameter."""
        return OpticalMode.from_linewidth(self.omega0, kappa, self.coupling, self.radius, self.n_index)


@dataclass(frozen=True)
class MechanicalMode:
    """A mechanical mode. ``gamma_m`` and ``m_eff`` may be left unset."""

    omega_m: float
    gamma_m: Optional[float] = None
    m_eff: Optional[float] = None

    def __post_init__(self):
        _positive("omega_m", self.omega_m)
        if self.gamma_m is not None:
            _positive("gamma_m", self.gamma_m)
            if self.omega_m / self.gamma_m <= 1.0:
                raise InvalidParameterError("mechanical quality factor must exceed 1")
        if self.m_eff is not None:
            _positive("m_eff", self.m_eff)

    def require_mass(self) -> float:
        if self.m_eff is None:
            raise MissingParameterError("effective mass is not set for this mechanical mode")
        return self.m_eff

    def require_damping(self) -> float:
        if self.gamma_m is None:
            raise MissingParameterError("mechanical damping is not set for this mechanical mode")
        return self.gamma_m

    @property
    def q_m(self) -> float:
        return self.omega_m / self.require_damping()

    def x_zpf(self, rounded_constants: bool = False) -> float:
        """Zero-point motion sqrt(hbar/(m_eff*omega_m))."""
        hbar = constants.get(rounded_constants).hbar
        return math.sqrt(hbar / (self.require_mass() * self.omega_m))


@dataclass(frozen=True)
class LaserDrive:
    """Drive laser.

    ``s_phi`` and ``s_i`` are white phase-noise (rad^2/Hz) and relative
    intensity-noise (1/Hz) densities. A tabulated phase-noise density
    ``(angular frequencies, values)`` may be given instead; it is linearly
    interpolated where needed.
    """

    power: float
    detuning: float = 0.0
    s_phi: float = 0.0
    s_i: float = 0.0
    s_phi_table: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("power", "s_phi", "s_i"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {value!r}")
        if not np.all(np.isfinite(self.detuning)):
            raise InvalidParameterError("detuning must be finite")
        if self.s_phi_table is not None:
            freqs, values = (np.asarray(a, dtype=float) for a in self.s_phi_table)
            if freqs.shape != values.shape or freqs.ndim != 1 or np.any(np.diff(freqs) <= 0):
                raise InvalidParameterError("s_phi_table needs matching 1-D arrays with increasing frequencies")
            if np.any(values < 0):
                raise InvalidParameterError("phase-noise density must be >= 0")

    def phase_noise_at(self, omega: float) -> float:
        if self.s_phi_table is None:
            return self.s_phi
        freqs, values = self.s_phi_table
        return float(np.interp(omega, freqs, values))


@dataclass(frozen=True)
class Environment:
    temperature: float

    def __post_init__(self):
        _positive("temperature", self.temperature)


@dataclass(frozen=True)
class CouplingFigures:
    """Dimensionless coupling figures of an optical/mechanical pair.

    ``eta`` is None when the radius or effective mass is not known.
    """

    eta: Optional[float]
    resolvedness: float
    coupled_fraction: float


def coupled_fraction(kappa, omega_m):
    """Fraction (4 tau^2 Omega_m^2 + 1)^-1 of launched power coupled at Delta = -Omega_m."""
    return 1.0 / (4.0 * (omega_m / kappa) ** 2 + 1.0)


def derive(optical: OpticalMode, mech: MechanicalMode) -> CouplingFigures:
    eta = None
    if optical.radius is not None and mech.m_eff is not None:
        eta = optical.omega0 * mech.x_zpf() / (mech.omega_m * optical.radius)
    return CouplingFigures(
        eta=eta,
        resolvedness=mech.omega_m / optical.kappa,
        coupled_fraction=coupled_fraction(optical.kappa, mech.omega_m),
    )


class Regime(enum.Enum):
    WEAK = "weak"
    RESOLVED = "resolved"
    DEEPLY_RESOLVED = "deeply-resolved"


class RegimeLabel(NamedTuple):
    regime: Regime
    ratio: float


def classify_regime(optical: OpticalMode, mech: MechanicalMode) -> RegimeLabel:
    ratio = mech.omega_m / optical.kappa
    if ratio < 1.0:
        regime = Regime.WEAK
    elif ratio < 10.0:
        regime = Regime.RESOLVED
    else:
        regime = Regime.DEEPLY_RESOLVED
    return RegimeLabel(regime, ratio)
