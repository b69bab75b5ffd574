"""Models of resolved-sideband radiation-pressure cooling in optical microresonators.

Internal frequencies are angular (rad/s). Use :func:`params.angular` to
convert from Hz.
"""
from . import cavity_field, constants, cooling, noise, oracle, params, quantum, readout, spectra
from .errors import (
    DegenerateWindowError,
    FitError,
    HeatingRegimeError,
    InvalidParameterError,
    MissingParameterError,
    NonPhysicalRatioError,
    OptomechError,
    PhysicsDomainError,
    RegimeWarning,
    StepSizeError,
    SubZeroPointError,
)
from .params import Environment, LaserDrive, MechanicalMode, OpticalMode, angular, ordinary

__version__ = "0.1.0"
