"""Named parameter sets read from an INI file.

The file is chosen by, in order: an explicit path, the ``RSBCOOL_CONFIG``
environment variable, and the bundled ``data/samples.ini``. Values are SI
with frequencies in Hz; they are converted to angular units here.
"""
from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .constants import CODATA
from .errors import InvalidParameterError, MissingParameterError
from .params import Environment, MechanicalMode, OpticalMode, angular
from .readout import ReadoutSetup

ENV_VAR = "RSBCOOL_CONFIG"


@dataclass(frozen=True)
class Sample:
    name: str
    optical: OpticalMode
    mech: MechanicalMode
    env: Optional[Environment] = None
    phase_noise: Optional[float] = None
    cooling_power: Optional[float] = None
    readout: Optional[ReadoutSetup] = None
    quoted_finesse: Optional[float] = None
    description: str = ""

    def require_env(self) -> Environment:
        if self.env is None:
            raise MissingParameterError(f"sample {self.name!r} has no temperature_k")
        return self.env

    def require_readout(self) -> ReadoutSetup:
        if self.readout is None:
            raise MissingParameterError(f"sample {self.name!r} has no [{self.name}.readout] section")
        return self.readout


def load_config(path=None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    path = path or os.environ.get(ENV_VAR)
    if path:
        if not os.path.isfile(path):
            raise InvalidParameterError(f"config file not found: {path}")
        parser.read(path)
    else:
        parser.read_string(resources.files("rsbcool").joinpath("data/samples.ini").read_text())
    return parser


def sample_names(path=None) -> list[str]:
    return [s for s in load_config(path).sections() if "." not in s]


def _get(section, key, required=False) -> Optional[float]:
    if key not in section:
        if required:
            raise MissingParameterError(f"[{section.name}] lacks {key}")
        return None
    return section.getfloat(key)


def load_sample(name: str, path=None) -> Sample:
    parser = load_config(path)
    if name not in parser or "." in name:
        raise InvalidParameterError(f"unknown sample {name!r}; available: {', '.join(sample_names(path))}")
    sec = parser[name]
    wavelength = _get(sec, "wavelength_m", required=True)
    n_index = _get(sec, "n_index") or 1.44
    optical = OpticalMode.from_linewidth(
        2.0 * math.pi * CODATA.c / wavelength,
        angular(_get(sec, "linewidth_hz", required=True)),
        _get(sec, "coupling") or 1.0,
        radius=_get(sec, "radius_m"),
        n_index=n_index,
    )
    damping = _get(sec, "mechanical_damping_hz")
    mech = MechanicalMode(
        angular(_get(sec, "mechanical_frequency_hz", required=True)),
        angular(damping) if damping is not None else None,
        _get(sec, "effective_mass_kg"),
    )
    temperature = _get(sec, "temperature_k")

    readout = None
    ro_name = f"{name}.readout"
    if ro_name in parser:
        ro = parser[ro_name]
        radius = _get(ro, "radius_m") or optical.radius
        if radius is None:
            raise MissingParameterError(f"[{ro_name}] needs radius_m")
        readout = ReadoutSetup.from_finesse(
            _get(ro, "finesse", required=True),
            radius,
            _get(ro, "wavelength_m", required=True),
            _get(ro, "n_index") or n_index,
            _get(ro, "eta_det", required=True),
            _get(ro, "p_cav_w", required=True),
            _get(ro, "p_lo_w") or 1e-3,
            coupling=_get(ro, "coupling") or 1.0,
        )
    return Sample(
        name=name,
        optical=optical,
        mech=mech,
        env=Environment(temperature) if temperature is not None else None,
        phase_noise=_get(sec, "phase_noise_rad2_per_hz"),
        cooling_power=_get(sec, "cooling_power_w"),
        readout=readout,
        quoted_finesse=_get(sec, "quoted_finesse"),
        description=sec.get("description", ""),
    )
