"""Physical constants.

CODATA values are used throughout. ``ROUNDED`` holds two-digit values for
comparison with hand estimates that were made with them.
"""
from dataclasses import dataclass

from scipy import constants as _sc


@dataclass(frozen=True)
class Constants:
    hbar: float
    k_B: float
    c: float
    e: float


CODATA = Constants(hbar=_sc.hbar, k_B=_sc.k, c=_sc.c, e=_sc.e)
ROUNDED = Constants(hbar=1.05e-34, k_B=1.4e-23, c=3.0e8, e=1.6e-19)


def get(rounded_constants: bool = False) -> Constants:
    return ROUNDED if rounded_constants else CODATA
