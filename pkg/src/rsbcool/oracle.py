"""Brute-force time-domain integration of the driven cavity with a prescribed oscillating radius.

In the frame rotating at the laser frequency the mode amplitude obeys

    da/dt = (-kappa/2 - i (Delta + omega0 x(t)/R)) a + s/sqrt(tau_ex),

with x(t) = x0 sin(Omega_m t), so omega0 x(t)/R = beta Omega_m sin(Omega_m t).
The optical frequency itself never enters. Integration is classical RK4 with
a fixed step that divides the mechanical period exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, StepSizeError
from .params import OpticalMode

POINTS_PER_FASTEST_PERIOD = 80


@dataclass(frozen=True)
class Trajectory:
    """Integration output.

    ``amplitude`` has shape (n_samples, *batch_shape) where the batch shape
    comes from broadcasting ``beta`` and ``detuning``.
    """

    time: np.ndarray
    amplitude: np.ndarray
    transmitted_power: np.ndarray
    steps_per_period: int
    dt: float


def fastest_rate(kappa, omega_m, detuning, beta) -> float:
    detuning = np.abs(np.asarray(detuning, dtype=float))
    beta = np.asarray(beta, dtype=float)
    return float(max(omega_m, kappa, np.max(detuning + beta * omega_m)))


def default_step(kappa, omega_m, detuning, beta, points=POINTS_PER_FASTEST_PERIOD) -> float:
    return 2.0 * math.pi / (points * fastest_rate(kappa, omega_m, detuning, beta))


def integrate(
    optical: OpticalMode,
    omega_m: float,
    detuning,
    beta,
    duration: float,
    dt: float | None = None,
    drive: complex = 1.0,
    a0=0.0,
    keep_every: int = 1,
) -> Trajectory:
    """Integrate the rotating-frame mode equation from ``a0`` over ``duration``.

    ``beta`` and ``detuning`` broadcast against each other; each batch element
    is an independent trajectory sharing the time grid. The step is shrunk
    so that an integer number of steps spans one mechanical period.
    """
    beta = np.asarray(beta, dtype=float)
    detuning = np.asarray(detuning, dtype=float)
    if np.any(beta < 0):
        raise InvalidParameterError("modulation index must be >= 0")
    kappa = optical.kappa
    if duration <= 0:
        raise InvalidParameterError("duration must be > 0")
    fast = fastest_rate(kappa, omega_m, detuning, beta)
    if dt is None:
        dt = default_step(kappa, omega_m, detuning, beta)
    if dt > 2.0 * math.pi / fast / 20.0:
        raise StepSizeError(f"dt={dt!r} exceeds 1/20 of the fastest period {2 * math.pi / fast!r}")
    period = 2.0 * math.pi / omega_m
    steps_per_period = math.ceil(period / dt - 1e-9)
    dt = period / steps_per_period
    n_steps = math.ceil(duration / dt - 1e-9)

    shape = np.broadcast(beta, detuning).shape
    beta_b = np.broadcast_to(beta, shape)
    det_b = np.broadcast_to(detuning, shape)
    source = drive / math.sqrt(optical.tau_ex)
    linear = -0.5 * kappa - 1j * det_b
    coupling = -1j * beta_b * omega_m

    phase = omega_m * dt * np.arange(steps_per_period)
    sin_start = np.sin(phase)
    sin_mid = np.sin(phase + 0.5 * omega_m * dt)
    sin_end = np.sin(phase + omega_m * dt)

    a = np.array(np.broadcast_to(np.asarray(a0, dtype=complex), shape))
    n_keep = n_steps // keep_every + 1
    out = np.empty((n_keep,) + shape, dtype=complex)
    out[0] = a
    half_dt = 0.5 * dt
    k_out = 1
    for step in range(n_steps):
        j = step % steps_per_period
        g0 = linear + coupling * sin_start[j]
        gm = linear + coupling * sin_mid[j]
        g1 = linear + coupling * sin_end[j]
        k1 = g0 * a + source
        k2 = gm * (a + half_dt * k1) + source
        k3 = gm * (a + half_dt * k2) + source
        k4 = g1 * (a + dt * k3) + source
        a = a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (step + 1) % keep_every == 0:
            out[k_out] = a
            k_out += 1
    out = out[:k_out]
    time = dt * keep_every * np.arange(k_out)
    s_out = drive - out / math.sqrt(optical.tau_ex)
    return Trajectory(time, out, np.abs(s_out) ** 2, steps_per_period, dt)


def dc_transmission_numeric(
    optical: OpticalMode,
    omega_m: float,
    detuning,
    beta,
    transient: float | None = None,
    periods: int = 200,
    dt: float | None = None,
    drive: complex = 1.0,
):
    """Mean of |s_out|^2/|s|^2 over ``periods`` whole mechanical periods after a transient.

    The transient (default 40/kappa, never below 20/kappa) is rounded up to
    whole periods.
    """
    kappa = optical.kappa
    if transient is None:
        transient = 40.0 / kappa
    if transient < 20.0 / kappa:
        raise InvalidParameterError("transient must be at least 20/kappa")
    period = 2.0 * math.pi / omega_m
    n_transient = math.ceil(transient / period - 1e-9)
    traj = integrate(optical, omega_m, detuning, beta, (n_transient + periods) * period, dt=dt, drive=drive)
    start = n_transient * traj.steps_per_period
    window = traj.transmitted_power[start : start + periods * traj.steps_per_period]
    result = window.mean(axis=0) / abs(drive) ** 2
    return result if result.ndim else float(result)
