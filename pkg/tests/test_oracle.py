import math

import numpy as np
import pytest

from rsbcool import cavity_field as cf
from rsbcool import oracle
from rsbcool.errors import InvalidParameterError, StepSizeError
from rsbcool.params import OpticalMode

KAPPA = 1.0
OMEGA_M = 22.97


def _mode(coupling=1.0):
    return OpticalMode.from_linewidth(1e3, KAPPA, coupling)


def test_critical_coupling_empties_output():
    power = oracle.dc_transmission_numeric(_mode(), OMEGA_M, 0.0, 0.0)
    assert power < 1e-9


def test_transient_decays_at_half_linewidth():
    opt = _mode()
    traj = oracle.integrate(opt, OMEGA_M, 0.7, 0.0, 10.0 / KAPPA)
    a_ss = 1 / math.sqrt(opt.tau_ex) / (0.5 * KAPPA + 0.7j)
    slope = -np.polyfit(traj.time, np.log(np.abs(traj.amplitude - a_ss)), 1)[0]
    assert slope == pytest.approx(0.5 * KAPPA, rel=0.01)


def test_matches_series_on_lower_sideband():
    opt = _mode(0.5)
    numeric = oracle.dc_transmission_numeric(opt, OMEGA_M, -OMEGA_M, 1.47)
    exact = cf.dc_transmission(-OMEGA_M, 1.47, 0.5, KAPPA, OMEGA_M)
    assert numeric == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("d", [-0.8, 0.0, 0.3, 2.0])
def test_unmodulated_dip(d):
    opt = _mode(0.5)
    numeric = oracle.dc_transmission_numeric(opt, OMEGA_M, d, 0.0)
    assert numeric == pytest.approx(1 - 0.5 / 1.5**2 / (0.25 + d * d), abs=1e-8)


def test_non_integer_averaging_window_leaks_little():
    opt = _mode(0.5)
    beta, d = 1.0, -OMEGA_M
    transient = 40.0 / KAPPA
    periods = 1000.37
    period = 2 * math.pi / OMEGA_M
    traj = oracle.integrate(opt, OMEGA_M, d, beta, transient + periods * period, dt=period / 120)
    tail = traj.transmitted_power[traj.time >= transient]
    exact = cf.dc_transmission(d, beta, 0.5, KAPPA, OMEGA_M)
    # the fractional period contributes at most ripple/N to the mean
    assert abs(tail.mean() - exact) < np.ptp(tail) / periods
    whole = tail[: 1000 * traj.steps_per_period]
    assert abs(whole.mean() - exact) < 1e-6


def test_small_ripple_non_integer_window():
    opt = _mode(0.5)
    beta, d = 0.01, 0.0
    period = 2 * math.pi / OMEGA_M
    traj = oracle.integrate(opt, OMEGA_M, d, beta, 40.0 + 1000.37 * period, dt=period / 80)
    tail = traj.transmitted_power[traj.time >= 40.0]
    assert abs(tail.mean() - cf.dc_transmission(d, beta, 0.5, KAPPA, OMEGA_M)) < 1e-6


def test_fourth_order_convergence():
    opt = _mode(0.5)
    beta, d = 1.2, -OMEGA_M
    a0 = cf.intracavity_field(0.0, beta, d, opt, OMEGA_M)
    period = 2 * math.pi / OMEGA_M
    errors = []
    for steps in (60, 120):
        traj = oracle.integrate(opt, OMEGA_M, d, beta, 5 * period, dt=period / steps, a0=a0)
        exact = cf.intracavity_field(traj.time, beta, d, opt, OMEGA_M)
        errors.append(np.max(np.abs(traj.amplitude - exact)))
    assert errors[0] / errors[1] >= 12.0


def test_energy_bounded_by_resonant_value():
    opt = _mode()
    beta = 1.5
    traj = oracle.integrate(opt, OMEGA_M, 0.0, beta, 40.0 / KAPPA + 20 * 2 * math.pi / OMEGA_M)
    steady = np.abs(traj.amplitude[traj.time > 40.0 / KAPPA]) ** 2
    assert steady.max() <= 1.01 * 4.0 / (opt.tau_ex * KAPPA**2)


def test_trajectory_invariants():
    traj = oracle.integrate(_mode(), OMEGA_M, [0.0, -OMEGA_M], [[0.0], [1.0]], 2.0, keep_every=3)
    assert traj.amplitude.shape[1:] == (2, 2)
    assert np.allclose(np.diff(traj.time), traj.time[1])
    assert np.all(np.isfinite(traj.amplitude))
    assert traj.steps_per_period * traj.dt == pytest.approx(2 * math.pi / OMEGA_M, rel=1e-12)


def test_step_size_guard():
    fast = OMEGA_M * 2.0  # |Delta| + beta Omega_m with beta = 2
    with pytest.raises(StepSizeError):
        oracle.integrate(_mode(), OMEGA_M, 0.0, 2.0, 1.0, dt=2 * math.pi / fast / 19)
    oracle.integrate(_mode(), OMEGA_M, 0.0, 2.0, 1.0, dt=2 * math.pi / fast / 20)
    with pytest.raises(InvalidParameterError):
        oracle.dc_transmission_numeric(_mode(), OMEGA_M, 0.0, 0.0, transient=5.0)
    with pytest.raises(InvalidParameterError):
        oracle.integrate(_mode(), OMEGA_M, 0.0, -1.0, 1.0)
