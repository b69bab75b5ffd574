"""Command-line interface.

Frequencies are read and written in Hz; everything else is SI. JSON goes to
stdout unless ``--out`` is given; tabular results are CSV with a ``#`` header.

Exit codes: 0 ok, 2 bad arguments, 3 physics-domain error, 4 fit failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import re
import sys
import warnings

import numpy as np

from . import cavity_field, cooling, io, noise, quantum, readout, spectra, verify
from .errors import FitError, InvalidParameterError, PhysicsDomainError
from .params import Environment, LaserDrive, angular, ordinary
from .presets import load_sample

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_FIT = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-73.5e6" and "-1:0.3,0:0.4" through as values, not flags
        self._negative_number_matcher = re.compile(r"^-\.?\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _range(text):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}")
    return float(lo), float(hi)


def _weights(text):
    pairs = []
    for item in text.split(","):
        order, sep, weight = item.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected order:weight, got {item!r}")
        pairs.append((int(order), float(weight)))
    return pairs


def _emit_json(args, payload):
    io.write_text(getattr(args, "out", None), io.dumps_json(payload))


def _sample(args):
    return load_sample(args.sample, args.config)


# -- commands -----------------------------------------------------------------


def cmd_cooling_rate(args):
    s = _sample(args)
    power = args.power_w if args.power_w is not None else s.cooling_power
    if power is None:
        raise InvalidParameterError("--power-w is required for this sample")
    laser = LaserDrive(power, angular(args.detuning_hz))
    gamma_c = float(cooling.cooling_rate_general(s.optical, s.mech, laser))
    payload = {
        "detuning_hz": args.detuning_hz,
        "power_w": power,
        "gamma_c_hz": ordinary(gamma_c),
        "gamma_max_hz": ordinary(cooling.max_cooling_rate(s.optical, s.mech, power)),
    }
    if s.mech.gamma_m is not None:
        res = cooling.cooling_factor(gamma_c, s.mech, s.optical)
        payload.update(
            gamma_eff_hz=ordinary(res.gamma_eff),
            cooling_factor=res.cooling_factor,
            rate_below_kappa=res.rate_below_kappa,
            below_entropy_bound=res.below_entropy_bound,
            below_q_bound=res.below_q_bound,
            heating=res.heating,
            valid=res.valid,
        )
    _emit_json(args, payload)


def cmd_optimize_detuning(args):
    s = _sample(args)
    d_star = cooling.optimal_detuning(s.optical, s.mech)
    payload = {
        "detuning_hz": ordinary(d_star),
        "detuning_over_omega_m": d_star / s.mech.omega_m,
        "normalized_rate": float(cooling.normalized_rate(d_star, s.optical.kappa, s.mech.omega_m)),
    }
    power = args.power_w if args.power_w is not None else s.cooling_power
    if power is not None and s.optical.radius is not None and s.mech.m_eff is not None:
        payload["power_w"] = power
        payload["gamma_c_hz"] = ordinary(float(cooling.cooling_rate_general(s.optical, s.mech, LaserDrive(power, d_star))))
    _emit_json(args, payload)


def cmd_surface(args):
    s = _sample(args)
    lo, hi = args.kappa_decades
    ratios = np.logspace(lo, hi, args.n_kappa)
    dets = np.linspace(args.detuning_range[0], args.detuning_range[1], args.n_detuning)
    omega_m = s.mech.omega_m
    surf = cooling.cooling_surface(s.optical, s.mech, dets * omega_m, ratios * omega_m)
    kk, dd = np.meshgrid(ratios, dets, indexing="ij")
    header = {"sample": s.name, "mechanical_frequency_hz": ordinary(omega_m), "quantity": "cooling rate / kappa->0 maximum"}
    cols = {"kappa_over_omega_m": kk, "detuning_over_omega_m": dd, "normalized_rate": surf}
    io.write_text(args.out, io.csv_text(cols, header))


def cmd_limits(args):
    s = _sample(args)
    w = quantum.sideband_weights(s.optical, s.mech, angular(args.detuning_hz))
    payload = {
        "detuning_hz": args.detuning_hz,
        "a_minus": w.a_minus,
        "a_plus": w.a_plus,
        "n_min": quantum.n_min_detailed_balance(w),
        "suppression_db": quantum.suppression_db(w),
        "doppler_limit": quantum.doppler_limit(s.optical, s.mech),
        "rsb_limit": quantum.rsb_limit(s.optical, s.mech),
    }
    _emit_json(args, payload)


def cmd_transmission(args):
    s = _sample(args)
    omega_m = s.mech.omega_m
    span = args.span if args.span is not None else args.beta + 3.0
    dets = np.linspace(-span, span, args.points) * omega_m
    scan = cavity_field.transmission_scan(dets, args.beta, s.optical.coupling, s.optical.kappa, omega_m)
    header = {
        "sample": s.name,
        "beta": args.beta,
        "mechanical_frequency_hz": ordinary(omega_m),
        "linewidth_hz": ordinary(s.optical.kappa),
        "coupling": s.optical.coupling,
    }
    io.write_text(args.out, io.csv_text({"detuning_hz": ordinary(dets), "transmission": scan.transmission}, header))


def cmd_fit_beta(args):
    fit = cavity_field.fit_modulation_index(args.weights, beta_max=args.beta_max)
    payload = {"beta": fit.beta, "residual_rms": fit.residual_rms, "alternatives": list(fit.alternatives)}
    if fit.alternatives:
        print(f"warning: other values fit the weights nearly as well: {list(fit.alternatives)}", file=sys.stderr)
    if args.sample:
        s = _sample(args)
        if s.optical.radius is not None:
            payload["x0_m"] = cavity_field.amplitude_from_beta(fit.beta, s.optical, s.mech)
    _emit_json(args, payload)


def cmd_sensitivity(args):
    s = _sample(args)
    ro = s.require_readout()
    freqs = np.linspace(0.0, args.max_freq_hz, args.points)
    x = ro.sensitivity(angular(freqs))
    header = {
        "sample": s.name,
        "finesse": ro.optical.finesse,
        "eta_det": ro.eta_det,
        "p_cav_w": ro.p_cav,
        "linewidth_hz": ordinary(ro.optical.kappa),
        "units": "m/sqrt(Hz)",
    }
    io.write_text(args.out, io.csv_text({"frequency_hz": freqs, "x_min": x}, header))


def cmd_calibrate(args):
    s = _sample(args)
    optical = s.readout.optical if s.readout is not None else s.optical
    dphi = args.dphi_rad if args.dphi_rad is not None else readout.modulation_depth(args.volts, args.deg_per_volt)
    x = readout.calibrate(dphi, angular(args.freq_hz), optical)
    _emit_json(args, {"dphi_rad": dphi, "freq_hz": args.freq_hz, "x_equiv_m": x})


def cmd_budget(args):
    s = _sample(args)
    optical = s.optical
    if args.laser_freq_hz is not None:
        optical = dataclasses.replace(optical, omega0=angular(args.laser_freq_hz))
    s_phi = args.sphi if args.sphi is not None else s.phase_noise
    temp = args.temp_k if args.temp_k is not None else s.require_env().temperature
    power = args.power_w if args.power_w is not None else s.cooling_power
    if s_phi is None or power is None:
        raise InvalidParameterError("--sphi and --power-w are required for this sample")
    env = Environment(temp)
    detuning = angular(args.detuning_hz) if args.detuning_hz is not None else -s.mech.omega_m
    laser = LaserDrive(power, detuning, s_phi=s_phi, s_i=args.s_i)
    budget = noise.effective_occupancy(optical, s.mech, laser, env, rounded_constants=args.rounded_constants)
    payload = budget.to_dict()
    payload["gamma_cool_hz"] = ordinary(payload.pop("gamma_cool"))
    payload["power_w"] = power
    if s_phi > 0:
        payload["p_opt_w"] = noise.optimal_power(env, s.mech, s_phi, optical, args.rounded_constants)
        payload["n_min_noise"] = noise.n_min_noise(env, s.mech, s_phi, optical, rounded_constants=args.rounded_constants)
    _emit_json(args, payload)


def _fit_payload(fit: spectra.LorentzianFit):
    return {
        "center_hz": ordinary(fit.center),
        "width_hz": ordinary(fit.width),
        "variance_m2": fit.variance,
        "background": fit.background,
        "residual_rms": fit.residual_rms,
    }


def _window(args):
    return None if args.window_hz is None else tuple(angular(np.array(args.window_hz)))


def cmd_spectrum_synth(args):
    s = _sample(args)
    mech = s.mech
    gamma_eff = angular(args.gamma_eff_hz) if args.gamma_eff_hz is not None else mech.require_damping()
    t_eff = spectra.temperature_for_occupancy(args.n_f, mech.omega_m)
    modes = [spectra.ModeSpec(mech, t_eff, gamma_eff)]
    for f in args.extra_mode_hz or []:
        extra = dataclasses.replace(mech, omega_m=angular(f), gamma_m=mech.require_damping() * angular(f) / mech.omega_m)
        modes.append(spectra.ModeSpec(extra, args.extra_temp_k, extra.gamma_m))
    lo, hi = args.range_hz
    grid = angular(np.linspace(lo, hi, args.points))
    background = None if args.no_background else s.require_readout().sensitivity
    spec = spectra.synthesize(modes, grid, background)
    header = {"sample": s.name, "n_f": args.n_f, "t_eff_k": t_eff, "gamma_eff_hz": ordinary(gamma_eff)}
    if "signal_to_background_db" in spec.meta:
        header["signal_to_background_db"] = spec.meta["signal_to_background_db"][0]
    io.write_text(args.out, io.spectrum_csv(spec, header))


def cmd_spectrum_fit(args):
    fit = spectra.fit_lorentzian(io.read_spectrum(args.input), _window(args))
    _emit_json(args, _fit_payload(fit))


def cmd_spectrum_occupancy(args):
    s = _sample(args)
    fit = spectra.fit_lorentzian(io.read_spectrum(args.input), _window(args))
    payload = _fit_payload(fit)
    payload["n_f"] = spectra.occupancy_from_spectrum(fit, s.mech)
    _emit_json(args, payload)


def cmd_heterodyne(args):
    s = _sample(args)
    mech = s.mech
    gamma_eff = angular(args.gamma_eff_hz) if args.gamma_eff_hz is not None else mech.require_damping()
    aom = angular(args.aom_hz)
    grid = aom + np.linspace(-args.span, args.span, args.points) * mech.omega_m
    het = spectra.heterodyne_spectrum(angular(args.detuning_hz), args.n, aom, s.optical, mech, gamma_eff, grid)
    header = {
        "sample": s.name,
        "detuning_hz": args.detuning_hz,
        "n": args.n,
        "aom_hz": args.aom_hz,
        "gamma_eff_hz": ordinary(gamma_eff),
        "stokes_power": het.stokes_power,
        "anti_stokes_power": het.anti_stokes_power,
    }
    if het.stokes_power > 0 and het.anti_stokes_power > 0:
        header["stokes_suppression_db"] = het.stokes_suppression_db
    io.write_text(args.out, io.spectrum_csv(het.spectrum, header))


def cmd_verify(args):
    results = verify.run_all()
    for check in results:
        print(check.line())
    passed = sum(c.passed for c in results)
    print(f"{passed}/{len(results)} acceptance criteria passed")
    return EXIT_OK if passed == len(results) else 1


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with sample sections (default: $RSBCOOL_CONFIG or bundled presets)")
    common.add_argument("--out", help="output file (default: stdout)")

    sample = argparse.ArgumentParser(add_help=False)
    sample.add_argument("--sample", required=True, help="sample section name")

    parser = _Parser(prog="rsbcool", description="Resolved-sideband cooling models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cooling-rate", parents=[common, sample], help="cooling rate and cooling factor")
    p.add_argument("--detuning-hz", type=float, required=True)
    p.add_argument("--power-w", type=float)
    p.set_defaults(func=cmd_cooling_rate)

    p = sub.add_parser("optimize-detuning", parents=[common, sample], help="detuning maximising the cooling rate")
    p.add_argument("--power-w", type=float)
    p.set_defaults(func=cmd_optimize_detuning)

    p = sub.add_parser("surface", parents=[common, sample], help="normalized cooling rate over detuning and linewidth")
    p.add_argument("--kappa-decades", type=_range, default=(-2.0, 1.0), help="log10(kappa/Omega_m) range a:b")
    p.add_argument("--detuning-range", type=_range, default=(-3.0, 0.0), help="Delta/Omega_m range a:b")
    p.add_argument("--n-kappa", type=int, default=61)
    p.add_argument("--n-detuning", type=int, default=121)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("limits", parents=[common, sample], help="occupancy limits from sideband weights")
    p.add_argument("--detuning-hz", type=float, required=True)
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("transmission", parents=[common, sample], help="DC transmission of an oscillating cavity")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--span", type=float, help="half-width of the scan in units of Omega_m (default beta + 3)")
    p.add_argument("--points", type=int, default=2001)
    p.set_defaults(func=cmd_transmission)

    p = sub.add_parser("fit-beta", parents=[common], help="modulation index from sideband dip weights")
    p.add_argument("--weights", type=_weights, required=True, help="n0:w0,n1:w1,...")
    p.add_argument("--sample", help="sample for converting beta to an amplitude")
    p.add_argument("--beta-max", type=float, default=5.0)
    p.set_defaults(func=cmd_fit_beta)

    p = sub.add_parser("sensitivity", parents=[common, sample], help="shot-noise displacement sensitivity")
    p.add_argument("--max-freq-hz", type=float, default=100e6)
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("calibrate", parents=[common, sample], help="displacement equivalent of a phase modulation")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--dphi-rad", type=float)
    g.add_argument("--volts", type=float, help="modulator drive; converted with --deg-per-volt")
    p.add_argument("--deg-per-volt", type=float, default=17.0)
    p.add_argument("--freq-hz", type=float, required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("budget", parents=[common, sample], help="laser-noise heating budget")
    p.add_argument("--power-w", type=float)
    p.add_argument("--sphi", type=float, help="phase-noise density (rad^2/Hz)")
    p.add_argument("--s-i", type=float, default=0.0, help="relative intensity-noise density (1/Hz)")
    p.add_argument("--temp-k", type=float)
    p.add_argument("--detuning-hz", type=float, help="default: -Omega_m/2pi")
    p.add_argument("--laser-freq-hz", type=float, help="optical frequency override")
    p.add_argument("--rounded-constants", action="store_true", help="use rounded hbar and k_B")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("spectrum", help="displacement spectra: synth, fit, occupancy")
    ssub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = ssub.add_parser("synth", parents=[common, sample])
    q.add_argument("--n-f", type=float, required=True, help="occupancy of the main mode")
    q.add_argument("--gamma-eff-hz", type=float, help="effective damping (default: intrinsic)")
    q.add_argument("--range-hz", type=_range, required=True, help="frequency range a:b")
    q.add_argument("--points", type=int, default=20001)
    q.add_argument("--extra-mode-hz", type=float, action="append", help="additional mode at the reservoir temperature")
    q.add_argument("--extra-temp-k", type=float, default=300.0)
    q.add_argument("--no-background", action="store_true")
    q.set_defaults(func=cmd_spectrum_synth)
    for name, func, needs_sample in (("fit", cmd_spectrum_fit, False), ("occupancy", cmd_spectrum_occupancy, True)):
        q = ssub.add_parser(name, parents=[common, sample] if needs_sample else [common])
        q.add_argument("--in", dest="input", required=True, help="spectrum CSV")
        q.add_argument("--window-hz", type=_range)
        q.set_defaults(func=func)

    p = sub.add_parser("heterodyne", parents=[common, sample], help="motional sideband beat spectrum")
    p.add_argument("--detuning-hz", type=float, required=True)
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--aom-hz", type=float, required=True)
    p.add_argument("--gamma-eff-hz", type=float)
    p.add_argument("--span", type=float, default=1.5, help="half-width around the AOM frequency in units of Omega_m")
    p.add_argument("--points", type=int, default=20001)
    p.set_defaults(func=cmd_heterodyne)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            warnings.showwarning = _show_warning
            code = args.func(args)
    except PhysicsDomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except FitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FIT
    except (InvalidParameterError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK if code is None else code


def _show_warning(message, category, filename, lineno, file=None, line=None):
    sys.stderr.write(f"warning: {message}\n")


if __name__ == "__main__":
    sys.exit(main())
