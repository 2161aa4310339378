"""Batch command-line front end.

Every subcommand is a pure function of (config, seed): it reads a JSON
config, runs one of the module pipelines, and writes CSV/JSON tables into
the output directory with fixed float formatting, so repeated runs with
the same inputs are byte-identical.

Exit codes: 0 success, 1 usage error, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, io_utils
from .acoustics import AcousticMode, delocalization, half_wavelength_mass, \
    mass_model
from .catfit import fit_analytical, fit_css
from .dynamics import SystemParams, characteristic_times, jc_trajectory, \
    lindblad_evolve, pe_trajectory
from .errors import CatsimError, ConfigError
from .hilbert import HilbertSpace, coherent_state, default_cutoff, \
    partial_trace, qubit_state, tensor
from .phase_space import decayed_css_wigner, fit_negativity_decay, negativity, \
    raster_grid, slice_grid, wigner
from .pipeline import ExperimentConfig, cat_decay_time, drive_alpha, \
    free_decay, negativity_grid, prepare_cat, simulate_tomography
from .tomography import DriveCalibration, ReadoutModel, calibrate_drive, \
    calibrate_parity, extract_fock_populations

SCHEMA_VERSION = 1


class _Field:
    def __init__(self, typ, required=False, default=None, desc=""):
        self.typ = typ
        self.required = required
        self.default = default
        self.desc = desc


def _experiment_fields():
    return {
        "g0": _Field(float, default=ExperimentConfig().g0, desc="JC coupling, rad/us"),
        "t_cat": _Field(float, default=ExperimentConfig().t_cat, desc="interaction time, us"),
        "t1_phonon": _Field(float, default=84.0, desc="phonon T1, us"),
        "t1_qubit": _Field(float, default=10.0, desc="qubit T1, us"),
        "t2_qubit": _Field(float, default=10.0, desc="qubit T2, us"),
    }


SCHEMAS = {
    "simulate": {
        "schema_version": _Field(int, required=True),
        "alpha0": _Field(float, required=True, desc="initial coherent amplitude"),
        "g0": _Field(float, default=ExperimentConfig().g0),
        "c_g": _Field(list, default=[1.0, 0.0], desc="qubit ground amplitude [re, im]"),
        "c_e": _Field(list, default=[0.0, 0.0], desc="qubit excited amplitude [re, im]"),
        "t_max": _Field(float, default=10.0, desc="trajectory end time, us"),
        "n_times": _Field(int, default=501),
        "closed": _Field(bool, default=True, desc="skip dissipation channels"),
        "t1_phonon": _Field(float, default=84.0),
        "t1_qubit": _Field(float, default=10.0),
        "t2_qubit": _Field(float, default=10.0),
        "with_states": _Field(bool, default=True,
                              desc="track purity and Bloch components"),
    },
    "qubit-phase-scan": {
        "schema_version": _Field(int, required=True),
        "alpha0": _Field(float, required=True),
        "g0": _Field(float, default=ExperimentConfig().g0),
        "n_phases": _Field(int, default=21),
        "t_max": _Field(float, default=10.0),
        "n_times": _Field(int, default=201),
    },
    "wigner": {
        "schema_version": _Field(int, required=True),
        "state": _Field(str, required=True,
                        desc="'coherent', 'css', 'decayed-css', or 'pipeline'"),
        "alpha": _Field(float, default=1.5, desc="amplitude (real)"),
        "vartheta": _Field(float, default=0.0, desc="CSS superposition phase"),
        "kappa_t": _Field(float, default=0.0,
                          desc="decayed-css: kappa * t of the decay"),
        "drive_amplitude": _Field(float, default=0.35, desc="pipeline preset"),
        "extent": _Field(float, default=3.0),
        "n_grid": _Field(int, default=81),
        **_experiment_fields(),
    },
    "tomo": {
        "schema_version": _Field(int, required=True),
        "drive_amplitude": _Field(float, default=0.35),
        "contrast": _Field(float, default=0.9),
        "offset": _Field(float, default=0.02),
        "shots": _Field(int, default=500),
        "extent": _Field(float, default=2.2),
        "n_grid": _Field(int, default=11),
        "recon_n_max": _Field(int, default=20),
        "seed": _Field(int, default=0),
        **_experiment_fields(),
    },
    "decay": {
        "schema_version": _Field(int, required=True),
        "drive_amplitude": _Field(float, default=0.35),
        "wait_max": _Field(float, default=40.0, desc="longest wait time, us"),
        "n_waits": _Field(int, default=11),
        **_experiment_fields(),
    },
    "mass": {
        "schema_version": _Field(int, required=True),
        "w0_um": _Field(float, default=27.0),
        "length_um": _Field(float, default=435.0),
        "wavelength_um": _Field(float, default=1.7),
        "p": _Field(int, default=0),
        "l": _Field(int, default=0),
        "alpha": _Field(float, default=1.61, desc="cat size for delocalization"),
    },
    "calibrate": {
        "schema_version": _Field(int, required=True),
        "kind": _Field(str, required=True, desc="'drive', 'parity', or 'fock'"),
        "seed": _Field(int, default=0),
        "contrast": _Field(float, default=0.9),
        "offset": _Field(float, default=0.02),
        "shots": _Field(int, default=10000),
        "drive_b": _Field(float, default=0.2, desc="true drive exponent scale"),
        "drive_c": _Field(float, default=1.1, desc="true drive prefactor"),
        "noise": _Field(float, default=0.01, desc="relative noise on samples"),
        "beta": _Field(float, default=1.3, desc="fock: true coherent amplitude"),
        "g0": _Field(float, default=ExperimentConfig().g0),
    },
}


def _load_config(path: str, command: str) -> dict:
    schema = SCHEMAS[command]
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    unknown = sorted(set(data) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
    out = {}
    for name, field in schema.items():
        if name not in data:
            if field.required:
                raise ConfigError(f"missing required config field: {name}")
            out[name] = field.default
            continue
        value = data[name]
        if field.typ is float and isinstance(value, int) \
                and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, field.typ) or isinstance(value, bool) \
                and field.typ is not bool:
            raise ConfigError(
                f"config field {name}: expected {field.typ.__name__}, "
                f"got {type(value).__name__}")
        out[name] = value
    if out["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"config field schema_version: expected {SCHEMA_VERSION}, "
            f"got {out['schema_version']}")
    return out


def _experiment_config(cfg: dict) -> ExperimentConfig:
    return ExperimentConfig(g0=cfg["g0"], t_cat=cfg["t_cat"],
                            t1_phonon=cfg["t1_phonon"],
                            t1_qubit=cfg["t1_qubit"], t2_qubit=cfg["t2_qubit"])


def _schema_json() -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "commands": {}}
    for command, schema in SCHEMAS.items():
        doc["commands"][command] = {
            name: {
                "type": field.typ.__name__,
                "required": field.required,
                "default": field.default,
                "description": field.desc,
            }
            for name, field in schema.items()
        }
    return doc


# -- subcommand bodies -------------------------------------------------------

def _cmd_simulate(cfg, out_dir, seed, log):
    params = SystemParams(
        g0=cfg["g0"], alpha0=cfg["alpha0"],
        c_g=complex(*cfg["c_g"]), c_e=complex(*cfg["c_e"]),
        kappa_phonon=0.0 if cfg["closed"] else 1.0 / cfg["t1_phonon"],
        gamma_qubit=0.0 if cfg["closed"] else 1.0 / cfg["t1_qubit"],
        gamma_phi=0.0 if cfg["closed"] else
        max(1.0 / cfg["t2_qubit"] - 0.5 / cfg["t1_qubit"], 0.0),
    )
    times = np.linspace(0.0, cfg["t_max"], cfg["n_times"])
    if cfg["closed"]:
        traj = jc_trajectory(params, times) if cfg["with_states"] \
            else pe_trajectory(params, times)
    else:
        space = HilbertSpace(default_cutoff(cfg["alpha0"]), has_qubit=True)
        initial = tensor(qubit_state(params.c_g, params.c_e),
                         coherent_state(cfg["alpha0"], space.phonon_only()))
        traj = lindblad_evolve(initial, params, hamiltonian_on=True, times=times)
    traj.to_csv(out_dir / "trajectory.csv")
    if abs(params.alpha0) > 0:
        ct = characteristic_times(params)
        io_utils.write_json(out_dir / "characteristic_times.json", {
            "t_collapse": ct.t_collapse, "t_revival": ct.t_R, "t_cat": ct.t_C,
        })
    log(f"wrote trajectory.csv ({len(times)} times)")


def _cmd_qubit_phase_scan(cfg, out_dir, seed, log):
    times = np.linspace(0.0, cfg["t_max"], cfg["n_times"])
    phases = np.linspace(0.0, 2.0 * math.pi, cfg["n_phases"])
    rows = []
    for phase in phases:
        c_e = complex(math.cos(phase), math.sin(phase)) / math.sqrt(2.0)
        params = SystemParams(g0=cfg["g0"], alpha0=cfg["alpha0"],
                              c_g=1.0 / math.sqrt(2.0), c_e=c_e)
        traj = jc_trajectory(params, times)
        obs = traj.observables
        for i, t in enumerate(times):
            rows.append((phase, t, obs["P_e"][i], obs["sx"][i], obs["sy"][i],
                         obs["sz"][i]))
    io_utils.write_csv(out_dir / "phase_scan.csv",
                       ("phase", "time", "P_e", "sx", "sy", "sz"), rows)
    log(f"wrote phase_scan.csv ({len(rows)} rows)")


def _cmd_wigner(cfg, out_dir, seed, log):
    grid = raster_grid(cfg["extent"], cfg["n_grid"])
    kind = cfg["state"]
    if kind == "coherent":
        space = HilbertSpace(default_cutoff(cfg["alpha"]))
        wg = wigner(coherent_state(cfg["alpha"], space), grid)
    elif kind == "css":
        from .catfit import css_state
        space = HilbertSpace(default_cutoff(cfg["alpha"]))
        wg = wigner(css_state(cfg["alpha"], -cfg["alpha"], cfg["vartheta"],
                              space), grid)
    elif kind == "decayed-css":
        kappa_t = cfg["kappa_t"]
        wg = decayed_css_wigner(cfg["alpha"], 1.0, kappa_t, grid,
                                vartheta=cfg["vartheta"])
    elif kind == "pipeline":
        econf = _experiment_config(cfg)
        alpha0 = drive_alpha(cfg["drive_amplitude"])
        rho = prepare_cat(alpha0, econf, n_max=max(40, default_cutoff(alpha0)))
        wg = wigner(rho, grid)
    else:
        raise ConfigError(
            "config field state: must be 'coherent', 'css', 'decayed-css', "
            "or 'pipeline'")
    wg.to_csv(out_dir / "wigner.csv")
    io_utils.write_json(out_dir / "wigner_meta.json", {
        "state": kind, "extent": cfg["extent"], "n_grid": cfg["n_grid"],
        "negativity": negativity(wg),
    })
    log(f"wrote wigner.csv ({cfg['n_grid']}^2 points)")


def _cmd_tomo(cfg, out_dir, seed, log):
    econf = _experiment_config(cfg)
    alpha0 = drive_alpha(cfg["drive_amplitude"])
    rho = prepare_cat(alpha0, econf, n_max=max(40, default_cutoff(alpha0)))
    model = ReadoutModel(contrast=cfg["contrast"], offset=cfg["offset"],
                         shots=cfg["shots"], seed=seed)
    grid = raster_grid(cfg["extent"], cfg["n_grid"])
    samples, mle = simulate_tomography(rho, model, seed=seed, grid=grid,
                                       recon_n_max=cfg["recon_n_max"])
    samples.to_csv(out_dir / "samples.csv")
    fc = fit_css(mle.state)
    fa = fit_analytical(mle.state, 1.0, 0.0, econf.t_cat, econf.g0)
    io_utils.write_json(out_dir / "reconstruction.json", {
        "drive_amplitude": cfg["drive_amplitude"],
        "alpha0": alpha0,
        "mle_iterations": mle.iterations,
        "mle_converged": mle.converged,
        "log_likelihood": float(mle.log_likelihoods[-1]),
        "css_fit": {
            "alpha1": fc.alpha1, "alpha2": fc.alpha2, "vartheta": fc.vartheta,
            "D": fc.D, "fidelity": fc.fidelity,
        },
        "analytical_fit": {
            "alpha_fit": fa.alpha_fit, "theta": fa.theta,
            "fidelity": fa.fidelity,
        },
    })
    log(f"wrote samples.csv and reconstruction.json (D = {fc.D:.3f})")


def _cmd_decay(cfg, out_dir, seed, log):
    econf = _experiment_config(cfg)
    alpha0 = drive_alpha(cfg["drive_amplitude"])
    waits = np.linspace(0.0, cfg["wait_max"], cfg["n_waits"])
    result = cat_decay_time(alpha0, econf, waits=waits)
    io_utils.write_csv(out_dir / "negativity_decay.csv",
                       ("wait", "negativity"),
                       zip(result.waits, result.negativities))
    io_utils.write_json(out_dir / "decay_fit.json", {
        "drive_amplitude": cfg["drive_amplitude"],
        "alpha0": alpha0,
        "tau_cat": result.fit.tau_cat,
        "amplitude": result.fit.amplitude,
        "offset": result.fit.offset,
        "residual": result.fit.residual,
    })
    log(f"wrote negativity_decay.csv (tau_cat = {result.fit.tau_cat:.2f} us)")


def _cmd_mass(cfg, out_dir, seed, log):
    mode = AcousticMode.from_wavelength(cfg["w0_um"], cfg["length_um"],
                                        cfg["wavelength_um"], p=cfg["p"],
                                        l=cfg["l"])
    doc = {
        "mode": {
            "w0_um": mode.w0_um, "length_um": mode.length_um, "m": mode.m,
            "wavelength_um": mode.wavelength_um,
            "frequency_ghz": mode.omega_p / (2.0 * math.pi * 1e9),
            "rayleigh_um": mode.rayleigh_um,
        },
        "half_wavelength_mass_ng": half_wavelength_mass(mode) * 1e12,
        "conventions": {},
    }
    for convention in ("max", "rms"):
        model = mass_model(mode, convention)
        x_eff, sep = delocalization(model, cfg["alpha"])
        doc["conventions"][convention] = {
            "S0": model.S0,
            "M0_ug": model.M0_ug,
            "M_eff_ug": model.M_eff_ug,
            "x_zpf_m": model.x_zpf_m,
            "x_eff_m": x_eff,
            "separation_m": sep,
        }
    io_utils.write_json(out_dir / "mass.json", doc)
    log("wrote mass.json")


def _cmd_calibrate(cfg, out_dir, seed, log):
    rng = np.random.default_rng(seed)
    kind = cfg["kind"]
    if kind == "drive":
        amps = np.linspace(0.05, 0.4, 15)
        truth = DriveCalibration(B=cfg["drive_b"], C=cfg["drive_c"],
                                 residual=0.0)
        betas = np.array([truth.beta_abs(a) for a in amps])
        noisy = betas * (1.0 + cfg["noise"] * rng.standard_normal(len(amps)))
        fit = calibrate_drive(list(zip(amps, noisy)))
        io_utils.write_csv(out_dir / "drive_samples.csv",
                           ("amplitude", "beta_abs"), zip(amps, noisy))
        io_utils.write_json(out_dir / "drive_fit.json", {
            "B_true": cfg["drive_b"], "C_true": cfg["drive_c"],
            "B_fit": fit.B, "C_fit": fit.C, "residual": fit.residual,
        })
        log(f"wrote drive_fit.json (B = {fit.B:.4f}, C = {fit.C:.4f})")
    elif kind == "parity":
        model = ReadoutModel(contrast=cfg["contrast"], offset=cfg["offset"],
                             shots=cfg["shots"], seed=seed)
        norm = calibrate_parity(model)
        io_utils.write_json(out_dir / "parity_fit.json", {
            "contrast_true": cfg["contrast"], "offset_true": cfg["offset"],
            "amplitude_fit": norm.amplitude, "offset_fit": norm.offset,
        })
        log(f"wrote parity_fit.json (amplitude = {norm.amplitude:.4f})")
    elif kind == "fock":
        beta = cfg["beta"]
        g0 = cfg["g0"]
        space = HilbertSpace(default_cutoff(beta))
        state = coherent_state(beta, space)
        times = np.linspace(0.0, 6.0 * math.pi / g0, 241)
        params = SystemParams(g0=g0, alpha0=beta, c_g=0.0, c_e=1.0)
        # transfer probability out of |e>, which oscillates at 2 g0 sqrt(n+1)
        p_swap = 1.0 - pe_trajectory(params, times).observables["P_e"]
        noisy = np.clip(
            p_swap + cfg["noise"] * rng.standard_normal(len(times)), 0.0, 1.0)
        pops = extract_fock_populations(times, noisy, g0, n_fit=10)
        io_utils.write_csv(out_dir / "rabi_trace.csv", ("time", "P_e"),
                           zip(times, noisy))
        io_utils.write_json(out_dir / "fock_fit.json", {
            "beta_true": beta,
            "beta_fit": pops.beta_abs,
            "populations": list(pops.populations),
            "gamma_d": pops.gamma_d,
        })
        log(f"wrote fock_fit.json (|beta| = {pops.beta_abs:.4f})")
    else:
        raise ConfigError(
            "config field kind: must be 'drive', 'parity', or 'fock'")


COMMANDS = {
    "simulate": _cmd_simulate,
    "qubit-phase-scan": _cmd_qubit_phase_scan,
    "wigner": _cmd_wigner,
    "tomo": _cmd_tomo,
    "decay": _cmd_decay,
    "mass": _cmd_mass,
    "calibrate": _cmd_calibrate,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract
    # reserves 2 for config problems and uses 1 for usage
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="catsim",
                     description="Deterministic batch pipelines for the "
                                 "qubit-phonon cat-state simulations.")
    parser.add_argument("--version", action="store_true",
                        help="print the package version and exit")
    parser.add_argument("--schema", action="store_true",
                        help="print the JSON config schema and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's random seed")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--quiet", action="store_true",
                       help="suppress progress messages")
    return parser


def _resolve_threads() -> int:
    raw = os.environ.get("CATSIM_THREADS")
    if raw is None:
        return 0
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"CATSIM_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"CATSIM_THREADS must be >= 1, got {n}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    return n


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.version:
        print(__version__)
        return 0
    if args.schema:
        print(json.dumps(_schema_json(), sort_keys=True, indent=1))
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1

    def log(message):
        if not args.quiet:
            print(message)

    try:
        _resolve_threads()
        cfg = _load_config(args.config, args.command)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        COMMANDS[args.command](cfg, out_dir, seed, log)
    except ConfigError as exc:
        print(f"catsim: config error: {exc}", file=sys.stderr)
        return 2
    except CatsimError as exc:
        print(f"catsim: numerical failure ({type(exc).__name__}): {exc}",
              file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
