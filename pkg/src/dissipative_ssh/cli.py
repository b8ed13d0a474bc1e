"""Command-line front end emitting the data files behind every figure.

Subcommands: spectrum | rapidities | occupations | zak | disorder | validate.
All output is assembled in memory and written in a single pass, so a failed
run never leaves a truncated file.  Identical invocations (including seeds)
produce byte-identical output.  Exit codes: 0 success, 1 usage error,
2 computation failure, 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np
import scipy.optimize

from . import effective, thirdq, validate, zak
from .fock import SteadyStateError
from .lattice import (ConfigError, ModelConfig, apply_disorder,
                      sample_symmetric_disorder)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTE = 2
EXIT_VALIDATION = 3

_COMPUTE_ERRORS = (zak.GaplessError, zak.DefectiveFrameError, zak.BranchError,
                   thirdq.PairingError, SteadyStateError, np.linalg.LinAlgError)


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the contract here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message) from None


def parse_angle(text):
    """Radians from 'pi/3', '2pi/3', '3*pi/4', '0.25pi' or a plain decimal."""
    s = str(text).strip().lower().replace(" ", "")
    if "pi" in s:
        m = re.fullmatch(r"([+-]?\d*\.?\d*)\*?pi(?:/([+-]?\d*\.?\d+))?", s)
        if m is None:
            raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
        coef = m.group(1)
        coef = float(coef + "1") if coef in ("", "+", "-") else float(coef)
        return coef * np.pi / (float(m.group(2)) if m.group(2) else 1.0)
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return f"{value:.12e}"
    return str(value)


def _write_table(path, fmt, header, rows, metadata=()):
    """One-shot table writer; csv with # metadata lines, or column-array json."""
    if fmt == "csv":
        lines = [f"# {m}" for m in metadata]
        lines.append(",".join(header))
        lines.extend(",".join(_cell(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        columns = {name: [row[i] for row in rows] for i, name in enumerate(header)}
        text = json.dumps({"metadata": list(metadata), "columns": columns},
                          indent=2) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _config(args) -> ModelConfig:
    return ModelConfig(n=args.n, t=args.t, delta=args.delta, theta=args.theta,
                       gamma=args.gamma, boundary=args.boundary,
                       pattern=args.pattern)


def _gamma_sweep(args):
    """None for single-point runs, else the gamma grid of a sweep."""
    given = [args.gamma_min, args.gamma_max, args.gamma_steps]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        raise ConfigError("--gamma-min, --gamma-max and --gamma-steps go together")
    if args.gamma_steps < 1 or args.gamma_max < args.gamma_min:
        raise ConfigError("empty gamma sweep")
    return np.linspace(args.gamma_min, args.gamma_max, args.gamma_steps)


def _meta(config: ModelConfig, **extra):
    items = {"config": config.to_json()}
    items.update({k: v for k, v in extra.items() if v is not None})
    return [f"{k}={v}" for k, v in items.items()]


def cmd_spectrum(args):
    cfg = _config(args)
    gammas = _gamma_sweep(args)
    if gammas is None:
        spec = effective.complex_spectrum(effective.build_real_space_hamiltonian(cfg))
        rows = [(i, e.real, e.imag) for i, e in enumerate(spec.eigenvalues)]
        header = ("index", "re_E", "im_E")
    else:
        spectra = [effective.complex_spectrum(
            effective.build_real_space_hamiltonian(cfg.replace(gamma=float(g))))
            for g in gammas]
        rows = [(float(g), i, e.real, e.imag)
                for g, spec in zip(gammas, effective.continue_spectra(spectra))
                for i, e in enumerate(spec.eigenvalues)]
        header = ("gamma", "index", "re_E", "im_E")
    _write_table(args.output, args.format, header, rows, _meta(cfg))
    return EXIT_OK


def cmd_rapidities(args):
    cfg = _config(args)
    if args.oracle and not (cfg.pattern == "u2" and cfg.boundary == "periodic"):
        raise ConfigError("--oracle provides the alternating-ring closed form "
                          "and requires pattern u2 on a periodic chain")
    gammas = _gamma_sweep(args)
    single = gammas is None
    rows = []
    for g in ([cfg.gamma] if single else gammas):
        point = cfg.replace(gamma=float(g))
        betas = thirdq.rapidities(thirdq.build_shape_matrix(point)).betas
        if args.oracle:
            oracle = thirdq.analytic_rapidities_u2_ring(point)
            cost = np.abs(betas[:, None] - oracle[None, :])
            _, cols = scipy.optimize.linear_sum_assignment(cost)
            for i, b in enumerate(betas):
                o = oracle[cols[i]]
                rows.append((i, b.real, b.imag, o.real, o.imag) if single
                            else (float(g), i, b.real, b.imag, o.real, o.imag))
        else:
            for i, b in enumerate(betas):
                rows.append((i, b.real, b.imag) if single
                            else (float(g), i, b.real, b.imag))
    header = ("index", "re_beta", "im_beta")
    if args.oracle:
        header = header + ("re_beta_oracle", "im_beta_oracle")
    if not single:
        header = ("gamma",) + header
    _write_table(args.output, args.format, header, rows, _meta(cfg))
    return EXIT_OK


def cmd_occupations(args):
    cfg = _config(args)
    occ_ness = thirdq.ness_occupation(thirdq.ness_covariance(cfg))
    spec = effective.complex_spectrum(effective.build_real_space_hamiltonian(cfg))
    selection = effective.construct_mbs(spec)
    occ_mbs = effective.mbs_occupation(spec, selection)
    rows = [(j, occ_ness[j], occ_mbs[j]) for j in range(cfg.n)]
    meta = _meta(cfg, mbs_unique=selection.unique)
    _write_table(args.output, args.format, ("site", "ness_occ", "mbs_occ"), rows, meta)
    return EXIT_OK


def cmd_zak(args):
    if args.which is None:
        raise ConfigError("--which is required (flag or manifest)")
    if args.pattern == "u1":
        raise ConfigError("Bloch-based Zak phases need a translation-invariant "
                          "pattern; u1 is not")
    base = ModelConfig(n=args.n, t=args.t, delta=args.delta, theta=args.theta,
                       gamma=args.gamma, boundary="periodic", pattern=args.pattern)
    if args.single:
        if args.which == "effective":
            result = zak.effective_zak_phase(base, band_index=0, n_k=args.nk)
        else:
            result = zak.liouvillean_zak_phase(base, n_k=args.nk)
        rows = [(base.theta, base.gamma, result.nu.real, result.nu.imag,
                 result.real_class)]
        meta = _meta(base, which=args.which, n_k=result.n_k,
                     richardson=f"{result.richardson_estimate:.3e}")
    else:
        if args.pattern != "u2":
            raise ConfigError("phase diagrams are defined for the alternating "
                              "pattern u2")
        thetas = np.linspace(args.theta_min, args.theta_max, args.theta_steps)
        gammas = np.linspace(args.diagram_gamma_min, args.diagram_gamma_max,
                             args.diagram_gamma_steps)
        diagram = zak.phase_diagram(base, thetas, gammas, args.which, n_k=args.nk)
        rows = [(float(th), float(g), diagram.re_nu[i, j], diagram.im_nu[i, j],
                 diagram.classes[i][j])
                for i, th in enumerate(thetas) for j, g in enumerate(gammas)]
        meta = _meta(base, which=args.which, n_k=args.nk)
    _write_table(args.output, args.format,
                 ("theta", "gamma", "re_nu", "im_nu", "class"), rows, meta)
    return EXIT_OK


def cmd_disorder(args):
    if args.which is None:
        raise ConfigError("--which is required (flag or manifest)")
    cfg = _config(args)
    kind = args.which
    r_grid = np.linspace(args.r_min, args.r_max, args.r_steps)

    def values_at(realization):
        if kind == "effective":
            h = effective.build_real_space_hamiltonian(cfg, realization)
            vals = np.linalg.eigvals(h)
        else:
            vals = thirdq.rapidities(thirdq.build_shape_matrix(cfg, realization)).betas
        return vals[np.lexsort((vals.imag, vals.real))]

    rows = []
    if args.extreme:
        xi = np.ones(cfg.n_cells)
        for r in r_grid:
            for i, v in enumerate(values_at(apply_disorder(cfg, float(r), xi))):
                rows.append((float(r), -1, i, v.real, v.imag))
    else:
        rng = np.random.default_rng(args.seed)
        for m in range(args.realizations):
            xi = sample_symmetric_disorder(cfg.n_cells, int(rng.integers(2**31)))
            for r in r_grid:
                if not args.reuse_xi:
                    xi = sample_symmetric_disorder(cfg.n_cells,
                                                   int(rng.integers(2**31)))
                for i, v in enumerate(values_at(apply_disorder(cfg, float(r), xi))):
                    rows.append((float(r), m, i, v.real, v.imag))
    value = "E" if kind == "effective" else "beta"
    meta = _meta(cfg, which=kind, seed=None if args.extreme else args.seed,
                 extreme=args.extreme or None)
    _write_table(args.output, args.format,
                 ("R", "realization", "index", f"re_{value}", f"im_{value}"),
                 rows, meta)
    return EXIT_OK


def cmd_validate(args):
    checks = validate.run_validation()
    print(validate.format_report(checks))
    if args.output is not None:
        rows = [(c.name, c.residual, c.tolerance, "pass" if c.passed else "fail")
                for c in checks]
        _write_table(args.output, args.format,
                     ("check", "residual", "tolerance", "status"), rows)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def _build_parser():
    shared = _Parser(add_help=False)
    shared.add_argument("--n", type=int, default=64)
    shared.add_argument("--t", type=float, default=1.0)
    shared.add_argument("--delta", type=float, default=1.0)
    shared.add_argument("--theta", type=parse_angle, default=np.pi / 3,
                        metavar="ANGLE", help="radians; accepts pi fractions like pi/3")
    shared.add_argument("--gamma", type=float, default=0.5)
    shared.add_argument("--pattern", choices=("none", "u1", "u2"), default="u2")
    shared.add_argument("--boundary", choices=("open", "periodic"), default="open")
    shared.add_argument("--nk", type=int, default=2000)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--output", default=None)
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    shared.add_argument("--manifest", default=None,
                        help="JSON run manifest; its entries override flags")

    parser = _Parser(prog="dissipative-ssh",
                     description="Dissipative SSH chains: spectra, rapidities, "
                                 "steady states and complex Zak phases.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[shared],
                       help="effective-Hamiltonian eigenvalues, optional gamma sweep")
    p.add_argument("--gamma-min", type=float, default=None)
    p.add_argument("--gamma-max", type=float, default=None)
    p.add_argument("--gamma-steps", type=int, default=None)

    p = sub.add_parser("rapidities", parents=[shared],
                       help="shape-matrix rapidities, optional gamma sweep")
    p.add_argument("--gamma-min", type=float, default=None)
    p.add_argument("--gamma-max", type=float, default=None)
    p.add_argument("--gamma-steps", type=int, default=None)
    p.add_argument("--oracle", action="store_true",
                   help="co-emit the alternating-ring closed form")

    sub.add_parser("occupations", parents=[shared],
                   help="NESS and MBS site occupation profiles")

    p = sub.add_parser("zak", parents=[shared],
                       help="complex Zak phases on a (theta, gamma) grid")
    p.add_argument("--which", choices=("effective", "liouvillean"),
                   help="required here or in the manifest")
    p.add_argument("--single", action="store_true",
                   help="one cell at --theta/--gamma instead of a grid")
    p.add_argument("--theta-min", type=parse_angle, default=np.pi / 22)
    p.add_argument("--theta-max", type=parse_angle, default=21 * np.pi / 22)
    p.add_argument("--theta-steps", type=int, default=21)
    p.add_argument("--diagram-gamma-min", type=float, default=1.5 / 21)
    p.add_argument("--diagram-gamma-max", type=float, default=1.5)
    p.add_argument("--diagram-gamma-steps", type=int, default=21)

    p = sub.add_parser("disorder", parents=[shared],
                       help="spectra or rapidities under palindromic disorder")
    p.add_argument("--which", choices=("effective", "liouvillean"),
                   help="required here or in the manifest")
    p.add_argument("--realizations", type=int, default=100)
    p.add_argument("--extreme", action="store_true",
                   help="single deterministic realization xi_j = 1")
    p.add_argument("--reuse-xi", action="store_true",
                   help="draw one xi per realization and reuse it across R")
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=0.6)
    p.add_argument("--r-steps", type=int, default=61)

    sub.add_parser("validate", parents=[shared],
                   help="run the oracle cross-validation suite")
    return parser


_MANIFEST_KEYS = {"command", "config", "sweep", "seed", "output_path", "format"}


def _apply_manifest(args):
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    unknown = set(manifest) - _MANIFEST_KEYS
    if unknown:
        raise ConfigError(f"unknown manifest keys: {sorted(unknown)}")
    if "command" in manifest and manifest["command"] != args.command:
        raise ConfigError(
            f"manifest is for {manifest['command']!r}, invoked {args.command!r}")
    for key, value in manifest.get("config", {}).items():
        if key == "theta" and isinstance(value, str):
            value = parse_angle(value)
        if not hasattr(args, key):
            raise ConfigError(f"unknown config key in manifest: {key!r}")
        setattr(args, key, value)
    for key, value in manifest.get("sweep", {}).items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ConfigError(f"unknown sweep key in manifest: {key!r}")
        if dest in ("theta_min", "theta_max") and isinstance(value, str):
            value = parse_angle(value)
        setattr(args, dest, value)
    if "seed" in manifest:
        args.seed = manifest["seed"]
    if "output_path" in manifest:
        args.output = manifest["output_path"]
    if "format" in manifest:
        args.format = manifest["format"]


_HANDLERS = {
    "spectrum": cmd_spectrum,
    "rapidities": cmd_rapidities,
    "occupations": cmd_occupations,
    "zak": cmd_zak,
    "disorder": cmd_disorder,
    "validate": cmd_validate,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_USAGE
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.manifest is not None:
            _apply_manifest(args)
        if args.output is None:
            args.output = f"{args.command}.{args.format}"
        return _HANDLERS[args.command](args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"dissipative-ssh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _COMPUTE_ERRORS as exc:
        print(f"dissipative-ssh: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
