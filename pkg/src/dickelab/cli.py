"""Command-line front end: one subcommand per figure, each writing a plot-ready data file.

Frequencies are in units of the field frequency (fixed to 1).  Every
command accepts ``--config FILE`` with ``key = value`` lines; flags given on
the command line override the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coherent import universal_curve
from .criticality import Method, TableSettings, fit_power_law, gamma_c_table
from .dynamics import EvolutionSpec, evolve, rabi_frequency, resonant_params
from .eigen import NU_MAX_CAP
from .hamiltonian import HilbertSpec, build_hamiltonian, build_hamiltonian_rwa
from .model import ModelParams, Parity, gamma_critical
from .records import DataFile
from .scans import METHODS, phase_scan

log = logging.getLogger("dickelab")

DESK_LADDERS = {
    "exact-even": "5,10,20,40,80,160",
    "exact-odd": "5,10,20,40,80,160",
    "sas": ",".join(str(j) for j in range(10, 201, 10)),
}


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [t.strip().lower() for t in str(text).split(",") if t.strip()]


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--tol", type=_positive, default=1e-10, help="per-particle energy tolerance")
    p.add_argument("--nu-max-cap", type=int, default=NU_MAX_CAP, help="largest Fock cutoff tried")
    p.add_argument("--threads", type=int, default=1, help="worker processes for scans over j")


def _gamma_range(p, lo: float, hi: float, steps: int) -> None:
    p.add_argument("--gamma-min", type=float, default=lo)
    p.add_argument("--gamma-max", type=float, default=hi)
    p.add_argument("--gamma-steps", type=int, default=steps)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickelab",
        description=(
            "Finite-N Dicke model phase transition by exact diagonalization, coherent states "
            "and symmetry-adapted states. Frequencies are in units of the field frequency "
            "(omega_F = 1); omega_a is the atomic frequency ratio."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("separatrix", help="critical coupling against atomic frequency")
    _common(p)
    p.add_argument("--omega-a-min", type=_positive, default=0.1)
    p.add_argument("--omega-a-max", type=_positive, default=4.0)
    p.add_argument("--omega-a-steps", type=int, default=40)
    p.set_defaults(func=cmd_separatrix)

    for name, func, lo, hi, steps, methods, help_ in (
        ("universal-curve", cmd_universal_curve, 0.3, 1.5, 25, "cs,sas,exact", "q_c/sqrt(N) against theta_c"),
        ("quadrature-scan", cmd_quadrature_scan, 0.1, 1.0, 37, "cs,sas,exact", "q_c/sqrt(N) against gamma"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--omega-a", type=_positive, default=1.0)
        p.add_argument("--n-atoms", type=int, default=20)
        _gamma_range(p, lo, hi, steps)
        p.add_argument("--method", type=_str_list, default=methods, help=f"comma list from {METHODS}")
        p.add_argument("--sector", type=_str_list, default="even,odd")
        p.set_defaults(func=func)

    p = sub.add_parser("exponent", help="gamma_c(j) table and power-law fit")
    _common(p)
    p.add_argument("--omega-a", type=_positive, default=1.0)
    p.add_argument("--method", choices=("exact", "sas"), default="exact")
    p.add_argument("--sector", choices=("even", "odd"), default="even")
    p.add_argument("--j-list", type=_float_list, default=None, help="comma list of j = N/2")
    p.add_argument("--delta-gamma", type=_positive, default=1e-4)
    p.add_argument("--grid-points", type=int, default=16)
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("dynamics", help="excited-atom evolution, full model and rotating-wave")
    _common(p)
    p.add_argument(
        "--atomic-frequency",
        type=_positive,
        default=1.0,
        help="atomic (= field) frequency in units of the Rabi frequency",
    )
    p.add_argument("--n-atoms", type=int, default=1)
    p.add_argument("--duration", type=_positive, default=10.0, help="in units of 1/Omega")
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--nu-max", type=int, default=60)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("matrix", help="dump the Hamiltonian in coordinate format")
    _common(p)
    p.add_argument("--omega-a", type=_positive, default=1.0)
    p.add_argument("--gamma", type=float, required=False, default=0.5)
    p.add_argument("--n-atoms", type=int, default=2)
    p.add_argument("--nu-max", type=int, default=20)
    p.add_argument("--sector", choices=("even", "odd", "all"), default="all")
    p.add_argument("--rwa", action="store_true")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("repro", help="write the desk-scale data for every figure into a directory")
    _common(p)
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--quick", action="store_true", help="short j ladders and coarse gamma grids")
    p.set_defaults(func=cmd_repro)
    return parser


# --- commands ------------------------------------------------------------------

_SKIP = {"func", "config", "out", "format", "verbose", "command", "out_dir"}


def _metadata(args: argparse.Namespace, **extra) -> dict:
    meta = {k: v for k, v in vars(args).items() if k not in _SKIP}
    meta["version"] = __version__
    meta["omega_f"] = 1.0
    meta.update(extra)
    return meta


def _gammas(args) -> np.ndarray:
    if args.gamma_steps < 1 or args.gamma_max < args.gamma_min:
        raise ValueError("invalid gamma range")
    return np.linspace(args.gamma_min, args.gamma_max, args.gamma_steps)


def cmd_separatrix(args) -> DataFile:
    if args.omega_a_steps < 2 or args.omega_a_max <= args.omega_a_min:
        raise ValueError("invalid omega_a range")
    grid = np.linspace(args.omega_a_min, args.omega_a_max, args.omega_a_steps)
    if not np.any(np.isclose(grid, 1.0)) and args.omega_a_min <= 1.0 <= args.omega_a_max:
        grid = np.sort(np.append(grid, 1.0))
    rows = [[float(w), gamma_critical(float(w))] for w in grid]
    return DataFile("separatrix", _metadata(args), ["omega_a", "gamma_c"], rows)


def _phase_rows(args) -> list:
    for m in args.method:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    sectors = [Parity.parse(s) for s in args.sector]
    return phase_scan(
        args.omega_a, args.n_atoms, _gammas(args), args.method, sectors, args.tol, args.nu_max_cap
    )


def cmd_universal_curve(args) -> DataFile:
    rows = [
        [r.method, r.sector, r.gamma, r.theta, r.q_over_sqrt_n, _curve_or_nan(r.theta, args.omega_a)]
        for r in _phase_rows(args)
    ]
    cols = ["method", "sector", "gamma", "theta", "q_over_sqrtN", "universal_q_over_sqrtN"]
    return DataFile("universal-curve", _metadata(args), cols, rows)


def _curve_or_nan(theta: float, omega_a: float) -> float:
    return universal_curve(theta, omega_a) if 0 <= theta < math.pi / 2 else float("nan")


def cmd_quadrature_scan(args) -> DataFile:
    rows = [[r.method, r.sector, r.gamma, r.q_over_sqrt_n, r.theta, r.energy] for r in _phase_rows(args)]
    cols = ["method", "sector", "gamma", "q_over_sqrtN", "theta", "energy_per_particle"]
    return DataFile("quadrature-scan", _metadata(args), cols, rows)


def cmd_exponent(args) -> DataFile:
    method = Method.SAS if args.method == "sas" else Method.parse(args.sector)
    if args.j_list is None:
        args.j_list = _float_list(DESK_LADDERS[method.value])
    settings = TableSettings(
        omega_a=args.omega_a,
        delta_gamma=args.delta_gamma,
        grid_points=args.grid_points,
        tol=args.tol,
        nu_max_cap=args.nu_max_cap,
        threads=args.threads,
    )
    table = gamma_c_table(args.j_list, method, settings)
    fit = fit_power_law(table, gamma_critical(args.omega_a))
    meta = _metadata(args, resolved_method=method.value, settings=settings.as_dict())
    rows = [[float(j), float(g), float(g - gamma_critical(args.omega_a))] for j, g in table]
    return DataFile("exponent", meta, ["j", "gamma_c", "gamma_c_minus_limit"], rows, fit.as_dict())


def cmd_dynamics(args) -> DataFile:
    params = resonant_params(args.atomic_frequency, args.n_atoms)
    runs = {}
    for rwa in (False, True):
        runs[rwa] = evolve(params, EvolutionSpec(args.duration, args.samples, rwa, args.nu_max))
    t = runs[False].times
    rows = [
        [float(t[i]), float(runs[False].p_excited[i]), float(runs[True].p_excited[i])]
        for i in range(len(t))
    ]
    gap = float(np.max(np.abs(runs[False].p_excited - runs[True].p_excited)))
    meta = _metadata(args, gamma=params.gamma, omega_a=params.omega_a, rabi=rabi_frequency(params))
    return DataFile("dynamics", meta, ["t_rabi", "p_full", "p_rwa"], rows, {"max_deviation": gap})


def cmd_matrix(args) -> str:
    params = ModelParams(args.omega_a, args.gamma, args.n_atoms)
    sector = None if args.sector == "all" else Parity.parse(args.sector)
    spec = HilbertSpec.for_params(params, args.nu_max, sector)
    mat = (build_hamiltonian_rwa if args.rwa else build_hamiltonian)(params, spec)
    rows = mat.entries()
    return f"{mat.dim} {len(rows)}\n" + "".join(f"{r} {c} {v!r}\n" for r, c, v in rows)


def cmd_repro(args) -> str:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    parser = build_parser()
    ext = args.format
    common = ["--format", ext, "--tol", str(args.tol), "--nu-max-cap", str(args.nu_max_cap)]
    jobs = [
        ("dynamics_resonant_1", ["dynamics", "--atomic-frequency", "1"]),
        ("dynamics_resonant_19", ["dynamics", "--atomic-frequency", "19"]),
        ("separatrix", ["separatrix"]),
        ("quadrature_cs", ["quadrature-scan", "--method", "cs", "--gamma-min", "0", "--gamma-max", "1.5"]),
        ("quadrature_sas_n20", ["quadrature-scan", "--method", "sas", "--gamma-min", "0.3", "--gamma-max", "1.0", "--gamma-steps", "71"]),
        ("universal_n20", ["universal-curve", "--method", "cs,sas"]),
        ("quadrature_n20", ["quadrature-scan", "--n-atoms", "20"]),
        ("quadrature_n60", ["quadrature-scan", "--n-atoms", "60"]),
        ("universal_n60", ["universal-curve", "--n-atoms", "60"]),
    ]
    ladders = [("exact", "even", "exponent_exact_even"), ("exact", "odd", "exponent_exact_odd"), ("sas", "even", "exponent_sas")]
    if args.quick:
        jobs = [(n, a + ["--gamma-steps", "8"] if a[0].endswith(("-scan", "-curve")) else a) for n, a in jobs]
    for method, sector, name in ladders:
        argv = ["exponent", "--method", method, "--sector", sector]
        if args.quick:
            argv += ["--j-list", "5,10,20" if method == "exact" else "10,20,40,80"]
        jobs.append((name, argv))
    written = []
    for name, argv in jobs:
        target = out / f"{name}.{ext}"
        sub_args = parser.parse_args(argv + common + ["--out", str(target)])
        log.info("repro: %s", name)
        _emit(sub_args.func(sub_args), sub_args)
        written.append(str(target))
    return "".join(f"{w}\n" for w in written)


# --- plumbing -------------------------------------------------------------------


def _read_config(path: str) -> dict[str, str]:
    values = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{n}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        cfg = _read_config(args.config)
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for action in sub._actions:
            if action.dest in cfg and isinstance(action, argparse._StoreTrueAction):
                cfg[action.dest] = cfg[action.dest].lower() in ("1", "true", "yes")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def _emit(result, args) -> None:
    text = result.render(args.format) if isinstance(result, DataFile) else result
    if args.out == "-" or getattr(args, "command", None) == "repro":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = _apply_config(parser, argv)
    except ValueError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return 2
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        _emit(args.func(args), args)
    except Exception as exc:  # reported as one machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
