"""Command-line front end: every computation as a subcommand with CSV/JSON
output suitable for external plotting.

Exit codes: 0 success, 2 usage error, 3 malformed input data, 4 runtime
domain error.  All floating-point output carries 12 significant digits, and
identical flags (and seed) reproduce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import (
    CutoffOverflow,
    DegenerateLikelihood,
    DomainError,
    InsufficientData,
    SizeExceeded,
    ZeroProbability,
)
from .fisher import total_fisher_approx, total_fisher_exact, total_fisher_ideal
from .optimize import component_scan, fit_power_law, optimize_alpha, optimize_single_component, scaling_scan
from .rotation import full_outcome_distribution
from .simulate import DEFAULT_PHI_STEP, crb_experiment
from .states import (
    DEFAULT_TAIL_TOL,
    LightSource,
    build_amplitude_table,
    squeezed_number_distribution,
)

_EXIT_OK = 0
_EXIT_USAGE = 2
_EXIT_BAD_INPUT = 3
_EXIT_DOMAIN = 4

_DOMAIN_ERRORS = (CutoffOverflow, DegenerateLikelihood, DomainError, SizeExceeded, ZeroProbability)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _round_floats(obj):
    """Limit every float in a JSON-bound structure to 12 significant digits."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _emit_json(obj, path: str | None) -> None:
    _emit(json.dumps(_round_floats(obj), indent=2) + "\n", path)


def _csv_text(header: list[str], rows: list[list]) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _parse_n_res(text: str) -> int | None:
    """Threshold flag value: a nonnegative integer, or the literal 'inf'."""
    if text.strip().lower() == "inf":
        return None
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"n-res must be an integer or 'inf', got {text!r}") from exc
    if value < 0:
        raise argparse.ArgumentTypeError("n-res must be nonnegative")
    return value


def _n_res_json(n_res: int | None):
    return "inf" if n_res is None else n_res


@dataclass(frozen=True)
class RunConfig:
    """Validated common parameters of a single-point computation."""

    n_bar: float
    alpha2: float | None
    n_res: int | None
    phi: float
    tail_tol: float
    grid_step: float
    seed: int | None
    output_format: str
    output_path: str | None

    def __post_init__(self):
        if self.n_bar <= 0:
            raise ValueError("n-bar must be positive")
        if self.alpha2 is not None and not 0.0 <= self.alpha2 <= self.n_bar:
            raise ValueError("alpha2 must lie in [0, n-bar]")
        if not 0.0 < self.tail_tol <= 1e-3:
            raise ValueError("tail-tol must lie in (0, 1e-3]")

    def source(self) -> LightSource:
        if self.alpha2 is None:
            raise ValueError("this command needs --alpha2")
        return LightSource.from_mean_photons(self.n_bar, self.alpha2)


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        n_bar=args.n_bar,
        alpha2=getattr(args, "alpha2", None),
        n_res=getattr(args, "n_res", None),
        phi=getattr(args, "phi", 0.0),
        tail_tol=getattr(args, "tail_tol", DEFAULT_TAIL_TOL),
        grid_step=getattr(args, "grid_step", 0.01),
        seed=getattr(args, "seed", None),
        output_format=getattr(args, "format", "json"),
        output_path=getattr(args, "output", None),
    )


def _cmd_dist(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    src = cfg.source()
    amps = build_amplitude_table(src, cutoff=args.n_max)
    p_coh = np.exp(2.0 * amps.coherent_log)
    p_sq = np.exp(2.0 * amps.squeezed_log)
    p_st = squeezed_number_distribution(src.xi_mag, args.n_max, mode="stirling")
    header = ["n", "p_coherent", "p_squeezed_exact", "p_squeezed_stirling"]
    rows = [[n, float(p_coh[n]), float(p_sq[n]), float(p_st[n])] for n in range(args.n_max + 1)]
    if cfg.output_format == "csv":
        _emit(_csv_text(header, rows), cfg.output_path)
    else:
        _emit_json(
            {"n_bar": cfg.n_bar, "alpha2": cfg.alpha2, "rows": [dict(zip(header, r)) for r in rows]},
            cfg.output_path,
        )
    var_coh = src.n_bar_a  # Poissonian
    var_sq = 2.0 * src.n_bar_b * (src.n_bar_b + 1.0)
    wider = "squeezed wider" if var_sq > var_coh else "coherent wider or equal"
    print(
        f"number variance: coherent {_fmt(var_coh)}, squeezed {_fmt(var_sq)} ({wider})",
        file=sys.stderr,
    )
    return _EXIT_OK


def _cmd_fisher(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    src = cfg.source()
    if args.engine == "ideal":
        _emit_json(
            {
                "engine": "ideal",
                "n_bar": src.n_bar,
                "n_bar_a": src.n_bar_a,
                "n_bar_b": src.n_bar_b,
                "value": total_fisher_ideal(src),
            },
            cfg.output_path,
        )
        return _EXIT_OK
    if args.engine == "approx":
        _emit_json(
            {
                "engine": "approx",
                "n_bar": src.n_bar,
                "n_bar_a": src.n_bar_a,
                "n_bar_b": src.n_bar_b,
                "n_res": _n_res_json(cfg.n_res),
                "value": total_fisher_approx(src, cfg.n_res),
            },
            cfg.output_path,
        )
        return _EXIT_OK
    if cfg.n_res is None:
        amps = build_amplitude_table(src, tail_tol=cfg.tail_tol)
    else:
        amps = build_amplitude_table(src, cutoff=cfg.n_res)
    report = total_fisher_exact(amps, src, cfg.n_res)
    if cfg.output_format == "csv":
        header = ["n", "fisher", "gen_prob", "weighted"]
        rows = [[r.total_n, r.fisher, r.gen_prob, r.weighted] for r in report.per_n]
        _emit(_csv_text(header, rows), cfg.output_path)
        print(
            f"total_exact {_fmt(report.total_exact)}, total_ideal {_fmt(report.total_ideal)}",
            file=sys.stderr,
        )
    else:
        _emit_json(report.to_json_dict(), cfg.output_path)
    return _EXIT_OK


def _cmd_optimize(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    if args.mode == "component":
        opt = optimize_single_component(cfg.n_bar, grid_alpha=cfg.grid_step, n_max=args.n_max)
        payload = {
            "n_bar": cfg.n_bar,
            "n_opt": opt.n_opt,
            "alpha2_opt": opt.alpha2_opt,
            "value": opt.value,
        }
        if cfg.output_format == "csv":
            _emit(_csv_text(list(payload), [list(payload.values())]), cfg.output_path)
        else:
            _emit_json(payload, cfg.output_path)
        return _EXIT_OK
    res = optimize_alpha(
        cfg.n_bar, cfg.n_res, engine=args.engine, grid_step=cfg.grid_step, tail_tol=cfg.tail_tol
    )
    if cfg.output_format == "csv":
        _emit(_csv_text(["alpha2", "objective"], [[a, v] for a, v in res.grid]), cfg.output_path)
        print(f"alpha2_opt {_fmt(res.argmax)}, fq_opt {_fmt(res.max_value)}", file=sys.stderr)
    else:
        _emit_json(
            {
                "n_bar": cfg.n_bar,
                "n_res": _n_res_json(cfg.n_res),
                "engine": args.engine,
                "alpha2_opt": res.argmax,
                "fq_opt": res.max_value,
                "resolution": res.resolution,
                "grid": [[a, v] for a, v in res.grid],
            },
            cfg.output_path,
        )
    return _EXIT_OK


def _n_bar_values(args: argparse.Namespace) -> list[float]:
    if args.spacing == "log":
        vals = np.geomspace(args.n_bar_min, args.n_bar_max, args.n_bar_count)
    else:
        vals = np.linspace(args.n_bar_min, args.n_bar_max, args.n_bar_count)
    return [float(v) for v in vals]


def _cmd_scan(args: argparse.Namespace) -> int:
    n_values = _n_bar_values(args)
    threads = args.threads or 1
    if args.objective == "component":
        rows = component_scan(n_values, grid_alpha=args.grid_step, threads=threads)
        header = ["n_bar", "n_opt", "alpha2_opt", "value"]
        table = [[r.n_bar, r.n_opt, r.alpha2_opt, r.value] for r in rows]
    else:
        factor = None if args.n_res_factor is None else args.n_res_factor
        rows = scaling_scan(
            n_values,
            factor,
            engine=args.engine,
            grid_step=args.grid_step,
            threads=threads,
            tail_tol=args.tail_tol,
        )
        header = ["n_bar", "n_res", "alpha2_opt", "fq_opt", "fq_ideal"]
        table = [
            [r.n_bar, "inf" if r.n_res is None else r.n_res, r.alpha2_opt, r.fq_opt, r.fq_ideal]
            for r in rows
        ]
    if args.format == "json":
        _emit_json(
            {"objective": args.objective, "rows": [dict(zip(header, row)) for row in table]},
            args.output,
        )
    else:
        _emit(_csv_text(header, table), args.output)
    return _EXIT_OK


def _cmd_fit(args: argparse.Namespace) -> int:
    try:
        with open(args.input, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise ValueError("input CSV has no header row")
            y_col = args.y_col
            if y_col is None:
                y_col = "value" if "value" in reader.fieldnames else "fq_opt"
            if args.x_col not in reader.fieldnames or y_col not in reader.fieldnames:
                raise ValueError(
                    f"input CSV must carry columns {args.x_col!r} and {y_col!r}, "
                    f"found {reader.fieldnames}"
                )
            points = [(float(row[args.x_col]), float(row[y_col])) for row in reader]
        fit = fit_power_law(points)
    except (OSError, ValueError, KeyError, InsufficientData) as exc:
        print(f"fit: bad input data: {exc}", file=sys.stderr)
        return _EXIT_BAD_INPUT
    _emit_json(fit.to_json_dict(), args.output)
    return _EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    if cfg.n_res is None:
        raise DomainError("simulate needs a finite --n-res (detectors resolve finitely many photons)")
    run = crb_experiment(
        cfg.source(),
        cfg.n_res,
        true_phi=cfg.phi,
        trials=args.trials,
        repetitions=args.repetitions,
        seed=cfg.seed,
        phi_step=args.phi_step,
    )
    _emit_json(run.to_json_dict(), cfg.output_path)
    if args.estimates_csv:
        _emit(
            _csv_text(["repetition", "estimate"], [[i, e] for i, e in enumerate(run.estimates)]),
            args.estimates_csv,
        )
    return _EXIT_OK


def _cmd_export_outcomes(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    src = cfg.source()
    if cfg.n_res is None:
        raise DomainError("export-outcomes needs a finite --n-res")
    amps = build_amplitude_table(src, cutoff=cfg.n_res)
    dist = full_outcome_distribution(amps, cfg.n_res, cfg.phi)
    rows = [
        [int(n), int(na), int(nb), float(p)]
        for n, na, nb, p in zip(dist.totals, dist.n_a, dist.n_b, dist.probs)
    ]
    _emit(_csv_text(["N", "N_a", "N_b", "probability"], rows), cfg.output_path)
    print(f"overflow_probability {_fmt(dist.overflow_prob)}", file=sys.stderr)
    return _EXIT_OK


def _cmd_export_amplitudes(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    src = cfg.source()
    if args.cutoff is not None:
        amps = build_amplitude_table(src, cutoff=args.cutoff)
    else:
        amps = build_amplitude_table(src, tail_tol=cfg.tail_tol)
    if args.which == "coherent":
        logs, signs = amps.coherent_log, amps.coherent_sign
    else:
        logs, signs = amps.squeezed_log, amps.squeezed_sign
    rows = [[n, float(logs[n]), int(signs[n])] for n in range(amps.cutoff + 1)]
    _emit(_csv_text(["index", "log_magnitude", "sign"], rows), cfg.output_path)
    return _EXIT_OK


def _add_output_flags(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default_format, help="output format")
    p.add_argument("-o", "--output", default=None, help="output path (default: stdout)")


def _add_source_flags(p: argparse.ArgumentParser, alpha2_required: bool = True) -> None:
    p.add_argument("--n-bar", type=float, required=True, help="total mean photon number (photons)")
    p.add_argument(
        "--alpha2",
        type=float,
        required=alpha2_required,
        help="mean photon number of the coherent input (photons); the squeezed "
        "input carries n-bar - alpha2",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzfisher",
        description="Fisher information of a coherent + squeezed-vacuum interferometer "
        "with finite-resolution photon counters",
    )
    parser.add_argument("--config", default=None, help="key = value file of flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="photon-number distributions of both inputs")
    _add_source_flags(p)
    p.add_argument("--n-max", type=int, default=30, help="largest photon number to tabulate")
    _add_output_flags(p, "csv")
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("fisher", help="total Fisher information at a detector threshold")
    _add_source_flags(p)
    p.add_argument("--n-res", type=_parse_n_res, default=None, help="resolution threshold (photons) or 'inf'")
    p.add_argument("--engine", choices=("exact", "approx", "ideal"), default="exact", help="evaluation route")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL, help="marginal tail probability kept outside the table")
    _add_output_flags(p, "json")
    p.set_defaults(func=_cmd_fisher)

    p = sub.add_parser("optimize", help="maximize over the coherent fraction (and component size)")
    _add_source_flags(p, alpha2_required=False)
    p.add_argument("--mode", choices=("alpha", "component"), default="alpha", help="what to maximize")
    p.add_argument("--n-res", type=_parse_n_res, default=None, help="resolution threshold (photons) or 'inf'")
    p.add_argument("--engine", choices=("exact", "approx"), default="exact", help="objective evaluation route")
    p.add_argument("--grid-step", type=float, default=0.01, help="alpha2 grid step in units of n-bar")
    p.add_argument("--n-max", type=int, default=None, help="largest component size scanned (component mode)")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL, help="tail probability for unlimited-resolution tables")
    _add_output_flags(p, "json")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("scan", help="optimum versus mean photon number")
    p.add_argument("--objective", choices=("total", "component"), default="total", help="quantity maximized per n-bar")
    p.add_argument("--n-bar-min", type=float, default=1.0, help="smallest mean photon number (photons)")
    p.add_argument("--n-bar-max", type=float, default=100.0, help="largest mean photon number (photons)")
    p.add_argument("--n-bar-count", type=int, default=100, help="number of scan points")
    p.add_argument("--spacing", choices=("linear", "log"), default="linear", help="scan spacing")
    p.add_argument(
        "--n-res-factor",
        type=float,
        default=None,
        help="threshold as a multiple of n-bar (total objective); omit for unlimited resolution",
    )
    p.add_argument("--engine", choices=("exact", "approx"), default="exact", help="objective evaluation route")
    p.add_argument("--grid-step", type=float, default=0.01, help="alpha2 grid step in units of n-bar")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL, help="tail probability for unlimited-resolution tables")
    p.add_argument("--threads", type=int, default=os.cpu_count(), help="worker pool size")
    _add_output_flags(p, "csv")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("fit", help="power-law fit of a scan CSV")
    p.add_argument("--input", required=True, help="scan CSV path")
    p.add_argument("--x-col", default="n_bar", help="abscissa column name")
    p.add_argument("--y-col", default=None, help="ordinate column name (default: value, else fq_opt)")
    p.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", help="Monte-Carlo counting and maximum-likelihood estimation")
    _add_source_flags(p)
    p.add_argument("--n-res", type=_parse_n_res, required=True, help="resolution threshold (photons); finite")
    p.add_argument("--phi", type=float, default=0.6, help="true interferometer phase (radians, in (0, pi/2))")
    p.add_argument("--trials", type=int, default=10_000, help="clicks per experiment")
    p.add_argument("--repetitions", type=int, default=200, help="independent experiments")
    p.add_argument("--seed", type=int, required=True, help="RNG seed (repetition r uses substream (seed, r))")
    p.add_argument("--phi-step", type=float, default=DEFAULT_PHI_STEP, help="likelihood grid step (radians)")
    p.add_argument("--estimates-csv", default=None, help="also write raw estimates to this CSV path")
    _add_output_flags(p, "json")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("export-outcomes", help="dump the detectable-outcome distribution as CSV")
    _add_source_flags(p)
    p.add_argument("--n-res", type=_parse_n_res, required=True, help="resolution threshold (photons); finite")
    p.add_argument("--phi", type=float, default=0.6, help="interferometer phase (radians)")
    _add_output_flags(p, "csv")
    p.set_defaults(func=_cmd_export_outcomes)

    p = sub.add_parser("export-amplitudes", help="dump one amplitude table as CSV")
    _add_source_flags(p)
    p.add_argument("--which", choices=("coherent", "squeezed"), required=True, help="which table to export")
    p.add_argument("--cutoff", type=int, default=None, help="explicit table cutoff (photons)")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL, help="tail probability when no explicit cutoff")
    _add_output_flags(p, "csv")
    p.set_defaults(func=_cmd_export_amplitudes)

    return parser


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config_defaults(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Install config-file values as defaults so explicit flags still win."""
    if "--config" not in argv:
        return
    pos = argv.index("--config")
    if pos + 1 >= len(argv):
        raise ValueError("--config needs a path")
    values = _load_config_file(argv[pos + 1])
    for sub_action in parser._actions:
        if isinstance(sub_action, argparse._SubParsersAction):  # noqa: SLF001
            for sub_parser in sub_action.choices.values():
                defaults = {}
                for action in sub_parser._actions:  # noqa: SLF001
                    key = action.dest.replace("-", "_")
                    if key in values:
                        raw = values[key]
                        defaults[key] = action.type(raw) if callable(action.type) else raw
                        action.required = False
                if defaults:
                    sub_parser.set_defaults(**defaults)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_defaults(parser, argv)
    except (OSError, ValueError, argparse.ArgumentTypeError) as exc:
        parser.exit(_EXIT_USAGE, f"mzfisher: bad config file: {exc}\n")
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        print(f"mzfisher: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_DOMAIN
    except ValueError as exc:
        parser.exit(_EXIT_USAGE, f"mzfisher: invalid parameters: {exc}\n")
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
