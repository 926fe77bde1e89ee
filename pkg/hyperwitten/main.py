"""Command-line front end: analyze potentials, compute asymptotics, run numeric checks"""

from __future__ import annotations

import argparse
import logging
import math
import pathlib
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Sequence

import colorama

import hyperwitten
from . import numeric_verify, polygon_solver, resource, semiclassical, transfer
from .errors import ConfigError, CountMismatch, HyperWittenError
from .log import configure, log_info
from .transseries import DEFAULT_RATE_TOL, TransSeries, rate_tolerance
from .trigpoly import MorseData, TrigPoly, morse_data
from .util import Format, dumps, get_environment_variables, load_json, thread_cap, to_csv

logger = logging.getLogger(__name__)

PAPER_EXAMPLE = "paper_example.json"
POLYGON_EXAMPLE = "polygon_example.json"
GOLDEN_RATE = 9.0 / (8.0 * math.pi)
GOLDEN_PREFACTOR = 2.0 * math.sqrt(45.0)
GOLDEN_TOL = 1e-10
NO_TUNNELING_NOTE = "no nonzero exponentially small eigenvalue"


class Command(Enum):
    """Constants for the known commands"""

    ANALYZE = "analyze"
    ASYMPTOTICS = "asymptotics"
    NUMERIC = "numeric"
    COMPARE = "compare"
    PAPER_EXAMPLE = "paper-example"
    NEWTON_SOLVE = "newton-solve"


@dataclass(frozen=True)
class RunConfig:
    command: Command
    potential: Optional[pathlib.Path] = None
    series: Optional[pathlib.Path] = None
    h_list: tuple[float, ...] = numeric_verify.DEFAULT_H
    N: int = numeric_verify.DEFAULT_N
    depth: int = polygon_solver.DEFAULT_DEPTH
    eps: Optional[float] = None
    fmt: Format = Format.JSON
    out: Optional[pathlib.Path] = None
    threshold_power: float = numeric_verify.THRESHOLD_POWER
    rate_tol: float = DEFAULT_RATE_TOL
    threads: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.h_list or any(h <= 0 for h in self.h_list):
            raise ConfigError(f"h values must be positive, got {list(self.h_list)}")
        ordered = tuple(sorted(set(self.h_list), reverse=True))
        if ordered != self.h_list:
            object.__setattr__(self, "h_list", ordered)
        if self.N <= 0 or self.N % 2:
            raise ConfigError(f"grid size must be a positive even integer, got {self.N}")
        if self.depth < 1:
            raise ConfigError(f"depth must be at least 1, got {self.depth}")
        if self.eps is not None and self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if not 1.0 < self.threshold_power < 2.0:
            raise ConfigError(f"threshold power must lie in (1, 2), got {self.threshold_power}")
        if not 0.0 < self.rate_tol < 1e-3:
            raise ConfigError(f"rate tolerance must lie in (0, 1e-3), got {self.rate_tol}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("thread cap must be at least 1")


def _parse_h_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text}") from err


def load_potential(config: RunConfig) -> TrigPoly:
    if config.potential is None:
        raise ConfigError(f"{config.command.value} needs --potential")
    with open(config.potential, "r", encoding="utf-8") as stream:
        return TrigPoly.from_json(load_json(stream))


def load_series(config: RunConfig) -> TransSeries:
    if config.series is None:
        return TransSeries.from_json(resource.load(POLYGON_EXAMPLE))
    with open(config.series, "r", encoding="utf-8") as stream:
        return TransSeries.from_json(load_json(stream))


def analyze(md: MorseData, eps: Optional[float] = None) -> dict[str, Any]:
    """MorseData and TunnelingData dump"""
    td = semiclassical.tunneling_data(md)
    report = {
        "potential": md.f.to_json(),
        "morse": md.to_json(),
        "tunneling": semiclassical.tunneling_json(md, td),
    }
    if eps is not None:
        report["connections"] = [
            semiclassical.connection_leading(md, j, eps).to_json() for j in range(1, 2 * md.n + 1)
        ]
    return report


def asymptotics_report(md: MorseData, depth: int) -> dict[str, Any]:
    td = semiclassical.tunneling_data(md)
    reduced = transfer.reduced_quantization_series(td)
    modes = transfer.low_lying(md, depth)
    polygon = polygon_solver.build_polygon(reduced)
    report: dict[str, Any] = {
        "n": md.n,
        "eigenvalues": [mode.to_json() for mode in modes],
        "quantization": reduced.to_json(),
        "polygon": [
            {"e": p.e_deg, "rate": p.rate, "coeff": p.coeff, "h2": p.h2_pow} for p in polygon.points
        ],
    }
    if len(modes) == 1:
        report["note"] = NO_TUNNELING_NOTE
    return report


def _asymptotics_csv(modes: Sequence[dict[str, Any]]) -> str:
    return to_csv(
        ["index", "rate", "prefactor_re", "prefactor_im", "hpow", "corrections"],
        (
            [
                i,
                m["rate"],
                m["prefactor"]["re"],
                m["prefactor"]["im"],
                m["hpow"],
                len(m["corrections"]),
            ]
            for i, m in enumerate(modes)
        ),
    )


def newton_solve(ts: TransSeries, depth: int) -> dict[str, Any]:
    polygon = polygon_solver.build_polygon(ts)
    solutions = polygon_solver.solve(ts, depth)
    return {
        "slopes": list(polygon.slopes),
        "solutions": [s.to_json() for s in solutions],
    }


def paper_example(config: RunConfig) -> tuple[dict[str, Any], bool]:
    """Built-in two-well potential end to end, with the golden comparison"""
    f = TrigPoly.from_json(resource.load(PAPER_EXAMPLE))
    md = morse_data(f)
    modes = transfer.low_lying(md, config.depth)
    tunneling = [m for m in modes if not m.is_zero_mode]
    golden = {"rate": GOLDEN_RATE, "prefactor": GOLDEN_PREFACTOR}
    matches = len(tunneling) == 1 and (
        abs(tunneling[0].rate - GOLDEN_RATE) <= GOLDEN_TOL * GOLDEN_RATE
        and abs(tunneling[0].prefactor - GOLDEN_PREFACTOR) <= GOLDEN_TOL * GOLDEN_PREFACTOR
    )
    report = numeric_verify.verify_asymptotics(
        f, modes, config.h_list, config.N, config.threshold_power, config.threads
    )
    return (
        {
            "golden": golden,
            "eigenvalues": [m.to_json() for m in modes],
            "golden_match": matches,
            "comparison": report.to_json(),
        },
        matches,
    )


def _emit(text: str, out: Optional[pathlib.Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as stream:
            stream.write(text)


def run(config: RunConfig) -> int:
    """Execute one command; return the process exit code"""
    log = log_info(logger, "cli")
    log("%s", config)
    csv = config.fmt == Format.CSV
    with rate_tolerance(config.rate_tol):
        if config.command == Command.NEWTON_SOLVE:
            result = newton_solve(load_series(config), config.depth)
            if csv:
                rows = [
                    [i, j, level["rate"], level["re"], level["im"], level["h2"]]
                    for i, s in enumerate(result["solutions"])
                    for j, level in enumerate(s["levels"])
                ]
                _emit(to_csv(["solution", "level", "rate", "re", "im", "h2"], rows), config.out)
            else:
                _emit(dumps(result), config.out)
            return 0

        if config.command == Command.PAPER_EXAMPLE:
            result, matches = paper_example(config)
            _emit(dumps(result), config.out)
            return 0 if matches else CountMismatch.exit_code

        md = morse_data(load_potential(config))
        if config.command == Command.ANALYZE:
            result = analyze(md, config.eps)
            if csv:
                _emit(
                    to_csv(
                        ["j", "q", "value", "curvature", "kind"],
                        (
                            [j, p.q, p.value, p.curvature, p.kind.value]
                            for j, p in enumerate(md.points, start=1)
                        ),
                    ),
                    config.out,
                )
            else:
                _emit(dumps(result), config.out)
        elif config.command == Command.ASYMPTOTICS:
            result = asymptotics_report(md, config.depth)
            if "note" in result:
                print(result["note"], file=sys.stderr)
            _emit(_asymptotics_csv(result["eigenvalues"]) if csv else dumps(result), config.out)
        elif config.command == Command.NUMERIC:
            results = numeric_verify.sweep(md.f, config.h_list, config.N, md.n + 2, config.threads)
            rows = numeric_verify.eigenvalue_table(results, config.N, config.threshold_power)
            if csv:
                _emit(
                    to_csv(
                        ["h", "N", *(f"lambda{i}" for i in range(md.n + 2))],
                        ([row.h, row.N, *row.eigenvalues] for row in rows),
                    ),
                    config.out,
                )
            else:
                _emit(dumps({"rows": [row.to_json() for row in rows]}), config.out)
        elif config.command == Command.COMPARE:
            modes = transfer.low_lying(md, config.depth)
            try:
                report = numeric_verify.verify_asymptotics(
                    md.f, modes, config.h_list, config.N, config.threshold_power, config.threads
                )
            except CountMismatch as err:
                _emit(err.report.to_csv() if csv else dumps(err.report.to_json()), config.out)
                raise
            _emit(report.to_csv() if csv else dumps(report.to_json()), config.out)
    return 0


def _error(message: str) -> None:
    print(colorama.Fore.RED + message + colorama.Style.RESET_ALL, file=sys.stderr)


def main(prog: Optional[str] = None, argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments and run a command"""

    formatter_class = argparse.ArgumentDefaultsHelpFormatter

    helps = {
        Command.ANALYZE: "locate critical points and dump the tunnelling data",
        Command.ASYMPTOTICS: "asymptotic low-lying eigenvalues",
        Command.NUMERIC: "smallest eigenvalues of the discretized operator",
        Command.COMPARE: "compare asymptotic and numeric eigenvalues",
        Command.PAPER_EXAMPLE: "run the built-in two-well potential end to end",
        Command.NEWTON_SOLVE: "solve a transseries equation with the Newton polygon",
    }

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", type=pathlib.Path, metavar="PATH", help="potential JSON file")
    common.add_argument(
        "--series", type=pathlib.Path, metavar="PATH", help="transseries JSON (newton-solve)"
    )
    common.add_argument(
        "--h",
        type=_parse_h_list,
        default=numeric_verify.DEFAULT_H,
        dest="h_list",
        metavar="LIST",
        help="comma-separated semiclassical parameters",
    )
    common.add_argument(
        "--grid", type=int, default=numeric_verify.DEFAULT_N, dest="N", metavar="N", help="collocation points"
    )
    common.add_argument(
        "--depth", type=int, default=polygon_solver.DEFAULT_DEPTH, metavar="D", help="correction levels"
    )
    common.add_argument("--eps", type=float, metavar="X", help="contour offset for connection coefficients")
    common.add_argument(
        "--format", type=Format, default=Format.JSON, dest="fmt", choices=list(Format), help="output format"
    )
    common.add_argument("--out", type=pathlib.Path, metavar="PATH", help="output file (default stdout)")
    common.add_argument(
        "--threshold-power",
        type=float,
        default=numeric_verify.THRESHOLD_POWER,
        dest="threshold_power",
        help="eigenvalues below h**p count as low-lying",
    )
    common.add_argument(
        "--rate-tol", type=float, default=DEFAULT_RATE_TOL, dest="rate_tol", help="relative rate merge tolerance"
    )
    common.add_argument("--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog=prog)

    parser.add_argument("-v", "--version", help="print version", action="store_true")

    command_action = parser.add_subparsers(dest="command", metavar="action")
    for command, text in helps.items():
        command_action.add_parser(
            command.value, help=text, description=text, parents=[common], formatter_class=formatter_class
        )

    args = parser.parse_args(argv)

    if args.version:
        print(hyperwitten.__version__)
        return 0

    if args.command is None:
        parser.print_help()
        return 1

    env = get_environment_variables()
    verbose = args.verbose or bool(env.WITTEN_DEBUG)
    configure(verbose)

    try:
        config = RunConfig(
            command=Command(args.command),
            potential=args.potential,
            series=args.series,
            h_list=args.h_list,
            N=args.N,
            depth=args.depth,
            eps=args.eps,
            fmt=args.fmt,
            out=args.out,
            threshold_power=args.threshold_power,
            rate_tol=args.rate_tol,
            threads=thread_cap(env),
        )
        return run(config)
    except HyperWittenError as err:
        if verbose:
            logger.exception(err.describe())
        _error(err.describe())
        return err.exit_code
    except OSError as err:
        _error(f"io: {type(err).__name__}: {err}")
        return 1
