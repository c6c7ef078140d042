"""Command-line front end.

Subcommands: ``entangle`` (single parameter point), ``sweep`` (theta or phi
grid), ``export-qasm`` and ``gen-graph``. Result rows are CSV.
Exit codes: 0 ok, 1 usage, 2 bad input, 3 statevector size cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import analytic_entanglement
from .circuit import append_measurement, build_preparation_circuit, export_openqasm
from .errors import GraphentError, ResourceError
from .graph import GRAPH_KINDS, Graph, degree, generate_named, parse_edge_list, serialize_edge_list
from .measurement import (
    DEFAULT_SHOTS,
    NoiseModel,
    bundled_calibration,
    estimate_entanglement,
    estimate_entanglement_noisy,
    load_calibration,
)
from .statevector import PrepParams, StateVector, check_size, exact_entanglement, prepare_graph_state

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

CSV_HEADER = (
    "graph", "qubit", "degree", "theta", "phi", "alpha",
    "e_analytic", "e_exact", "e_sampled", "e_sampled_err", "shots", "seed",
)
MODES = ("analytic", "exact", "sampled")
BUNDLED_CALIB_NAMES = ("bundled", "athens", "ibmq_athens")
DEFAULT_NAMED_SIZE = {"claw": 4}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_ANGLE = re.compile(r"^([+-]?)(\d+(?:\.\d*)?|\.\d+)?\*?pi(?:/(\d+(?:\.\d*)?))?$")


def parse_angle(text: str) -> float:
    """Radians from ``pi``, ``2pi``, ``-pi/4``, ``3*pi/2`` or a decimal literal."""
    t = text.strip().replace(" ", "").lower()
    m = _ANGLE.match(t)
    if m is None:
        try:
            value = float(t)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None
        if not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"angle must be finite, got {text!r}")
        return value
    sign, factor, divisor = m.groups()
    value = math.pi
    if factor is not None:
        value = float(factor) * math.pi
    if divisor is not None:
        if float(divisor) == 0.0:
            raise argparse.ArgumentTypeError(f"division by zero in angle {text!r}")
        value /= float(divisor)
    return -value if sign == "-" else value


def load_graph(source: str) -> Graph:
    """``kind[:n]`` for a named family or ``file:<path>`` for an edge list."""
    if source.startswith("file:"):
        return parse_edge_list(Path(source[5:]).read_text(encoding="utf-8"))
    kind, _, size = source.partition(":")
    if kind not in GRAPH_KINDS:
        raise UsageError(f"unknown graph source {source!r}; use file:<path> or one of {', '.join(GRAPH_KINDS)}")
    if not size:
        if kind not in DEFAULT_NAMED_SIZE:
            raise UsageError(f"graph {kind!r} needs a size, e.g. {kind}:5")
        return generate_named(kind, DEFAULT_NAMED_SIZE[kind])
    if not size.isdecimal():
        raise UsageError(f"invalid graph size in {source!r}")
    return generate_named(kind, int(size))


def _load_noise(calib: str | None) -> NoiseModel | None:
    if calib is None:
        return None
    if calib in BUNDLED_CALIB_NAMES and not Path(calib).exists():
        return bundled_calibration()
    return load_calibration(calib)


def _parse_modes(text: str) -> tuple[str, ...]:
    modes = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in modes if m not in MODES]
    if bad or not modes:
        raise argparse.ArgumentTypeError(f"modes must be a comma list drawn from {', '.join(MODES)}")
    return modes


def _parse_qubit(text: str) -> int | None:
    if text == "all":
        return None
    if not text.isdecimal():
        raise argparse.ArgumentTypeError(f"qubit must be an index or 'all', got {text!r}")
    return int(text)


@dataclass
class ResultRow:
    graph_name: str
    qubit: int
    degree: int
    theta: float
    phi: float
    alpha: float
    e_analytic: float | None = None
    e_exact: float | None = None
    e_sampled: float | None = None
    e_sampled_err: float | None = None
    shots: int | None = None
    seed: int | None = None

    def csv_fields(self) -> list[str]:
        return ["" if v is None else repr(v) if isinstance(v, float) else str(v)
                for v in (getattr(self, f.name) for f in fields(self))]


@dataclass
class RunConfig:
    graph_name: str
    graph: Graph
    qubits: list[int]
    modes: tuple[str, ...]
    shots: int
    seed: int
    noise: NoiseModel | None
    gate_noise: bool
    trajectories: int


def _point_rows(cfg: RunConfig, params: PrepParams, first_row: int) -> list[ResultRow]:
    """All rows for one parameter point; row k samples with seed ``seed + 3 * (first_row + k)``."""
    state: StateVector | None = None
    if "exact" in cfg.modes or ("sampled" in cfg.modes and not cfg.gate_noise):
        state = prepare_graph_state(cfg.graph, params)
    rows = []
    for k, q in enumerate(cfg.qubits):
        n_l = degree(cfg.graph, q)
        row = ResultRow(cfg.graph_name, q, n_l, params.theta, params.phi, params.alpha)
        if "analytic" in cfg.modes:
            row.e_analytic = analytic_entanglement(n_l, params.phi, params.theta)
        if "exact" in cfg.modes:
            row.e_exact = exact_entanglement(state, q)
        if "sampled" in cfg.modes:
            row_seed = cfg.seed + 3 * (first_row + k)
            if cfg.gate_noise:
                est, err = estimate_entanglement_noisy(
                    cfg.graph, params, q, cfg.shots, row_seed, cfg.noise, cfg.trajectories
                )
            else:
                est, err = estimate_entanglement(state, q, cfg.shots, row_seed, cfg.noise)
            row.e_sampled, row.e_sampled_err = est, err
            row.shots, row.seed = cfg.shots, row_seed
        rows.append(row)
    return rows


def compute_rows(cfg: RunConfig, points: list[PrepParams], jobs: int = 1) -> list[ResultRow]:
    """Rows for every point in order; points may be evaluated concurrently."""
    if "exact" in cfg.modes or "sampled" in cfg.modes:
        check_size(cfg.graph.n_vertices)
    per_point = len(cfg.qubits)
    tasks = [(p, i * per_point) for i, p in enumerate(points)]
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda t: _point_rows(cfg, *t), tasks))
    else:
        chunks = [_point_rows(cfg, *t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def format_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _run_config(args, graph: Graph) -> RunConfig:
    if args.qubit is None:
        qubits = list(range(graph.n_vertices))
    else:
        if args.qubit >= graph.n_vertices:
            raise UsageError(f"qubit {args.qubit} out of range for a {graph.n_vertices}-vertex graph")
        qubits = [args.qubit]
    if args.shots < 1:
        raise UsageError("--shots must be positive")
    if args.trajectories < 1:
        raise UsageError("--trajectories must be positive")
    if args.gate_noise and args.calib is None:
        raise UsageError("--gate-noise needs --calib")
    return RunConfig(
        graph_name=args.graph,
        graph=graph,
        qubits=qubits,
        modes=args.modes,
        shots=args.shots,
        seed=args.seed,
        noise=_load_noise(args.calib),
        gate_noise=args.gate_noise,
        trajectories=args.trajectories,
    )


def cmd_entangle(args) -> int:
    graph = load_graph(args.graph)
    cfg = _run_config(args, graph)
    alpha = args.alpha if args.alpha is not None else 0.0
    params = PrepParams(phi=args.phi, alpha=alpha, theta=args.theta)
    _write_output(format_csv(compute_rows(cfg, [params], args.jobs)), args.out)
    return EXIT_OK


def sweep_points(parameter: str, start: float, stop: float, steps: int, fixed: dict[str, float]) -> list[PrepParams]:
    """Linear grid including both endpoints, ascending."""
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    if not start < stop:
        raise UsageError("sweep needs start < stop")
    points = []
    for value in np.linspace(start, stop, steps):
        values = dict(fixed)
        values[parameter] = float(value)
        points.append(PrepParams(phi=values["phi"], alpha=values["alpha"], theta=values["theta"]))
    return points


def cmd_sweep(args) -> int:
    if getattr(args, args.param) is not None:
        raise UsageError(f"--{args.param} is the swept parameter; use --start/--stop instead")
    graph = load_graph(args.graph)
    cfg = _run_config(args, graph)
    fixed = {
        "phi": args.phi if args.phi is not None else math.pi,
        "theta": args.theta if args.theta is not None else math.pi / 2,
        "alpha": args.alpha if args.alpha is not None else 0.0,
    }
    start = args.start if args.start is not None else 0.0
    stop = args.stop if args.stop is not None else (math.pi if args.param == "theta" else 2 * math.pi)
    points = sweep_points(args.param, start, stop, args.steps, fixed)
    _write_output(format_csv(compute_rows(cfg, points, args.jobs)), args.out)
    return EXIT_OK


def cmd_export_qasm(args) -> int:
    graph = load_graph(args.graph)
    params = PrepParams(phi=args.phi, alpha=args.alpha, theta=args.theta)
    circuit = build_preparation_circuit(graph, params)
    for spec in args.measure or ():
        qubit, _, axis = spec.partition(":")
        if not qubit.isdecimal() or axis not in ("x", "y", "z"):
            raise UsageError(f"--measure expects <qubit>:<x|y|z>, got {spec!r}")
        circuit = append_measurement(circuit, int(qubit), axis)
    _write_output(export_openqasm(circuit, cp_name=args.cp_name), args.out)
    return EXIT_OK


def cmd_gen_graph(args) -> int:
    _write_output(serialize_edge_list(generate_named(args.kind, args.n)), args.out)
    return EXIT_OK


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="kind[:n] (chain, claw, complete, cycle, star) or file:<path>")
    p.add_argument("--qubit", type=_parse_qubit, default=None, help="vertex index or 'all' (default)")
    p.add_argument("--phi", type=parse_angle, default=None)
    p.add_argument("--theta", type=parse_angle, default=None)
    p.add_argument("--alpha", type=parse_angle, default=None)
    p.add_argument("--modes", type=_parse_modes, default=("analytic", "exact"),
                   help="comma list of analytic, exact, sampled (default analytic,exact)")
    p.add_argument("--shots", type=int, default=DEFAULT_SHOTS, help="shots per measured axis")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--calib", default=None,
                   help="calibration file enabling readout noise; 'bundled' selects the packaged snapshot")
    p.add_argument("--gate-noise", action="store_true", help="add trajectory gate noise from --calib")
    p.add_argument("--trajectories", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1, help="parameter points evaluated concurrently")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphent", description="Entanglement of qubits in controlled-phase graph states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("entangle", help="entanglement at one parameter point")
    _add_run_options(p)
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("sweep", help="entanglement along a theta or phi grid")
    _add_run_options(p)
    p.add_argument("--param", choices=("theta", "phi"), default="theta")
    p.add_argument("--start", type=parse_angle, default=None)
    p.add_argument("--stop", type=parse_angle, default=None)
    p.add_argument("--steps", type=int, default=25)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-qasm", help="write the preparation circuit as OpenQASM 2.0")
    p.add_argument("--graph", required=True)
    p.add_argument("--phi", type=parse_angle, required=True)
    p.add_argument("--theta", type=parse_angle, required=True)
    p.add_argument("--alpha", type=parse_angle, default=0.0)
    p.add_argument("--measure", action="append", metavar="Q:AXIS", help="append a measurement, e.g. 0:x")
    p.add_argument("--cp-name", choices=("cu1", "cp"), default="cu1")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_qasm)

    p = sub.add_parser("gen-graph", help="write a named graph as an edge list")
    p.add_argument("kind", choices=GRAPH_KINDS)
    p.add_argument("n", type=int)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_graph)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command == "entangle" and (args.phi is None or args.theta is None):
        print("graphent entangle: error: --phi and --theta are required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"graphent {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"graphent {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GraphentError, OSError) as exc:
        print(f"graphent {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
