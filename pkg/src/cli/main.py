"""
Command-line surface: walk, semiclassical, pagerank and bench subcommands.

Exit codes: 0 success, 2 usage error or unreadable file, 3 invalid input,
4 numerical failure.
"""
import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from src import config
from src.applications.pagerank import PageRankConfig, build_google_matrix, classical_pagerank, quantum_pagerank
from src.cli.bench import BenchSample, GENERATOR, fit_scaling, measure_size
from src.dsl.pipeline import bind_pipeline, parse_angle, parse_pipeline
from src.errors import InputError, NumericalError
from src.graph.transition import uniform_distribution, validate_probability_vector, validate_transition_matrix
from src.ingestion.csv_files import (
    read_edge_list,
    read_matrix,
    read_state_vector,
    read_vector,
    write_matrix,
    write_ranking,
    write_trace,
)
from src.walk.operators import build_psi_matrix, make_phase_matrix
from src.walk.semiclassical import SemiclassicalConfig, build_semiclassical_matrix, semiclassical_walk
from src.walk.simulator import evolve
from src.walk.state import initial_superposition, vector_to_matrix

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4


def _register(text: str):
    if text == "both":
        return "both"
    if text in ("1", "2"):
        return int(text)
    raise argparse.ArgumentTypeError(f"register must be 1, 2 or both, got {text!r}")


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except InputError as e:
        raise argparse.ArgumentTypeError(str(e))


def _sizes(text: str) -> List[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="run_simulator.py", description="Memory-saving Szegedy quantum walk simulator")
    parser.add_argument("--log-level", default=None, help="Override SZWALK_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    walk = sub.add_parser("walk", help="Evolve a state and record per-step probabilities")
    walk.add_argument("--graph", required=True, help="Transition matrix CSV")
    walk.add_argument("--steps", type=_nonnegative, required=True, help="Number of applications of U")
    walk.add_argument("--unitary", default="S R", help="One walk step in the pipeline language, e.g. \"S R\"")
    walk.add_argument("--measure", type=_register, default=1, help="Register to measure: 1, 2 or both")
    walk.add_argument("--initial", default="superposition", help="'superposition' or a state vector CSV")
    walk.add_argument("--theta-matrix", help="Phase matrix CSV for the extended walk")
    walk.add_argument("--output", default="trace", help="Output prefix; writes PREFIX_register<k>.csv")
    walk.add_argument("--policy", choices=["strict", "renormalize"], default="strict")
    walk.add_argument("--apply-order", choices=["operator", "left"], default="operator")

    semi = sub.add_parser("semiclassical", help="Compute a semiclassical transition matrix")
    semi.add_argument("--graph", required=True, help="Transition matrix CSV")
    semi.add_argument("--tq", type=_nonnegative, required=True, help="Quantum steps per classical step")
    semi.add_argument("--class", dest="walk_class", type=int, choices=[1, 2], default=1)
    semi.add_argument("--unitary", default="S R")
    semi.add_argument("--batch-size", type=int, help="Reset states evolved together")
    semi.add_argument("--theta-matrix", help="Phase matrix CSV for the extended walk")
    semi.add_argument("--output", default="semiclassical.csv")
    semi.add_argument("--policy", choices=["strict", "renormalize"], default="strict")
    semi.add_argument("--tc", type=_nonnegative, help="Also run the semiclassical walk for this many steps")
    semi.add_argument("--p0", help="Initial distribution CSV for --tc (default uniform)")

    pr = sub.add_parser("pagerank", help="Quantum PageRank")
    source = pr.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", help="Transition matrix CSV, used as is")
    source.add_argument("--adjacency", help="Adjacency matrix CSV, entry (j, i) is a link i -> j")
    source.add_argument("--edges", help="Edge list CSV 'source,target[,weight]'")
    pr.add_argument("--damping", type=float, default=0.85)
    pr.add_argument("--steps", type=int, default=100)
    pr.add_argument("--theta1", type=_angle)
    pr.add_argument("--theta2", type=_angle)
    pr.add_argument("--include-t0", action="store_true")
    pr.add_argument("--compare-classical", action="store_true")
    pr.add_argument("--output", default="pagerank.csv")

    bench = sub.add_parser("bench", help="Time and memory scaling of W = SRSR")
    bench.add_argument("--sizes", type=_sizes, default=[1000, 2000, 4000])
    bench.add_argument("--steps", type=_nonnegative, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--metric", choices=["time", "memory", "both"], default="both")
    bench.add_argument("--include-small", action="store_true")
    bench.add_argument("--output", help="JSON-lines report (default stdout)")
    return parser


def _load_graph(path: str, policy: str):
    return validate_transition_matrix(read_matrix(path), policy=policy)


def _load_theta(path: Optional[str]):
    return make_phase_matrix(read_matrix(path)) if path else None


def cmd_walk(args) -> int:
    g = _load_graph(args.graph, args.policy)
    theta = _load_theta(args.theta_matrix)
    u = bind_pipeline(parse_pipeline(args.unitary), g, theta, apply_order=args.apply_order)
    if args.initial == "superposition":
        phi0 = initial_superposition(build_psi_matrix(g, theta))
    else:
        phi0 = vector_to_matrix(read_state_vector(args.initial))

    result = evolve(phi0, u, args.steps, register=args.measure)
    for reg, trace in sorted(result.traces.items()):
        path = f"{args.output}_register{reg}.csv"
        write_trace(path, trace)
        print(f"Register {reg}: {args.steps + 1} distributions -> {path}")
    return EXIT_OK


def cmd_semiclassical(args) -> int:
    g = _load_graph(args.graph, args.policy)
    theta = _load_theta(args.theta_matrix)
    u = bind_pipeline(parse_pipeline(args.unitary), g, theta)
    cfg = SemiclassicalConfig(
        quantum_time=args.tq, classical_time=args.tc or 0, walk_class=args.walk_class, batch_size=args.batch_size
    )
    sc = build_semiclassical_matrix(g, u, cfg, theta)
    write_matrix(args.output, sc.entries)
    print(f"Class {args.walk_class} semiclassical matrix, t_q={args.tq} -> {args.output}")

    if args.tc is not None:
        p0 = validate_probability_vector(read_vector(args.p0)) if args.p0 else uniform_distribution(g.n)
        trace = np.stack([p.values for p in semiclassical_walk(sc, p0)])
        path = str(Path(args.output).with_suffix("")) + "_walk.csv"
        write_trace(path, trace)
        print(f"Semiclassical walk, t_c={args.tc} -> {path}")
    return EXIT_OK


def _ranking_paths(output: str, tag: str = ""):
    stem = str(Path(output).with_suffix(""))
    return f"{stem}{tag}.csv", f"{stem}{tag}_by_score.csv"


def cmd_pagerank(args) -> int:
    if args.graph:
        g = _load_graph(args.graph, "strict")
    else:
        adjacency = read_matrix(args.adjacency) if args.adjacency else read_edge_list(args.edges)
        g = build_google_matrix(adjacency, args.damping)

    angles = None
    if args.theta1 is not None or args.theta2 is not None:
        angles = (
            args.theta1 if args.theta1 is not None else math.pi,
            args.theta2 if args.theta2 is not None else math.pi,
        )
    cfg = PageRankConfig(steps=args.steps, apr_angles=angles, damping=args.damping, include_t0=args.include_t0)
    result = quantum_pagerank(g, cfg)

    by_index, by_score = _ranking_paths(args.output)
    write_ranking(by_index, result.ranking.values)
    write_ranking(by_score, result.ranking.values, by_score=True)
    print(f"Quantum PageRank over {g.n} nodes -> {by_index}, {by_score}")

    if args.compare_classical:
        classical = classical_pagerank(g)
        by_index, by_score = _ranking_paths(args.output, "_classical")
        write_ranking(by_index, classical.values)
        write_ranking(by_score, classical.values, by_score=True)
        print(f"Classical PageRank -> {by_index}, {by_score}")
    return EXIT_OK


def cmd_bench(args) -> int:
    samples = [measure_size(n, args.steps, args.seed + k) for k, n in enumerate(args.sizes)]
    metrics = ["time", "memory"] if args.metric == "both" else [args.metric]
    fits = [fit_scaling(samples, m, include_small=args.include_small) for m in metrics]

    lines = [json.dumps(s.model_dump()) for s in samples]
    summary = {"generator": GENERATOR, "steps": args.steps}
    for fit in fits:
        summary[fit.metric] = {"A": fit.amplitude, "n": fit.exponent, "stderr_n": fit.stderr_n}
    lines.append(json.dumps(summary))

    report = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(report, encoding="utf-8")
        print(f"Bench report -> {args.output}")
    else:
        sys.stdout.write(report)
    for fit in fits:
        print(f"{fit.metric}: n = {fit.exponent:.3f} +/- {fit.stderr_n:.3f}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "walk": cmd_walk,
    "semiclassical": cmd_semiclassical,
    "pagerank": cmd_pagerank,
    "bench": cmd_bench,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    config.configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
