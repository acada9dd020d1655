"""Command line entry point: ``fdcolor sample | verify | oracle | generate``.

Exit codes: 0 success or PASS, 1 verdict FAIL, 2 input error,
3 internal invariant breach, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from .decomposition import DecompositionError
from .dependence import PASS, check_k_dependence_exact
from .exact import DEFAULT_MAX_EDGES, DEFAULT_MAX_VERTICES, ExactCapError, exact_pipeline_distribution
from .graph import Graph, GraphError, generate, read_edge_list, write_edge_list
from .insertion import CYCLE, DEFAULT_ORACLE_CAP, TOPOLOGIES, OracleCapError, exact_line_distribution
from .pipeline import VARIANTS, ColoringError, color
from .randomness import VertexRandomness
from . import report as docs

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BREACH, EXIT_CAP = 0, 1, 2, 3, 4
SEED_ENV = "FDCOLOR_SEED"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    gen: str | None = None
    edges: str | None = None
    variant: str = "fiid"
    seed: int = 0
    trials: int = 10_000
    k: int = 4
    out: str | None = None
    mode: str | None = None
    jobs: int = 1
    max_vertices: int = DEFAULT_MAX_VERTICES
    max_edges: int = DEFAULT_MAX_EDGES

    @property
    def source(self) -> str:
        return f"gen:{self.gen}" if self.gen else f"edges:{os.path.basename(self.edges)}"


def resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise CliError(f"{SEED_ENV}={env!r} is not an integer", EXIT_INPUT) from None


def load_graph(cfg: RunConfig) -> tuple[Graph, list[str] | None]:
    try:
        if cfg.gen:
            return generate(cfg.gen, cfg.seed), None
        return read_edge_list(cfg.edges)
    except GraphError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sample(cfg: RunConfig, dump_digraph: str | None = None) -> int:
    g, labels = load_graph(cfg)
    try:
        ca = color(g, VertexRandomness(cfg.seed), cfg.variant)
    except (ColoringError, DecompositionError) as exc:
        raise CliError(f"coloring failed: {exc}", EXIT_BREACH) from None
    doc = docs.coloring_document(g, ca, cfg.source, labels)
    if dump_digraph:
        emit(docs.digraph_dump(ca), dump_digraph)
    emit(docs.to_json(doc), cfg.out)
    if not doc["proper"]:
        print("error: sampled coloring is not proper", file=sys.stderr)
        return EXIT_BREACH
    return EXIT_OK


def cmd_verify(cfg: RunConfig, pairs: int, max_window: int) -> int:
    g, _ = load_graph(cfg)
    fits = g.n <= cfg.max_vertices and g.edge_count <= cfg.max_edges
    mode = cfg.mode or ("exact" if fits else "mc")
    if mode == "exact":
        try:
            joint = exact_pipeline_distribution(g, cfg.variant, cfg.max_vertices, cfg.max_edges)
        except ExactCapError as exc:
            raise CliError(f"{exc}; use --mc for a Monte Carlo test", EXIT_CAP) from None
        if joint.total_mass() != 1:
            raise CliError("exact law does not sum to 1", EXIT_BREACH)
        rep = check_k_dependence_exact(joint, cfg.k, max_window, seed=cfg.seed)
    else:
        from .montecarlo import check_k_dependence_mc

        try:
            rep = check_k_dependence_mc(g, cfg.variant, cfg.k, cfg.trials, cfg.seed,
                                        pairs=pairs, jobs=cfg.jobs)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_INPUT) from None
    doc = docs.dependence_document(rep, g, cfg.source, cfg.variant, cfg.seed)
    emit(docs.to_json(doc), cfg.out)
    return EXIT_OK if rep.verdict == PASS else EXIT_FAIL


def cmd_oracle(topology: str, n: int, q: int, cap: int, out: str | None) -> int:
    if topology == CYCLE and n < 3:
        raise CliError(f"cycles of length {n} are colored through the path construction, "
                       "not the cycle oracle", EXIT_CAP)
    try:
        dist = exact_line_distribution(topology, n, q, cap)
    except OracleCapError as exc:
        raise CliError(str(exc), EXIT_CAP) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    emit(docs.oracle_dump(dist), out)
    return EXIT_OK


def cmd_generate(cfg: RunConfig) -> int:
    g, _ = load_graph(cfg)
    emit(write_edge_list(g), cfg.out)
    return EXIT_OK


def _graph_args(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gen", help="generator spec, e.g. path:10, cycle:9, torus:5x5, "
                                   "random_regular:50:3, tree:3:4")
    src.add_argument("--edges", help="edge-list file")
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--out", help="write the document here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdcolor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="color a graph and write the coloring document")
    _graph_args(p)
    p.add_argument("--variant", choices=VARIANTS, default="fiid")
    p.add_argument("--dump-digraph", metavar="PATH",
                   help="also write the per-level labeled digraphs as text")

    p = sub.add_parser("verify", help="test k-dependence exactly or by Monte Carlo")
    _graph_args(p)
    p.add_argument("--variant", choices=VARIANTS, default="fiid")
    p.add_argument("--k", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact")
    mode.add_argument("--mc", dest="mode", action="store_const", const="mc")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--pairs", type=int, default=24, help="window pairs sampled (Monte Carlo)")
    p.add_argument("--max-window", type=int, default=2, help="window size (exact)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sampling")
    p.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES)
    p.add_argument("--max-edges", type=int, default=DEFAULT_MAX_EDGES)

    p = sub.add_parser("oracle", help="dump an exact line distribution")
    p.add_argument("--topology", choices=TOPOLOGIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, choices=(3, 4), default=4)
    p.add_argument("--cap", type=int, default=DEFAULT_ORACLE_CAP)
    p.add_argument("--out")

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    _graph_args(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "oracle":
            return cmd_oracle(args.topology, args.n, args.q, args.cap, args.out)
        cfg = RunConfig(command=args.command, gen=args.gen, edges=args.edges,
                        seed=resolve_seed(args.seed), out=args.out)
        if args.command == "generate":
            return cmd_generate(cfg)
        cfg.variant = args.variant
        if args.command == "sample":
            return cmd_sample(cfg, args.dump_digraph)
        cfg.k, cfg.trials, cfg.mode, cfg.jobs = args.k, args.trials, args.mode, args.jobs
        cfg.max_vertices, cfg.max_edges = args.max_vertices, args.max_edges
        return cmd_verify(cfg, args.pairs, args.max_window)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
