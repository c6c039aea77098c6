"""Command line: ``minortest {test,campaign,stats,gen}``."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional

from .graph import GraphError, QueryOracle, format_graph, load_graph, to_dot
from .harness import GENERATORS, ExperimentSpec, generate, partition_stats, run_campaign
from .minors.embedding import embedding_to_dot
from .partition import PartitionConfig, enumerate_partition, format_partition, init_partition
from .tester import PRESETS, TesterConfig, test_minor_freeness


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="graph file ('n delta' header, then 'u v' lines)")
    p.add_argument("--gen", choices=GENERATORS, help="generate the graph instead of reading it")
    _add_params(p)


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--delta", type=int, default=4)
    p.add_argument("--family", default="outerplanar", help="k23+k4 | outerplanar | diamond | cactus | k2k:3 | ...")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--copies", type=int, help="planted copy count (planted generators)")
    p.add_argument("--seed", type=int, default=0)


def _graph(args):
    if args.graph:
        return load_graph(args.graph)
    if not args.gen:
        raise GraphError("give --graph FILE or --gen NAME")
    graph, _ = generate(args.gen, args.n, args.delta, random.Random(args.seed), args.family, args.epsilon, args.copies)
    return graph


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text)


def cmd_test(args) -> int:
    graph = _graph(args)
    config = TesterConfig.preset(args.preset, args.epsilon, args.family, query_budget=args.budget)
    verdict = test_minor_freeness(QueryOracle(graph), config, args.seed)
    _write(args.json, verdict.to_json())
    if args.witness and verdict.witness_text():
        _write(args.witness, verdict.witness_text())
    if args.dot:
        if verdict.embedding is not None:
            _write(args.dot, embedding_to_dot(graph, verdict.member, verdict.embedding))
        else:
            _write(args.dot, to_dot(graph))
    return 0


def cmd_campaign(args) -> int:
    spec = ExperimentSpec.load(args.spec)
    if args.output:
        spec.output = args.output
    if args.workers:
        spec.workers = args.workers
    if args.timing:
        spec.timing = True
    result = run_campaign(spec)
    if not spec.output:
        sys.stdout.write(result.csv_text())
    print(result.summary_text(), file=sys.stderr if not spec.output else sys.stdout)
    return 0


def cmd_stats(args) -> int:
    graph = _graph(args)
    config = PartitionConfig(
        gamma=args.gamma,
        alpha=args.alpha,
        center_count_coeff=args.center_count_coeff,
        ell=args.ell,
    )
    if args.dump:
        state = init_partition(graph, PartitionConfig(**{**config.__dict__, "seed": args.seed}))
        _write(args.dump, format_partition(enumerate_partition(graph, state)))
    st = partition_stats(graph, config, args.trials, seed_start=args.seed)
    print(st.summary_text())
    return 0


def cmd_gen(args) -> int:
    graph, cert = generate(args.generator, args.n, args.delta, random.Random(args.seed), args.family, args.epsilon, args.copies)
    _write(args.output, format_graph(graph))
    if args.dot:
        _write(args.dot, to_dot(graph))
    if cert is not None:
        print(
            json.dumps({"gadget": cert.gadget, "copies": cert.copies, "lower_bound": cert.lower_bound, "epsilon": cert.epsilon}),
            file=sys.stderr,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minortest", description="Property tester for minor-freeness in bounded-degree graphs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the tester once and print the verdict JSON")
    _add_graph_source(p)
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    p.add_argument("--budget", type=int, help="query budget (inconclusive when exhausted)")
    p.add_argument("--json", default="-", help="verdict JSON path (default stdout)")
    p.add_argument("--witness", help="write the witness text here")
    p.add_argument("--dot", help="write a DOT rendering (branch sets coloured on rejection)")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("campaign", help="run a key-value spec file and emit CSV plus a summary")
    p.add_argument("spec")
    p.add_argument("--output", help="CSV path (default stdout)")
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column (rows are no longer reproducible)")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("stats", help="partition statistics over seeded trials")
    _add_graph_source(p)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--center-count-coeff", type=float, default=1.0)
    p.add_argument("--ell", type=int)
    p.add_argument("--dump", help="write the partition of the first seed ('v kind leader/center cluster-id')")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="emit a generated graph file")
    p.add_argument("generator", choices=GENERATORS)
    _add_params(p)
    p.add_argument("--output", default="-")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (GraphError, ValueError, OSError) as exc:
        print(f"minortest: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
