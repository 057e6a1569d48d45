"""
hyperclus command line.

    hyperclus convert  CSV SCHEMA OUT [--edvw labels|unit|file=PATH]
    hyperclus cluster  EDVW [--k N] [--method M] [--strategy S] [--out LABELS] [--report REPORT]
    hyperclus verify   [--n-max N] [--trials T] [--seed S]
    hyperclus bench    [--dataset-dir DIR] [--bench-config YAML]
    hyperclus info     [EDVW ...] [--schemas] [--spectrum] [--oracle]

Exit codes: 0 success, 1 property failure, 2 usage or input error, 3 disconnected input,
4 solver did not converge.
"""

import argparse
import logging
import os
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .config import (
    BENCH_CONFIG_PATH,
    DATASETS_DIR,
    DATASETS_ENV_VAR,
    KWAY_STRATEGIES,
    MATCHINGS,
    METHODS,
    PipelineConfig,
    load_bench_config,
    load_config,
)
from .errors import Disconnected, HyperclusError, InputError, NotConverged
from .expansions import clique_bisector, clique_expansion, clique_pair_additions, star_bisector, star_expansion, write_edge_list
from .hypergraph import EdvwHypergraph, component_sizes, with_unit_edvw
from .ingestion import (
    assign_edvw,
    featurize,
    list_schemas,
    load_csv,
    load_schema,
    read_edvw,
    read_gamma_file,
    read_labels,
    resolve_schema,
    write_edvw,
    write_labels,
)
from .laplacian import sym_laplacian_from_walk
from .metrics import greedy_f1_match, hungarian_f1_match, ncut2, ncut_k, relative_error
from .oracle import PROPERTY_NAMES, brute_force_optima, run_property_suite
from .random_walk import random_walk
from .reports import RunReport, bench_failure_row, bench_header, bench_row, format_float, format_report, render
from .spectral import Partition, cluster, eigen_gap, hyperclus_g

logger = logging.getLogger(__name__)

# =============================================================================
# EXIT CODES
# =============================================================================

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_DISCONNECTED = 3
EXIT_NOT_CONVERGED = 4

BISECTORS = {
    "hyperclus-g": hyperclus_g,
    "star": star_bisector,
    "clique": clique_bisector,
}


# =============================================================================
# HELPER FUNCTIONS
# =============================================================================

def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _parse_edvw_mode(value: str) -> Tuple[str, Optional[Path]]:
    if value in ("labels", "unit"):
        return value, None
    if value.startswith("file="):
        return "file", Path(value[len("file="):])
    raise argparse.ArgumentTypeError(f"--edvw must be labels, unit or file=PATH, got '{value}'")


def _apply_edvw(h: EdvwHypergraph, labels: np.ndarray, mode: str, gamma_path: Optional[Path]) -> EdvwHypergraph:
    if mode == "labels":
        return assign_edvw(h, labels)
    if mode == "unit":
        return with_unit_edvw(h)
    return read_gamma_file(gamma_path, h)


def _dataset_dir(value: Optional[str]) -> Path:
    if value:
        return Path(value)
    if os.environ.get(DATASETS_ENV_VAR):
        return Path(os.environ[DATASETS_ENV_VAR])
    return DATASETS_DIR


def run_method(h: EdvwHypergraph, k: int, method: str, strategy: str, config: PipelineConfig) -> Partition:
    """Cluster h into k parts with one of METHODS."""
    if method not in BISECTORS:
        raise InputError(f"Invalid method '{method}'. Must be one of: {', '.join(METHODS)}")
    return cluster(h, k, strategy=strategy, solver=config.solver, bisector=BISECTORS[method])


def evaluate(
    h: EdvwHypergraph,
    partition: Partition,
    dataset: str,
    method: str,
    strategy: str,
    config: PipelineConfig,
    truth: Optional[List] = None,
    matching: str = "greedy",
    seconds: Optional[float] = None,
) -> RunReport:
    """Score a partition on the hypergraph's own walk and against optional truth labels."""
    walk = random_walk(h, config.solver)
    k = partition.k
    if k == 2:
        ncut = ncut2(walk.phi, walk.transition, partition.labels == 0)
    else:
        ncut = ncut_k(walk.phi, walk.transition, partition.labels, k)

    f1s, weighted = [], None
    if truth is not None:
        match = hungarian_f1_match if matching == "hungarian" else greedy_f1_match
        f1_report = match(partition, truth)
        f1s, weighted = f1_report.f1s, f1_report.weighted_f1

    lambda2 = partition.lambda2
    rel = relative_error(lambda2, ncut) if (k == 2 and method == "hyperclus-g" and lambda2 is not None) else None
    return RunReport(
        dataset=dataset,
        method=method,
        k=k,
        strategy=strategy,
        ncut=ncut,
        lambda2=lambda2,
        relative_error=rel,
        f1s=f1s,
        weighted_f1=weighted,
        seconds=seconds,
    )


def _stats(h: EdvwHypergraph) -> dict:
    return {
        "n_vertices": h.n_vertices,
        "n_edges": h.n_edges,
        "n_connections": h.n_connections,
        "min_edge_size": int(h.edge_sizes.min()) if h.n_edges else 0,
        "max_edge_size": int(h.edge_sizes.max()) if h.n_edges else 0,
        "components": component_sizes(h),
        "clique_pairs": clique_expansion(h).n_edges,
        "clique_pair_additions": clique_pair_additions(h),
        "star_vertices": h.n_vertices + h.n_edges,
    }


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_convert(args: argparse.Namespace, config: PipelineConfig) -> int:
    """CSV + schema -> .edvw, with labels, unit or file-supplied vertex weights."""
    mode, gamma_path = args.edvw
    schema = load_schema(resolve_schema(args.schema), config.default_bins)
    table = load_csv(args.csv, schema)
    h = _apply_edvw(featurize(table), table.labels, mode, gamma_path)
    write_edvw(h, args.out)
    logger.info("Wrote %s: %d vertices, %d hyperedges, %d connections", args.out, h.n_vertices, h.n_edges, h.n_connections)

    if args.truth_out:
        write_labels(table.class_labels, args.truth_out)
    if args.clique_edges:
        write_edge_list(clique_expansion(h), args.clique_edges)
    if args.star_edges:
        write_edge_list(star_expansion(h), args.star_edges)
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace, config: PipelineConfig) -> int:
    """Cluster one .edvw file and write labels plus a key/value report."""
    h = read_edvw(args.edvw_path, policy=config.singleton_policy)
    strategy = args.strategy or config.kway_strategy
    truth = read_labels(args.truth) if args.truth else None

    start = time.perf_counter()
    partition = run_method(h, args.k, args.method, strategy, config)
    seconds = None if args.no_timing else time.perf_counter() - start

    dataset = args.dataset or Path(args.edvw_path).stem
    report = evaluate(
        h, partition, dataset, args.method, strategy, config,
        truth=truth, matching=args.matching or config.matching, seconds=seconds,
    )
    if args.out:
        write_labels(partition.labels.tolist(), args.out)
    text = format_report(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: PipelineConfig) -> int:
    """Property suite over seeded random hypergraphs; exit 1 if anything fails."""
    if args.n_max > config.oracle_max_vertices:
        raise InputError(f"--n-max {args.n_max} exceeds oracle_max_vertices ({config.oracle_max_vertices})")
    outcomes = run_property_suite(args.n_max, args.trials, args.seed, config.solver, corrupt=args.corrupt)

    passed = {name: 0 for name in PROPERTY_NAMES}
    failed = {name: 0 for name in PROPERTY_NAMES}
    failures = []
    for seed, results in outcomes:
        for r in results:
            if r.ok:
                passed[r.name] += 1
            else:
                failed[r.name] += 1
                failures.append({"seed": seed, "name": r.name, "detail": r.detail})

    rows = [{"name": name, "passed": passed[name], "failed": failed[name]} for name in PROPERTY_NAMES]
    sys.stdout.write(render(
        "verify_summary.txt.j2", trials=args.trials, seed=args.seed, n_max=args.n_max, rows=rows, failures=failures,
    ))
    return EXIT_PROPERTY_FAILURE if failures else EXIT_OK


def cmd_bench(args: argparse.Namespace, config: PipelineConfig) -> int:
    """Tab-separated comparison table over every dataset CSV that is present."""
    dataset_dir = _dataset_dir(args.dataset_dir)
    entries = load_bench_config(args.bench_config, dataset_dir)
    matching = args.matching or config.matching

    lines = [bench_header()]
    present = [e for e in entries if e.csv.exists()]
    for entry in entries:
        if entry not in present:
            logger.info("Skipping %s: %s not found", entry.dataset, entry.csv)
    if not present:
        logger.warning("No dataset CSVs found in %s", dataset_dir)

    for entry in present:
        try:
            schema = load_schema(entry.schema, config.default_bins)
            table = load_csv(entry.csv, schema)
            mode, gamma_path = _parse_edvw_mode(entry.edvw)
            h = _apply_edvw(featurize(table), table.labels, mode, gamma_path)
        except (HyperclusError, argparse.ArgumentTypeError) as e:
            lines.extend(bench_failure_row(entry.dataset, m, entry.k, entry.strategy, str(e)) for m in entry.methods)
            continue

        for method in entry.methods:
            try:
                start = time.perf_counter()
                partition = run_method(h, entry.k, method, entry.strategy, config)
                seconds = None if args.no_timing else time.perf_counter() - start
                report = evaluate(
                    h, partition, entry.dataset, method, entry.strategy, config,
                    truth=table.labels, matching=matching, seconds=seconds,
                )
            except HyperclusError as e:
                logger.warning("%s / %s failed: %s", entry.dataset, method, e)
                lines.append(bench_failure_row(entry.dataset, method, entry.k, entry.strategy, str(e)))
                continue
            status = "OK"
            if method == "hyperclus-g" and entry.expected_ncut is not None and entry.tolerance is not None:
                if abs(report.ncut - entry.expected_ncut) > entry.tolerance:
                    status = f"OFF-TARGET expected {entry.expected_ncut}"
            lines.append(bench_row(report, status))

    text = "".join(lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_info(args: argparse.Namespace, config: PipelineConfig) -> int:
    """Hypergraph statistics, shipped schemas, and optionally the brute-force oracle."""
    if args.schemas or not args.paths:
        for schema in list_schemas():
            sys.stdout.write(f"{schema['name']:<12} {schema['description']}\n")
    for path in args.paths:
        h = read_edvw(path, policy=config.singleton_policy)
        sys.stdout.write(render("info.txt.j2", path=path, stats=_stats(h)))
        if args.spectrum:
            walk = random_walk(h, config.solver)
            lambda2, lambda3 = eigen_gap(
                sym_laplacian_from_walk(walk.transition, walk.stationary),
                tol=config.solver.eigen_tol,
                max_iter=config.solver.eigen_iterations(h.n_vertices),
                dense_max_vertices=config.solver.dense_max_vertices,
            )
            sys.stdout.write(f"  lambda2            {format_float(lambda2)}\n  lambda3            {format_float(lambda3)}\n")
        if args.oracle:
            if h.n_vertices > config.oracle_max_vertices:
                logger.warning("%s: %d vertices is too many for the oracle", path, h.n_vertices)
                continue
            report = brute_force_optima(h, config.solver, max_vertices=config.oracle_max_vertices)
            sys.stdout.write(render("oracle_report.txt.j2", report=report.as_dict(), n_vertices=h.n_vertices))
    return EXIT_OK


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperclus", description="Spectral clustering of EDVW hypergraphs")
    parser.add_argument("--config", help="YAML file overlaying the default solver and pipeline settings")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="Build a .edvw hypergraph from a CSV dataset")
    p.add_argument("csv")
    p.add_argument("schema", help="Schema file, or the name of a shipped schema (e.g. car)")
    p.add_argument("out")
    p.add_argument("--edvw", type=_parse_edvw_mode, default=("labels", None), help="labels | unit | file=PATH")
    p.add_argument("--truth-out", help="Also write the class label of every row, one per line")
    p.add_argument("--clique-edges", help="Also write the CLIQUE++ graph as an edge list")
    p.add_argument("--star-edges", help="Also write the STAR++ graph as an edge list")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("cluster", help="Cluster a .edvw hypergraph")
    p.add_argument("edvw_path")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--method", choices=METHODS, default="hyperclus-g")
    p.add_argument("--strategy", choices=KWAY_STRATEGIES)
    p.add_argument("--out", help="Labels file, one cluster id per line")
    p.add_argument("--report", help="Report file of key<TAB>value lines (default: stdout)")
    p.add_argument("--truth", help="Class labels, one per line, for F1 scores")
    p.add_argument("--matching", choices=MATCHINGS)
    p.add_argument("--dataset", help="Dataset id for the report (default: file stem)")
    p.add_argument("--no-timing", action="store_true", help="Write seconds as NA so reruns are byte-identical")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("verify", help="Randomized property suite against the brute-force oracle")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="Run every method on the dataset corpus")
    p.add_argument("--dataset-dir", help=f"Directory of dataset CSVs (default: ${DATASETS_ENV_VAR} or ./datasets)")
    p.add_argument("--bench-config", default=str(BENCH_CONFIG_PATH))
    p.add_argument("--out", help="Write the table here instead of stdout")
    p.add_argument("--matching", choices=MATCHINGS)
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("info", help="Describe .edvw files or list shipped schemas")
    p.add_argument("paths", nargs="*")
    p.add_argument("--schemas", action="store_true")
    p.add_argument("--spectrum", action="store_true", help="Also print lambda2 and lambda3 of L_sym")
    p.add_argument("--oracle", action="store_true", help="Brute-force optima for small hypergraphs")
    p.set_defaults(func=cmd_info)
    return parser


def disconnected_message(e: Disconnected) -> str:
    if not e.component_sizes:
        return str(e)
    return f"{e} (component sizes: {', '.join(map(str, e.component_sizes))})"


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        config = load_config(args.config)
        return args.func(args, config)
    except Disconnected as e:
        print(f"error: {disconnected_message(e)}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except NotConverged as e:
        residual = "unknown" if e.residual is None else f"{e.residual:.3e}"
        print(f"error: {e} (residual {residual})", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except HyperclusError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
