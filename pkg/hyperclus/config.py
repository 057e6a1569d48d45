"""
Configuration and path constants.

Defaults live in resources/config/defaults.yaml. A user YAML file overlays them key by key;
keys the defaults do not know are rejected so typos surface instead of being ignored.
"""

import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

# =============================================================================
# DIRECTORY STRUCTURE CONSTANTS
# =============================================================================

BASE_DIR = Path(__file__).parent.parent  # repository root
PACKAGE_DIR = Path(__file__).parent

# Shipped resources (read-only)
RESOURCES_DIR = PACKAGE_DIR / "resources"
CONFIG_DIR = RESOURCES_DIR / "config"
SCHEMAS_DIR = RESOURCES_DIR / "schemas"
TEMPLATES_DIR = RESOURCES_DIR / "templates"

DEFAULTS_CONFIG_PATH = CONFIG_DIR / "defaults.yaml"
BENCH_CONFIG_PATH = CONFIG_DIR / "bench.yaml"

# User data (datasets are fetched out of band and dropped here)
DATASETS_DIR = BASE_DIR / "datasets"
DATASETS_ENV_VAR = "HYPERCLUS_DATA"

# =============================================================================
# FILE NAMING CONVENTIONS
# =============================================================================

EDVW_SUFFIX = ".edvw"
SCHEMA_SUFFIX = ".schema"
CSV_SUFFIX = ".csv"

# Report keys, in the order they are written
REPORT_KEYS = [
    "dataset",
    "method",
    "k",
    "strategy",
    "ncut",
    "lambda2",
    "relative_error",
    "f1s",
    "weighted_f1",
    "seconds",
]

METHODS = ["hyperclus-g", "star", "clique"]
KWAY_STRATEGIES = ["largest", "best"]
SINGLETON_POLICIES = ["prune", "strict"]
MATCHINGS = ["greedy", "hungarian"]
STATIONARY_METHODS = ["direct", "power"]


# =============================================================================
# CONFIG TYPES
# =============================================================================

@dataclass(frozen=True)
class SolverConfig:
    stationary_tol: float = 1e-10
    stationary_max_iter: Optional[int] = None
    eigen_tol: float = 1e-10
    eigen_accept: float = 1e-8
    dense_max_vertices: int = 64
    max_eigen_iter: Optional[int] = None
    explicit_nnz_budget: int = 50_000_000
    stationary_method: str = "direct"

    def stationary_iterations(self, n_vertices: int) -> int:
        if self.stationary_max_iter is not None:
            return self.stationary_max_iter
        return 100 * n_vertices + 1000

    def eigen_iterations(self, n_vertices: int) -> int:
        if self.max_eigen_iter is not None:
            return self.max_eigen_iter
        return 20 * n_vertices + 1000


@dataclass(frozen=True)
class PipelineConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    default_bins: int = 10
    singleton_policy: str = "prune"
    kway_strategy: str = "largest"
    oracle_max_vertices: int = 20
    matching: str = "greedy"


@dataclass(frozen=True)
class BenchEntry:
    """One dataset row of a benchmark run."""

    dataset: str
    csv: Path
    schema: Path
    k: int
    strategy: str = "largest"
    methods: List[str] = field(default_factory=lambda: list(METHODS))
    edvw: str = "labels"
    expected_ncut: Optional[float] = None
    tolerance: Optional[float] = None


# =============================================================================
# HELPER FUNCTIONS
# =============================================================================

def _read_yaml(path: Path) -> Dict[str, Any]:
    """Read a YAML mapping, raising ConfigError with the path on any problem."""
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a mapping at top level")
    return data


def _overlay(base, values: Dict[str, Any], section: str):
    """Return a copy of dataclass `base` with `values` applied; unknown keys are errors."""
    known = {f.name for f in fields(base)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"Unknown key(s) in '{section}': {', '.join(unknown)}")
    return replace(base, **values)


def _check_choice(value: str, choices: List[str], key: str) -> None:
    if value not in choices:
        raise ConfigError(f"Invalid {key} '{value}'. Must be one of: {', '.join(choices)}")


def _apply(config: PipelineConfig, data: Dict[str, Any], source: Path) -> PipelineConfig:
    unknown = sorted(set(data) - {"solver", "pipeline"})
    if unknown:
        raise ConfigError(f"Unknown section(s) in {source}: {', '.join(unknown)}")
    solver = config.solver
    if data.get("solver"):
        solver = _overlay(solver, data["solver"], "solver")
    pipeline_values = dict(data.get("pipeline") or {})
    pipeline_values["solver"] = solver
    return _overlay(config, pipeline_values, "pipeline")


# =============================================================================
# LOADERS
# =============================================================================

def load_config(path: Optional[Path] = None) -> PipelineConfig:
    """
    Load pipeline configuration.

    Args:
        path: Optional user YAML file. Its keys overlay the shipped defaults.

    Returns:
        PipelineConfig with validated choices
    """
    config = _apply(PipelineConfig(), _read_yaml(DEFAULTS_CONFIG_PATH), DEFAULTS_CONFIG_PATH)
    if path is not None:
        logger.debug("Overlaying user config %s", path)
        config = _apply(config, _read_yaml(Path(path)), Path(path))

    _check_choice(config.singleton_policy, SINGLETON_POLICIES, "singleton_policy")
    _check_choice(config.kway_strategy, KWAY_STRATEGIES, "kway_strategy")
    _check_choice(config.matching, MATCHINGS, "matching")
    _check_choice(config.solver.stationary_method, STATIONARY_METHODS, "stationary_method")
    if config.default_bins < 2:
        raise ConfigError(f"default_bins must be >= 2, got {config.default_bins}")
    if config.solver.stationary_tol <= 0 or config.solver.eigen_tol <= 0:
        raise ConfigError("Solver tolerances must be positive")
    return config


def load_bench_config(path: Optional[Path] = None, dataset_dir: Optional[Path] = None) -> List[BenchEntry]:
    """
    Load the benchmark corpus description.

    Args:
        path: Bench YAML file (default: the shipped bench.yaml)
        dataset_dir: Directory that relative csv paths resolve against

    Returns:
        List of BenchEntry in file order
    """
    path = Path(path) if path is not None else BENCH_CONFIG_PATH
    data = _read_yaml(path)
    dataset_dir = Path(dataset_dir) if dataset_dir is not None else DATASETS_DIR

    entries = []
    for i, raw in enumerate(data.get("datasets") or []):
        if not isinstance(raw, dict) or "dataset" not in raw or "k" not in raw:
            raise ConfigError(f"{path}: datasets[{i}] needs at least 'dataset' and 'k'")
        name = raw["dataset"]
        csv_path = Path(raw.get("csv", f"{name}{CSV_SUFFIX}"))
        if not csv_path.is_absolute():
            csv_path = dataset_dir / csv_path
        schema_path = Path(raw.get("schema", f"{name}{SCHEMA_SUFFIX}"))
        if not schema_path.is_absolute():
            schema_path = SCHEMAS_DIR / schema_path

        methods = list(raw.get("methods", METHODS))
        for method in methods:
            _check_choice(method, METHODS, "method")
        strategy = raw.get("strategy", "largest")
        _check_choice(strategy, KWAY_STRATEGIES, "strategy")

        entries.append(BenchEntry(
            dataset=name,
            csv=csv_path,
            schema=schema_path,
            k=int(raw["k"]),
            strategy=strategy,
            methods=methods,
            edvw=raw.get("edvw", "labels"),
            expected_ncut=raw.get("expected_ncut"),
            tolerance=raw.get("tolerance"),
        ))
    return entries
