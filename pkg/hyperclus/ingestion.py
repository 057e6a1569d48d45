"""
Tabular datasets to EDVW hypergraphs, and the .edvw / gamma / label file formats.

Every categorical value and every nonempty numeric bin becomes one hyperedge over the rows
that share it. All hyperedge weights are 1. assign_edvw() then sets gamma_e(v) to the number
of members of e that share v's class.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .config import SCHEMA_SUFFIX, SCHEMAS_DIR
from .errors import (
    AllValuesIdentical,
    InputError,
    LengthMismatch,
    MalformedCsv,
    ParseError,
    UnknownColumn,
    UnparseableNumeric,
)
from .hypergraph import EdvwHypergraph, Hyperedge, build_hypergraph

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

FEATURE_KINDS = ["categorical", "numeric"]
MISSING_POLICIES = ["drop_feature", "drop_row"]
MISSING_TOKENS = ["", "?"]
# Bin edges are closed on the right; this absorbs 0.3 * 10 = 3.0000000000000004
BIN_EDGE_SLACK = 1e-9


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str
    bins: Optional[int] = None


@dataclass(frozen=True)
class DatasetSchema:
    features: List[FeatureSpec]
    label_column: str
    missing_policy: str = "drop_feature"
    name_column: Optional[str] = None
    keep: Dict[str, List[str]] = field(default_factory=dict)
    drop: List[str] = field(default_factory=list)

    @property
    def feature_names(self) -> List[str]:
        return [f.name for f in self.features]


@dataclass(frozen=True)
class LabeledTable:
    """
    Parsed rows. `frame` holds one column per surviving feature; numeric columns are
    floats, categorical ones strings. labels[i] indexes into classes.
    """

    frame: pd.DataFrame
    features: List[FeatureSpec]
    labels: np.ndarray
    classes: List[str]
    names: Optional[List[str]] = None

    @property
    def n_rows(self) -> int:
        return len(self.frame)

    @property
    def class_labels(self) -> List[str]:
        return [self.classes[i] for i in self.labels]


# =============================================================================
# SCHEMA
# =============================================================================

def load_schema(path: PathLike, default_bins: int = 10) -> DatasetSchema:
    """
    Parse a schema file.

    One feature per line as `name kind [bins]`, plus the directives `label <column>`,
    `missing <policy>`, `name <column>`, `keep <column> <value>...` and `drop <column>`.
    `#` starts a comment line.
    """
    path = str(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise InputError(f"Cannot read schema {path}: {e.strerror or e}")

    features: List[FeatureSpec] = []
    label = None
    missing = "drop_feature"
    name_column = None
    keep: Dict[str, List[str]] = {}
    drop: List[str] = []

    for line_no, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        head, rest = tokens[0], tokens[1:]
        if head == "label":
            if len(rest) != 1:
                raise ParseError("'label' takes exactly one column name", path, line_no)
            label = rest[0]
        elif head == "missing":
            if len(rest) != 1 or rest[0] not in MISSING_POLICIES:
                raise ParseError(f"'missing' must be one of: {', '.join(MISSING_POLICIES)}", path, line_no)
            missing = rest[0]
        elif head == "name":
            if len(rest) != 1:
                raise ParseError("'name' takes exactly one column name", path, line_no)
            name_column = rest[0]
        elif head == "keep":
            if len(rest) < 2:
                raise ParseError("'keep' needs a column and at least one value", path, line_no)
            keep[rest[0]] = rest[1:]
        elif head == "drop":
            if len(rest) != 1:
                raise ParseError("'drop' takes exactly one column name", path, line_no)
            drop.append(rest[0])
        else:
            if len(rest) not in (1, 2) or rest[0] not in FEATURE_KINDS:
                raise ParseError(f"Expected 'name kind [bins]' with kind in {FEATURE_KINDS}", path, line_no)
            kind = rest[0]
            bins = None
            if kind == "numeric":
                try:
                    bins = int(rest[1]) if len(rest) == 2 else default_bins
                except ValueError:
                    raise ParseError(f"Bin count '{rest[1]}' is not an integer", path, line_no)
                if bins < 2:
                    raise ParseError(f"Numeric feature '{head}' needs at least 2 bins", path, line_no)
            elif len(rest) == 2:
                raise ParseError(f"Categorical feature '{head}' takes no bin count", path, line_no)
            features.append(FeatureSpec(name=head, kind=kind, bins=bins))

    if label is None:
        raise ParseError("Schema has no 'label' line", path)
    features = [f for f in features if f.name not in drop]
    if label in {f.name for f in features}:
        raise ParseError(f"Label column '{label}' is also declared as a feature", path)
    if not features:
        raise ParseError("Schema declares no features", path)
    return DatasetSchema(
        features=features, label_column=label, missing_policy=missing, name_column=name_column, keep=keep, drop=drop
    )


# =============================================================================
# CSV LOADING
# =============================================================================

def _parse_numeric(frame: pd.DataFrame, column: str) -> pd.Series:
    raw = frame[column]
    values = pd.to_numeric(raw, errors="coerce")
    bad = raw.notna() & values.isna()
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise UnparseableNumeric(f"Column '{column}' row {row + 1}: cannot parse {raw.iloc[row]!r} as a number")
    return values.astype(np.float64)


def load_csv(path: PathLike, schema: DatasetSchema) -> LabeledTable:
    """
    Read a CSV with a header row and apply the schema.

    `?` and empty cells count as missing. Rows are filtered by the schema's keep
    directives first, then missing values are handled per missing_policy.

    Raises:
        MalformedCsv, UnknownColumn, UnparseableNumeric
    """
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, na_values=MISSING_TOKENS, skipinitialspace=True, encoding="utf-8"
        )
    except FileNotFoundError:
        raise InputError(f"CSV file not found: {path}")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise MalformedCsv(f"{path}: {e}")
    frame.columns = [str(c).strip() for c in frame.columns]

    needed = schema.feature_names + [schema.label_column] + list(schema.keep)
    if schema.name_column:
        needed.append(schema.name_column)
    absent = [c for c in needed if c not in frame.columns]
    if absent:
        raise UnknownColumn(f"{path}: column(s) not in header: {', '.join(absent)}")

    for column, values in schema.keep.items():
        frame = frame[frame[column].isin(values)]
    frame = frame.reset_index(drop=True)

    unlabeled = frame[schema.label_column].isna()
    if unlabeled.any():
        row = int(np.flatnonzero(unlabeled.to_numpy())[0])
        raise MalformedCsv(f"{path}: row {row + 1} has no value in label column '{schema.label_column}'")

    features = list(schema.features)
    holes = [f.name for f in features if frame[f.name].isna().any()]
    if holes and schema.missing_policy == "drop_feature":
        logger.warning("Dropping feature(s) with missing values: %s", ", ".join(holes))
        features = [f for f in features if f.name not in holes]
    elif holes:
        keep_rows = ~frame[holes].isna().any(axis=1)
        logger.warning("Dropping %d row(s) with missing values", int((~keep_rows).sum()))
        frame = frame[keep_rows].reset_index(drop=True)

    if not features:
        raise MalformedCsv(f"{path}: no feature left after removing missing values")
    if frame.empty:
        raise MalformedCsv(f"{path}: no rows left after filtering")

    columns = {}
    for f in features:
        columns[f.name] = _parse_numeric(frame, f.name) if f.kind == "numeric" else frame[f.name].str.strip()
    codes, classes = pd.factorize(frame[schema.label_column].str.strip(), sort=True)
    names = frame[schema.name_column].astype(str).tolist() if schema.name_column else None

    table = LabeledTable(
        frame=pd.DataFrame(columns),
        features=features,
        labels=np.asarray(codes, dtype=np.int64),
        classes=[str(c) for c in classes],
        names=names,
    )
    logger.info("Loaded %s: %d rows, %d features, %d classes", path, table.n_rows, len(features), len(classes))
    return table


# =============================================================================
# HYPERGRAPH CONSTRUCTION
# =============================================================================

def bin_index(values: np.ndarray, bins: int) -> np.ndarray:
    """
    1-based bin of each value after dividing by the column maximum.

    Bins are [0, 1/b], (1/b, 2/b], ..., ((b-1)/b, 1]. Negative values land in bin 1.
    """
    values = np.asarray(values, dtype=np.float64)
    top = values.max()
    scaled = values / top if top > 0 else np.zeros_like(values)
    index = np.ceil(scaled * bins - BIN_EDGE_SLACK).astype(np.int64)
    return np.clip(index, 1, bins)


def _feature_groups(table: LabeledTable, feature: FeatureSpec, strict: bool) -> List[np.ndarray]:
    column = table.frame[feature.name]
    if feature.kind == "categorical":
        values = column.to_numpy()
        return [np.flatnonzero(values == v) for v in sorted(column.unique())]

    values = column.to_numpy(dtype=np.float64)
    if values.min() == values.max():
        if strict:
            raise AllValuesIdentical(f"Numeric feature '{feature.name}' has the single value {values[0]!r}")
        logger.warning("Numeric feature '%s' is constant; it yields one hyperedge over all rows", feature.name)
    negative = int(np.count_nonzero(values < 0))
    if negative:
        logger.warning("Numeric feature '%s': %d negative value(s) placed in bin 1", feature.name, negative)
    index = bin_index(values, feature.bins)
    return [np.flatnonzero(index == b) for b in range(1, feature.bins + 1)]


def featurize(table: LabeledTable, strict: bool = False) -> EdvwHypergraph:
    """
    Unit-EDVW hypergraph with one hyperedge per category value or nonempty numeric bin.

    Hyperedges follow schema feature order, then sorted category value or bin order.
    Groups with a single row are pruned.

    Args:
        table: Loaded dataset
        strict: Raise AllValuesIdentical on constant numeric features instead of warning
    """
    raw = []
    pruned = 0
    for feature in table.features:
        for rows in _feature_groups(table, feature, strict):
            if len(rows) == 0:
                continue
            if len(rows) == 1:
                pruned += 1
                continue
            raw.append((1.0, {int(r): 1.0 for r in rows}))
    if pruned:
        logger.info("Pruned %d single-row group(s)", pruned)
    return build_hypergraph(raw, table.n_rows, policy="prune", vertex_names=table.names)


def assign_edvw(h: EdvwHypergraph, labels: Sequence) -> EdvwHypergraph:
    """
    gamma_e(v) = number of members of e in v's class. Membership and omega are unchanged.
    """
    labels = np.asarray(labels)
    if len(labels) != h.n_vertices:
        raise LengthMismatch(f"Got {len(labels)} labels for {h.n_vertices} vertices")
    edges = []
    for e in h.hyperedges:
        members = list(e.members)
        _, inverse, counts = np.unique(labels[members], return_inverse=True, return_counts=True)
        gamma = counts[inverse].astype(np.float64)
        edges.append(Hyperedge(weight=e.weight, members={v: float(g) for v, g in zip(members, gamma)}))
    return EdvwHypergraph(n_vertices=h.n_vertices, hyperedges=tuple(edges), vertex_names=h.vertex_names)


# =============================================================================
# .EDVW FORMAT
# =============================================================================

def write_edvw(h: EdvwHypergraph, path: PathLike) -> None:
    """
    Write `n_vertices n_hyperedges`, then one `omega v:gamma ...` line per hyperedge.

    Floats use the shortest repr that reads back to the same value.
    """
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{h.n_vertices} {h.n_edges}\n")
        for e in h.hyperedges:
            members = " ".join(f"{v}:{g!r}" for v, g in e.members.items())
            f.write(f"{e.weight!r} {members}\n")


def _parse_positive(token: str, what: str, path: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{what} '{token}' is not a number", path, line_no)
    if not (math.isfinite(value) and value > 0):
        raise ParseError(f"{what} must be a positive finite number, got {token}", path, line_no)
    return value


def _data_lines(path: str) -> List[Tuple[int, List[str]]]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror or e}")
    return [
        (no, line.split())
        for no, line in enumerate(lines, start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]


def read_edvw(path: PathLike, policy: str = "prune") -> EdvwHypergraph:
    """
    Parse a .edvw file.

    Raises:
        ParseError: malformed header or hyperedge line, with the 1-based line number
    """
    path = str(path)
    lines = _data_lines(path)
    if not lines:
        raise ParseError("Empty file; expected 'n_vertices n_hyperedges'", path, 1)

    header_no, header = lines[0]
    try:
        if len(header) != 2:
            raise ValueError
        n_vertices, n_edges = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError("Header must be 'n_vertices n_hyperedges'", path, header_no)

    raw = []
    for line_no, tokens in lines[1:]:
        omega = _parse_positive(tokens[0], "Hyperedge weight", path, line_no)
        members = []
        for token in tokens[1:]:
            vertex, sep, gamma = token.partition(":")
            if not sep:
                raise ParseError(f"Member '{token}' is not 'vertex:gamma'", path, line_no)
            try:
                v = int(vertex)
            except ValueError:
                raise ParseError(f"Vertex '{vertex}' is not an integer", path, line_no)
            if v < 0 or v >= n_vertices:
                raise ParseError(f"Vertex {v} out of range [0, {n_vertices})", path, line_no)
            members.append((v, _parse_positive(gamma, "Vertex weight", path, line_no)))
        raw.append((omega, members))

    if len(raw) != n_edges:
        raise ParseError(f"Header announces {n_edges} hyperedges, file has {len(raw)}", path, header_no)
    return build_hypergraph(raw, n_vertices, policy=policy)


def read_gamma_file(path: PathLike, h: EdvwHypergraph) -> EdvwHypergraph:
    """
    Override vertex weights from `edge_index vertex gamma` lines.

    Entries not listed keep their current gamma. Each entry must name an existing membership.
    """
    path = str(path)
    members = [dict(e.members) for e in h.hyperedges]
    for line_no, tokens in _data_lines(path):
        if len(tokens) != 3:
            raise ParseError("Expected 'edge_index vertex gamma'", path, line_no)
        try:
            e, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError("Edge index and vertex must be integers", path, line_no)
        if not (0 <= e < h.n_edges) or v not in members[e]:
            raise ParseError(f"Vertex {v} is not a member of hyperedge {e}", path, line_no)
        members[e][v] = _parse_positive(tokens[2], "Vertex weight", path, line_no)
    edges = tuple(Hyperedge(weight=e.weight, members=m) for e, m in zip(h.hyperedges, members))
    return EdvwHypergraph(n_vertices=h.n_vertices, hyperedges=edges, vertex_names=h.vertex_names)


# =============================================================================
# LABEL FILES
# =============================================================================

def write_labels(labels: Sequence, path: PathLike) -> None:
    """One label per line, newline-terminated."""
    with open(path, "w", encoding="utf-8") as f:
        for label in labels:
            f.write(f"{label}\n")


def read_labels(path: PathLike) -> List[str]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return [line.strip() for line in f if line.strip()]
    except OSError as e:
        raise InputError(f"Cannot read labels {path}: {e.strerror or e}")


# =============================================================================
# SHIPPED SCHEMAS
# =============================================================================

def _schema_description(path: Path) -> str:
    """First comment line of a schema file, without the '#'."""
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            stripped = line.strip()
            if stripped.startswith("#"):
                return stripped.lstrip("#").strip()
            if stripped:
                break
    return ""


def _filter_schemas_by_names(schemas: list, names) -> list:
    if names is None:
        return schemas
    name_list = [names] if isinstance(names, str) else names
    return [s for s in schemas if s["name"] in name_list]


def list_schemas(names=None) -> List[Dict[str, str]]:
    """
    Shipped dataset schemas.

    Args:
        names: None for all schemas, string for one, list for several

    Returns:
        List of {"name", "path", "description"} dicts sorted by name
    """
    schemas = [
        {"name": path.stem, "path": str(path), "description": _schema_description(path)}
        for path in sorted(SCHEMAS_DIR.glob(f"*{SCHEMA_SUFFIX}"))
    ]
    return _filter_schemas_by_names(schemas, names)


def resolve_schema(name_or_path: PathLike) -> Path:
    """An existing file path as given, otherwise the shipped schema of that bare name."""
    path = Path(name_or_path)
    if path.exists() or path.parent != Path("."):
        return path
    found = list_schemas(path.stem if path.suffix == SCHEMA_SUFFIX else str(name_or_path))
    if found:
        return Path(found[0]["path"])
    return path
