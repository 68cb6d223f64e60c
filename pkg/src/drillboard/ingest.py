"""Tabular data ingestion and author-side chart generation.

Tables arrive as CSV or TSV with one or more header rows. The last header
row names the feature columns; any rows above it carry group labels, so

    ,mammals,mammals,birds
    year,cats,dogs,parrots

puts cats and dogs in the "mammals" group. The first column is the key
axis shared by every feature. Keys stay opaque ordered strings; values are
floats with empty cells kept as nulls.

Feature and key headers may carry a unit in a trailing parenthesis, e.g.
"funds (USD)". A table-wide value dimension can be supplied when all
columns measure the same quantity (so charts built from different columns
stay arithmetic-compatible).
"""

from __future__ import annotations

import csv
import io
import math
import re
import statistics
from dataclasses import dataclass

from .errors import (
    DuplicateFeatureNameError,
    DuplicateKeyError,
    EmptyTableError,
    IngestError,
    NonNumericCellError,
    RaggedRowsError,
    UnknownFeatureError,
    UnknownGroupPathError,
    UnknownTableError,
)
from .model import AxisDescriptor, AxisKind, ChartAtom, ChartKind, DataSeries

__all__ = [
    "DataTable",
    "FeatureColumn",
    "SelectionQuery",
    "export_table_csv",
    "format_number",
    "infer_chart_kind",
    "parse_table",
    "select_charts",
]


@dataclass(frozen=True)
class FeatureColumn:
    name: str
    group_path: tuple[str, ...]
    values: tuple[float | None, ...]
    unit: str | None = None


@dataclass(frozen=True)
class DataTable:
    id: str
    key: AxisDescriptor
    features: tuple[FeatureColumn, ...]
    value_dimension: str | None = None
    value_unit: str | None = None

    def feature(self, name: str) -> FeatureColumn:
        for f in self.features:
            if f.name == name:
                return f
        raise UnknownFeatureError(f"no feature named {name!r}")

    def group_tree(self) -> dict:
        """Nested {label: subtree} dict; feature leaves map to None."""
        tree: dict = {}
        for f in self.features:
            cur = tree
            for label in f.group_path:
                cur = cur.setdefault(label, {})
            cur[f.name] = None
        return tree


_UNIT_SUFFIX = re.compile(r"^(.*\S)\s*\(([^()]+)\)\s*$")
_TEMPORAL_KEY = re.compile(r"^\d{4}(-\d{2}){0,2}$")


def _split_unit(header: str) -> tuple[str, str | None]:
    m = _UNIT_SUFFIX.match(header)
    if m:
        return m.group(1), m.group(2).strip()
    return header, None


def _numeric_key(key: str) -> bool:
    try:
        return math.isfinite(float(key))
    except ValueError:
        return False


def _key_kind(keys: list[str]) -> AxisKind:
    if all(_TEMPORAL_KEY.match(k) or _numeric_key(k) for k in keys):
        return AxisKind.TEMPORAL
    return AxisKind.CATEGORICAL


def parse_table(
    data: bytes,
    format: str = "csv",
    header_rows: int = 1,
    *,
    table_id: str = "table-1",
    value_dimension: str | None = None,
    value_unit: str | None = None,
) -> DataTable:
    """Parse delimited text into an immutable table."""
    if format not in ("csv", "tsv"):
        raise ValueError(f"format must be csv or tsv, not {format!r}")
    if header_rows < 1:
        raise ValueError("header_rows must be at least 1")

    text = data.decode("utf-8-sig")
    delimiter = "\t" if format == "tsv" else ","
    rows = [r for r in csv.reader(io.StringIO(text), delimiter=delimiter) if r]
    if not rows:
        raise EmptyTableError("no rows")
    if len(rows) < header_rows:
        raise EmptyTableError(f"expected {header_rows} header rows, found {len(rows)}")

    width = len(rows[header_rows - 1])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsError(
                f"row {i + 1} has {len(row)} cells, header has {width}"
            )
    if width < 2:
        raise EmptyTableError("no feature columns")
    if len(rows) <= header_rows:
        raise EmptyTableError("no data rows")

    name_row = rows[header_rows - 1]
    group_rows = rows[: header_rows - 1]
    key_name, key_unit = _split_unit(name_row[0].strip()) if name_row[0].strip() else ("key", None)

    names: list[tuple[str, str | None]] = []
    paths: list[tuple[str, ...]] = []
    for col in range(1, width):
        raw = name_row[col].strip()
        if not raw:
            raise IngestError(f"empty feature name in column {col + 1}")
        names.append(_split_unit(raw))
        paths.append(tuple(g[col].strip() for g in group_rows if g[col].strip()))
    seen: set[tuple] = set()
    for (name, _), path in zip(names, paths):
        full = path + (name,)
        if full in seen:
            raise DuplicateFeatureNameError(f"duplicate feature {'/'.join(full)!r}")
        seen.add(full)

    keys: list[str] = []
    columns: list[list[float | None]] = [[] for _ in range(width - 1)]
    for r, row in enumerate(rows[header_rows:], start=header_rows + 1):
        key = row[0]
        if key in keys:
            raise DuplicateKeyError(f"duplicate key {key!r} at row {r}")
        keys.append(key)
        for c, cell in enumerate(row[1:], start=1):
            cell = cell.strip()
            if not cell:
                columns[c - 1].append(None)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise NonNumericCellError(r, c + 1, cell) from None
            if not math.isfinite(v):
                raise NonNumericCellError(r, c + 1, cell)
            columns[c - 1].append(v)

    key_axis = AxisDescriptor(
        dimension=key_name,
        unit=key_unit,
        kind=_key_kind(keys),
        domain=tuple(keys),
    )
    features = tuple(
        FeatureColumn(name=name, group_path=path, values=tuple(col), unit=unit)
        for (name, unit), path, col in zip(names, paths, columns)
    )
    return DataTable(
        id=table_id,
        key=key_axis,
        features=features,
        value_dimension=value_dimension,
        value_unit=value_unit,
    )


def format_number(v: float) -> str:
    """Shortest exact decimal form: round-trips through float unchanged."""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def export_table_csv(table: DataTable) -> bytes:
    """Canonical CSV: comma-delimited, LF endings, minimal quoting."""
    depth = max((len(f.group_path) for f in table.features), default=0)

    def headed(name: str, unit: str | None) -> str:
        return f"{name} ({unit})" if unit else name

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for level in range(depth):
        writer.writerow(
            [""]
            + [
                f.group_path[level] if len(f.group_path) > level else ""
                for f in table.features
            ]
        )
    writer.writerow(
        [headed(table.key.dimension, table.key.unit)]
        + [headed(f.name, f.unit) for f in table.features]
    )
    for i, key in enumerate(table.key.domain):
        writer.writerow(
            [key]
            + [
                "" if f.values[i] is None else format_number(f.values[i])
                for f in table.features
            ]
        )
    return out.getvalue().encode("utf-8")


def infer_chart_kind(table: DataTable, feature_name: str) -> ChartKind:
    """Temporal keys chart as lines, categorical keys as bars."""
    table.feature(feature_name)
    if table.key.kind is AxisKind.TEMPORAL:
        return ChartKind.LINE
    return ChartKind.BAR


_COMPARATORS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}
_COMPARATOR_ALIASES = {"≤": "<=", "≥": ">=", "==": "="}


@dataclass(frozen=True)
class SelectionQuery:
    """Which features become charts: a group-path prefix plus aggregate filters.

    A predicate (feature, cmp, number) keeps a candidate when a feature of
    that name in the candidate's own group has a mean value satisfying the
    comparison. Features sharing a group are treated as facets of one entity,
    so "fuelEfficiency > 15" keeps every feature of qualifying groups.
    """

    table_id: str
    group_path: tuple[str, ...] = ()
    predicates: tuple[tuple[str, str, float], ...] = ()


def _mean(values: tuple[float | None, ...]) -> float | None:
    present = [v for v in values if v is not None]
    return statistics.fmean(present) if present else None


def _passes(table: DataTable, f: FeatureColumn, predicates) -> bool:
    siblings = [g for g in table.features if g.group_path == f.group_path]
    for name, cmp, number in predicates:
        target = next((g for g in siblings if g.name == name), None)
        if target is None:
            return False
        mean = _mean(target.values)
        if mean is None or not _COMPARATORS[cmp](mean, number):
            return False
    return True


def select_charts(
    table: DataTable, query: SelectionQuery, *, id_start: int = 1
) -> list[ChartAtom]:
    """One atom per feature under the query's group passing all predicates."""
    if query.table_id != table.id:
        raise UnknownTableError(f"query targets table {query.table_id!r}")
    predicates = tuple(
        (name, _COMPARATOR_ALIASES.get(cmp, cmp), float(number))
        for name, cmp, number in query.predicates
    )
    for name, cmp, _ in predicates:
        if cmp not in _COMPARATORS:
            raise ValueError(f"unknown comparator {cmp!r}")
        if not any(f.name == name for f in table.features):
            raise UnknownFeatureError(f"no feature named {name!r}")

    qp = tuple(query.group_path)
    candidates = [f for f in table.features if f.group_path[: len(qp)] == qp]
    if qp and not candidates:
        raise UnknownGroupPathError(f"no features under {'/'.join(qp)!r}")

    atoms: list[ChartAtom] = []
    n = id_start
    for f in candidates:
        if not _passes(table, f, predicates):
            continue
        present = [v for v in f.values if v is not None]
        lo, hi = (min(present), max(present)) if present else (0.0, 1.0)
        y = AxisDescriptor(
            dimension=table.value_dimension or f.name,
            unit=f.unit or table.value_unit,
            kind=AxisKind.QUANTITATIVE,
            domain=(lo, hi),
        )
        series = DataSeries(
            x=table.key,
            y=y,
            points=tuple(zip(table.key.domain, f.values)),
            name=f.name,
        )
        title = f"{f.group_path[-1]} - {f.name}" if f.group_path else f.name
        atoms.append(
            ChartAtom(
                id=f"atom-{n}",
                kind=infer_chart_kind(table, f.name),
                series=(series,),
                title=title,
                source_ref=(table.id, f.group_path + (f.name,)),
            )
        )
        n += 1
    return atoms
