"""Core data model for drillable dashboards.

A dashboard here is a forest of nodes. Leaves are chart atoms (one card,
one or more data series). Internal nodes are piles: an ordered group of
children plus a *representation* that says how the pile draws itself in
place of its children (a text label, a computed series, one archetype
child, a scatter projection, a small-multiples grid, or overlaid series).

All values are immutable after construction; mutation elsewhere in the
package works by building replacement objects. That makes hierarchies safe
to share across any number of concurrent reader sessions.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

from .errors import ModelInvariantError


class AxisKind(str, Enum):
    TEMPORAL = "temporal"
    CATEGORICAL = "categorical"
    QUANTITATIVE = "quantitative"


class ChartKind(str, Enum):
    LINE = "line"
    BAR = "bar"
    SCATTER = "scatter"


class LabelStat(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"
    MIN = "min"
    MAX = "max"
    CUSTOM = "custom"


class ArithmeticOp(str, Enum):
    ADD = "add"
    SUBTRACT = "subtract"
    MULTIPLY = "multiply"
    DIVIDE = "divide"
    AVERAGE = "average"


class AxisPolicy(str, Enum):
    SHARED_Y = "sharedY"
    DUAL_Y = "dualY"


@dataclass(frozen=True)
class AxisDescriptor:
    """Semantic description of one chart axis.

    For temporal/categorical axes the domain is the ordered list of x-keys
    (kept as opaque strings). For quantitative axes it is a (lo, hi) range.
    Two axes describe the *same dimension* when dimension and unit match;
    documents must not reuse a dimension/unit pair with a different kind.
    """

    dimension: str
    unit: str | None
    kind: AxisKind
    domain: tuple

    def __post_init__(self):
        if not self.domain:
            raise ModelInvariantError(f"axis {self.dimension!r}: empty domain")
        if self.kind is AxisKind.QUANTITATIVE:
            if len(self.domain) != 2:
                raise ModelInvariantError(
                    f"axis {self.dimension!r}: quantitative domain must be (lo, hi)"
                )
            lo, hi = self.domain
            if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in (lo, hi)):
                raise ModelInvariantError(
                    f"axis {self.dimension!r}: non-finite quantitative domain"
                )
            if lo > hi:
                raise ModelInvariantError(f"axis {self.dimension!r}: lo > hi")
        else:
            if not all(isinstance(v, str) for v in self.domain):
                raise ModelInvariantError(
                    f"axis {self.dimension!r}: {self.kind.value} domain keys must be strings"
                )
            if len(set(self.domain)) != len(self.domain):
                raise ModelInvariantError(
                    f"axis {self.dimension!r}: duplicate keys in domain"
                )

    def same_dimension(self, other: "AxisDescriptor") -> bool:
        return self.dimension == other.dimension and self.unit == other.unit


@dataclass(frozen=True)
class DataSeries:
    """One named series of (x-key, optional y) points over an x axis.

    Points are keyed by distinct x-values from ``x.domain`` in domain order.
    A point with y=None is a legal gap and must survive round-trips.
    """

    x: AxisDescriptor
    y: AxisDescriptor
    points: tuple[tuple[str, float | None], ...]
    name: str

    def __post_init__(self):
        keys = [k for k, _ in self.points]
        if len(set(keys)) != len(keys):
            raise ModelInvariantError(f"series {self.name!r}: duplicate point keys")
        order = {k: i for i, k in enumerate(self.x.domain)}
        last = -1
        for k in keys:
            if k not in order:
                raise ModelInvariantError(
                    f"series {self.name!r}: key {k!r} not in x domain"
                )
            if order[k] < last:
                raise ModelInvariantError(f"series {self.name!r}: points out of domain order")
            last = order[k]
        for k, v in self.points:
            if v is not None and not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ModelInvariantError(
                    f"series {self.name!r}: non-finite value at {k!r}"
                )

    def value_at(self, key: str) -> float | None:
        for k, v in self.points:
            if k == key:
                return v
        return None

    def values(self) -> dict[str, float | None]:
        return dict(self.points)


@dataclass(frozen=True)
class ChartAtom:
    """A leaf chart: the unit the author starts from and the reader drills to."""

    id: str
    kind: ChartKind
    series: tuple[DataSeries, ...]
    title: str
    annotation: str | None = None
    source_ref: tuple[str, tuple[str, ...]] | None = None

    def __post_init__(self):
        if not self.series:
            raise ModelInvariantError(f"atom {self.id!r}: needs at least one series")
        if self.kind in (ChartKind.LINE, ChartKind.BAR):
            first = self.series[0].x
            for s in self.series[1:]:
                if s.x != first:
                    raise ModelInvariantError(
                        f"atom {self.id!r}: all series must share one x axis"
                    )


@dataclass(frozen=True)
class LabelRep:
    text: str
    stat: LabelStat


@dataclass(frozen=True)
class SummarizedRep:
    series: DataSeries
    op: ArithmeticOp


@dataclass(frozen=True)
class ArchetypeRep:
    child_id: str


@dataclass(frozen=True)
class ProjectedRep:
    points: tuple[tuple[float, float, str], ...]
    x_dim: AxisDescriptor
    y_dim: AxisDescriptor


@dataclass(frozen=True)
class JuxtaposedRep:
    pass


@dataclass(frozen=True)
class OverlaidRep:
    axis_policy: AxisPolicy


Representation = Union[
    LabelRep, SummarizedRep, ArchetypeRep, ProjectedRep, JuxtaposedRep, OverlaidRep
]


@dataclass(frozen=True)
class Pile:
    """An aggregate node: ordered children plus the representation that stands in for them."""

    id: str
    children: tuple[str, ...]
    representation: Representation
    title: str
    annotation: str | None = None

    def __post_init__(self):
        if len(self.children) < 2:
            raise ModelInvariantError(f"pile {self.id!r}: needs at least two children")
        if len(set(self.children)) != len(self.children):
            raise ModelInvariantError(f"pile {self.id!r}: duplicate children")
        if isinstance(self.representation, ArchetypeRep):
            if self.representation.child_id not in self.children:
                raise ModelInvariantError(
                    f"pile {self.id!r}: archetype child "
                    f"{self.representation.child_id!r} is not a direct child"
                )


Node = Union[ChartAtom, Pile]


def exposed_series(node: Node) -> DataSeries | None:
    """The single data series a node contributes to arithmetic-style merges.

    Single-series line/bar atoms and arithmetic piles expose one; every
    other node (labels, archetypes, grids, overlays, projections, scatter
    or multi-series atoms) does not.
    """
    if isinstance(node, ChartAtom):
        if node.kind in (ChartKind.LINE, ChartKind.BAR) and len(node.series) == 1:
            return node.series[0]
        return None
    if isinstance(node.representation, SummarizedRep):
        return node.representation.series
    return None


_GENERATED_ID = re.compile(r"^(atom|pile)-(\d+)$")


@dataclass(frozen=True, eq=False)
class Hierarchy:
    """An ordered forest of atoms and piles.

    ``leaf_order`` is the left-to-right frontier of ``roots`` and is the
    canonical chart order every view must preserve. Derived lookup tables
    (parents, leaf positions) are precomputed at construction.
    """

    nodes: Mapping[str, Node]
    roots: tuple[str, ...]
    leaf_order: tuple[str, ...]
    parents: Mapping[str, str] = field(repr=False)
    _leaf_index: Mapping[str, int] = field(repr=False)

    @classmethod
    def build(cls, nodes: Iterable[Node], roots: Sequence[str]) -> "Hierarchy":
        node_map: dict[str, Node] = {}
        for node in nodes:
            if node.id in node_map:
                raise ModelInvariantError(f"duplicate node id {node.id!r}")
            node_map[node.id] = node

        parents: dict[str, str] = {}
        for node in node_map.values():
            if isinstance(node, Pile):
                for child in node.children:
                    if child not in node_map:
                        raise ModelInvariantError(
                            f"pile {node.id!r} references missing child {child!r}"
                        )
                    if child in parents:
                        raise ModelInvariantError(
                            f"node {child!r} has more than one parent"
                        )
                    parents[child] = node.id

        roots = tuple(roots)
        if len(set(roots)) != len(roots):
            raise ModelInvariantError("duplicate root ids")
        for rid in roots:
            if rid not in node_map:
                raise ModelInvariantError(f"unknown root {rid!r}")
            if rid in parents:
                raise ModelInvariantError(f"root {rid!r} has a parent")

        # Frontier walk also proves reachability (and thereby acyclicity,
        # since parent uniqueness already holds).
        leaf_order: list[str] = []
        seen: set[str] = set()

        def walk(nid: str):
            if nid in seen:
                raise ModelInvariantError(f"node {nid!r} reached twice")
            seen.add(nid)
            node = node_map[nid]
            if isinstance(node, Pile):
                for child in node.children:
                    walk(child)
            else:
                leaf_order.append(nid)

        for rid in roots:
            walk(rid)
        if len(seen) != len(node_map):
            orphans = sorted(set(node_map) - seen)
            raise ModelInvariantError(f"unreachable nodes: {orphans}")

        leaf_index = {nid: i for i, nid in enumerate(leaf_order)}
        h = cls(
            nodes=node_map,
            roots=roots,
            leaf_order=tuple(leaf_order),
            parents=parents,
            _leaf_index=leaf_index,
        )
        h._check_overlay_policies()
        return h

    def _check_overlay_policies(self):
        for node in self.nodes.values():
            if not isinstance(node, Pile):
                continue
            rep = node.representation
            if not isinstance(rep, OverlaidRep):
                continue
            dims = []
            for child in node.children:
                s = exposed_series(self.nodes[child])
                if s is None:
                    raise ModelInvariantError(
                        f"pile {node.id!r}: overlay child {child!r} exposes no series"
                    )
                if not any(s.y.same_dimension(d) for d in dims):
                    dims.append(s.y)
            if rep.axis_policy is AxisPolicy.SHARED_Y and len(dims) != 1:
                raise ModelInvariantError(
                    f"pile {node.id!r}: sharedY overlay with {len(dims)} y-dimensions"
                )
            if rep.axis_policy is AxisPolicy.DUAL_Y and len(dims) != 2:
                raise ModelInvariantError(
                    f"pile {node.id!r}: dualY overlay needs exactly 2 y-dimensions"
                )

    # --- lookups ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hierarchy):
            return NotImplemented
        return dict(self.nodes) == dict(other.nodes) and self.roots == other.roots

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise _unknown(node_id) from None

    def parent_of(self, node_id: str) -> str | None:
        self.node(node_id)
        return self.parents.get(node_id)

    def is_pile(self, node_id: str) -> bool:
        return isinstance(self.node(node_id), Pile)

    def leaves_under(self, node_id: str) -> tuple[str, ...]:
        node = self.node(node_id)
        if isinstance(node, ChartAtom):
            return (node_id,)
        out: list[str] = []
        for child in node.children:
            out.extend(self.leaves_under(child))
        return tuple(out)

    def first_leaf_index(self, node_id: str) -> int:
        node = self.node(node_id)
        while isinstance(node, Pile):
            node = self.nodes[node.children[0]]
        return self._leaf_index[node.id]

    def is_ancestor(self, ancestor_id: str, node_id: str) -> bool:
        """True when ancestor_id is a proper ancestor of node_id."""
        cur = self.parents.get(node_id)
        while cur is not None:
            if cur == ancestor_id:
                return True
            cur = self.parents.get(cur)
        return False

    def depth_below_root(self, node_id: str) -> int:
        self.node(node_id)
        depth = 0
        cur = self.parents.get(node_id)
        while cur is not None:
            depth += 1
            cur = self.parents.get(cur)
        return depth

    def next_generated_id(self, prefix: str) -> str:
        """Next free 'atom-<n>' / 'pile-<n>' style id."""
        top = 0
        for nid in self.nodes:
            m = _GENERATED_ID.match(nid)
            if m and m.group(1) == prefix:
                top = max(top, int(m.group(2)))
        return f"{prefix}-{top + 1}"


def _unknown(node_id: str):
    from .errors import UnknownNodeError

    return UnknownNodeError(f"unknown node {node_id!r}")


def empty_hierarchy() -> Hierarchy:
    return Hierarchy(nodes={}, roots=(), leaf_order=(), parents={}, _leaf_index={})
