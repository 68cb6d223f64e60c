"""Merge operators and the compatibility engine that gates them.

Authors build a hierarchy by merging unparented (root-level) nodes into
piles. Each operator first runs through :func:`applicable_ops`, which maps
every operator kind to an enabled/disabled verdict with a human-readable
reason. Disabled operators raise :class:`DisabledError` when invoked, so a
UI can gray buttons out and the engine still defends itself.

Arithmetic ("summarize") follows a strict null policy: any point where an
operand is null, a divisor is zero, or the result is non-finite becomes a
null point in the output. A merge as a whole only fails when every point
would be null.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import (
    AllNullResultError,
    AncestryConflictError,
    ChosenNotMemberError,
    DisabledError,
    EmptyIntersectionError,
    PolicyMismatchError,
    TooFewNodesError,
    UnknownPileError,
)
from .model import (
    ArchetypeRep,
    ArithmeticOp,
    AxisDescriptor,
    AxisKind,
    AxisPolicy,
    ChartAtom,
    DataSeries,
    Hierarchy,
    JuxtaposedRep,
    LabelRep,
    LabelStat,
    OverlaidRep,
    Pile,
    ProjectedRep,
    SummarizedRep,
    exposed_series,
)

__all__ = [
    "AggregationConfig",
    "OpKind",
    "OpVerdict",
    "applicable_ops",
    "attach",
    "merge_archetype",
    "merge_juxtapose",
    "merge_label",
    "merge_overlay",
    "merge_project",
    "merge_summarize",
    "split",
]


class OpKind(str, Enum):
    LABEL = "label"
    SUMMARIZE = "summarize"
    ARCHETYPE = "archetype"
    PROJECT = "project"
    JUXTAPOSE = "juxtapose"
    OVERLAY = "overlay"


@dataclass(frozen=True)
class OpVerdict:
    enabled: bool
    reason: str | None = None

    @classmethod
    def ok(cls) -> "OpVerdict":
        return cls(True)

    @classmethod
    def no(cls, reason: str) -> "OpVerdict":
        return cls(False, reason)


@dataclass(frozen=True)
class AggregationConfig:
    """Card geometry assumed when judging juxtaposition legibility."""

    card_width_px: float = 300.0
    min_cell_px: float = 60.0


DEFAULT_CONFIG = AggregationConfig()


def _operands(h: Hierarchy, node_ids: Sequence[str]) -> list[str]:
    ids = list(dict.fromkeys(node_ids))
    if len(ids) < 2:
        raise TooFewNodesError(f"need at least 2 distinct nodes, got {len(ids)}")
    for nid in ids:
        h.node(nid)
        parent = h.parent_of(nid)
        if parent is not None:
            raise AncestryConflictError(
                f"node {nid!r} is already merged into {parent!r}"
            )
    return ids


def _distinct_y_dims(series: Iterable[DataSeries]) -> list[AxisDescriptor]:
    dims: list[AxisDescriptor] = []
    for s in series:
        if not any(s.y.same_dimension(d) for d in dims):
            dims.append(s.y)
    return dims


def _series_verdict(
    series: Sequence[DataSeries | None], *, need_same_y: bool
) -> OpVerdict:
    if any(s is None for s in series):
        return OpVerdict.no("non-series operand")
    first = series[0]
    if any(not s.x.same_dimension(first.x) for s in series[1:]):
        return OpVerdict.no("x-dimension mismatch")
    if any(s.x.domain != first.x.domain for s in series[1:]):
        return OpVerdict.no("x-domain mismatch")
    if need_same_y and any(not s.y.same_dimension(first.y) for s in series[1:]):
        return OpVerdict.no("y-dimension mismatch")
    return OpVerdict.ok()


def _grid_factor(h: Hierarchy, node_id: str) -> int:
    """How many sub-columns a node occupies when rendered inside a grid cell."""
    node = h.node(node_id)
    if isinstance(node, Pile) and isinstance(node.representation, JuxtaposedRep):
        inner = max(_grid_factor(h, c) for c in node.children)
        return math.ceil(math.sqrt(len(node.children))) * inner
    return 1


def _juxtapose_verdict(
    h: Hierarchy, ids: Sequence[str], config: AggregationConfig
) -> OpVerdict:
    cols = math.ceil(math.sqrt(len(ids)))
    factor = cols * max(_grid_factor(h, nid) for nid in ids)
    if config.card_width_px / factor < config.min_cell_px:
        return OpVerdict.no("cells below legibility minimum")
    return OpVerdict.ok()


def applicable_ops(
    h: Hierarchy,
    node_ids: Sequence[str],
    config: AggregationConfig = DEFAULT_CONFIG,
) -> dict[OpKind, OpVerdict]:
    """Verdict per operator for a candidate merge selection.

    Operands must be at least two distinct unparented nodes; anything else
    is a selection error, not a per-operator verdict.
    """
    ids = _operands(h, node_ids)
    series = [exposed_series(h.node(nid)) for nid in ids]

    verdicts: dict[OpKind, OpVerdict] = {
        OpKind.LABEL: OpVerdict.ok(),
        OpKind.ARCHETYPE: OpVerdict.ok(),
        OpKind.SUMMARIZE: _series_verdict(series, need_same_y=True),
        OpKind.JUXTAPOSE: _juxtapose_verdict(h, ids, config),
    }

    if len(ids) != 2:
        verdicts[OpKind.PROJECT] = OpVerdict.no("requires exactly 2 operands")
    else:
        verdicts[OpKind.PROJECT] = _series_verdict(series, need_same_y=False)

    overlay = _series_verdict(series, need_same_y=False)
    if overlay.enabled:
        dims = _distinct_y_dims(series)
        if len(dims) > 2:
            overlay = OpVerdict.no("y-dimensions fit neither one shared axis nor two")
    verdicts[OpKind.OVERLAY] = overlay
    return verdicts


def _require(verdicts: Mapping[OpKind, OpVerdict], op: OpKind):
    v = verdicts[op]
    if not v.enabled:
        raise DisabledError(v.reason or f"{op.value} not applicable")


def _canonical(h: Hierarchy, ids: Sequence[str]) -> tuple[str, ...]:
    return tuple(sorted(ids, key=h.first_leaf_index))


# --- label -------------------------------------------------------------------

_STATS = {
    LabelStat.MEAN: statistics.fmean,
    LabelStat.MEDIAN: statistics.median,
    LabelStat.MIN: min,
    LabelStat.MAX: max,
}


def format_scalar(value: float) -> str:
    return format(value, ".12g")


def merge_label(
    h: Hierarchy,
    node_ids: Sequence[str],
    stat: LabelStat,
    custom_text: str | None = None,
) -> Pile:
    ids = _operands(h, node_ids)
    _require(applicable_ops(h, ids), OpKind.LABEL)
    if stat is LabelStat.CUSTOM:
        if not custom_text:
            raise ValueError("custom label needs text")
        text = custom_text
    else:
        if custom_text is not None:
            raise ValueError("text is only accepted with the custom stat")
        values = [
            v
            for nid in ids
            for leaf in h.leaves_under(nid)
            for s in h.node(leaf).series
            for _, v in s.points
            if v is not None
        ]
        if not values:
            raise AllNullResultError("no values to summarize into a label")
        text = format_scalar(float(_STATS[stat](values)))
    return Pile(
        id=h.next_generated_id("pile"),
        children=_canonical(h, ids),
        representation=LabelRep(text=text, stat=stat),
        title=text,
    )


# --- summarize ---------------------------------------------------------------

_OP_SYMBOL = {
    ArithmeticOp.ADD: " + ",
    ArithmeticOp.SUBTRACT: " - ",
    ArithmeticOp.MULTIPLY: " * ",
    ArithmeticOp.DIVIDE: " / ",
}


def _combine(op: ArithmeticOp, values: Sequence[float | None]) -> float | None:
    if any(v is None for v in values):
        return None
    if op is ArithmeticOp.ADD:
        out = sum(values)
    elif op is ArithmeticOp.AVERAGE:
        out = sum(values) / len(values)
    elif op is ArithmeticOp.SUBTRACT:
        out = values[0] - values[1]
    elif op is ArithmeticOp.MULTIPLY:
        out = math.prod(values)
    else:
        if values[1] == 0:
            return None
        out = values[0] / values[1]
    return out if math.isfinite(out) else None


def _result_y(series: Sequence[DataSeries], op: ArithmeticOp, values) -> AxisDescriptor:
    ys = [s.y for s in series]
    if op in (ArithmeticOp.ADD, ArithmeticOp.SUBTRACT, ArithmeticOp.AVERAGE):
        dimension, unit = ys[0].dimension, ys[0].unit
    elif op is ArithmeticOp.MULTIPLY:
        dimension = "×".join(y.dimension for y in ys)
        units = [y.unit for y in ys]
        unit = "·".join(u for u in units if u) if all(units) else None
    else:
        dimension = f"{ys[0].dimension}/{ys[1].dimension}"
        unit = f"{ys[0].unit}/{ys[1].unit}" if ys[0].unit and ys[1].unit else None
    present = [v for v in values if v is not None]
    return AxisDescriptor(
        dimension=dimension,
        unit=unit,
        kind=AxisKind.QUANTITATIVE,
        domain=(min(present), max(present)),
    )


def summarize_series(series: Sequence[DataSeries], op: ArithmeticOp, name: str) -> DataSeries:
    """Pointwise arithmetic over series with identical x domains."""
    domain = series[0].x.domain
    maps = [s.values() for s in series]
    values = [_combine(op, [m.get(k) for m in maps]) for k in domain]
    if all(v is None for v in values):
        raise AllNullResultError(f"{op.value} over these operands is null everywhere")
    return DataSeries(
        x=series[0].x,
        y=_result_y(series, op, values),
        points=tuple(zip(domain, values)),
        name=name,
    )


def merge_summarize(
    h: Hierarchy, node_ids: Sequence[str], op: ArithmeticOp
) -> Pile:
    ids = _operands(h, node_ids)
    _require(applicable_ops(h, ids), OpKind.SUMMARIZE)
    if op in (ArithmeticOp.SUBTRACT, ArithmeticOp.DIVIDE) and len(ids) != 2:
        raise DisabledError(f"{op.value} requires exactly 2 operands, got {len(ids)}")

    # Noncommutative ops honor selection order; the pile's children stay canonical.
    series = [exposed_series(h.node(nid)) for nid in ids]
    titles = [h.node(nid).title for nid in ids]
    if op is ArithmeticOp.AVERAGE:
        title = f"avg({', '.join(titles)})"
    else:
        title = _OP_SYMBOL[op].join(titles)
    result = summarize_series(series, op, title)
    return Pile(
        id=h.next_generated_id("pile"),
        children=_canonical(h, ids),
        representation=SummarizedRep(series=result, op=op),
        title=title,
    )


# --- archetype ---------------------------------------------------------------

def merge_archetype(h: Hierarchy, node_ids: Sequence[str], chosen_id: str) -> Pile:
    ids = _operands(h, node_ids)
    _require(applicable_ops(h, ids), OpKind.ARCHETYPE)
    if chosen_id not in ids:
        raise ChosenNotMemberError(f"{chosen_id!r} is not among the merged nodes")
    return Pile(
        id=h.next_generated_id("pile"),
        children=_canonical(h, ids),
        representation=ArchetypeRep(child_id=chosen_id),
        title=h.node(chosen_id).title,
    )


# --- project -----------------------------------------------------------------

def merge_project(h: Hierarchy, node_a: str, node_b: str) -> Pile:
    ids = _operands(h, [node_a, node_b])
    _require(applicable_ops(h, ids), OpKind.PROJECT)
    sa = exposed_series(h.node(node_a))
    sb = exposed_series(h.node(node_b))
    va, vb = sa.values(), sb.values()
    points = tuple(
        (va[k], vb[k], k)
        for k in sa.x.domain
        if va.get(k) is not None and vb.get(k) is not None
    )
    if not points:
        raise EmptyIntersectionError("no x-key has values in both operands")
    return Pile(
        id=h.next_generated_id("pile"),
        children=_canonical(h, ids),
        representation=ProjectedRep(points=points, x_dim=sa.y, y_dim=sb.y),
        title=f"{h.node(node_a).title} vs {h.node(node_b).title}",
    )


# --- juxtapose ---------------------------------------------------------------

def merge_juxtapose(
    h: Hierarchy,
    node_ids: Sequence[str],
    config: AggregationConfig = DEFAULT_CONFIG,
) -> Pile:
    ids = _operands(h, node_ids)
    _require(applicable_ops(h, ids, config), OpKind.JUXTAPOSE)
    return Pile(
        id=h.next_generated_id("pile"),
        children=_canonical(h, ids),
        representation=JuxtaposedRep(),
        title=f"{len(ids)} charts",
    )


# --- overlay -----------------------------------------------------------------

def merge_overlay(
    h: Hierarchy, node_ids: Sequence[str], axis_policy: AxisPolicy
) -> Pile:
    ids = _operands(h, node_ids)
    _require(applicable_ops(h, ids), OpKind.OVERLAY)
    series = [exposed_series(h.node(nid)) for nid in ids]
    dims = _distinct_y_dims(series)
    if axis_policy is AxisPolicy.SHARED_Y and len(dims) != 1:
        raise PolicyMismatchError(
            f"sharedY needs one y-dimension, selection has {len(dims)}"
        )
    if axis_policy is AxisPolicy.DUAL_Y and len(dims) != 2:
        raise PolicyMismatchError(
            f"dualY needs exactly 2 distinct y-dimensions, selection has {len(dims)}"
        )
    return Pile(
        id=h.next_generated_id("pile"),
        children=_canonical(h, ids),
        representation=OverlaidRep(axis_policy=axis_policy),
        title=" & ".join(h.node(nid).title for nid in ids),
    )


# --- attach / split ----------------------------------------------------------

def attach(h: Hierarchy, pile: Pile) -> Hierarchy:
    """Insert a freshly merged pile, replacing its children among the roots.

    The pile lands at the position of its earliest child, so merging k
    root-level nodes shrinks the root list by exactly k - 1.
    """
    children = set(pile.children)
    roots: list[str] = []
    inserted = False
    for rid in h.roots:
        if rid in children:
            if not inserted:
                roots.append(pile.id)
                inserted = True
            continue
        roots.append(rid)
    if not inserted:
        raise AncestryConflictError("pile children must be current roots")
    return Hierarchy.build(list(h.nodes.values()) + [pile], roots)


_SERIES_DEPENDENT = (SummarizedRep, ProjectedRep, OverlaidRep)


def split(h: Hierarchy, pile_id: str) -> Hierarchy:
    """Remove a pile; its children take its place among their new siblings."""
    node = h.nodes.get(pile_id)
    if node is None or not isinstance(node, Pile):
        raise UnknownPileError(f"{pile_id!r} is not a pile")

    nodes = {nid: n for nid, n in h.nodes.items() if nid != pile_id}
    parent_id = h.parent_of(pile_id)
    if parent_id is None:
        i = h.roots.index(pile_id)
        roots = h.roots[:i] + node.children + h.roots[i + 1 :]
        return Hierarchy.build(nodes.values(), roots)

    parent = h.nodes[parent_id]
    rep = parent.representation
    if isinstance(rep, _SERIES_DEPENDENT):
        raise DisabledError(
            f"parent pile {parent_id!r} is computed from this pile; split the parent first"
        )
    if isinstance(rep, ArchetypeRep) and rep.child_id == pile_id:
        rep = ArchetypeRep(child_id=node.children[0])
    i = parent.children.index(pile_id)
    new_children = parent.children[:i] + node.children + parent.children[i + 1 :]
    nodes[parent_id] = replace(parent, children=new_children, representation=rep)
    return Hierarchy.build(nodes.values(), h.roots)
