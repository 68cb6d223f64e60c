"""Documents: the saved unit combining tables, hierarchy, views, and layout.

A document serializes to one self-describing JSON file. Serialization is
canonical (fixed key order, stable number formatting via the json module),
so saving, loading, and saving again yields byte-identical output; tests
and version control both rely on that.

Author mutations live here as pure functions returning a new document with
the revision bumped. The HTTP layer wraps them in a per-document writer
lock; the CLI replays them from scripts.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, replace
from typing import Any, Mapping, Sequence

from .aggregation import (
    OpKind,
    attach,
    merge_archetype,
    merge_juxtapose,
    merge_label,
    merge_overlay,
    merge_project,
    merge_summarize,
    split,
    summarize_series,
)
from .errors import (
    DrillboardError,
    IntegrityViolationError,
    ReferencedByViewError,
    SchemaVersionMismatchError,
    UnknownTableError,
)
from .ingest import DataTable, FeatureColumn, SelectionQuery, select_charts
from .layout import FixedMode, LayoutConfig, SpaceFillingMode
from .model import (
    ArchetypeRep,
    ArithmeticOp,
    AxisDescriptor,
    AxisKind,
    AxisPolicy,
    ChartAtom,
    ChartKind,
    DataSeries,
    Hierarchy,
    JuxtaposedRep,
    LabelRep,
    LabelStat,
    OverlaidRep,
    Pile,
    ProjectedRep,
    Representation,
    SummarizedRep,
    exposed_series,
)
from .navigation import (
    ViewCatalog,
    assert_valid,
    top_view,
    validate_view,
)

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "DrillboardDocument",
    "apply_mutation",
    "load_document",
    "load_table",
    "mutate_add_charts",
    "mutate_annotate",
    "mutate_define_view",
    "mutate_delete_view",
    "mutate_merge",
    "mutate_rename",
    "mutate_split",
    "new_document",
    "save_document",
    "save_table",
    "serialize_document",
    "validate_document",
]


@dataclass(frozen=True)
class DrillboardDocument:
    id: str
    title: str
    tables: tuple[DataTable, ...]
    hierarchy: Hierarchy
    views: ViewCatalog
    layout_config: LayoutConfig
    revision: int = 1
    read_only: bool = False

    def table(self, table_id: str) -> DataTable:
        for t in self.tables:
            if t.id == table_id:
                return t
        raise UnknownTableError(f"no table {table_id!r} in document")

    def view_labels(self) -> list[str]:
        return ["top", "bottom"] + [label for label, _ in self.views.entries]


def new_document(
    doc_id: str,
    title: str,
    tables: Sequence[DataTable] = (),
    atoms: Sequence[ChartAtom] = (),
    layout_config: LayoutConfig | None = None,
) -> DrillboardDocument:
    return DrillboardDocument(
        id=doc_id,
        title=title,
        tables=tuple(tables),
        hierarchy=Hierarchy.build(list(atoms), [a.id for a in atoms]),
        views=ViewCatalog(),
        layout_config=layout_config or LayoutConfig(),
    )


# --- serialization -----------------------------------------------------------

def _axis_json(a: AxisDescriptor) -> dict:
    return {
        "dimension": a.dimension,
        "unit": a.unit,
        "kind": a.kind.value,
        "domain": list(a.domain),
    }


def _axis_load(d: Mapping) -> AxisDescriptor:
    return AxisDescriptor(
        dimension=d["dimension"],
        unit=d["unit"],
        kind=AxisKind(d["kind"]),
        domain=tuple(d["domain"]),
    )


def _series_json(s: DataSeries) -> dict:
    return {
        "name": s.name,
        "x": _axis_json(s.x),
        "y": _axis_json(s.y),
        "points": [[k, v] for k, v in s.points],
    }


def _series_load(d: Mapping) -> DataSeries:
    return DataSeries(
        x=_axis_load(d["x"]),
        y=_axis_load(d["y"]),
        points=tuple((k, v) for k, v in d["points"]),
        name=d["name"],
    )


def _atom_json(a: ChartAtom) -> dict:
    return {
        "id": a.id,
        "kind": a.kind.value,
        "title": a.title,
        "annotation": a.annotation,
        "sourceRef": [a.source_ref[0], list(a.source_ref[1])] if a.source_ref else None,
        "series": [_series_json(s) for s in a.series],
    }


def _atom_load(d: Mapping) -> ChartAtom:
    ref = d["sourceRef"]
    return ChartAtom(
        id=d["id"],
        kind=ChartKind(d["kind"]),
        series=tuple(_series_load(s) for s in d["series"]),
        title=d["title"],
        annotation=d["annotation"],
        source_ref=(ref[0], tuple(ref[1])) if ref else None,
    )


def _rep_json(rep: Representation) -> dict:
    if isinstance(rep, LabelRep):
        return {"type": "label", "stat": rep.stat.value, "text": rep.text}
    if isinstance(rep, SummarizedRep):
        return {"type": "summarized", "op": rep.op.value, "series": _series_json(rep.series)}
    if isinstance(rep, ArchetypeRep):
        return {"type": "archetype", "childId": rep.child_id}
    if isinstance(rep, ProjectedRep):
        return {
            "type": "projected",
            "points": [[a, b, k] for a, b, k in rep.points],
            "xDim": _axis_json(rep.x_dim),
            "yDim": _axis_json(rep.y_dim),
        }
    if isinstance(rep, JuxtaposedRep):
        return {"type": "juxtaposed"}
    return {"type": "overlaid", "axisPolicy": rep.axis_policy.value}


def _rep_load(d: Mapping) -> Representation:
    t = d["type"]
    if t == "label":
        return LabelRep(text=d["text"], stat=LabelStat(d["stat"]))
    if t == "summarized":
        return SummarizedRep(series=_series_load(d["series"]), op=ArithmeticOp(d["op"]))
    if t == "archetype":
        return ArchetypeRep(child_id=d["childId"])
    if t == "projected":
        return ProjectedRep(
            points=tuple((a, b, k) for a, b, k in d["points"]),
            x_dim=_axis_load(d["xDim"]),
            y_dim=_axis_load(d["yDim"]),
        )
    if t == "juxtaposed":
        return JuxtaposedRep()
    if t == "overlaid":
        return OverlaidRep(axis_policy=AxisPolicy(d["axisPolicy"]))
    raise ValueError(f"unknown representation type {t!r}")


def _pile_json(p: Pile) -> dict:
    return {
        "id": p.id,
        "children": list(p.children),
        "title": p.title,
        "annotation": p.annotation,
        "representation": _rep_json(p.representation),
    }


def _pile_load(d: Mapping) -> Pile:
    return Pile(
        id=d["id"],
        children=tuple(d["children"]),
        representation=_rep_load(d["representation"]),
        title=d["title"],
        annotation=d["annotation"],
    )


def _table_json(t: DataTable, include_data: bool = True) -> dict:
    features = []
    for f in t.features:
        fd: dict[str, Any] = {
            "name": f.name,
            "groupPath": list(f.group_path),
            "unit": f.unit,
        }
        if include_data:
            fd["values"] = list(f.values)
        features.append(fd)
    return {
        "id": t.id,
        "key": _axis_json(t.key),
        "valueDimension": t.value_dimension,
        "valueUnit": t.value_unit,
        "features": features,
    }


def _table_load(d: Mapping) -> DataTable:
    return DataTable(
        id=d["id"],
        key=_axis_load(d["key"]),
        features=tuple(
            FeatureColumn(
                name=f["name"],
                group_path=tuple(f["groupPath"]),
                values=tuple(f["values"]),
                unit=f["unit"],
            )
            for f in d["features"]
        ),
        value_dimension=d["valueDimension"],
        value_unit=d["valueUnit"],
    )


def _layout_json(cfg: LayoutConfig) -> dict:
    mode = cfg.mode
    if isinstance(mode, FixedMode):
        out: dict[str, Any] = {
            "mode": "fixed",
            "cardWidth": mode.card_width,
            "cardHeight": mode.card_height,
        }
    else:
        out = {
            "mode": "spaceFilling",
            "minCardWidth": mode.min_card_width,
            "minCardHeight": mode.min_card_height,
        }
    out["weights"] = {nid: w for nid, w in cfg.weights}
    return out


def _layout_load(d: Mapping) -> LayoutConfig:
    if d["mode"] == "fixed":
        mode: FixedMode | SpaceFillingMode = FixedMode(
            card_width=d["cardWidth"], card_height=d["cardHeight"]
        )
    elif d["mode"] == "spaceFilling":
        mode = SpaceFillingMode(
            min_card_width=d["minCardWidth"], min_card_height=d["minCardHeight"]
        )
    else:
        raise ValueError(f"unknown layout mode {d['mode']!r}")
    return LayoutConfig(mode=mode, weights=tuple(d["weights"].items()))


def serialize_document(doc: DrillboardDocument, include_data: bool = True) -> dict:
    h = doc.hierarchy
    piles = [n for n in h.nodes.values() if isinstance(n, Pile)]
    return {
        "schemaVersion": SCHEMA_VERSION,
        "id": doc.id,
        "title": doc.title,
        "revision": doc.revision,
        "readOnly": doc.read_only,
        "tables": [_table_json(t, include_data) for t in doc.tables],
        "atoms": [_atom_json(h.nodes[a]) for a in h.leaf_order],
        "piles": [_pile_json(p) for p in piles],
        "rootOrder": list(h.roots),
        "views": [
            {"label": label, "members": list(view)} for label, view in doc.views.entries
        ],
        "layoutConfig": _layout_json(doc.layout_config),
    }


def _dump(payload: dict) -> bytes:
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def save_document(doc: DrillboardDocument) -> bytes:
    return _dump(serialize_document(doc))


def _check_source_refs(doc: DrillboardDocument):
    for nid in doc.hierarchy.leaf_order:
        atom = doc.hierarchy.nodes[nid]
        if atom.source_ref is None:
            continue
        table_id, path = atom.source_ref
        table = doc.table(table_id)
        path = tuple(path)
        if not any(f.group_path + (f.name,) == path for f in table.features):
            raise IntegrityViolationError(
                f"atom {nid!r} references missing column {'/'.join(path)!r}"
            )


def load_document(data: bytes) -> DrillboardDocument:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise IntegrityViolationError(f"not a valid document: {e}") from None
    if not isinstance(payload, dict):
        raise IntegrityViolationError("document must be a JSON object")
    if payload.get("schemaVersion") != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"expected schemaVersion {SCHEMA_VERSION}, got {payload.get('schemaVersion')!r}"
        )
    try:
        atoms = [_atom_load(d) for d in payload["atoms"]]
        piles = [_pile_load(d) for d in payload["piles"]]
        hierarchy = Hierarchy.build(atoms + piles, tuple(payload["rootOrder"]))
        views = ViewCatalog()
        for v in payload["views"]:
            views = views.define(hierarchy, v["label"], tuple(v["members"]))
        doc = DrillboardDocument(
            id=payload["id"],
            title=payload["title"],
            tables=tuple(_table_load(t) for t in payload["tables"]),
            hierarchy=hierarchy,
            views=views,
            layout_config=_layout_load(payload["layoutConfig"]),
            revision=payload["revision"],
            read_only=payload["readOnly"],
        )
        _check_source_refs(doc)
    except IntegrityViolationError:
        raise
    except (DrillboardError, KeyError, TypeError, ValueError, AttributeError) as e:
        raise IntegrityViolationError(f"document integrity violation: {e}") from e
    return doc


def save_table(table: DataTable) -> bytes:
    payload = {"schemaVersion": SCHEMA_VERSION, "kind": "table"}
    payload.update(_table_json(table))
    return _dump(payload)


def load_table(data: bytes) -> DataTable:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise IntegrityViolationError(f"not a valid table file: {e}") from None
    if not isinstance(payload, dict) or payload.get("kind") != "table":
        raise IntegrityViolationError("not a table file")
    if payload.get("schemaVersion") != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"expected schemaVersion {SCHEMA_VERSION}, got {payload.get('schemaVersion')!r}"
        )
    try:
        return _table_load(payload)
    except (DrillboardError, KeyError, TypeError, ValueError) as e:
        raise IntegrityViolationError(f"table integrity violation: {e}") from e


# --- mutations ---------------------------------------------------------------

def _bump(doc: DrillboardDocument, **changes) -> DrillboardDocument:
    return replace(doc, revision=doc.revision + 1, **changes)


def mutate_merge(
    doc: DrillboardDocument,
    op: OpKind | str,
    node_ids: Sequence[str],
    *,
    arith: str | None = None,
    stat: str | None = None,
    text: str | None = None,
    chosen: str | None = None,
    axis_policy: str | None = None,
    title: str | None = None,
    annotation: str | None = None,
) -> tuple[DrillboardDocument, str]:
    op = OpKind(op)
    h = doc.hierarchy
    if op is OpKind.LABEL:
        if stat is None:
            stat = "custom" if text is not None else "mean"
        pile = merge_label(h, node_ids, LabelStat(stat), text)
    elif op is OpKind.SUMMARIZE:
        if arith is None:
            raise ValueError("summarize needs an arithmetic op")
        pile = merge_summarize(h, node_ids, ArithmeticOp(arith))
    elif op is OpKind.ARCHETYPE:
        if chosen is None:
            raise ValueError("archetype needs a chosen node id")
        pile = merge_archetype(h, node_ids, chosen)
    elif op is OpKind.PROJECT:
        if len(node_ids) != 2:
            raise ValueError("project takes exactly 2 nodes")
        pile = merge_project(h, node_ids[0], node_ids[1])
    elif op is OpKind.JUXTAPOSE:
        pile = merge_juxtapose(h, node_ids)
    else:
        pile = merge_overlay(h, node_ids, AxisPolicy(axis_policy or "sharedY"))
    if title is not None:
        pile = replace(pile, title=title)
    if annotation is not None:
        pile = replace(pile, annotation=annotation)
    return _bump(doc, hierarchy=attach(h, pile)), pile.id


def mutate_split(
    doc: DrillboardDocument, pile_id: str, *, repair_views: bool = False
) -> DrillboardDocument:
    referencing = [label for label, view in doc.views.entries if pile_id in view]
    if referencing and not repair_views:
        raise ReferencedByViewError(
            f"pile {pile_id!r} is referenced by views {referencing}; pass repairViews"
        )
    children = doc.hierarchy.node(pile_id).children if referencing else ()
    h2 = split(doc.hierarchy, pile_id)
    entries = []
    for label, view in doc.views.entries:
        if pile_id in view:
            i = view.index(pile_id)
            view = view[:i] + children + view[i + 1 :]
        entries.append((label, assert_valid(h2, view)))
    return _bump(doc, hierarchy=h2, views=ViewCatalog(tuple(entries)))


def _replace_node(doc: DrillboardDocument, node_id: str, **changes) -> DrillboardDocument:
    h = doc.hierarchy
    node = h.node(node_id)
    nodes = dict(h.nodes)
    nodes[node_id] = replace(node, **changes)
    return _bump(doc, hierarchy=Hierarchy.build(nodes.values(), h.roots))


def mutate_rename(doc: DrillboardDocument, node_id: str, title: str) -> DrillboardDocument:
    return _replace_node(doc, node_id, title=title)


def mutate_annotate(doc: DrillboardDocument, node_id: str, text: str | None) -> DrillboardDocument:
    return _replace_node(doc, node_id, annotation=text)


def mutate_define_view(
    doc: DrillboardDocument, label: str, members: Sequence[str] | None = None
) -> DrillboardDocument:
    view = tuple(members) if members is not None else top_view(doc.hierarchy)
    return _bump(doc, views=doc.views.define(doc.hierarchy, label, view))


def mutate_delete_view(doc: DrillboardDocument, label: str) -> DrillboardDocument:
    return _bump(doc, views=doc.views.delete(label))


def mutate_add_charts(
    doc: DrillboardDocument, query: SelectionQuery
) -> tuple[DrillboardDocument, list[str]]:
    table = doc.table(query.table_id)
    h = doc.hierarchy
    id_start = int(h.next_generated_id("atom").rsplit("-", 1)[1])
    atoms = select_charts(table, query, id_start=id_start)
    h2 = Hierarchy.build(
        list(h.nodes.values()) + atoms, h.roots + tuple(a.id for a in atoms)
    )
    return _bump(doc, hierarchy=h2), [a.id for a in atoms]


def apply_mutation(
    doc: DrillboardDocument, payload: Mapping[str, Any]
) -> tuple[DrillboardDocument, dict]:
    """Dispatch one JSON mutation body; raises ValueError on malformed shape."""
    if not isinstance(payload, Mapping):
        raise ValueError("mutation body must be an object")
    kind = payload.get("type")
    try:
        if kind == "merge":
            params = payload.get("params") or {}
            doc, pile_id = mutate_merge(
                doc,
                payload["op"],
                list(payload["nodes"]),
                arith=params.get("op"),
                stat=params.get("stat"),
                text=params.get("text"),
                chosen=params.get("chosen"),
                axis_policy=params.get("axisPolicy"),
                title=payload.get("title"),
                annotation=payload.get("annotation"),
            )
            return doc, {"pileId": pile_id}
        if kind == "split":
            return (
                mutate_split(
                    doc, payload["pileId"], repair_views=bool(payload.get("repairViews"))
                ),
                {},
            )
        if kind == "rename":
            return mutate_rename(doc, payload["nodeId"], payload["title"]), {}
        if kind == "annotate":
            return mutate_annotate(doc, payload["nodeId"], payload.get("text")), {}
        if kind == "defineView":
            return mutate_define_view(doc, payload["label"], payload.get("members")), {}
        if kind == "deleteView":
            return mutate_delete_view(doc, payload["label"]), {}
        if kind == "addCharts":
            q = payload["query"]
            query = SelectionQuery(
                table_id=q["tableId"],
                group_path=tuple(q.get("groupPath") or ()),
                predicates=tuple(
                    (p[0], p[1], float(p[2])) for p in (q.get("predicates") or ())
                ),
            )
            doc, ids = mutate_add_charts(doc, query)
            return doc, {"atomIds": ids}
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed mutation body: {e}") from None
    raise ValueError(f"unknown mutation type {kind!r}")


# --- consistency audit -------------------------------------------------------

def _close(a: float | None, b: float | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


def _series_match(stored: DataSeries, recomputed: DataSeries) -> bool:
    if [k for k, _ in stored.points] != [k for k, _ in recomputed.points]:
        return False
    return all(
        _close(v, w) for (_, v), (_, w) in zip(stored.points, recomputed.points)
    )


def _audit_pile(h: Hierarchy, pile: Pile) -> list[str]:
    rep = pile.representation
    out: list[str] = []
    if isinstance(rep, (SummarizedRep, ProjectedRep, OverlaidRep)):
        series = []
        for c in pile.children:
            s = exposed_series(h.node(c))
            if s is None:
                out.append(f"pile {pile.id!r}: operand {c!r} exposes no series")
            series.append(s)
        if out:
            return out
        first = series[0]
        for s in series[1:]:
            if not s.x.same_dimension(first.x) or s.x.domain != first.x.domain:
                out.append(f"pile {pile.id!r}: operand x-axes disagree")
                return out

    if isinstance(rep, SummarizedRep):
        if rep.op in (ArithmeticOp.SUBTRACT, ArithmeticOp.DIVIDE):
            orders = [series, series[::-1]]
        else:
            orders = [series]
        ok = False
        for order in orders:
            try:
                expected = summarize_series(order, rep.op, rep.series.name)
            except DrillboardError:
                continue
            if _series_match(rep.series, expected):
                ok = True
                break
        if not ok:
            out.append(
                f"pile {pile.id!r}: stored {rep.op.value} series does not match its operands"
            )
    elif isinstance(rep, ProjectedRep):
        if len(pile.children) != 2:
            out.append(f"pile {pile.id!r}: projection needs exactly 2 operands")
            return out
        va, vb = series[0].values(), series[1].values()
        expected = tuple(
            (va[k], vb[k], k)
            for k in series[0].x.domain
            if va.get(k) is not None and vb.get(k) is not None
        )
        swapped = tuple((b, a, k) for a, b, k in expected)
        for cand in (expected, swapped):
            if len(cand) == len(rep.points) and all(
                _close(p[0], q[0]) and _close(p[1], q[1]) and p[2] == q[2]
                for p, q in zip(rep.points, cand)
            ):
                break
        else:
            out.append(f"pile {pile.id!r}: stored projection does not match its operands")
    elif isinstance(rep, LabelRep) and rep.stat is not LabelStat.CUSTOM:
        values = [
            v
            for leaf in h.leaves_under(pile.id)
            for s in h.nodes[leaf].series
            for _, v in s.points
            if v is not None
        ]
        stats = {
            LabelStat.MEAN: statistics.fmean,
            LabelStat.MEDIAN: statistics.median,
            LabelStat.MIN: min,
            LabelStat.MAX: max,
        }
        try:
            shown = float(rep.text)
        except ValueError:
            out.append(f"pile {pile.id!r}: label text {rep.text!r} is not the stated scalar")
            return out
        if not values or not math.isclose(
            shown, float(stats[rep.stat](values)), rel_tol=1e-9, abs_tol=1e-9
        ):
            out.append(
                f"pile {pile.id!r}: label text {rep.text!r} does not match {rep.stat.value}"
            )
    return out


def validate_document(doc: DrillboardDocument) -> list[str]:
    """Cross-checks beyond structural invariants: views, refs, merge policies."""
    violations: list[str] = []
    h = doc.hierarchy
    for label, view in doc.views.entries:
        for v in validate_view(h, view):
            violations.append(f"view {label!r}: {v}")
    try:
        _check_source_refs(doc)
    except IntegrityViolationError as e:
        violations.append(str(e))
    for node in h.nodes.values():
        if isinstance(node, Pile):
            violations.extend(_audit_pile(h, node))
    return violations
