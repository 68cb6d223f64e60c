"""HTTP service: documents, reader sessions, and author mutations.

Sessions are server-side and pin the document revision they opened, so an
author publishing a new revision never yanks a reader's view out from
under them; the reader only sees a revisionStale flag. Mutations for one
document are serialized by a writer lock; everything served is an
immutable snapshot, so concurrent readers need no locking at all.

Error mapping: unknown ids are 404, structurally valid but illegal
requests (drilling an atom, disabled operators, duplicate labels) are 409
with a reason body, malformed bodies are 422.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .aggregation import applicable_ops
from .document import (
    DrillboardDocument,
    _series_json,
    _axis_json,
    apply_mutation,
    serialize_document,
)
from .errors import (
    AllNullResultError,
    AncestryConflictError,
    ChosenNotMemberError,
    DisabledError,
    DrillboardError,
    DuplicateLabelError,
    EmptyIntersectionError,
    InvalidViewError,
    IsRootError,
    NotAPileError,
    NotInViewError,
    ReadOnlyDocumentError,
    ReferencedByViewError,
    TooFewNodesError,
    UnknownDocumentError,
    UnknownSessionError,
    ViewportTooSmallError,
)
from .layout import (
    SpaceFillingMode,
    Viewport,
    assign_subtree_colors,
    auto_rollup,
    layout_view,
)
from .model import (
    ArchetypeRep,
    AxisKind,
    ChartAtom,
    Hierarchy,
    JuxtaposedRep,
    LabelRep,
    OverlaidRep,
    Pile,
    ProjectedRep,
    SummarizedRep,
    exposed_series,
)
from .navigation import View, depth_of, drill_down, resolve_view, roll_up

__all__ = ["DocumentStore", "Session", "card_payload", "create_app"]

DEFAULT_VIEWPORT = Viewport(1280.0, 800.0)


class DocumentStore:
    """All revisions of all loaded documents, with a writer lock per document."""

    def __init__(self):
        self._revisions: dict[str, dict[int, DrillboardDocument]] = {}
        self._latest: dict[str, int] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def add(self, doc: DrillboardDocument):
        with self._registry_lock:
            self._revisions.setdefault(doc.id, {})[doc.revision] = doc
            self._latest[doc.id] = doc.revision
            self._locks.setdefault(doc.id, threading.Lock())

    def ids(self) -> list[str]:
        return list(self._latest)

    def latest_revision(self, doc_id: str) -> int:
        if doc_id not in self._latest:
            raise UnknownDocumentError(f"no document {doc_id!r}")
        return self._latest[doc_id]

    def get(self, doc_id: str, revision: int | None = None) -> DrillboardDocument:
        rev = revision if revision is not None else self.latest_revision(doc_id)
        try:
            return self._revisions[doc_id][rev]
        except KeyError:
            raise UnknownDocumentError(f"no document {doc_id!r} at revision {rev}") from None

    def mutate(self, doc_id: str, body: dict) -> tuple[DrillboardDocument, dict]:
        self.latest_revision(doc_id)
        with self._locks[doc_id]:
            doc = self.get(doc_id)
            new_doc, info = apply_mutation(doc, body)
            self._revisions[doc_id][new_doc.revision] = new_doc
            self._latest[doc_id] = new_doc.revision
            return new_doc, info


@dataclass
class Session:
    id: str
    document_id: str
    revision: int
    view: View
    base_view: View
    base_label: str | None
    viewport: Viewport
    history: list[tuple[str, str]] = field(default_factory=list)
    last_touch: float = field(default_factory=time.monotonic)


class SessionManager:
    def __init__(self, ttl_seconds: float = 3600.0):
        self.ttl = ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def open(
        self,
        doc: DrillboardDocument,
        label: str | None,
        viewport: Viewport,
    ) -> Session:
        view = resolve_view(doc.hierarchy, doc.views, label or "top")
        session = Session(
            id=uuid.uuid4().hex,
            document_id=doc.id,
            revision=doc.revision,
            view=view,
            base_view=view,
            base_label=label or "top",
            viewport=viewport,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
            now = time.monotonic()
            if session is not None and now - session.last_touch > self.ttl:
                del self._sessions[sid]
                session = None
            if session is None:
                raise UnknownSessionError(f"no session {sid!r}")
            session.last_touch = now
            return session


# --- render payloads ---------------------------------------------------------

def card_payload(h: Hierarchy, node_id: str) -> dict:
    """What a card draws: resolved representation with inline series data."""
    node = h.node(node_id)
    if isinstance(node, ChartAtom):
        return {
            "type": node.kind.value,
            "title": node.title,
            "annotation": node.annotation,
            "series": [_series_json(s) for s in node.series],
        }
    rep = node.representation
    base: dict[str, Any] = {"title": node.title, "annotation": node.annotation}
    if isinstance(rep, LabelRep):
        return {"type": "label", **base, "text": rep.text, "stat": rep.stat.value}
    if isinstance(rep, SummarizedRep):
        kind = "line" if rep.series.x.kind is AxisKind.TEMPORAL else "bar"
        return {"type": kind, **base, "series": [_series_json(rep.series)]}
    if isinstance(rep, ArchetypeRep):
        inner = card_payload(h, rep.child_id)
        inner.update(base)
        inner["archetypeOf"] = rep.child_id
        return inner
    if isinstance(rep, ProjectedRep):
        return {
            "type": "scatter",
            **base,
            "points": [[a, b, k] for a, b, k in rep.points],
            "xDim": _axis_json(rep.x_dim),
            "yDim": _axis_json(rep.y_dim),
        }
    if isinstance(rep, JuxtaposedRep):
        return {
            "type": "grid",
            **base,
            "cells": [card_payload(h, c) for c in node.children],
        }
    assert isinstance(rep, OverlaidRep)
    return {
        "type": "overlay",
        **base,
        "axisPolicy": rep.axis_policy.value,
        "series": [_series_json(exposed_series(h.node(c))) for c in node.children],
    }


def _tree_payload(h: Hierarchy, node_id: str, visible: set[str]) -> dict:
    node = h.node(node_id)
    is_pile = isinstance(node, Pile)
    return {
        "id": node_id,
        "title": node.title,
        "isPile": is_pile,
        "visible": node_id in visible,
        "children": [
            _tree_payload(h, c, visible) for c in node.children
        ]
        if is_pile
        else [],
    }


# --- app ---------------------------------------------------------------------

class ViewportBody(BaseModel):
    width: float
    height: float


class OpenSessionBody(BaseModel):
    view: str | None = None
    viewport: ViewportBody | None = None


class ActionBody(BaseModel):
    type: Literal["drill", "roll", "jump"]
    nodeId: str | None = None
    view: str | None = None


_NOT_FOUND = (
    UnknownDocumentError,
    UnknownSessionError,
)
_CONFLICT = (
    DisabledError,
    DuplicateLabelError,
    TooFewNodesError,
    AncestryConflictError,
    ChosenNotMemberError,
    EmptyIntersectionError,
    AllNullResultError,
    ReferencedByViewError,
    InvalidViewError,
    NotInViewError,
    NotAPileError,
    IsRootError,
    ViewportTooSmallError,
    ReadOnlyDocumentError,
)


def _status_for(exc: DrillboardError) -> int:
    if isinstance(exc, _CONFLICT):
        return 409
    if isinstance(exc, _NOT_FOUND):
        return 404
    # Unknown node / pile / view / table / feature ids.
    if type(exc).__name__.startswith("Unknown"):
        return 404
    return 409


def create_app(
    store: DocumentStore,
    *,
    read_only: bool = False,
    session_ttl: float = 3600.0,
    static_dir: str | Path | None = None,
    default_viewport: Viewport = DEFAULT_VIEWPORT,
) -> FastAPI:
    app = FastAPI(title="drillboard", docs_url=None, redoc_url=None)
    sessions = SessionManager(session_ttl)

    @app.exception_handler(DrillboardError)
    async def _drillboard_error(request, exc: DrillboardError):
        return JSONResponse(status_code=_status_for(exc), content={"reason": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc: ValueError):
        return JSONResponse(status_code=422, content={"reason": str(exc)})

    def _session_state(session: Session) -> dict:
        doc = store.get(session.document_id, session.revision)
        h = doc.hierarchy
        mode = doc.layout_config.mode
        if isinstance(mode, SpaceFillingMode) and session.view:
            drills = [ref for act, ref in session.history if act == "drill"]
            session.view = auto_rollup(
                h,
                session.view,
                session.viewport,
                mode.min_card_width,
                mode.min_card_height,
                focus=drills[-1] if drills else None,
            )
        last_jump = -1
        for i, (act, _) in enumerate(session.history):
            if act == "jump":
                last_jump = i
        drills = [ref for act, ref in session.history[last_jump + 1 :] if act == "drill"]
        colors = assign_subtree_colors(h, session.view, drills)
        depth_labels = {
            m: d
            for m in session.view
            if (d := depth_of(h, session.base_view, m)) > 0
        }
        frames = layout_view(
            h,
            session.view,
            session.viewport,
            mode,
            weights=doc.layout_config.weight_map(),
            depth_labels=depth_labels,
            color_groups=colors,
        )
        visible = set(session.view)
        return {
            "sessionId": session.id,
            "documentId": doc.id,
            "documentRevision": session.revision,
            "revisionStale": store.latest_revision(doc.id) > session.revision,
            "viewLabel": session.base_label,
            "viewLabels": doc.view_labels(),
            "view": list(session.view),
            "frames": [
                {
                    "nodeId": f.node_id,
                    "x": f.x,
                    "y": f.y,
                    "width": f.width,
                    "height": f.height,
                    "isPile": f.is_pile,
                    "depthLabel": f.depth_label,
                    "colorGroup": f.color_group,
                    "widthWeight": f.width_weight,
                }
                for f in frames
            ],
            "cards": {m: card_payload(h, m) for m in session.view},
            "tree": [_tree_payload(h, r, visible) for r in h.roots],
            "colors": colors,
            "depths": depth_labels,
        }

    @app.get("/api/drillboards")
    def list_drillboards():
        out = []
        for doc_id in store.ids():
            doc = store.get(doc_id)
            out.append({"id": doc.id, "title": doc.title, "views": doc.view_labels()})
        return out

    @app.get("/api/drillboards/{doc_id}")
    def get_drillboard(doc_id: str, includeData: int = Query(default=0)):
        doc = store.get(doc_id)
        return serialize_document(doc, include_data=bool(includeData))

    @app.get("/api/drillboards/{doc_id}/ops")
    def get_ops(doc_id: str, nodes: str = Query(default="")):
        doc = store.get(doc_id)
        ids = [n for n in nodes.split(",") if n]
        verdicts = applicable_ops(doc.hierarchy, ids)
        return {
            op.value: {"enabled": v.enabled, "reason": v.reason}
            for op, v in verdicts.items()
        }

    @app.post("/api/drillboards/{doc_id}/sessions")
    def open_session(doc_id: str, body: OpenSessionBody | None = Body(default=None)):
        doc = store.get(doc_id)
        body = body or OpenSessionBody()
        viewport = (
            Viewport(body.viewport.width, body.viewport.height)
            if body.viewport
            else default_viewport
        )
        session = sessions.open(doc, body.view, viewport)
        return {"sessionId": session.id, "state": _session_state(session)}

    @app.get("/api/sessions/{sid}")
    def get_session(sid: str):
        return _session_state(sessions.get(sid))

    @app.post("/api/sessions/{sid}/actions")
    def post_action(sid: str, body: ActionBody):
        session = sessions.get(sid)
        doc = store.get(session.document_id, session.revision)
        h = doc.hierarchy
        if body.type == "drill":
            if not body.nodeId:
                raise HTTPException(422, detail="drill needs nodeId")
            session.view = drill_down(h, session.view, body.nodeId)
            session.history.append(("drill", body.nodeId))
        elif body.type == "roll":
            if not body.nodeId:
                raise HTTPException(422, detail="roll needs nodeId")
            session.view = roll_up(h, session.view, body.nodeId)
            session.history.append(("roll", body.nodeId))
        else:
            if not body.view:
                raise HTTPException(422, detail="jump needs a view label")
            view = resolve_view(h, doc.views, body.view)
            session.view = view
            session.base_view = view
            session.base_label = body.view
            session.history.append(("jump", body.view))
        return _session_state(session)

    @app.post("/api/drillboards/{doc_id}/mutations")
    def post_mutation(doc_id: str, body: dict = Body(...)):
        doc = store.get(doc_id)
        if read_only or doc.read_only:
            return JSONResponse(
                status_code=403, content={"reason": "document is read-only"}
            )
        new_doc, info = store.mutate(doc_id, body)
        return {"revision": new_doc.revision, **info}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    else:

        @app.get("/")
        def index():
            return {
                "service": "drillboard",
                "boards": store.ids(),
                "hint": "API under /api; build the frontend for a UI",
            }

    return app
