"""Replayable merge scripts: non-interactive board authoring.

A script is a JSON list of merge steps (optionally wrapped in an object
under "steps"). Each step names the operator, the operand node ids, and
operator parameters, and may rename or annotate the new pile and snapshot
the current root set as a named view afterwards:

    {"steps": [
      {"op": "summarize", "nodes": ["atom-1", "atom-2"], "params": {"op": "add"}},
      {"op": "archetype", "nodes": ["atom-3", "atom-4"],
       "params": {"chosen": "atom-3"}, "saveViewAfter": "overview"}
    ]}

Generated pile ids are deterministic (pile-1, pile-2, ...), so later steps
can reference earlier results. Replaying the same script over the same
table always produces a byte-identical board.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Sequence

from .document import (
    DrillboardDocument,
    apply_mutation,
    mutate_define_view,
)
from .errors import DrillboardError

__all__ = ["apply_script", "load_script"]


def load_script(data: bytes) -> list[dict]:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ValueError(f"not a valid script: {e}") from None
    steps = payload.get("steps") if isinstance(payload, Mapping) else payload
    if not isinstance(steps, list):
        raise ValueError("script must be a list of steps or {steps: [...]}")
    for i, step in enumerate(steps, start=1):
        if not isinstance(step, Mapping):
            raise ValueError(f"step {i} is not an object")
        if "op" not in step or "nodes" not in step:
            raise ValueError(f"step {i} needs op and nodes")
    return [dict(s) for s in steps]


def apply_script(
    doc: DrillboardDocument, steps: Sequence[Mapping[str, Any]]
) -> DrillboardDocument:
    """Replay merge steps in order, saving views where requested."""
    for i, step in enumerate(steps, start=1):
        body = {
            "type": "merge",
            "op": step["op"],
            "nodes": step["nodes"],
            "params": step.get("params") or {},
        }
        if step.get("title") is not None:
            body["title"] = step["title"]
        if step.get("annotation") is not None:
            body["annotation"] = step["annotation"]
        try:
            doc, _ = apply_mutation(doc, body)
        except DrillboardError as e:
            raise DrillboardError(f"step {i}: {e}") from e
        except ValueError as e:
            raise ValueError(f"step {i}: {e}") from e
        label = step.get("saveViewAfter")
        if label:
            doc = mutate_define_view(doc, label)
    return doc
