"""Capture real API payloads as JSON fixtures for the UI tests.

Builds a small three-level board, serves it in process, and records the
responses the browser client would see. Run from the repository root:

    python3 frontend/scripts/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from drillboard.document import (
    apply_mutation,
    mutate_define_view,
    new_document,
)
from drillboard.ingest import SelectionQuery, parse_table, select_charts
from drillboard.service import DocumentStore, create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

REGIONS = [
    "alpha", "bravo", "charlie", "delta", "echo",
    "foxtrot", "golf", "hotel", "india", "juliett", "kilo",
]

CSV = "\n".join(
    [
        "," + ",".join(r for r in REGIONS for _ in [0]),
        "year (CE)," + ",".join("revenue (USD)" for _ in REGIONS),
        "2008," + ",".join(str(100 + 10 * i) for i in range(len(REGIONS))),
        "2009," + ",".join(str(110 + 10 * i) for i in range(len(REGIONS))),
        "2010," + ",".join(str(90 + 10 * i) for i in range(len(REGIONS))),
        "2011," + ",".join(str(130 + 10 * i) for i in range(len(REGIONS))),
        "2012," + ",".join(str(120 + 10 * i) for i in range(len(REGIONS))),
    ]
)


def build_document():
    table = parse_table(
        CSV.encode("utf-8"),
        header_rows=2,
        table_id="table-1",
        value_dimension="revenue",
    )
    # Chart the first ten regions; "kilo" stays table-only so the author
    # panel has something left to add.
    atoms = []
    for region in REGIONS[:-1]:
        atoms.extend(
            select_charts(
                table,
                SelectionQuery(table_id="table-1", group_path=(region,)),
                id_start=len(atoms) + 1,
            )
        )
    doc = new_document("demo", "Regional revenue", tables=[table], atoms=atoms)
    merges = [
        {"type": "merge", "op": "juxtapose", "nodes": ["atom-1", "atom-2"]},
        {"type": "merge", "op": "juxtapose", "nodes": ["atom-3", "atom-4"]},
        {
            "type": "merge",
            "op": "juxtapose",
            "nodes": ["pile-1", "pile-2"],
            "title": "regions",
        },
        {
            "type": "merge",
            "op": "summarize",
            "nodes": ["atom-5", "atom-6"],
            "params": {"op": "add"},
            "title": "combined",
        },
        {
            "type": "merge",
            "op": "archetype",
            "nodes": ["atom-7", "atom-8"],
            "params": {"chosen": "atom-7"},
            "title": "exemplar",
        },
    ]
    for body in merges:
        doc, _ = apply_mutation(doc, body)
    doc = mutate_define_view(
        doc,
        "novice",
        ["pile-1", "pile-2", "pile-4", "pile-5", "atom-9", "atom-10"],
    )
    return doc


def main():
    store = DocumentStore()
    store.add(build_document())
    client = TestClient(create_app(store))
    out: dict[str, object] = {}

    out["boards"] = client.get("/api/drillboards").json()
    out["board"] = client.get("/api/drillboards/demo").json()

    r = client.post("/api/drillboards/demo/sessions", json={})
    assert r.status_code == 200, r.text
    out["session_open"] = r.json()
    sid = r.json()["sessionId"]

    def act(body):
        resp = client.post(f"/api/sessions/{sid}/actions", json=body)
        assert resp.status_code == 200, resp.text
        return resp.json()

    # Rolling a top-level pile is refused and leaves the session as it was.
    r = client.post(
        f"/api/sessions/{sid}/actions", json={"type": "roll", "nodeId": "pile-3"}
    )
    assert r.status_code == 409, r.text
    out["error_conflict"] = {"status": r.status_code, "body": r.json()}

    out["state_drill"] = act({"type": "drill", "nodeId": "pile-3"})
    out["state_roll"] = act({"type": "roll", "nodeId": "pile-1"})
    out["state_jump"] = act({"type": "jump", "view": "novice"})

    out["ops_enabled"] = client.get(
        "/api/drillboards/demo/ops", params={"nodes": "atom-9,atom-10"}
    ).json()
    out["ops_mixed"] = client.get(
        "/api/drillboards/demo/ops", params={"nodes": "pile-5,atom-9"}
    ).json()

    r = client.post(
        "/api/drillboards/demo/mutations",
        json={
            "type": "merge",
            "op": "label",
            "nodes": ["atom-9", "atom-10"],
            "params": {"stat": "mean"},
            "title": "pair",
        },
    )
    assert r.status_code == 200, r.text
    out["mutation_ok"] = r.json()

    r = client.post("/api/drillboards/demo/sessions", json={})
    assert r.status_code == 200, r.text
    out["session_after_merge"] = r.json()

    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in out.items():
        path = FIXTURE_DIR / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path.relative_to(FIXTURE_DIR.parent.parent)}")


if __name__ == "__main__":
    main()
