"""Command-line driver.

    drillboard ingest data.csv --header-rows 2 -o table.json
    drillboard build --table table.json --script merges.json -o board.json
    drillboard validate board.json
    drillboard export board.json --view novice --format csv
    drillboard fuzz board.json --ops 10000 --seed 42
    drillboard serve board.json --port 8000

Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from pathlib import Path
from typing import Sequence

from .document import (
    load_document,
    load_table,
    new_document,
    save_document,
    save_table,
    validate_document,
)
from .errors import DrillboardError
from .ingest import SelectionQuery, format_number, parse_table, select_charts
from .model import Pile
from .navigation import drill_down, resolve_view, roll_up, top_view, validate_view
from .script import apply_script, load_script
from .service import DocumentStore, card_payload, create_app

__all__ = ["main", "run"]


def _cmd_ingest(args) -> int:
    source = Path(args.csv)
    table = parse_table(
        source.read_bytes(),
        format="tsv" if args.tsv else "csv",
        header_rows=args.header_rows,
        table_id=args.table_id or source.stem,
        value_dimension=args.value_dimension,
        value_unit=args.value_unit,
    )
    Path(args.output).write_bytes(save_table(table))
    print(
        f"wrote {args.output}: {len(table.features)} features, "
        f"{len(table.key.domain)} rows"
    )
    return 0


def _cmd_build(args) -> int:
    table = load_table(Path(args.table).read_bytes())
    steps = load_script(Path(args.script).read_bytes())
    atoms = select_charts(table, SelectionQuery(table_id=table.id))
    out = Path(args.output)
    doc = new_document(
        doc_id=args.id or out.stem,
        title=args.title or args.id or out.stem,
        tables=[table],
        atoms=atoms,
    )
    doc = apply_script(doc, steps)
    out.write_bytes(save_document(doc))
    h = doc.hierarchy
    print(
        f"wrote {args.output}: {len(h.leaf_order)} atoms, "
        f"{len(h.roots)} roots, {len(doc.views.entries)} saved views"
    )
    return 0


def _cmd_validate(args) -> int:
    doc = load_document(Path(args.board).read_bytes())
    violations = validate_document(doc)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return 1
    print(f"{args.board}: ok")
    return 0


def _payload_rows(node_id: str, payload: dict, prefix: str = "") -> list[tuple]:
    rows: list[tuple] = []
    kind = payload["type"]
    title = payload["title"]
    if kind == "label":
        return rows
    if kind == "grid":
        for cell in payload["cells"]:
            rows.extend(_payload_rows(node_id, cell, prefix=f"{cell['title']}: "))
        return rows
    if "series" in payload:
        for s in payload["series"]:
            for k, v in s["points"]:
                rows.append((node_id, title, prefix + s["name"], k, v))
        return rows
    # projected scatter: one flattened series per axis dimension
    for name, idx in ((payload["xDim"]["dimension"], 0), (payload["yDim"]["dimension"], 1)):
        for point in payload["points"]:
            rows.append((node_id, title, prefix + name, point[2], point[idx]))
    return rows


def _cmd_export(args) -> int:
    doc = load_document(Path(args.board).read_bytes())
    h = doc.hierarchy
    view = resolve_view(h, doc.views, args.view)
    payloads = [(m, card_payload(h, m)) for m in view]
    if args.format == "spec":
        print(
            json.dumps(
                {
                    "board": doc.id,
                    "view": args.view,
                    "cards": [{"nodeId": m, **p} for m, p in payloads],
                },
                ensure_ascii=False,
                indent=2,
            )
        )
        return 0
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["card", "title", "series", "x", "y"])
    for m, payload in payloads:
        for node_id, title, name, k, v in _payload_rows(m, payload):
            writer.writerow(
                [node_id, title, name, k, "" if v is None else format_number(v)]
            )
    return 0


def _cmd_fuzz(args) -> int:
    doc = load_document(Path(args.board).read_bytes())
    h = doc.hierarchy
    rng = random.Random(args.seed)
    labels = doc.view_labels()
    view = top_view(h)
    sizes = [len(view)]
    for step in range(args.ops):
        drillable = [m for m in view if isinstance(h.node(m), Pile)]
        rollable = [m for m in view if h.parent_of(m) is not None]
        moves = [("jump", labels)]
        if drillable:
            moves.append(("drill", drillable))
        if rollable:
            moves.append(("roll", rollable))
        kind, candidates = moves[rng.randrange(len(moves))]
        target = candidates[rng.randrange(len(candidates))]
        if kind == "drill":
            new_view = drill_down(h, view, target)
            if len(new_view) != len(view) + len(h.node(target).children) - 1:
                print(f"step {step}: drill size law violated", file=sys.stderr)
                return 1
        elif kind == "roll":
            new_view = roll_up(h, view, target)
            if len(new_view) >= len(view):
                print(f"step {step}: roll-up did not shrink the view", file=sys.stderr)
                return 1
        else:
            new_view = resolve_view(h, doc.views, target)
        violations = validate_view(h, new_view)
        if violations:
            print(f"step {step}: {kind} {target}: {violations}", file=sys.stderr)
            return 1
        view = new_view
        sizes.append(len(view))
    for i in range(0, len(sizes), 25):
        print(" ".join(str(s) for s in sizes[i : i + 25]))
    print(f"ok: {args.ops} actions, view sizes {min(sizes)}..{max(sizes)}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    store = DocumentStore()
    for path in args.boards:
        store.add(load_document(Path(path).read_bytes()))
    static = args.static
    if static is None and Path("frontend/dist").is_dir():
        static = "frontend/dist"
    app = create_app(store, read_only=args.read_only, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drillboard",
        description="Author, validate, and serve drillable chart dashboards.",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("ingest", help="parse a CSV/TSV file into a table JSON")
    p.add_argument("csv")
    p.add_argument("--tsv", action="store_true", help="tab-separated input")
    p.add_argument("--header-rows", type=int, default=1)
    p.add_argument("--table-id", default=None)
    p.add_argument("--value-dimension", default=None,
                   help="y dimension shared by all columns (enables arithmetic across them)")
    p.add_argument("--value-unit", default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("build", help="replay a merge script over a table")
    p.add_argument("--table", required=True)
    p.add_argument("--script", required=True)
    p.add_argument("--id", default=None, help="board id (default: output stem)")
    p.add_argument("--title", default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("validate", help="check a board file's integrity and policies")
    p.add_argument("board")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("export", help="flatten a view's visible cards")
    p.add_argument("board")
    p.add_argument("--view", required=True, help='view label ("top" and "bottom" always exist)')
    p.add_argument("--format", choices=["csv", "spec"], default="csv")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("fuzz", help="random navigation, asserting view invariants")
    p.add_argument("board")
    p.add_argument("--ops", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_fuzz)

    p = sub.add_parser("serve", help="serve boards over HTTP")
    p.add_argument("boards", nargs="+")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--read-only", action="store_true")
    p.add_argument("--static", default=None, help="directory of built UI assets")
    p.set_defaults(func=_cmd_serve)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except DrillboardError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
