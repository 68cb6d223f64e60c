"""Acceptance gate: the seven guarantees this package ships with.

Each test prints one summary line on success; pytest -v shows one
pass/fail line per guarantee either way.

1. A scripted four-merge build collapses six atoms into a single root
   whose exhaustive drill-down reproduces every atom in order (< 1s).
2. A 96-leaf board built from 15 archetype and 11 add merges carries
   saved views of exactly 26 and 8 members, both valid (< 5s).
3. 10,000 random drill/roll/jump actions over 50 random hierarchies of
   up to 200 leaves never break the cut or order laws, and the whole
   walk is deterministic under a fixed seed (< 60s).
4. Pointwise merge arithmetic matches a brute-force oracle within
   relative 1e-9 over 1,000 operand pairs, exactly on integer add and
   subtract; average equals add divided by n; division by zero is null.
5. Over 500 random operand-pair/operator combinations, an enabled
   verdict always merges cleanly and a disabled verdict always raises
   DisabledError, including arithmetic over archetype piles.
6. Saving, loading, and re-saving is byte-identical for 100 random
   documents; structurally corrupt files are rejected on load.
7. For 200 random view/viewport pairs, layout frames are non-overlapping,
   equal-height, and row-major in view order; auto roll-up preserves the
   cut property and never grows the view.
"""

import json
import math
import random
import time

import pytest

from conftest import children_map, make_atom, make_forest, random_cut, random_hierarchy
from oracles import best_grid, combine_pointwise, is_valid_cut, rects_overlap

from drillboard.aggregation import (
    OpKind,
    applicable_ops,
    attach,
    merge_archetype,
    merge_juxtapose,
    merge_label,
    merge_overlay,
    merge_project,
    merge_summarize,
)
from drillboard.document import (
    DrillboardDocument,
    load_document,
    new_document,
    save_document,
)
from drillboard.errors import (
    AllNullResultError,
    DisabledError,
    IntegrityViolationError,
    ViewportTooSmallError,
)
from drillboard.layout import (
    FixedMode,
    LayoutConfig,
    SpaceFillingMode,
    Viewport,
    auto_rollup,
    grid_capacity,
    layout_view,
)
from drillboard.model import ArithmeticOp, AxisKind, AxisPolicy, Hierarchy, LabelStat
from drillboard.navigation import (
    ViewCatalog,
    bottom_view,
    drill_down,
    resolve_view,
    roll_up,
    top_view,
    validate_view,
)
from drillboard.script import apply_script

SEED = 20260825


def test_1_scripted_build_collapses_six_atoms_to_single_root():
    started = time.perf_counter()
    h = make_forest(6)
    doc = new_document("six", "six", atoms=[h.nodes[a] for a in h.leaf_order])
    doc = apply_script(doc, [
        {"op": "summarize", "nodes": ["atom-1", "atom-2"], "params": {"op": "add"}},
        {"op": "archetype", "nodes": ["atom-3", "atom-4"], "params": {"chosen": "atom-3"}},
        {"op": "label", "nodes": ["pile-1", "pile-2", "atom-5"], "params": {"stat": "mean"}},
        {"op": "archetype", "nodes": ["pile-3", "atom-6"], "params": {"chosen": "pile-3"}},
    ])
    h = doc.hierarchy
    assert len(top_view(h)) == 1
    assert len(bottom_view(h)) == 6

    view = top_view(h)
    while True:
        piles = [m for m in view if h.is_pile(m)]
        if not piles:
            break
        view = drill_down(h, view, piles[0])
        assert validate_view(h, view) == []
    assert view == tuple(f"atom-{i}" for i in range(1, 7))
    assert view == h.leaf_order

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    print(f"\n[1] six-atom collapse: top=1 bottom=6, drill order exact, "
          f"{elapsed:.3f}s < 1s: PASS")


def test_2_large_board_with_saved_expert_and_novice_views():
    started = time.perf_counter()
    steps = []
    roots = [f"atom-{i}" for i in range(1, 97)]
    pile_n = 0

    def merge(step, operands):
        nonlocal pile_n
        pile_n += 1
        at = roots.index(operands[0])
        for o in operands:
            roots.remove(o)
        roots.insert(at, f"pile-{pile_n}")
        steps.append(step)

    for j in range(11):  # 11 add merges over runs of five atoms
        ids = [f"atom-{5 * j + i}" for i in range(1, 6)]
        merge({"op": "summarize", "nodes": ids, "params": {"op": "add"}}, ids)
    for _ in range(8):  # 8 archetype merges of four roots: 52 -> 28
        ids = roots[:4]
        merge({"op": "archetype", "nodes": ids, "params": {"chosen": ids[0]}}, ids)
    ids = roots[:3]  # one more of three roots: 28 -> 26
    merge({"op": "archetype", "nodes": ids, "params": {"chosen": ids[0]},
           "saveViewAfter": "expert"}, ids)
    for _ in range(6):  # six more of four roots: 26 -> 8
        ids = roots[:4]
        merge({"op": "archetype", "nodes": ids, "params": {"chosen": ids[0]}}, ids)
    steps[-1]["saveViewAfter"] = "novice"

    assert sum(1 for s in steps if s["op"] == "archetype") == 15
    assert sum(1 for s in steps if s["op"] == "summarize") == 11

    h = make_forest(96)
    doc = new_document("study", "study", atoms=[h.nodes[a] for a in h.leaf_order])
    doc = apply_script(doc, steps)

    h = doc.hierarchy
    expert = resolve_view(h, doc.views, "expert")
    novice = resolve_view(h, doc.views, "novice")
    assert len(expert) == 26
    assert len(novice) == 8
    assert validate_view(h, expert) == []
    assert validate_view(h, novice) == []

    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    print(f"[2] 96-leaf board, 15 archetype + 11 add: views 26/8 valid, "
          f"{elapsed:.3f}s < 5s: PASS")


def _fuzz_walk(seed):
    rng = random.Random(seed)
    trajectory = []
    actions = 0
    for _ in range(50):
        h = random_hierarchy(rng, rng.randint(2, 200))
        cmap = children_map(h)
        leaf_order = list(h.leaf_order)
        saved = (top_view(h), bottom_view(h), random_cut(rng, h))
        view = saved[0]
        for _ in range(200):
            piles = [m for m in view if h.is_pile(m)]
            inner = [m for m in view if h.parent_of(m) is not None]
            moves = ["jump"] + (["drill"] if piles else []) + (["roll"] if inner else [])
            kind = moves[rng.randrange(len(moves))]
            if kind == "drill":
                target = piles[rng.randrange(len(piles))]
                new_view = drill_down(h, view, target)
                assert len(new_view) == len(view) + len(h.node(target).children) - 1
            elif kind == "roll":
                target = inner[rng.randrange(len(inner))]
                new_view = roll_up(h, view, target)
                assert len(new_view) < len(view)
            else:
                new_view = saved[rng.randrange(3)]
            assert is_valid_cut(cmap, leaf_order, list(new_view))
            assert validate_view(h, new_view) == []
            view = new_view
            actions += 1
            trajectory.append(len(view))
    return actions, trajectory


def test_3_navigation_fuzz_ten_thousand_actions():
    started = time.perf_counter()
    actions, first = _fuzz_walk(SEED)
    elapsed = time.perf_counter() - started
    assert actions == 10_000
    assert elapsed < 60.0
    _, second = _fuzz_walk(SEED)
    assert first == second
    print(f"[3] fuzz: 10,000 actions over 50 hierarchies, 0 violations, "
          f"deterministic, {elapsed:.1f}s < 60s: PASS")


def test_4_arithmetic_matches_brute_force_oracle():
    rng = random.Random(SEED)
    div_zero_points = 0
    checked_points = 0
    exact_integer_checks = 0
    for _ in range(1000):
        k = rng.randint(1, 12)
        integer_mode = rng.random() < 0.4

        def value():
            roll = rng.random()
            if roll < 0.12:
                return None
            if roll < 0.20:
                return 0.0
            if integer_mode:
                return float(rng.randint(-50, 50))
            return rng.uniform(-1e6, 1e6)

        cols = [[value() for _ in range(k)], [value() for _ in range(k)]]
        op = list(ArithmeticOp)[rng.randrange(5)]
        keys = [f"k{i}" for i in range(k)]
        expected = combine_pointwise(op.value, [dict(zip(keys, c)) for c in cols])

        atoms = [make_atom(f"atom-{i + 1}", c) for i, c in enumerate(cols)]
        h = Hierarchy.build(atoms, ["atom-1", "atom-2"])
        try:
            pile = merge_summarize(h, ["atom-1", "atom-2"], op)
        except AllNullResultError:
            assert all(v is None for v in expected.values())
            continue
        got = dict(pile.representation.series.points)
        for i, key in enumerate(keys):
            e, g = expected[key], got[key]
            checked_points += 1
            if e is None or g is None:
                assert e is None and g is None
                if (op is ArithmeticOp.DIVIDE and cols[1][i] == 0
                        and cols[0][i] is not None and cols[1][i] is not None):
                    div_zero_points += 1
            elif integer_mode and op in (ArithmeticOp.ADD, ArithmeticOp.SUBTRACT):
                assert g == e
                exact_integer_checks += 1
            else:
                assert math.isclose(g, e, rel_tol=1e-9, abs_tol=1e-12)
        if op is ArithmeticOp.AVERAGE:
            add = merge_summarize(h, ["atom-1", "atom-2"], ArithmeticOp.ADD)
            for (_, avg_v), (_, add_v) in zip(
                pile.representation.series.points, add.representation.series.points
            ):
                if avg_v is None:
                    assert add_v is None
                else:
                    assert math.isclose(avg_v, add_v / 2, rel_tol=1e-9, abs_tol=1e-12)
    assert div_zero_points > 0
    assert exact_integer_checks > 0
    print(f"[4] arithmetic oracle: 1,000 pairs, {checked_points} points within 1e-9 "
          f"({exact_integer_checks} exact integer, {div_zero_points} null div-by-zero): PASS")


YEARS_A = tuple(str(y) for y in range(2000, 2005))
YEARS_B = tuple(str(y) for y in range(2010, 2015))


def _operand(h_nodes, rng, prefix, kind):
    """Append one operand subtree to h_nodes; returns its root id."""
    from drillboard.model import AxisDescriptor

    def axis(domain, dim="year", axis_kind=AxisKind.TEMPORAL):
        return AxisDescriptor(dimension=dim, unit=None, kind=axis_kind, domain=domain)

    def atom(aid, x=None, dim="value"):
        values = [rng.uniform(1.0, 9.0) for _ in range((len(x.domain) if x else 5))]
        a = make_atom(aid, values, x=x or axis(YEARS_A), dimension=dim)
        h_nodes.append(a)
        return a.id

    def pair(x=None, dim="value"):
        return [atom(f"{prefix}-{i}", x=x, dim=dim) for i in ("l", "r")]

    if kind == "atom":
        return atom(f"{prefix}-a")
    if kind == "atom_other_domain":
        return atom(f"{prefix}-a", x=axis(YEARS_B))
    if kind == "atom_other_xdim":
        return atom(f"{prefix}-a", x=axis(("oslo", "bergen"), "city", AxisKind.CATEGORICAL))
    if kind == "atom_other_ydim":
        return atom(f"{prefix}-a", dim="mass")

    if kind == "archetype_pile":
        ids = pair()
        pile = merge_archetype(_fresh(h_nodes), ids, ids[0])
    elif kind == "summarized_pile":
        ids = pair()
        pile = merge_summarize(_fresh(h_nodes), ids, ArithmeticOp.ADD)
    elif kind == "label_pile":
        ids = pair()
        pile = merge_label(_fresh(h_nodes), ids, LabelStat.MEAN)
    elif kind == "overlaid_pile":
        ids = pair()
        pile = merge_overlay(_fresh(h_nodes), ids, AxisPolicy.SHARED_Y)
    elif kind == "projected_pile":
        ids = pair()
        pile = merge_project(_fresh(h_nodes), ids[0], ids[1])
    elif kind == "juxtaposed_pile":
        ids = pair()
        pile = merge_juxtapose(_fresh(h_nodes), ids)
    else:  # nested_grid: a grid of grids, eating horizontal resolution
        inner = []
        for tag in ("p", "q"):
            ids = [atom(f"{prefix}-{tag}{i}") for i in (1, 2)]
            g = merge_juxtapose(_fresh(h_nodes), ids)
            h_nodes.append(g)
            inner.append(g.id)
        pile = merge_juxtapose(_fresh(h_nodes), inner)
    h_nodes.append(pile)
    return pile.id


def _fresh(h_nodes):
    children = {c for n in h_nodes for c in getattr(n, "children", ())}
    return Hierarchy.build(
        list(h_nodes), [n.id for n in h_nodes if n.id not in children]
    )


OPERAND_KINDS = (
    "atom", "atom", "atom_other_domain", "atom_other_xdim", "atom_other_ydim",
    "archetype_pile", "summarized_pile", "label_pile", "overlaid_pile",
    "projected_pile", "juxtaposed_pile", "nested_grid",
)


def test_5_operator_availability_is_sound():
    rng = random.Random(SEED)
    prohibition_hits = 0
    disabled_checked = 0
    enabled_checked = 0
    for trial in range(500):
        nodes = []
        kind_a = OPERAND_KINDS[rng.randrange(len(OPERAND_KINDS))]
        kind_b = OPERAND_KINDS[rng.randrange(len(OPERAND_KINDS))]
        a = _operand(nodes, rng, "a", kind_a)
        b = _operand(nodes, rng, "b", kind_b)
        h = _fresh(nodes)
        op = list(OpKind)[trial % 6]
        verdict = applicable_ops(h, [a, b])[op]

        def invoke():
            if op is OpKind.LABEL:
                return merge_label(h, [a, b], LabelStat.MEAN)
            if op is OpKind.SUMMARIZE:
                arith = list(ArithmeticOp)[rng.randrange(5)]
                return merge_summarize(h, [a, b], arith)
            if op is OpKind.ARCHETYPE:
                return merge_archetype(h, [a, b], a)
            if op is OpKind.PROJECT:
                return merge_project(h, a, b)
            if op is OpKind.JUXTAPOSE:
                return merge_juxtapose(h, [a, b])
            from drillboard.model import exposed_series

            series = [exposed_series(h.node(n)) for n in (a, b)]
            dims = {s.y.dimension for s in series if s is not None}
            policy = AxisPolicy.DUAL_Y if len(dims) == 2 else AxisPolicy.SHARED_Y
            return merge_overlay(h, [a, b], policy)

        if verdict.enabled:
            merged = attach(h, invoke())
            assert validate_view(merged, top_view(merged)) == []
            enabled_checked += 1
        else:
            with pytest.raises(DisabledError):
                invoke()
            disabled_checked += 1
            if "archetype_pile" in (kind_a, kind_b) and op in (
                OpKind.SUMMARIZE, OpKind.PROJECT, OpKind.OVERLAY
            ):
                assert verdict.reason == "non-series operand"
                prohibition_hits += 1
    assert enabled_checked > 0 and disabled_checked > 0
    assert prohibition_hits > 0
    print(f"[5] availability: 500 combos, {enabled_checked} enabled all merged, "
          f"{disabled_checked} disabled all raised "
          f"({prohibition_hits} archetype-arithmetic prohibitions): PASS")


def test_6_persistence_round_trip_and_integrity():
    rng = random.Random(SEED)
    for i in range(100):
        h = random_hierarchy(rng, rng.randint(2, 20))
        views = ViewCatalog()
        for label in ("alpha", "beta")[: rng.randint(0, 2)]:
            views = views.define(h, label, random_cut(rng, h))
        if rng.random() < 0.5:
            mode = FixedMode(rng.choice([200.0, 300.0]), rng.choice([150.0, 200.0]))
        else:
            mode = SpaceFillingMode()
        weights = tuple(
            (nid, rng.choice([0.5, 1.0, 2.0]))
            for nid in list(h.nodes)[: rng.randint(0, 3)]
        )
        doc = DrillboardDocument(
            id=f"doc-{i}",
            title=f"board {i}",
            tables=(),
            hierarchy=h,
            views=views,
            layout_config=LayoutConfig(mode=mode, weights=weights),
            revision=rng.randint(1, 9),
            read_only=rng.random() < 0.2,
        )
        first = save_document(doc)
        assert save_document(load_document(first)) == first

    sample = DrillboardDocument(
        id="t", title="t", tables=(),
        hierarchy=random_hierarchy(random.Random(1), 6),
        views=ViewCatalog(), layout_config=LayoutConfig(),
    )
    payload = json.loads(save_document(sample))
    dangling = dict(payload)
    dangling["piles"] = [dict(p) for p in payload["piles"]]
    if dangling["piles"]:
        dangling["piles"][0] = {**dangling["piles"][0],
                                "children": ["ghost", "atom-1"]}
    with pytest.raises(IntegrityViolationError):
        load_document(json.dumps(dangling).encode())

    bad_view = dict(payload)
    bad_view["views"] = [{"label": "broken", "members": ["atom-1", "atom-1"]}]
    with pytest.raises(IntegrityViolationError):
        load_document(json.dumps(bad_view).encode())

    print("[6] persistence: 100 random documents byte-identical after reload; "
          "dangling child and invalid view both rejected: PASS")


def _check_frames(frames, n, width, height, fixed):
    assert len(frames) == n
    heights = {f.height for f in frames}
    assert len(heights) == 1
    order = [(f.y, f.x) for f in frames]
    assert order == sorted(order)
    rects = [(f.x, f.y, f.width, f.height) for f in frames]
    for i in range(len(rects)):
        if not fixed:
            assert rects[i][0] + rects[i][2] <= width + 1e-6
            assert rects[i][1] + rects[i][3] <= height + 1e-6
        for j in range(i + 1, len(rects)):
            assert not rects_overlap(rects[i], rects[j])


def test_7_layout_grids_and_auto_rollup():
    rng = random.Random(SEED)
    laid_out = rolled = infeasible = 0
    for _ in range(200):
        h = random_hierarchy(rng, rng.randint(1, 40))
        view = random_cut(rng, h)
        vp = Viewport(rng.uniform(150, 1920), rng.uniform(120, 1080))
        if rng.random() < 0.4:
            mode = FixedMode()
            if math.floor(vp.width / mode.card_width) < 1:
                with pytest.raises(ViewportTooSmallError):
                    layout_view(h, view, vp, mode)
                infeasible += 1
                continue
            frames = layout_view(h, view, vp, mode)
            _check_frames(frames, len(view), vp.width, vp.height, fixed=True)
            laid_out += 1
        else:
            mode = SpaceFillingMode()
            before = len(view)
            rolled_view = auto_rollup(h, view, vp,
                                      mode.min_card_width, mode.min_card_height)
            assert len(rolled_view) <= before
            assert is_valid_cut(children_map(h), list(h.leaf_order), list(rolled_view))
            assert len(rolled_view) <= max(
                grid_capacity(vp, mode.min_card_width, mode.min_card_height),
                len(top_view(h)),
            )
            rolled += 1
            expected = best_grid(len(rolled_view), vp.width, vp.height,
                                 mode.min_card_width, mode.min_card_height)
            if expected is None:
                with pytest.raises(ViewportTooSmallError):
                    layout_view(h, rolled_view, vp, mode)
                infeasible += 1
                continue
            frames = layout_view(h, rolled_view, vp, mode)
            rows = sorted({f.y for f in frames})
            got = (len(rows), sum(1 for f in frames if f.y == rows[0]))
            assert got == expected
            _check_frames(frames, len(rolled_view), vp.width, vp.height, fixed=False)
            laid_out += 1
    assert laid_out > 0 and rolled > 0
    print(f"[7] layout: 200 view/viewport pairs, {laid_out} grids clean, "
          f"{rolled} auto roll-ups safe, {infeasible} too-small viewports rejected: PASS")
