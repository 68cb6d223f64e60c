"""Shared builders and hypothesis strategies for the test suite."""

from __future__ import annotations

import random
import sys
from pathlib import Path

from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from drillboard.aggregation import (
    attach,
    merge_archetype,
    merge_juxtapose,
    merge_label,
    merge_summarize,
)
from drillboard.model import (
    ArithmeticOp,
    AxisDescriptor,
    AxisKind,
    ChartAtom,
    ChartKind,
    DataSeries,
    Hierarchy,
    LabelStat,
)

YEARS = tuple(str(y) for y in range(2008, 2013))


def x_axis(domain=YEARS, dimension="year", kind=AxisKind.TEMPORAL, unit=None):
    return AxisDescriptor(dimension=dimension, unit=unit, kind=kind, domain=tuple(domain))


def y_axis(values, dimension="value", unit=None):
    present = [v for v in values if v is not None]
    lo, hi = (min(present), max(present)) if present else (0.0, 1.0)
    return AxisDescriptor(
        dimension=dimension, unit=unit, kind=AxisKind.QUANTITATIVE, domain=(lo, hi)
    )


def make_series(values, *, x=None, dimension="value", unit=None, name="s"):
    x = x or x_axis(domain=tuple(f"k{i}" for i in range(len(values))))
    return DataSeries(
        x=x,
        y=y_axis(values, dimension=dimension, unit=unit),
        points=tuple(zip(x.domain, values)),
        name=name,
    )


def make_atom(atom_id, values, *, x=None, dimension="value", unit=None,
              kind=ChartKind.LINE, title=None):
    return ChartAtom(
        id=atom_id,
        kind=kind,
        series=(make_series(values, x=x, dimension=dimension, unit=unit, name=atom_id),),
        title=title or atom_id,
    )


def make_forest(n, *, x=None, dimension="value", values=None):
    """n compatible single-series atoms, ids atom-1..atom-n, as a flat hierarchy."""
    x = x or x_axis()
    atoms = [
        make_atom(
            f"atom-{i + 1}",
            values if values is not None else [float(i + 1 + j) for j in range(len(x.domain))],
            x=x,
            dimension=dimension,
        )
        for i in range(n)
    ]
    return Hierarchy.build(atoms, [a.id for a in atoms])


def random_hierarchy(rng: random.Random, n_leaves: int, *, merge_bias: float = 0.92) -> Hierarchy:
    """Random forest over n compatible leaves, built by random root merges."""
    h = make_forest(n_leaves)
    ops = (
        lambda hh, ids: merge_archetype(hh, ids, ids[rng.randrange(len(ids))]),
        lambda hh, ids: merge_label(hh, ids, LabelStat.MEAN),
        lambda hh, ids: merge_summarize(hh, ids, ArithmeticOp.ADD),
        lambda hh, ids: merge_juxtapose(hh, ids),
    )
    while len(h.roots) > 1 and rng.random() < merge_bias:
        k = rng.randint(2, min(5, len(h.roots)))
        ids = rng.sample(h.roots, k)
        op = ops[rng.randrange(len(ops))]
        try:
            pile = op(h, ids)
        except Exception:
            pile = merge_archetype(h, ids, ids[0])
        h = attach(h, pile)
    return h


def random_cut(rng: random.Random, h: Hierarchy):
    """A random valid view: random drills from the top."""
    view = list(h.roots)
    while True:
        piles = [m for m in view if h.is_pile(m)]
        if not piles or rng.random() < 0.3:
            return tuple(view)
        target = piles[rng.randrange(len(piles))]
        i = view.index(target)
        view[i : i + 1] = list(h.node(target).children)


def children_map(h: Hierarchy) -> dict:
    """Raw child mapping for the independent cut oracle."""
    return {
        nid: list(node.children)
        for nid, node in h.nodes.items()
        if h.is_pile(nid)
    }


finite_values = st.lists(
    st.one_of(
        st.none(),
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False),
    ),
    min_size=1,
    max_size=8,
)
