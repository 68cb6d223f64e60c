"""Grid layout for views: card rectangles, auto roll-up, subtree colors.

Cards fill rows left to right, top to bottom, in view order, and every
card in a layout has the same height. Fixed mode keeps a constant card
size and lets rows overflow the viewport (the UI scrolls). Space-filling
mode picks a rows/columns split that wastes the least grid area while
keeping cards above configurable minimum dimensions, then stretches each
row to the full viewport width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .errors import ModelInvariantError, ViewportTooSmallError
from .model import Hierarchy
from .navigation import View, roll_up, top_view

__all__ = [
    "CardFrame",
    "FixedMode",
    "LayoutConfig",
    "LayoutMode",
    "SpaceFillingMode",
    "Viewport",
    "assign_subtree_colors",
    "auto_rollup",
    "grid_capacity",
    "layout_view",
]


@dataclass(frozen=True)
class Viewport:
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ModelInvariantError("viewport dimensions must be positive")


@dataclass(frozen=True)
class FixedMode:
    card_width: float = 300.0
    card_height: float = 200.0


@dataclass(frozen=True)
class SpaceFillingMode:
    min_card_width: float = 160.0
    min_card_height: float = 100.0


LayoutMode = Union[FixedMode, SpaceFillingMode]


@dataclass(frozen=True)
class LayoutConfig:
    """Per-document layout settings: the mode plus author card-width weights."""

    mode: LayoutMode = SpaceFillingMode()
    weights: tuple[tuple[str, float], ...] = ()

    def weight_map(self) -> dict[str, float]:
        return dict(self.weights)


@dataclass(frozen=True)
class CardFrame:
    node_id: str
    x: float
    y: float
    width: float
    height: float
    is_pile: bool
    depth_label: int | None = None
    color_group: int | None = None
    width_weight: float = 1.0


def _frames_for_rows(
    h: Hierarchy,
    members: Sequence[str],
    per_row: int,
    row_width: float | None,
    card_width: float,
    card_height: float,
    weights: Mapping[str, float],
    depth_labels: Mapping[str, int],
    color_groups: Mapping[str, int],
) -> list[CardFrame]:
    frames: list[CardFrame] = []
    for start in range(0, len(members), per_row):
        row = members[start : start + per_row]
        row_weights = [max(weights.get(m, 1.0), 1e-9) for m in row]
        if row_width is None:
            widths = [card_width] * len(row)
        else:
            total = sum(row_weights)
            widths = [row_width * w / total for w in row_weights]
        x = 0.0
        y = (start // per_row) * card_height
        for member, w, ww in zip(row, widths, row_weights):
            frames.append(
                CardFrame(
                    node_id=member,
                    x=x,
                    y=y,
                    width=w,
                    height=card_height,
                    is_pile=h.is_pile(member),
                    depth_label=depth_labels.get(member),
                    color_group=color_groups.get(member),
                    width_weight=weights.get(member, 1.0),
                )
            )
            x += w
    return frames


def _choose_grid(n: int, viewport: Viewport, mode: SpaceFillingMode) -> tuple[int, int]:
    """Pick (rows, cols) wasting the least grid area; ties prefer square cells."""
    best = None
    for rows in range(1, n + 1):
        cols = math.ceil(n / rows)
        cell_w = viewport.width / cols
        cell_h = viewport.height / rows
        if cell_w < mode.min_card_width or cell_h < mode.min_card_height:
            continue
        unused = (rows * cols - n) * cell_w * cell_h
        score = (unused, abs(math.log(cell_w / cell_h)), rows)
        if best is None or score < best[0]:
            best = (score, rows, cols)
    if best is None:
        raise ViewportTooSmallError(
            f"{n} cards cannot meet {mode.min_card_width}x{mode.min_card_height}px "
            f"minimums in a {viewport.width}x{viewport.height}px viewport"
        )
    return best[1], best[2]


def layout_view(
    h: Hierarchy,
    view: View,
    viewport: Viewport,
    mode: LayoutMode,
    *,
    weights: Mapping[str, float] | None = None,
    depth_labels: Mapping[str, int] | None = None,
    color_groups: Mapping[str, int] | None = None,
) -> list[CardFrame]:
    members = tuple(view)
    weights = weights or {}
    depth_labels = depth_labels or {}
    color_groups = color_groups or {}
    if not members:
        return []

    if isinstance(mode, FixedMode):
        cols = math.floor(viewport.width / mode.card_width)
        if cols < 1:
            raise ViewportTooSmallError(
                f"viewport narrower than one {mode.card_width}px card"
            )
        return _frames_for_rows(
            h, members, cols, None, mode.card_width, mode.card_height,
            weights, depth_labels, color_groups,
        )

    rows, cols = _choose_grid(len(members), viewport, mode)
    return _frames_for_rows(
        h, members, cols, viewport.width, viewport.width / cols,
        viewport.height / rows, weights, depth_labels, color_groups,
    )


def grid_capacity(viewport: Viewport, min_card_width: float, min_card_height: float) -> int:
    """Most cards a viewport can hold at the minimum card size."""
    return math.floor(viewport.width / min_card_width) * math.floor(
        viewport.height / min_card_height
    )


def auto_rollup(
    h: Hierarchy,
    view: View,
    viewport: Viewport,
    min_card_width: float = 160.0,
    min_card_height: float = 100.0,
    *,
    focus: str | None = None,
) -> View:
    """Roll members up until the view fits the viewport, or the top is reached.

    Rolls the deepest member first; among equally deep members, the one
    farthest (by member index) from the card covering the most recently
    drilled node. Never returns anything past the top view.
    """
    capacity = grid_capacity(viewport, min_card_width, min_card_height)
    view = tuple(view)
    top = top_view(h)
    while len(view) > max(capacity, len(top)) and view != top:
        focus_i = 0
        if focus is not None:
            for i, m in enumerate(view):
                if m == focus or h.is_ancestor(m, focus) or h.is_ancestor(focus, m):
                    focus_i = i
                    break
        depths = [h.depth_below_root(m) for m in view]
        deepest = max(depths)
        if deepest == 0:
            break
        candidates = [i for i, d in enumerate(depths) if d == deepest]
        target = max(candidates, key=lambda i: (abs(i - focus_i), i))
        view = roll_up(h, view, view[target])
    return view


def assign_subtree_colors(
    h: Hierarchy, view: View, drill_history: Sequence[str]
) -> dict[str, int]:
    """Color group per view member, covering the 5 most recently drilled subtrees.

    Members under the same drilled pile share a group; group 0 is the most
    recent drill. Subtrees older than the fifth stay uncolored.
    """
    colors: dict[str, int] = {}
    next_group = 0
    recent_first = list(dict.fromkeys(reversed(list(drill_history))))
    for drilled in recent_first:
        if next_group == 5:
            break
        if drilled not in h.nodes:
            continue
        members = [
            m for m in view if m not in colors and h.is_ancestor(drilled, m)
        ]
        if not members:
            continue
        for m in members:
            colors[m] = next_group
        next_group += 1
    return colors
