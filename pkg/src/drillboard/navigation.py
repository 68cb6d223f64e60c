"""View navigation over a chart hierarchy.

A *view* is the ordered list of node ids a reader currently sees. Valid
views are exactly the frontiers of the hierarchy: every leaf atom is
covered by exactly one member, no member is an ancestor of another, and
members appear in canonical left-to-right order. Drilling down swaps a
pile for its children in place; rolling up collapses everything under a
member's parent back into that parent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicateLabelError,
    InvalidViewError,
    IsRootError,
    NotAPileError,
    NotInViewError,
    UnknownViewError,
)
from .model import Hierarchy, Pile

View = tuple[str, ...]


def bottom_view(h: Hierarchy) -> View:
    """The fully expanded view: every atom, canonical order."""
    return h.leaf_order


def top_view(h: Hierarchy) -> View:
    """The fully collapsed view: just the roots."""
    return h.roots


def validate_view(h: Hierarchy, view) -> list[str]:
    """All cut/order violations for a candidate view; empty means valid."""
    violations: list[str] = []
    members = tuple(view)

    unknown = [m for m in members if m not in h.nodes]
    for m in unknown:
        violations.append(f"unknown node {m!r}")
    known = [m for m in members if m not in set(unknown)]

    seen: set[str] = set()
    for m in known:
        if m in seen:
            violations.append(f"duplicate member {m!r}")
        seen.add(m)

    covered: dict[str, str] = {}
    for m in dict.fromkeys(known):
        for leaf in h.leaves_under(m):
            if leaf in covered and covered[leaf] != m:
                violations.append(
                    f"leaf {leaf!r} covered by both {covered[leaf]!r} and {m!r}"
                )
            covered[leaf] = m
    for leaf in h.leaf_order:
        if leaf not in covered:
            violations.append(f"leaf {leaf!r} not covered")

    positions = [h.first_leaf_index(m) for m in dict.fromkeys(known)]
    if any(b <= a for a, b in zip(positions, positions[1:])):
        violations.append("members out of canonical order")

    return violations


def assert_valid(h: Hierarchy, view) -> View:
    violations = validate_view(h, view)
    if violations:
        raise InvalidViewError(violations)
    return tuple(view)


def drill_down(h: Hierarchy, view: View, node_id: str) -> View:
    """Replace a pile member with its children, in place."""
    if node_id not in view:
        raise NotInViewError(f"node {node_id!r} is not in the view")
    node = h.node(node_id)
    if not isinstance(node, Pile):
        raise NotAPileError(f"node {node_id!r} is an atom; nothing to drill into")
    i = view.index(node_id)
    return view[:i] + node.children + view[i + 1 :]


def roll_up(h: Hierarchy, view: View, node_id: str) -> View:
    """Collapse the member's parent: the parent replaces every view member
    that sits at or under it, at the position of the first one."""
    if node_id not in view:
        raise NotInViewError(f"node {node_id!r} is not in the view")
    parent = h.parent_of(node_id)
    if parent is None:
        raise IsRootError(f"node {node_id!r} is a root; nothing to roll up to")
    out: list[str] = []
    inserted = False
    for m in view:
        if m == parent or h.is_ancestor(parent, m):
            if not inserted:
                out.append(parent)
                inserted = True
            continue
        out.append(m)
    return tuple(out)


def depth_of(h: Hierarchy, view: View, node_id: str) -> int:
    """Drill depth of a node relative to the covering view member.

    0 for view members themselves (and for anything at or above the
    frontier); k when the node sits k pile-expansions below its covering
    member.
    """
    h.node(node_id)
    member_set = set(view)
    if node_id in member_set:
        return 0
    depth = 0
    cur = node_id
    while True:
        parent = h.parent_of(cur)
        if parent is None:
            return 0
        depth += 1
        if parent in member_set:
            return depth
        cur = parent


@dataclass(frozen=True)
class ViewCatalog:
    """Named saved views for one hierarchy, in definition order."""

    entries: tuple[tuple[str, View], ...] = ()
    labels: frozenset[str] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(label for label, _ in self.entries))
        if len(self.labels) != len(self.entries):
            raise DuplicateLabelError("duplicate view labels")

    def get(self, label: str) -> View:
        for name, view in self.entries:
            if name == label:
                return view
        raise UnknownViewError(f"no view labeled {label!r}")

    def define(self, h: Hierarchy, label: str, view) -> "ViewCatalog":
        if label in ("top", "bottom"):
            raise DuplicateLabelError(f"label {label!r} is reserved")
        if label in self.labels:
            raise DuplicateLabelError(f"view {label!r} already defined")
        return ViewCatalog(self.entries + ((label, assert_valid(h, view)),))

    def delete(self, label: str) -> "ViewCatalog":
        if label not in self.labels:
            raise UnknownViewError(f"no view labeled {label!r}")
        return ViewCatalog(tuple(e for e in self.entries if e[0] != label))


def resolve_view(h: Hierarchy, catalog: ViewCatalog, label: str) -> View:
    """Labels 'top' and 'bottom' are implicit; everything else is looked up."""
    if label == "top":
        return top_view(h)
    if label == "bottom":
        return bottom_view(h)
    return catalog.get(label)


def project_view(h: Hierarchy, old_view: View, new_h: Hierarchy) -> View:
    """Best-effort carry-over of a view onto an edited hierarchy.

    Members that survived keep their place; leaves whose covering member
    vanished fall back to the highest surviving ancestor, or themselves.
    Used when an author mutation lands under a live reader session.
    """
    out: list[str] = []
    for leaf in new_h.leaf_order:
        candidate = leaf
        cur = new_h.parents.get(leaf)
        chain = []
        while cur is not None:
            chain.append(cur)
            cur = new_h.parents.get(cur)
        # prefer the original covering member if it still exists
        old_cover = None
        for m in old_view:
            if m in new_h.nodes and (m == leaf or new_h.is_ancestor(m, leaf)):
                old_cover = m
                break
        pick = old_cover if old_cover is not None else candidate
        if not out or out[-1] != pick:
            out.append(pick)
    view = tuple(dict.fromkeys(out))
    if validate_view(new_h, view):
        return top_view(new_h)
    return view


__all__ = [
    "View",
    "ViewCatalog",
    "assert_valid",
    "bottom_view",
    "depth_of",
    "drill_down",
    "project_view",
    "resolve_view",
    "roll_up",
    "top_view",
    "validate_view",
]
