"""Exception hierarchy for the drillboard engine.

Every domain error derives from DrillboardError so callers (CLI, HTTP
service) can map engine failures to exit codes / status codes in one place.
"""

from __future__ import annotations


class DrillboardError(Exception):
    """Base class for all engine errors."""


class ModelInvariantError(DrillboardError):
    """A domain object violates one of its structural invariants."""


# --- hierarchy / view navigation -------------------------------------------

class UnknownNodeError(DrillboardError):
    pass


class NotInViewError(DrillboardError):
    pass


class NotAPileError(DrillboardError):
    """Drill-down was requested on a leaf chart."""


class IsRootError(DrillboardError):
    """Roll-up was requested on a node with no parent."""


class InvalidViewError(DrillboardError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class DuplicateLabelError(DrillboardError):
    pass


class UnknownViewError(DrillboardError):
    pass


# --- aggregation ------------------------------------------------------------

class TooFewNodesError(DrillboardError):
    pass


class AncestryConflictError(DrillboardError):
    pass


class DisabledError(DrillboardError):
    """The requested merge operator is disabled for these operands."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class PolicyMismatchError(DisabledError):
    """Overlay axis policy cannot be satisfied by the operands."""


class ChosenNotMemberError(DrillboardError):
    pass


class EmptyIntersectionError(DrillboardError):
    """Projection found no x-key where both operands have a value."""


class AllNullResultError(DrillboardError):
    """An arithmetic merge produced no numeric value at any x-key."""


class UnknownPileError(DrillboardError):
    pass


class ReferencedByViewError(DrillboardError):
    """Split refused: the pile appears in a saved view and repair was not requested."""


# --- ingest -----------------------------------------------------------------

class IngestError(DrillboardError):
    pass


class EmptyTableError(IngestError):
    pass


class RaggedRowsError(IngestError):
    pass


class NonNumericCellError(IngestError):
    def __init__(self, row: int, col: int, cell: str):
        super().__init__(f"non-numeric cell at row {row}, column {col}: {cell!r}")
        self.row = row
        self.col = col
        self.cell = cell


class DuplicateFeatureNameError(IngestError):
    pass


class DuplicateKeyError(IngestError):
    pass


class UnknownFeatureError(DrillboardError):
    pass


class UnknownGroupPathError(DrillboardError):
    pass


class UnknownTableError(DrillboardError):
    pass


# --- layout -----------------------------------------------------------------

class ViewportTooSmallError(DrillboardError):
    pass


# --- persistence ------------------------------------------------------------

class SchemaVersionMismatchError(DrillboardError):
    pass


class IntegrityViolationError(DrillboardError):
    pass


# --- service ----------------------------------------------------------------

class UnknownDocumentError(DrillboardError):
    pass


class UnknownSessionError(DrillboardError):
    pass


class ReadOnlyDocumentError(DrillboardError):
    pass
