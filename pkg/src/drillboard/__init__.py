"""Drillboard: adaptive dashboards as drillable chart hierarchies.

Authors merge charts into piles with six operators (label, summarize,
archetype, project, juxtapose, overlay); readers navigate the resulting
hierarchy by drilling down and rolling up, never losing the author's
chart order. The package covers the data model, merge algebra, CSV
ingestion, grid layout, JSON persistence, an HTTP service, and a CLI.
"""

from .aggregation import (
    AggregationConfig,
    OpKind,
    OpVerdict,
    applicable_ops,
    attach,
    merge_archetype,
    merge_juxtapose,
    merge_label,
    merge_overlay,
    merge_project,
    merge_summarize,
    split,
)
from .document import (
    DrillboardDocument,
    apply_mutation,
    load_document,
    load_table,
    new_document,
    save_document,
    save_table,
    validate_document,
)
from .errors import DrillboardError
from .ingest import (
    DataTable,
    FeatureColumn,
    SelectionQuery,
    export_table_csv,
    infer_chart_kind,
    parse_table,
    select_charts,
)
from .layout import (
    CardFrame,
    FixedMode,
    LayoutConfig,
    SpaceFillingMode,
    Viewport,
    assign_subtree_colors,
    auto_rollup,
    layout_view,
)
from .model import (
    ArithmeticOp,
    AxisDescriptor,
    AxisKind,
    AxisPolicy,
    ChartAtom,
    ChartKind,
    DataSeries,
    Hierarchy,
    LabelStat,
    Pile,
)
from .navigation import (
    ViewCatalog,
    bottom_view,
    depth_of,
    drill_down,
    resolve_view,
    roll_up,
    top_view,
    validate_view,
)
from .script import apply_script, load_script
from .service import DocumentStore, create_app

__version__ = "0.1.0"
