/**
 * Payload shapes for the drillboard HTTP API.
 *
 * These mirror the JSON the server sends; the client never derives view
 * membership, frame geometry, depth labels, or colors on its own. Every
 * field here is owned by the server and replaced wholesale when a new
 * state arrives.
 */

export interface AxisPayload {
  dimension: string;
  unit: string | null;
  kind: string;
  domain: (string | number)[];
}

export interface SeriesPayload {
  name: string;
  x: AxisPayload;
  y: AxisPayload;
  points: [string, number | null][];
}

export interface CardPayload {
  type: string;
  title: string;
  annotation: string | null;
  series?: SeriesPayload[];
  // label cards
  text?: string;
  stat?: string;
  // scatter cards
  points?: [number, number, string][];
  xDim?: AxisPayload;
  yDim?: AxisPayload;
  // grid cards
  cells?: CardPayload[];
  // overlay cards
  axisPolicy?: string;
  // piles standing in for one member
  archetypeOf?: string;
}

export interface FramePayload {
  nodeId: string;
  x: number;
  y: number;
  width: number;
  height: number;
  isPile: boolean;
  depthLabel: number | null;
  colorGroup: number | null;
  widthWeight: number;
}

export interface TreeNodePayload {
  id: string;
  title: string;
  isPile: boolean;
  visible: boolean;
  children: TreeNodePayload[];
}

export interface SessionState {
  sessionId: string;
  documentId: string;
  documentRevision: number;
  revisionStale: boolean;
  viewLabel: string | null;
  viewLabels: string[];
  view: string[];
  frames: FramePayload[];
  cards: Record<string, CardPayload>;
  tree: TreeNodePayload[];
  colors: Record<string, number>;
  depths: Record<string, number>;
}

export interface BoardSummary {
  id: string;
  title: string;
  views: string[];
}

export interface FeatureSummary {
  name: string;
  groupPath: string[];
  unit: string | null;
}

export interface TableSummary {
  id: string;
  key: AxisPayload;
  valueDimension: string | null;
  valueUnit: string | null;
  features: FeatureSummary[];
}

/** GET /api/drillboards/{id} returns the full document; the author panel
 * only needs the table catalog out of it. */
export interface BoardDetail {
  id: string;
  title: string;
  revision: number;
  readOnly: boolean;
  tables: TableSummary[];
}

export interface OpVerdict {
  enabled: boolean;
  reason: string | null;
}

/** Verdict per operator name, as returned by GET .../ops. */
export type OpsResponse = Record<string, OpVerdict>;

export type ActionBody =
  | { type: "drill"; nodeId: string }
  | { type: "roll"; nodeId: string }
  | { type: "jump"; view: string };

export interface MutationResult {
  revision: number;
  pileId?: string;
  atomIds?: string[];
}

/**
 * What the client itself keeps between renders. Everything except the
 * selection and mode flags is a verbatim copy of the last server state.
 */
export interface ClientViewState {
  boardId: string | null;
  session: SessionState | null;
  selected: string[];
  authorMode: boolean;
}
