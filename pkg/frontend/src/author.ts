/**
 * Author panel: merge, split, annotate, pull in more charts, save views.
 *
 * The six merge buttons mirror the server's availability verdicts for the
 * current selection: a disabled operator is grayed out and its button
 * carries the server's reason. The panel never judges compatibility
 * itself; with no verdicts loaded every operator stays disabled.
 */

import type { BoardDetail, OpsResponse } from "./types.js";

export const OP_ORDER = [
  "label",
  "summarize",
  "archetype",
  "project",
  "juxtapose",
  "overlay",
] as const;

export interface MergeRequest {
  op: string;
  nodes: string[];
  params: Record<string, string>;
  title?: string;
  annotation?: string;
}

export interface AuthorContext {
  selected: string[];
  ops: OpsResponse | null;
  board: BoardDetail | null;
  pileIds: ReadonlySet<string>;
  weights: ReadonlyMap<string, number>;
}

export interface AuthorHandlers {
  onMerge: (request: MergeRequest) => void;
  onSplit: (pileId: string) => void;
  onAddCharts: (tableId: string, groupPath: string[]) => void;
  onSaveView: (label: string) => void;
  onRename: (nodeId: string, title: string) => void;
  onAnnotate: (nodeId: string, text: string | null) => void;
  onClearSelection: () => void;
}

function field(labelText: string, input: HTMLElement): HTMLLabelElement {
  const label = document.createElement("label");
  label.className = "field";
  const span = document.createElement("span");
  span.textContent = labelText;
  label.appendChild(span);
  label.appendChild(input);
  return label;
}

function select(id: string, options: [string, string][]): HTMLSelectElement {
  const el = document.createElement("select");
  el.id = id;
  for (const [value, text] of options) {
    const opt = document.createElement("option");
    opt.value = value;
    opt.textContent = text;
    el.appendChild(opt);
  }
  return el;
}

function textInput(id: string, placeholder: string): HTMLInputElement {
  const el = document.createElement("input");
  el.type = "text";
  el.id = id;
  el.placeholder = placeholder;
  return el;
}

function mergeParams(op: string, panel: HTMLElement, selected: string[]): Record<string, string> {
  const value = (id: string) => (panel.querySelector(`#${id}`) as HTMLInputElement | null)?.value ?? "";
  switch (op) {
    case "label": {
      const text = value("label-text").trim();
      return text ? { text } : { stat: value("label-stat") || "mean" };
    }
    case "summarize":
      return { op: value("arith-op") || "add" };
    case "archetype":
      return { chosen: value("chosen-node") || selected[0] };
    case "overlay": {
      const policy = value("axis-policy");
      return policy && policy !== "auto" ? { axisPolicy: policy } : {};
    }
    default:
      return {};
  }
}

export function renderAuthor(
  container: HTMLElement,
  ctx: AuthorContext,
  handlers: AuthorHandlers,
): void {
  container.textContent = "";
  const heading = document.createElement("h2");
  heading.textContent = "Author";
  container.appendChild(heading);

  // --- selection -------------------------------------------------------
  const selection = document.createElement("div");
  selection.className = "selection";
  selection.id = "selection-list";
  selection.textContent = ctx.selected.length
    ? `selected: ${ctx.selected.join(", ")}`
    : "click cards to select operands";
  container.appendChild(selection);
  if (ctx.selected.length) {
    const clear = document.createElement("button");
    clear.id = "clear-selection";
    clear.textContent = "clear";
    clear.addEventListener("click", handlers.onClearSelection);
    container.appendChild(clear);
  }

  // --- merge parameters --------------------------------------------------
  const params = document.createElement("div");
  params.className = "merge-params";
  params.appendChild(field("stat", select("label-stat", [
    ["mean", "mean"], ["median", "median"], ["min", "min"], ["max", "max"],
  ])));
  params.appendChild(field("custom text", textInput("label-text", "overrides stat")));
  params.appendChild(field("arithmetic", select("arith-op", [
    ["add", "add"], ["subtract", "subtract"], ["multiply", "multiply"],
    ["divide", "divide"], ["average", "average"],
  ])));
  params.appendChild(field("archetype", select(
    "chosen-node",
    ctx.selected.map((id) => [id, id]),
  )));
  params.appendChild(field("y axes", select("axis-policy", [
    ["auto", "auto"], ["sharedY", "one shared"], ["dualY", "two"],
  ])));
  params.appendChild(field("title", textInput("merge-title", "optional pile title")));
  params.appendChild(field("annotation", textInput("merge-annotation", "optional note")));
  container.appendChild(params);

  // --- operator buttons --------------------------------------------------
  const ops = document.createElement("div");
  ops.id = "op-buttons";
  for (const op of OP_ORDER) {
    const button = document.createElement("button");
    button.dataset.op = op;
    button.textContent = op;
    const verdict = ctx.ops?.[op];
    if (!verdict?.enabled) {
      button.disabled = true;
      button.classList.add("grayed");
      button.title = verdict?.reason ?? "select at least two root cards";
    }
    button.addEventListener("click", () => {
      const title = (container.querySelector("#merge-title") as HTMLInputElement).value.trim();
      const annotation = (container.querySelector("#merge-annotation") as HTMLInputElement).value.trim();
      handlers.onMerge({
        op,
        nodes: [...ctx.selected],
        params: mergeParams(op, container, ctx.selected),
        ...(title ? { title } : {}),
        ...(annotation ? { annotation } : {}),
      });
    });
    ops.appendChild(button);
  }
  container.appendChild(ops);

  // --- single-node edits ---------------------------------------------------
  const single = ctx.selected.length === 1 ? ctx.selected[0] : null;
  const edits = document.createElement("div");
  edits.className = "single-edits";
  const splitBtn = document.createElement("button");
  splitBtn.id = "split-btn";
  splitBtn.textContent = "split pile";
  splitBtn.disabled = !(single && ctx.pileIds.has(single));
  splitBtn.addEventListener("click", () => {
    if (single) handlers.onSplit(single);
  });
  edits.appendChild(splitBtn);

  const renameBtn = document.createElement("button");
  renameBtn.id = "rename-btn";
  renameBtn.textContent = "rename";
  renameBtn.disabled = !single;
  renameBtn.addEventListener("click", () => {
    const title = (container.querySelector("#merge-title") as HTMLInputElement).value.trim();
    if (single && title) handlers.onRename(single, title);
  });
  edits.appendChild(renameBtn);

  const annotateBtn = document.createElement("button");
  annotateBtn.id = "annotate-btn";
  annotateBtn.textContent = "annotate";
  annotateBtn.disabled = !single;
  annotateBtn.addEventListener("click", () => {
    const text = (container.querySelector("#merge-annotation") as HTMLInputElement).value.trim();
    if (single) handlers.onAnnotate(single, text || null);
  });
  edits.appendChild(annotateBtn);

  const weight = document.createElement("input");
  weight.type = "number";
  weight.id = "width-weight";
  weight.readOnly = true;
  weight.value = single ? String(ctx.weights.get(single) ?? 1) : "";
  weight.title = "layout width weight; set in the document, shown here";
  edits.appendChild(field("width weight", weight));
  container.appendChild(edits);

  // --- dataset charts ----------------------------------------------------
  const datasets: [string, string][] = [];
  for (const table of ctx.board?.tables ?? []) {
    const seen = new Set<string>();
    for (const feature of table.features) {
      const path = feature.groupPath.join("/");
      if (seen.has(path)) continue;
      seen.add(path);
      const text = path ? `${table.id}: ${feature.groupPath.join(" / ")}` : `${table.id}: all features`;
      datasets.push([JSON.stringify({ tableId: table.id, groupPath: feature.groupPath }), text]);
    }
  }
  if (datasets.length) {
    const dataRow = document.createElement("div");
    dataRow.className = "dataset-row";
    const dropdown = select("dataset-select", datasets);
    dataRow.appendChild(field("dataset", dropdown));
    const addBtn = document.createElement("button");
    addBtn.id = "add-charts";
    addBtn.textContent = "add charts";
    addBtn.addEventListener("click", () => {
      const choice = JSON.parse(dropdown.value) as { tableId: string; groupPath: string[] };
      handlers.onAddCharts(choice.tableId, choice.groupPath);
    });
    dataRow.appendChild(addBtn);
    container.appendChild(dataRow);
  }

  // --- view saving -----------------------------------------------------
  const viewRow = document.createElement("div");
  viewRow.className = "view-row";
  const labelInput = textInput("save-view-label", "view name");
  viewRow.appendChild(field("save current view", labelInput));
  const saveBtn = document.createElement("button");
  saveBtn.id = "save-view";
  saveBtn.textContent = "save view";
  saveBtn.addEventListener("click", () => {
    const label = labelInput.value.trim();
    if (label) handlers.onSaveView(label);
  });
  viewRow.appendChild(saveBtn);
  container.appendChild(viewRow);
}
