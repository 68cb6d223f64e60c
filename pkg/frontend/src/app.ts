/**
 * Application shell: wires the reader grid, treeview, and author panel to
 * the HTTP API.
 *
 * All hierarchy logic lives on the server. The client's only state is the
 * last SessionState received, the card selection, and the mode flag; every
 * navigation or edit round-trips and the response replaces the old state
 * wholesale (session payloads are frozen to make accidental local edits
 * throw). Failed requests leave the rendered state exactly as it was and
 * surface the server's reason as a toast.
 */

import {
  ActionQueue,
  ApiError,
  getBoard,
  getOps,
  listBoards,
  openSession,
  postMutation,
} from "./api.js";
import { renderAuthor } from "./author.js";
import { cardElement, renderFrames, showToast } from "./reader.js";
import { renderTree, treeEntry } from "./tree.js";
import type {
  ActionBody,
  BoardDetail,
  ClientViewState,
  OpsResponse,
  SessionState,
} from "./types.js";

function deepFreeze<T>(value: T): T {
  if (value && typeof value === "object" && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}

function option(value: string, text: string): HTMLOptionElement {
  const el = document.createElement("option");
  el.value = value;
  el.textContent = text;
  return el;
}

export interface AppController {
  readonly state: ClientViewState;
  refresh(): Promise<void>;
  openBoard(boardId: string): Promise<void>;
  act(action: ActionBody): Promise<void>;
  setAuthorMode(on: boolean): void;
  elements: {
    grid: HTMLElement;
    tree: HTMLElement;
    author: HTMLElement;
    boardSelect: HTMLSelectElement;
    viewSelect: HTMLSelectElement;
    modeToggle: HTMLInputElement;
    meta: HTMLElement;
  };
}

export async function initApp(root: HTMLElement): Promise<AppController> {
  const state: ClientViewState = {
    boardId: null,
    session: null,
    selected: [],
    authorMode: false,
  };
  let board: BoardDetail | null = null;
  let ops: OpsResponse | null = null;
  let opsGeneration = 0;
  let previousView: ReadonlySet<string> | null = null;
  const queue = new ActionQueue();

  // --- static shell ------------------------------------------------------
  root.textContent = "";
  const header = document.createElement("header");
  const boardSelect = document.createElement("select");
  boardSelect.id = "board-select";
  const viewSelect = document.createElement("select");
  viewSelect.id = "view-select";
  const modeLabel = document.createElement("label");
  modeLabel.className = "mode-label";
  const modeToggle = document.createElement("input");
  modeToggle.type = "checkbox";
  modeToggle.id = "mode-toggle";
  modeLabel.appendChild(modeToggle);
  modeLabel.appendChild(document.createTextNode(" author mode"));
  const meta = document.createElement("span");
  meta.id = "doc-meta";
  header.appendChild(boardSelect);
  header.appendChild(viewSelect);
  header.appendChild(modeLabel);
  header.appendChild(meta);
  root.appendChild(header);

  const main = document.createElement("main");
  const grid = document.createElement("div");
  grid.id = "grid";
  const side = document.createElement("aside");
  side.id = "side";
  const tree = document.createElement("div");
  tree.id = "tree";
  const author = document.createElement("div");
  author.id = "author";
  author.hidden = true;
  side.appendChild(tree);
  side.appendChild(author);
  main.appendChild(grid);
  main.appendChild(side);
  root.appendChild(main);

  function viewport(): { width: number; height: number } {
    return {
      width: grid.clientWidth || 1280,
      height: grid.clientHeight || 800,
    };
  }

  function toastError(err: unknown): void {
    if (err instanceof ApiError) showToast(err.reason);
    else showToast(String(err));
  }

  // --- rendering ---------------------------------------------------------
  function setHover(nodeId: string, over: boolean): void {
    cardElement(grid, nodeId)?.classList.toggle("hover", over);
    treeEntry(tree, nodeId)?.classList.toggle("hover", over);
  }

  function render(): void {
    const session = state.session;
    if (!session) return;

    viewSelect.textContent = "";
    for (const label of session.viewLabels) viewSelect.appendChild(option(label, label));
    if (session.viewLabel && session.viewLabels.includes(session.viewLabel)) {
      viewSelect.value = session.viewLabel;
    }
    meta.textContent =
      `${session.documentId} r${session.documentRevision}` +
      (session.revisionStale ? " (newer revision exists)" : "");

    renderFrames(
      grid,
      session,
      {
        onDrill: (nodeId) => void act({ type: "drill", nodeId }),
        onRoll: (nodeId) => void act({ type: "roll", nodeId }),
        onSelect: toggleSelected,
        onHover: setHover,
      },
      {
        authorMode: state.authorMode,
        selected: new Set(state.selected),
        previousView,
      },
    );
    previousView = new Set(session.view);

    renderTree(tree, session.tree, { onHover: setHover });

    author.hidden = !state.authorMode;
    if (state.authorMode) {
      const weights = new Map(session.frames.map((f) => [f.nodeId, f.widthWeight]));
      const pileIds = new Set(session.frames.filter((f) => f.isPile).map((f) => f.nodeId));
      renderAuthor(
        author,
        { selected: state.selected, ops, board, pileIds, weights },
        {
          onMerge: (request) => void mutate({ type: "merge", ...request }),
          onSplit: (pileId) => void mutate({ type: "split", pileId }),
          onAddCharts: (tableId, groupPath) =>
            void mutate({ type: "addCharts", query: { tableId, groupPath } }),
          onSaveView: (label) =>
            void mutate({ type: "defineView", label, members: [...(state.session?.view ?? [])] }),
          onRename: (nodeId, title) => void mutate({ type: "rename", nodeId, title }),
          onAnnotate: (nodeId, text) => void mutate({ type: "annotate", nodeId, text }),
          onClearSelection: () => {
            state.selected = [];
            ops = null;
            render();
          },
        },
      );
    }
  }

  function applyState(session: SessionState): void {
    state.session = deepFreeze(session);
    const members = new Set(session.view);
    state.selected = state.selected.filter((id) => members.has(id));
    render();
  }

  // --- actions and edits ---------------------------------------------------
  async function act(action: ActionBody): Promise<void> {
    const session = state.session;
    if (!session) return;
    try {
      applyState(await queue.post(session.sessionId, action));
    } catch (err) {
      toastError(err);
    }
  }

  function toggleSelected(nodeId: string): void {
    const index = state.selected.indexOf(nodeId);
    if (index >= 0) state.selected.splice(index, 1);
    else state.selected.push(nodeId);
    ops = null;
    render();
    if (state.selected.length >= 2 && state.boardId) {
      const generation = ++opsGeneration;
      getOps(state.boardId, state.selected)
        .then((verdicts) => {
          if (generation === opsGeneration) {
            ops = verdicts;
            render();
          }
        })
        .catch(toastError);
    }
  }

  async function mutate(body: Record<string, unknown>): Promise<void> {
    if (!state.boardId) return;
    try {
      const result = await postMutation(state.boardId, body);
      showToast(
        result.pileId
          ? `created ${result.pileId}`
          : result.atomIds
            ? `added ${result.atomIds.join(", ")}`
            : "saved",
        "info",
      );
      state.selected = [];
      ops = null;
      board = await getBoard(state.boardId);
      const opened = await openSession(state.boardId, { viewport: viewport() });
      applyState(opened.state);
    } catch (err) {
      toastError(err);
    }
  }

  async function openBoard(boardId: string): Promise<void> {
    state.boardId = boardId;
    state.selected = [];
    ops = null;
    previousView = null;
    board = await getBoard(boardId);
    const opened = await openSession(boardId, { viewport: viewport() });
    applyState(opened.state);
  }

  async function refresh(): Promise<void> {
    if (state.boardId) await openBoard(state.boardId);
  }

  // --- top bar wiring -------------------------------------------------------
  boardSelect.addEventListener("change", () => {
    void openBoard(boardSelect.value).catch(toastError);
  });
  viewSelect.addEventListener("change", () => {
    void act({ type: "jump", view: viewSelect.value });
  });
  modeToggle.addEventListener("change", () => {
    state.authorMode = modeToggle.checked;
    if (!state.authorMode) {
      state.selected = [];
      ops = null;
    }
    render();
  });

  // --- boot ----------------------------------------------------------------
  const boards = await listBoards();
  for (const summary of boards) boardSelect.appendChild(option(summary.id, summary.title));
  if (boards.length) await openBoard(boards[0].id);
  else meta.textContent = "no boards on this server";

  return {
    get state() {
      return state;
    },
    refresh,
    openBoard,
    act,
    setAuthorMode(on: boolean) {
      modeToggle.checked = on;
      state.authorMode = on;
      if (!on) {
        state.selected = [];
        ops = null;
      }
      render();
    },
    elements: { grid, tree, author, boardSelect, viewSelect, modeToggle, meta },
  };
}

// Self-boot when loaded as the page script; tests call initApp themselves.
const mount = typeof document !== "undefined" ? document.getElementById("app") : null;
if (mount && !mount.dataset.testHarness) {
  initApp(mount).catch((err) => showToast(String(err)));
}
