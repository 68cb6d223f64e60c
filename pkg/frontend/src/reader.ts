/**
 * Reader surface: the card grid for the current view.
 *
 * Frames arrive fully laid out (position, size, depth label, color group)
 * and are rendered in server order; nothing here reorders or re-derives
 * them. Pointer rules: left-click drills into a pile and does nothing on
 * an atom, right-click rolls up (the browser context menu is suppressed
 * on cards). Cards that enter the view get a short highlight flash.
 */

import { renderCard } from "./charts.js";
import type { SessionState } from "./types.js";

export const FLASH_MS = 200;

export interface ReaderHandlers {
  onDrill: (nodeId: string) => void;
  onRoll: (nodeId: string) => void;
  onSelect: (nodeId: string) => void;
  onHover: (nodeId: string, over: boolean) => void;
}

export interface ReaderOptions {
  authorMode: boolean;
  selected: ReadonlySet<string>;
  /** Membership of the previously rendered view; new cards flash. */
  previousView: ReadonlySet<string> | null;
}

export function renderFrames(
  container: HTMLElement,
  state: SessionState,
  handlers: ReaderHandlers,
  options: ReaderOptions,
): void {
  container.textContent = "";
  let maxBottom = 0;
  for (const frame of state.frames) {
    const card = document.createElement("div");
    card.className = "card";
    card.dataset.nodeId = frame.nodeId;
    card.dataset.widthWeight = String(frame.widthWeight);
    if (frame.isPile) card.classList.add("pile");
    if (frame.colorGroup !== null) card.classList.add(`color-${frame.colorGroup}`);
    if (options.selected.has(frame.nodeId)) card.classList.add("selected");
    card.style.left = `${frame.x}px`;
    card.style.top = `${frame.y}px`;
    card.style.width = `${frame.width}px`;
    card.style.height = `${frame.height}px`;
    maxBottom = Math.max(maxBottom, frame.y + frame.height);

    if (frame.depthLabel !== null) {
      const badge = document.createElement("div");
      badge.className = "depth-badge";
      badge.title = "levels below the view this session started from";
      badge.textContent = String(frame.depthLabel);
      card.appendChild(badge);
    }

    const payload = state.cards[frame.nodeId];
    if (payload) card.appendChild(renderCard(payload));

    card.addEventListener("click", (event) => {
      if (event.button !== 0) return;
      if (options.authorMode) {
        handlers.onSelect(frame.nodeId);
      } else if (frame.isPile) {
        handlers.onDrill(frame.nodeId);
      }
      // left-click on an atom in reader mode: nothing to open, no request
    });
    card.addEventListener("contextmenu", (event) => {
      event.preventDefault();
      if (!options.authorMode) handlers.onRoll(frame.nodeId);
    });
    card.addEventListener("mouseenter", () => handlers.onHover(frame.nodeId, true));
    card.addEventListener("mouseleave", () => handlers.onHover(frame.nodeId, false));

    if (options.previousView && !options.previousView.has(frame.nodeId)) {
      card.classList.add("flash");
      window.setTimeout(() => card.classList.remove("flash"), FLASH_MS);
    }
    container.appendChild(card);
  }
  // fixed layouts can run past the viewport; give the scroll area its height
  container.style.minHeight = `${maxBottom}px`;
}

export function cardElement(container: HTMLElement, nodeId: string): HTMLElement | null {
  return container.querySelector(`.card[data-node-id="${nodeId}"]`);
}

// =============================================================================
// Toasts
// =============================================================================

export function showToast(message: string, kind: "error" | "info" = "error"): void {
  let host = document.getElementById("toasts");
  if (!host) {
    host = document.createElement("div");
    host.id = "toasts";
    document.body.appendChild(host);
  }
  const toast = document.createElement("div");
  toast.className = `toast toast-${kind}`;
  toast.textContent = message;
  host.appendChild(toast);
  window.setTimeout(() => toast.remove(), 4000);
}
