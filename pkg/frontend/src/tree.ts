/**
 * Hierarchy treeview: every node in the forest, nested as on the server.
 *
 * Titles of nodes in the current view are bold; everything else is gray.
 * Hovering a tree entry highlights the matching card and vice versa, so
 * the handlers here only report ids; the app owns the pairing.
 */

import type { TreeNodePayload } from "./types.js";

export interface TreeHandlers {
  onHover: (nodeId: string, over: boolean) => void;
}

function renderNode(node: TreeNodePayload, handlers: TreeHandlers): HTMLLIElement {
  const li = document.createElement("li");
  const entry = document.createElement("span");
  entry.className = node.visible ? "tree-title visible" : "tree-title hidden";
  entry.dataset.nodeId = node.id;
  entry.textContent = node.isPile ? `▣ ${node.title}` : node.title;
  entry.addEventListener("mouseenter", () => handlers.onHover(node.id, true));
  entry.addEventListener("mouseleave", () => handlers.onHover(node.id, false));
  li.appendChild(entry);
  if (node.children.length) {
    const ul = document.createElement("ul");
    for (const child of node.children) ul.appendChild(renderNode(child, handlers));
    li.appendChild(ul);
  }
  return li;
}

export function renderTree(
  container: HTMLElement,
  roots: TreeNodePayload[],
  handlers: TreeHandlers,
): void {
  container.textContent = "";
  const ul = document.createElement("ul");
  ul.className = "tree";
  for (const root of roots) ul.appendChild(renderNode(root, handlers));
  container.appendChild(ul);
}

/** The tree entry element for a node id, if rendered. */
export function treeEntry(container: HTMLElement, nodeId: string): HTMLElement | null {
  return container.querySelector(`[data-node-id="${nodeId}"]`);
}
