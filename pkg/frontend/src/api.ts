/**
 * Thin fetch wrapper over the drillboard HTTP API.
 *
 * Every call resolves to the parsed JSON body or rejects with ApiError
 * carrying the status code and the server's reason string. Navigation
 * actions go through ActionQueue so a session never has more than one
 * request in flight; later actions wait for the earlier response.
 */

import type {
  ActionBody,
  BoardDetail,
  BoardSummary,
  MutationResult,
  OpsResponse,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  reason: string;

  constructor(status: number, reason: string) {
    super(`${status}: ${reason}`);
    this.name = "ApiError";
    this.status = status;
    this.reason = reason;
  }
}

async function fetchJson<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let reason = response.statusText || `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as Record<string, unknown>;
      if (typeof body.reason === "string") reason = body.reason;
      else if (typeof body.detail === "string") reason = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, reason);
  }
  return (await response.json()) as T;
}

function postJson<T>(path: string, body: unknown): Promise<T> {
  return fetchJson<T>(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

// =============================================================================
// Endpoints
// =============================================================================

export function listBoards(): Promise<BoardSummary[]> {
  return fetchJson<BoardSummary[]>("/api/drillboards");
}

export function getBoard(boardId: string): Promise<BoardDetail> {
  return fetchJson<BoardDetail>(`/api/drillboards/${encodeURIComponent(boardId)}`);
}

export function getOps(boardId: string, nodeIds: string[]): Promise<OpsResponse> {
  const nodes = encodeURIComponent(nodeIds.join(","));
  return fetchJson<OpsResponse>(
    `/api/drillboards/${encodeURIComponent(boardId)}/ops?nodes=${nodes}`,
  );
}

export function openSession(
  boardId: string,
  options: { view?: string; viewport?: { width: number; height: number } } = {},
): Promise<{ sessionId: string; state: SessionState }> {
  return postJson(`/api/drillboards/${encodeURIComponent(boardId)}/sessions`, options);
}

export function getSession(sessionId: string): Promise<SessionState> {
  return fetchJson<SessionState>(`/api/sessions/${encodeURIComponent(sessionId)}`);
}

export function postMutation(boardId: string, body: unknown): Promise<MutationResult> {
  return postJson<MutationResult>(
    `/api/drillboards/${encodeURIComponent(boardId)}/mutations`,
    body,
  );
}

// =============================================================================
// Action serialization
// =============================================================================

export class ActionQueue {
  private tail: Promise<unknown> = Promise.resolve();

  /** Chain an action behind whatever is already in flight. The returned
   * promise settles with this action's own result; a failed predecessor
   * does not poison the queue. */
  post(sessionId: string, action: ActionBody): Promise<SessionState> {
    const run = () =>
      postJson<SessionState>(
        `/api/sessions/${encodeURIComponent(sessionId)}/actions`,
        action,
      );
    const next = this.tail.then(run, run);
    this.tail = next.catch(() => undefined);
    return next;
  }
}
