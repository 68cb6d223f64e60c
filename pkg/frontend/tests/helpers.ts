/**
 * Test scaffolding: fixture loading and a scripted stand-in for fetch.
 *
 * Fixtures are verbatim API responses captured from the real server
 * (see scripts/make_fixtures.py), so the client is exercised against
 * payloads it would actually receive.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { SessionState } from "../src/types.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, `${name}.json`), "utf-8")) as T;
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export interface StubResponse {
  status?: number;
  body: unknown;
  /** When set, the response is withheld until release() is called. */
  deferred?: boolean;
}

type Route = (call: RecordedCall) => StubResponse | undefined;

export interface FetchStub {
  fetch: typeof fetch;
  calls: RecordedCall[];
  /** Calls whose responses are still withheld, in arrival order. */
  pending: (() => void)[];
  releaseNext: () => void;
}

function asResponse(stub: StubResponse): Response {
  const status = stub.status ?? 200;
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => structuredClone(stub.body),
  } as unknown as Response;
}

/** Build a fetch replacement from a routing function. Unmatched requests
 * fail the test loudly with a 500. */
export function makeFetchStub(route: Route): FetchStub {
  const calls: RecordedCall[] = [];
  const pending: (() => void)[] = [];
  const stubFetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const call: RecordedCall = {
      url: String(input),
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : null,
    };
    calls.push(call);
    const stub = route(call) ?? {
      status: 500,
      body: { reason: `unrouted request: ${call.method} ${call.url}` },
    };
    if (stub.deferred) {
      await new Promise<void>((resolve) => pending.push(resolve));
    }
    return asResponse(stub);
  }) as typeof fetch;
  return {
    fetch: stubFetch,
    calls,
    pending,
    releaseNext: () => {
      const release = pending.shift();
      if (release) release();
    },
  };
}

/** Routing table for the demo board fixtures. Stateful in one way only:
 * after a mutation, newly opened sessions see the post-merge board. */
export function demoServer(): FetchStub {
  const boards = loadFixture("boards");
  const board = loadFixture("board");
  const sessionOpen = loadFixture<{ sessionId: string; state: SessionState }>("session_open");
  const sessionAfterMerge = loadFixture("session_after_merge");
  const stateDrill = loadFixture<SessionState>("state_drill");
  const stateRoll = loadFixture<SessionState>("state_roll");
  const stateJump = loadFixture<SessionState>("state_jump");
  const opsEnabled = loadFixture("ops_enabled");
  const opsMixed = loadFixture("ops_mixed");
  const mutationOk = loadFixture("mutation_ok");
  const errorConflict = loadFixture<{ status: number; body: unknown }>("error_conflict");
  let mutated = false;

  return makeFetchStub((call) => {
    const { url, method, body } = call;
    if (url === "/api/drillboards") return { body: boards };
    if (url === "/api/drillboards/demo") return { body: board };
    if (url.startsWith("/api/drillboards/demo/ops?nodes=")) {
      const nodes = decodeURIComponent(url.split("nodes=")[1]);
      if (nodes === "atom-9,atom-10") return { body: opsEnabled };
      if (nodes === "pile-5,atom-9") return { body: opsMixed };
      return { status: 409, body: { reason: `no ops fixture for ${nodes}` } };
    }
    if (url === "/api/drillboards/demo/sessions" && method === "POST") {
      return { body: mutated ? sessionAfterMerge : sessionOpen };
    }
    if (url === "/api/drillboards/demo/mutations" && method === "POST") {
      mutated = true;
      return { body: mutationOk };
    }
    if (/^\/api\/sessions\/[^/]+\/actions$/.test(url) && method === "POST") {
      const action = body as { type: string; nodeId?: string; view?: string };
      if (action.type === "drill" && action.nodeId === "pile-3") return { body: stateDrill };
      if (action.type === "roll" && action.nodeId === "pile-1") return { body: stateRoll };
      if (action.type === "roll" && action.nodeId === "pile-3") {
        return { status: errorConflict.status, body: errorConflict.body };
      }
      if (action.type === "jump" && action.view === "novice") return { body: stateJump };
      return { status: 409, body: { reason: `no action fixture for ${JSON.stringify(action)}` } };
    }
    return undefined;
  });
}

/** Let queued microtasks and zero-delay timers run. */
export async function flush(): Promise<void> {
  for (let i = 0; i < 4; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function click(el: Element): void {
  el.dispatchEvent(new MouseEvent("click", { button: 0, bubbles: true }));
}

export function rightClick(el: Element): boolean {
  const event = new MouseEvent("contextmenu", { bubbles: true, cancelable: true });
  el.dispatchEvent(event);
  return event.defaultPrevented;
}
