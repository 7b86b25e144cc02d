import type { EvalResponse, Observation, Row } from "./state.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

/** Thin typed client for the serve-mode JSON API; one mutation in flight
 * at a time, later calls queue behind it. */
export class LabApi {
  private chain: Promise<unknown> = Promise.resolve();

  constructor(readonly base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(String(payload.error ?? response.statusText), response.status);
    }
    return payload as T;
  }

  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const next = this.chain.then(task, task);
    this.chain = next.catch(() => undefined);
    return next;
  }

  state(): Promise<Observation> {
    return this.request("GET", "/state");
  }

  graph(): Promise<{ nodes: string[]; edges: [string, string][] }> {
    return this.request("GET", "/graph");
  }

  load(document: unknown): Promise<Observation> {
    return this.enqueue(() => this.request("POST", "/load", document));
  }

  intervene(assignment: Row): Promise<Observation> {
    return this.enqueue(() =>
      this.request("POST", "/step", { type: "intervene", assignment }),
    );
  }

  announce(formula: string): Promise<Observation> {
    return this.enqueue(() =>
      this.request("POST", "/step", { type: "announce", formula }),
    );
  }

  undo(): Promise<Observation> {
    return this.enqueue(() => this.request("POST", "/undo"));
  }

  reset(): Promise<Observation> {
    return this.enqueue(() => this.request("POST", "/reset"));
  }

  /** Read-only; not queued behind mutations. */
  evaluate(formula: string): Promise<EvalResponse> {
    return this.request("POST", "/eval", { formula });
  }
}
