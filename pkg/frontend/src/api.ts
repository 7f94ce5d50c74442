/** Typed client for the session service JSON API.
 *
 * Everything the UI shows comes through this module; it never derives
 * relations or winnow sets itself. Engine errors arrive as one JSON
 * object with a stable code and surface here as ApiError.
 */

export interface AttributeJson {
  name: string;
  domain: "C" | "Q";
}

export interface SchemaJson {
  attributes: AttributeJson[];
}

/** Attribute values travel as exact text: rationals like "15000" or "3/2". */
export interface RowJson {
  key: string;
  values: Record<string, string>;
}

export type Pair = [string, string];

export type SourceJson =
  | { kind: "finite"; edges: Pair[] }
  | { kind: "formula"; text: string };

/** Discard/protect payload of a contract request. Edge lists over row
 * keys are accepted on formula sessions too (the server point-encodes
 * them), which is what pair staging in the UI sends. */
export type RelPayload = { edges: Pair[] } | { formula: string };

export interface StrategyJson {
  path: "fast" | "incremental";
  s_source: string;
  s_hits: number;
  candidates: number;
}

/** Logged con/protect payloads as the server canonicalizes them. */
export interface LoggedRel {
  kind: "formula" | "edges" | "points";
  text?: string;
  edges?: Pair[];
}

export interface StepRecord {
  type: "contract" | "undo";
  at: string;
  mode?: string;
  result_mode?: string;
  con?: LoggedRel;
  protect?: LoggedRel | null;
  contractor_digest?: string;
  winnow_digest?: string;
  strategy?: StrategyJson;
}

export interface WinnowKeys {
  keys: string[];
}

export interface SessionSummary {
  id: string;
  created: string;
  updated: string;
  kind: "finite" | "formula";
  step_count: number;
  undoable: boolean;
  schema: SchemaJson;
  dataset: RowJson[];
  source: SourceJson;
  winnow: WinnowKeys;
  history: StepRecord[];
}

export interface ContractResult {
  mode: string;
  strata: number;
  contractor: SourceJson;
  contracted: SourceJson;
  contractor_digest: string;
  forced?: SourceJson;
  protected?: SourceJson;
}

export interface ContractResponse {
  result: ContractResult;
  winnow_before: WinnowKeys;
  winnow_after: WinnowKeys;
  strategy: StrategyJson;
  step_count: number;
  updated: string;
}

export interface WinnowResponse {
  keys: string[];
  rows: RowJson[];
}

export interface ExportDoc {
  id: string;
  created: string;
  updated: string;
  schema: SchemaJson;
  dataset: RowJson[];
  initial_source: SourceJson;
  current_source: SourceJson;
  steps: StepRecord[];
  winnow: {
    initial: string[];
    current: string[];
    after_step: string[][];
  };
}

export interface CreateSessionDoc {
  id?: string;
  schema: SchemaJson;
  dataset: RowJson[];
  source: SourceJson;
}

export interface ContractRequest {
  mode?: "prefix" | "meet";
  con: RelPayload;
  protect?: RelPayload;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SessionApi {
  private readonly doFetch: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    // rebind: a bare window.fetch loses its `this` when stored on a class
    const f = fetchImpl ?? fetch;
    this.doFetch = (input, init) => f(input, init);
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.doFetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await res.text();
    let doc: unknown = null;
    try {
      doc = text.length ? JSON.parse(text) : null;
    } catch {
      doc = null;
    }
    if (!res.ok) {
      const err = (doc ?? {}) as { code?: string; message?: string; details?: Record<string, unknown> };
      throw new ApiError(
        res.status,
        err.code ?? "HTTP_" + res.status,
        err.message ?? res.statusText,
        err.details ?? {},
      );
    }
    return doc as T;
  }

  createSession(doc: CreateSessionDoc): Promise<SessionSummary> {
    return this.call("POST", "/sessions", doc);
  }

  getSession(id: string): Promise<SessionSummary> {
    return this.call("GET", "/sessions/" + encodeURIComponent(id));
  }

  contract(id: string, req: ContractRequest): Promise<ContractResponse> {
    return this.call("POST", "/sessions/" + encodeURIComponent(id) + "/contract", req);
  }

  undo(id: string): Promise<SessionSummary> {
    return this.call("POST", "/sessions/" + encodeURIComponent(id) + "/undo");
  }

  winnow(id: string): Promise<WinnowResponse> {
    return this.call("GET", "/sessions/" + encodeURIComponent(id) + "/winnow");
  }

  exportSession(id: string): Promise<ExportDoc> {
    return this.call("GET", "/sessions/" + encodeURIComponent(id) + "/export");
  }
}
