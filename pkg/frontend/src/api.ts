/** Typed client for the convrec session service.
 *
 * Every payload is passed through verbatim: the UI renders what the engine
 * reports and never recomputes scores on its own.
 */

export type Mode = "baseline" | "hierarchical";

export interface TreeNodeJson {
  id: string;
  name: string;
  layer: string;
  score: number | null;
  gamma: number | null;
  children: TreeNodeJson[];
}

export interface TreeJson {
  act: string;
  flags: string[];
  nodes: TreeNodeJson[];
}

export interface CategoryScore {
  id: string;
  name: string;
  score: number;
}

export interface Diagnostics {
  portrait: { inputs: string[]; weights: number[]; empty: boolean };
  hier_portrait: { inputs: string[]; weights: number[] } | null;
  top_categories: { id: string; score: number }[];
  category_scores: CategoryScore[];
  mentioned: string[];
  act_logits: number[];
  context_empty: boolean;
  mode: string;
}

export interface TurnResponse {
  system_text: string;
  act: string;
  tree: TreeJson;
  diagnostics: Diagnostics;
  session_id: string;
  turn_index: number;
}

export interface SessionInfo {
  id: string;
  mode: Mode;
}

export interface HealthInfo {
  status: string;
  entities: number;
  items: number;
  categories: number;
  mode_default: Mode;
}

/** status 0 means the request never reached the service (network error). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Awaited<ReturnType<FetchLike>>;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `network failure: ${String(err)}`);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    if (response.status < 200 || response.status >= 300) {
      let detail = `HTTP ${response.status}`;
      try {
        const payload = (await response.json()) as { detail?: string };
        if (payload && typeof payload.detail === "string") {
          detail = payload.detail;
        }
      } catch {
        // body was not JSON; keep the generic detail
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(mode?: Mode): Promise<SessionInfo> {
    return this.request<SessionInfo>("POST", "/session", mode ? { mode } : {});
  }

  sendUtterance(sessionId: string, text: string): Promise<TurnResponse> {
    return this.request<TurnResponse>(
      "POST",
      `/session/${encodeURIComponent(sessionId)}/utterance`,
      { text },
    );
  }

  getState(sessionId: string): Promise<unknown> {
    return this.request("GET", `/session/${encodeURIComponent(sessionId)}/state`);
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request("DELETE", `/session/${encodeURIComponent(sessionId)}`);
  }

  health(): Promise<HealthInfo> {
    return this.request<HealthInfo>("GET", "/health");
  }
}
