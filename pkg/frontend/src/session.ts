import {
  ApiClient,
  ApiError,
  CategoryScore,
  Mode,
  TreeJson,
  TurnResponse,
} from "./api.js";
import { RequestQueue } from "./queue.js";

export interface Bubble {
  role: "user" | "system";
  text: string;
}

export type SendOutcome = "ok" | "rejected" | "failed";

const BAR_LIMIT = 6;

/** Per-session view state. Everything shown in the UI lives here, and all of
 * it comes straight out of API responses — scores are never recomputed
 * client-side, and the stored tree is the response's tree JSON verbatim. */
export class ChatSession {
  id: string | null = null;
  mode: Mode;
  transcript: Bubble[] = [];
  bars: CategoryScore[] = [];
  tree: TreeJson | null = null;
  act: string | null = null;
  lastResponse: TurnResponse | null = null;
  /** retry banner after a failed request; null when healthy */
  banner: string | null = null;
  /** informational notice, e.g. after an expired session was replaced */
  notice: string | null = null;
  /** the utterance to resend when the user hits retry */
  pendingText: string | null = null;

  private readonly queue = new RequestQueue();

  constructor(
    private readonly api: ApiClient,
    mode: Mode = "hierarchical",
  ) {
    this.mode = mode;
  }

  async start(): Promise<void> {
    const info = await this.api.createSession(this.mode);
    this.id = info.id;
    this.mode = info.mode;
  }

  /** Switching modes starts over: fresh session, empty view state. */
  async switchMode(mode: Mode): Promise<void> {
    this.mode = mode;
    this.transcript = [];
    this.bars = [];
    this.tree = null;
    this.act = null;
    this.lastResponse = null;
    this.banner = null;
    this.notice = null;
    this.pendingText = null;
    await this.start();
  }

  /** Queue one utterance. Empty input never leaves the client; a failed
   * request surfaces the retry banner and leaves the transcript untouched. */
  send(text: string): Promise<SendOutcome> {
    if (text.trim() === "") {
      return Promise.resolve("rejected");
    }
    return this.queue.run(() => this.exchange(text));
  }

  retry(): Promise<SendOutcome> {
    if (this.pendingText === null) {
      return Promise.resolve("rejected");
    }
    const text = this.pendingText;
    this.pendingText = null;
    return this.send(text);
  }

  private async exchange(text: string): Promise<SendOutcome> {
    if (this.id === null) {
      await this.start();
    }
    let response: TurnResponse;
    try {
      response = await this.api.sendUtterance(this.id as string, text);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        // the server dropped the session (timeout / restart): replace it and
        // run the utterance against the fresh one
        try {
          await this.start();
          this.notice = "session expired; started a new one";
          response = await this.api.sendUtterance(this.id as string, text);
        } catch {
          return this.fail(text);
        }
      } else {
        return this.fail(text);
      }
    }
    this.apply(text, response);
    return "ok";
  }

  private fail(text: string): SendOutcome {
    this.banner = "request failed — check the service and retry";
    this.pendingText = text;
    return "failed";
  }

  private apply(text: string, response: TurnResponse): void {
    this.transcript.push({ role: "user", text });
    this.transcript.push({ role: "system", text: response.system_text });
    this.bars = response.diagnostics.category_scores.slice(0, BAR_LIMIT);
    this.tree = response.tree;
    this.act = response.act;
    this.lastResponse = response;
    this.banner = null;
    this.pendingText = null;
  }

  /** Id of the highest-ranked middle node in the last tree, if any. */
  topMiddleId(): string | null {
    if (this.tree === null || this.tree.nodes.length === 0) {
      return null;
    }
    return this.tree.nodes[0].id;
  }
}
