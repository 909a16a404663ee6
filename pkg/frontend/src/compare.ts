import { ApiClient, Mode } from "./api.js";
import { ChatSession, SendOutcome } from "./session.js";

export interface ColumnState {
  mode: Mode;
  session: ChatSession;
  /** true after the column's last request failed; its panel shows old data */
  stale: boolean;
}

/** Side-by-side view: the same input goes to one session per mode, and a
 * failure in one leg marks only that column stale. */
export class CompareView {
  readonly left: ColumnState;
  readonly right: ColumnState;

  constructor(api: ApiClient) {
    this.left = { mode: "baseline", session: new ChatSession(api, "baseline"), stale: false };
    this.right = {
      mode: "hierarchical",
      session: new ChatSession(api, "hierarchical"),
      stale: false,
    };
  }

  async start(): Promise<void> {
    await Promise.all([this.left.session.start(), this.right.session.start()]);
  }

  async send(text: string): Promise<{ left: SendOutcome; right: SendOutcome }> {
    const [leftOutcome, rightOutcome] = await Promise.all([
      this.left.session.send(text),
      this.right.session.send(text),
    ]);
    if (leftOutcome !== "rejected") {
      this.left.stale = leftOutcome === "failed";
    }
    if (rightOutcome !== "rejected") {
      this.right.stale = rightOutcome === "failed";
    }
    return { left: leftOutcome, right: rightOutcome };
  }

  /** The headline comparison: same act on both sides but a different middle
   * selection means the interest models disagree about *why*. */
  middlesDiverge(): boolean {
    const a = this.left.session.topMiddleId();
    const b = this.right.session.topMiddleId();
    return a !== null && b !== null && a !== b;
  }

  actsAgree(): boolean {
    return (
      this.left.session.act !== null && this.left.session.act === this.right.session.act
    );
  }
}
