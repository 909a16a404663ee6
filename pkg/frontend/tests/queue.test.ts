import { describe, expect, it } from "vitest";

import { RequestQueue } from "../src/queue.js";

const tick = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

describe("RequestQueue", () => {
  it("runs tasks strictly in submission order", async () => {
    const q = new RequestQueue();
    const events: string[] = [];
    let release!: () => void;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });

    const first = q.run(async () => {
      events.push("start1");
      await gate;
      events.push("end1");
      return 1;
    });
    const second = q.run(async () => {
      events.push("start2");
      return 2;
    });

    await tick();
    // the second task must not start while the first is in flight
    expect(events).toEqual(["start1"]);
    expect(q.size).toBe(2);

    release();
    await expect(first).resolves.toBe(1);
    await expect(second).resolves.toBe(2);
    expect(events).toEqual(["start1", "end1", "start2"]);
    expect(q.size).toBe(0);
  });

  it("keeps going after a task rejects", async () => {
    const q = new RequestQueue();
    const first = q.run(async () => {
      throw new Error("boom");
    });
    const second = q.run(async () => "ok");
    await expect(first).rejects.toThrow("boom");
    await expect(second).resolves.toBe("ok");
    expect(q.size).toBe(0);
  });

  it("propagates each task's own result", async () => {
    const q = new RequestQueue();
    const results = await Promise.all([
      q.run(async () => "a"),
      q.run(async () => 2),
      q.run(async () => ({ nested: true })),
    ]);
    expect(results).toEqual(["a", 2, { nested: true }]);
  });

  it("is empty when idle", () => {
    expect(new RequestQueue().size).toBe(0);
  });
});
