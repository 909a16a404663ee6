/** One in-flight request per session: tasks run strictly in submission order,
 * and a rejected task never blocks the ones queued behind it. This is what
 * keeps the transcript in request order even when responses are slow. */
export class RequestQueue {
  private tail: Promise<unknown> = Promise.resolve();
  private pending = 0;

  run<T>(task: () => Promise<T>): Promise<T> {
    this.pending += 1;
    const result = this.tail.then(task);
    this.tail = result.then(
      () => {
        this.pending -= 1;
      },
      () => {
        this.pending -= 1;
      },
    );
    return result;
  }

  get size(): number {
    return this.pending;
  }
}
